#include "equilens/pointwise.hpp"

#include <algorithm>
#include <cmath>

#include "equilens/error.hpp"

namespace equilens {

NodeTensor relu(const NodeTensor& x) {
  NodeTensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

NodeTensor relu_backward(const NodeTensor& x, const NodeTensor& grad_out) {
  require_shape(grad_out, x.order, x.n, x.channels, "relu backward");
  NodeTensor dx = grad_out;
  for (std::size_t i = 0; i < dx.data.size(); ++i) {
    if (!(x.data[i] > 0.0)) dx.data[i] = 0.0;
  }
  return dx;
}

NodeTensor softmax(const NodeTensor& logits) {
  NodeTensor p = logits;
  for (std::size_t pos = 0; pos < p.positions(); ++pos) {
    double* row = p.data.data() + pos * p.channels;
    const double m = *std::max_element(row, row + p.channels);
    double total = 0.0;
    for (std::size_t c = 0; c < p.channels; ++c) {
      row[c] = std::exp(row[c] - m);
      total += row[c];
    }
    for (std::size_t c = 0; c < p.channels; ++c) row[c] /= total;
  }
  return p;
}

NodeTensor softmax_backward(const NodeTensor& probabilities, const NodeTensor& grad_out) {
  require_shape(grad_out, probabilities.order, probabilities.n, probabilities.channels,
                "softmax backward");
  NodeTensor dx = grad_out;
  for (std::size_t pos = 0; pos < dx.positions(); ++pos) {
    double dot = 0.0;
    for (std::size_t c = 0; c < dx.channels; ++c) {
      dot += probabilities.at(pos, c) * grad_out.at(pos, c);
    }
    for (std::size_t c = 0; c < dx.channels; ++c) {
      dx.at(pos, c) = probabilities.at(pos, c) * (grad_out.at(pos, c) - dot);
    }
  }
  return dx;
}

double softmax_cross_entropy(std::span<const double> logits, int target, std::span<double> grad) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size()) {
    throw InputError("cross-entropy target out of range");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - m);
  const double log_z = m + std::log(total);
  if (!grad.empty()) {
    for (std::size_t c = 0; c < logits.size(); ++c) {
      grad[c] = std::exp(logits[c] - log_z) - (static_cast<int>(c) == target ? 1.0 : 0.0);
    }
  }
  return log_z - logits[static_cast<std::size_t>(target)];
}

NodeTensor instance_norm(const NodeTensor& x, InstanceNormCache* cache, double epsilon) {
  const std::size_t positions = x.positions();
  NodeTensor y = x;
  std::vector<double> inv_std(x.channels);
  for (std::size_t c = 0; c < x.channels; ++c) {
    double mean = 0.0;
    for (std::size_t pos = 0; pos < positions; ++pos) mean += x.at(pos, c);
    mean /= static_cast<double>(positions);
    double var = 0.0;
    for (std::size_t pos = 0; pos < positions; ++pos) {
      const double d = x.at(pos, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(positions);
    inv_std[c] = 1.0 / std::sqrt(var + epsilon);
    for (std::size_t pos = 0; pos < positions; ++pos) {
      y.at(pos, c) = (x.at(pos, c) - mean) * inv_std[c];
    }
  }
  if (cache) {
    cache->inv_std = std::move(inv_std);
    cache->normalized = y;
  }
  return y;
}

NodeTensor instance_norm_backward(const InstanceNormCache& cache, const NodeTensor& grad_out) {
  const NodeTensor& y = cache.normalized;
  require_shape(grad_out, y.order, y.n, y.channels, "instance norm backward");
  const std::size_t positions = y.positions();
  const double count = static_cast<double>(positions);
  NodeTensor dx = grad_out;
  for (std::size_t c = 0; c < y.channels; ++c) {
    double sum_dy = 0.0;
    double sum_dy_y = 0.0;
    for (std::size_t pos = 0; pos < positions; ++pos) {
      sum_dy += grad_out.at(pos, c);
      sum_dy_y += grad_out.at(pos, c) * y.at(pos, c);
    }
    for (std::size_t pos = 0; pos < positions; ++pos) {
      dx.at(pos, c) = cache.inv_std[c] / count *
                      (count * grad_out.at(pos, c) - sum_dy - y.at(pos, c) * sum_dy_y);
    }
  }
  return dx;
}

ChannelMix::ChannelMix(std::size_t d_in_, std::size_t d_out_)
    : d_in(d_in_), d_out(d_out_), weights(d_in_ * d_out_, 0.0), bias(d_out_, 0.0) {}

NodeTensor ChannelMix::forward(const NodeTensor& x) const {
  if (x.channels != d_in) {
    throw DimensionError("channel mix expects " + std::to_string(d_in) + " channel(s), got " +
                         std::to_string(x.channels));
  }
  NodeTensor y = NodeTensor::zeros(x.order, x.n, d_out);
  for (std::size_t pos = 0; pos < x.positions(); ++pos) {
    for (std::size_t o = 0; o < d_out; ++o) y.at(pos, o) = bias[o];
    for (std::size_t c = 0; c < d_in; ++c) {
      const double v = x.at(pos, c);
      const double* w = weights.data() + c * d_out;
      for (std::size_t o = 0; o < d_out; ++o) y.at(pos, o) += v * w[o];
    }
  }
  return y;
}

NodeTensor ChannelMix::backward(const NodeTensor& x, const NodeTensor& grad_out,
                                ChannelMix& grad) const {
  require_shape(grad_out, x.order, x.n, d_out, "channel mix backward");
  NodeTensor dx = NodeTensor::zeros(x.order, x.n, d_in);
  for (std::size_t pos = 0; pos < x.positions(); ++pos) {
    for (std::size_t o = 0; o < d_out; ++o) grad.bias[o] += grad_out.at(pos, o);
    for (std::size_t c = 0; c < d_in; ++c) {
      const double v = x.at(pos, c);
      const double* w = weights.data() + c * d_out;
      double* gw = grad.weights.data() + c * d_out;
      double acc = 0.0;
      for (std::size_t o = 0; o < d_out; ++o) {
        gw[o] += v * grad_out.at(pos, o);
        acc += w[o] * grad_out.at(pos, o);
      }
      dx.at(pos, c) = acc;
    }
  }
  return dx;
}

}  // namespace equilens
