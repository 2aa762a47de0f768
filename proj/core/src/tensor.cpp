#include "equilens/tensor.hpp"

#include <string>

#include "equilens/error.hpp"

namespace equilens {

NodeTensor NodeTensor::zeros(int order, std::size_t n, std::size_t channels) {
  if (order != 1 && order != 2) throw InputError("node tensors have order 1 or 2");
  NodeTensor t;
  t.order = order;
  t.n = n;
  t.channels = channels;
  t.data.assign(t.positions() * channels, 0.0);
  return t;
}

NodeTensor permute(const NodeTensor& x, const Permutation& p) {
  if (p.size() != x.n) throw DimensionError("permutation size does not match tensor node count");
  NodeTensor out = NodeTensor::zeros(x.order, x.n, x.channels);
  for (std::size_t pos = 0; pos < x.positions(); ++pos) {
    const std::size_t target =
        x.order == 1 ? p(pos) : p(pos / x.n) * x.n + p(pos % x.n);
    for (std::size_t c = 0; c < x.channels; ++c) out.at(target, c) = x.at(pos, c);
  }
  return out;
}

NodeTensor concat_channels(const NodeTensor& a, const NodeTensor& b) {
  if (a.order != b.order || a.n != b.n) {
    throw DimensionError("cannot concatenate tensors of different order or node count");
  }
  NodeTensor out = NodeTensor::zeros(a.order, a.n, a.channels + b.channels);
  for (std::size_t pos = 0; pos < a.positions(); ++pos) {
    for (std::size_t c = 0; c < a.channels; ++c) out.at(pos, c) = a.at(pos, c);
    for (std::size_t c = 0; c < b.channels; ++c) out.at(pos, a.channels + c) = b.at(pos, c);
  }
  return out;
}

void require_shape(const NodeTensor& x, int order, std::size_t n, std::size_t channels,
                   const char* what) {
  if (x.order != order || x.n != n || x.channels != channels ||
      x.data.size() != x.positions() * x.channels) {
    throw DimensionError(std::string(what) + ": expected order-" + std::to_string(order) +
                         " tensor with n=" + std::to_string(n) + " and " +
                         std::to_string(channels) + " channel(s), got order-" +
                         std::to_string(x.order) + " n=" + std::to_string(x.n) + " with " +
                         std::to_string(x.channels));
  }
}

}  // namespace equilens
