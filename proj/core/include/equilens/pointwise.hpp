#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "equilens/tensor.hpp"

namespace equilens {

inline constexpr double kInstanceNormEpsilon = 1e-5;

NodeTensor relu(const NodeTensor& x);
NodeTensor relu_backward(const NodeTensor& x, const NodeTensor& grad_out);

// Softmax over the channel (category) axis at every position.
NodeTensor softmax(const NodeTensor& logits);
NodeTensor softmax_backward(const NodeTensor& probabilities, const NodeTensor& grad_out);

// -log softmax(logits)[target] for one position; `grad` (if non-empty)
// receives probabilities - one_hot(target).
double softmax_cross_entropy(std::span<const double> logits, int target,
                             std::span<double> grad = {});

// Per-channel normalization over all node positions:
// y = (x - mean) / sqrt(var + eps) with the biased variance.
struct InstanceNormCache {
  std::vector<double> inv_std;  // per channel
  NodeTensor normalized;
};
NodeTensor instance_norm(const NodeTensor& x, InstanceNormCache* cache = nullptr,
                         double epsilon = kInstanceNormEpsilon);
NodeTensor instance_norm_backward(const InstanceNormCache& cache, const NodeTensor& grad_out);

// 1x1 convolution: the same d_in -> d_out affine map at every position.
struct ChannelMix {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<double> weights;  // [c_in][c_out]
  std::vector<double> bias;     // [c_out]

  ChannelMix() = default;
  ChannelMix(std::size_t d_in, std::size_t d_out);

  NodeTensor forward(const NodeTensor& x) const;
  NodeTensor backward(const NodeTensor& x, const NodeTensor& grad_out, ChannelMix& grad) const;
};

}  // namespace equilens
