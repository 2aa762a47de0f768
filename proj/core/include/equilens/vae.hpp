#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equilens/equivariant_layer.hpp"
#include "equilens/error.hpp"
#include "equilens/graph.hpp"
#include "equilens/pointwise.hpp"

namespace equilens {

inline constexpr double kLogvarMin = -20.0;
inline constexpr double kLogvarMax = 20.0;

struct VaeConfig {
  std::size_t n = 6;
  std::size_t node_categories = 4;  // d_A, including not-a-node
  std::size_t edge_categories = 3;  // d_E, including not-an-edge
  std::size_t hidden = 8;

  friend bool operator==(const VaeConfig&, const VaeConfig&) = default;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;
  std::size_t hidden = 8;
  // Minibatch gradients with a larger global L2 norm are rescaled to this
  // norm before the step. 0 turns clipping off.
  double grad_clip = 5.0;
};

// Every weight of the encoder and decoder. Each hidden block is
// equivariant linear -> 1x1 channel mix -> ReLU -> instance norm.
//
// Encoder: hybrid (V, E) -> matrix, two matrix -> matrix blocks, then a
//          matrix -> vector head with two channels (mu, log sigma^2).
// Decoder: vector -> matrix, two matrix -> matrix blocks, then an edge head
//          (matrix -> matrix, symmetrized by adding its transpose) and a node
//          head (matrix -> vector) producing category logits.
struct VaeParams {
  VaeConfig config;

  HybridLayer enc_in;
  ChannelMix enc_in_mix;
  std::array<EquivariantLayer, 2> enc_hidden;
  std::array<ChannelMix, 2> enc_hidden_mix;
  EquivariantLayer enc_head;

  EquivariantLayer dec_in;
  ChannelMix dec_in_mix;
  std::array<EquivariantLayer, 2> dec_hidden;
  std::array<ChannelMix, 2> dec_hidden_mix;
  EquivariantLayer dec_edge_head;
  EquivariantLayer dec_node_head;

  static VaeParams zeros(const VaeConfig& config);
  // Weights i.i.d. normal with standard deviation 1/sqrt(fan_in). For an
  // equivariant layer fan_in = d_in * basis size (each basis element is a
  // mean); channel mixes use d_in. Biases zero.
  static VaeParams initialize(const VaeConfig& config, std::uint64_t seed);

  // Calls visit(name, layer) for every EquivariantLayer and ChannelMix in a
  // fixed canonical order.
  template <class Visitor>
  void visit_layers(Visitor&& visit);
  template <class Visitor>
  void visit_layers(Visitor&& visit) const;

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> values);
  void scale_add(double alpha, const VaeParams& other);  // this += alpha * other
};

struct Posterior {
  Vector mu;
  Vector logvar;  // clamped to [kLogvarMin, kLogvarMax]
};

struct DecoderOutput {
  NodeTensor node_logits;  // order 1, d_A channels
  NodeTensor edge_logits;  // order 2, d_E channels, exactly symmetric
};

struct ElboParts {
  double loss = 0.0;
  double recon_nodes = 0.0;
  double recon_edges = 0.0;
  double kl = 0.0;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& message)
      : Error(message), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// One-hot node and edge tensors of a graph matching `config`.
NodeTensor node_input(const Graph& g);
NodeTensor edge_input(const Graph& g);

Posterior encode(const VaeParams& params, const Graph& g);

Vector standard_normal_noise(std::size_t n, std::uint64_t seed);
// z = mu + exp(logvar / 2) * eps with eps drawn from `seed`; logvar is clamped.
Vector reparam_sample(const Vector& mu, const Vector& logvar, std::uint64_t seed);

DecoderOutput decode(const VaeParams& params, const Vector& z);

// Argmax per slot, lowest category on ties. The diagonal and every edge
// slot touching a decoded not-a-node are set to not-an-edge.
Graph argmax_graph(const DecoderOutput& out, const VaeConfig& config);
Graph decode_graph(const VaeParams& params, const Vector& z);

// Negative ELBO with a single reparameterized sample. Node terms are summed
// over all n slots, edge terms over i < j; the KL is in closed form.
ElboParts elbo(const VaeParams& params, const Graph& g, std::uint64_t seed);
ElboParts elbo_with_noise(const VaeParams& params, const Graph& g, const Vector& eps);
// Same value; adds d(loss)/d(params) * weight into `grad`.
ElboParts elbo_gradient(const VaeParams& params, const Graph& g, const Vector& eps,
                        VaeParams& grad, double weight = 1.0);

// Sign of every ReLU input over one encode/decode pass. The loss is smooth
// on any parameter segment along which this pattern stays constant.
std::vector<bool> relu_pattern(const VaeParams& params, const Graph& g, const Vector& eps);

struct TrainResult {
  VaeParams params;
  std::vector<double> loss_curve;  // mean training loss per epoch
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

// Plain minibatch SGD on the mean negative ELBO. Shuffling and the
// per-sample noise derive from config.seed only. Throws TrainingDiverged on
// a non-finite loss.
TrainResult train(const GraphDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});
// Continues from given parameters.
TrainResult train_from(VaeParams params, const GraphDataset& dataset, const TrainConfig& config,
                       const EpochCallback& on_epoch = {});

VaeConfig config_for(const GraphDataset& dataset, std::size_t hidden);

// Parameter snapshot, format tag "equilens-vae/1": config plus one entry per
// layer with flat weights in canonical partition order.
std::string dump_params(const VaeParams& params);
VaeParams parse_params(std::string_view json_text, std::string_view source = "<memory>");
VaeParams read_params(const std::filesystem::path& path);
void write_params(const std::filesystem::path& path, const VaeParams& params);

TrainConfig parse_train_config(std::string_view json_text, std::string_view source = "<memory>");
std::string dump_train_config(const TrainConfig& config);

// ---------------------------------------------------------------------------

template <class Visitor>
void VaeParams::visit_layers(Visitor&& visit) {
  visit("enc.in.node", enc_in.node_part);
  visit("enc.in.edge", enc_in.edge_part);
  visit("enc.in.mix", enc_in_mix);
  for (std::size_t i = 0; i < enc_hidden.size(); ++i) {
    visit("enc.hidden" + std::to_string(i), enc_hidden[i]);
    visit("enc.hidden" + std::to_string(i) + ".mix", enc_hidden_mix[i]);
  }
  visit("enc.head", enc_head);
  visit("dec.in", dec_in);
  visit("dec.in.mix", dec_in_mix);
  for (std::size_t i = 0; i < dec_hidden.size(); ++i) {
    visit("dec.hidden" + std::to_string(i), dec_hidden[i]);
    visit("dec.hidden" + std::to_string(i) + ".mix", dec_hidden_mix[i]);
  }
  visit("dec.edge_head", dec_edge_head);
  visit("dec.node_head", dec_node_head);
}

template <class Visitor>
void VaeParams::visit_layers(Visitor&& visit) const {
  const_cast<VaeParams*>(this)->visit_layers(
      [&](const std::string& name, auto& layer) { visit(name, std::as_const(layer)); });
}

}  // namespace equilens
