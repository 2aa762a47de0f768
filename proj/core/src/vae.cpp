#include "equilens/vae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <type_traits>
#include <utility>

namespace equilens {

using nlohmann::json;

namespace {

constexpr std::string_view kParamsFormat = "equilens-vae/1";

// SplitMix64 finalizer; derives independent stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::uint64_t x = a ^ (b * 0x9e3779b97f4a7c15ULL) ^ (c * 0xc2b2ae3d27d4eb4fULL);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_normal(std::vector<double>& values, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& v : values) v = normal(rng);
}

// ---------------------------------------------------------------------------
// Traced forward passes

// linear -> mix -> relu -> instance norm
struct BlockTrace {
  NodeTensor input;
  NodeTensor linear_out;
  NodeTensor mixed;
  InstanceNormCache norm;
  NodeTensor output;
};

void block_forward(const NodeTensor& linear_out, const ChannelMix& mix, BlockTrace& t) {
  t.linear_out = linear_out;
  t.mixed = mix.forward(t.linear_out);
  t.output = instance_norm(relu(t.mixed), &t.norm);
}

// Returns dL/d(linear_out) and accumulates the mix gradient.
NodeTensor block_backward_to_linear(const BlockTrace& t, const ChannelMix& mix,
                                    const NodeTensor& grad_out, ChannelMix& grad_mix) {
  const NodeTensor d_relu = instance_norm_backward(t.norm, grad_out);
  const NodeTensor d_mixed = relu_backward(t.mixed, d_relu);
  return mix.backward(t.linear_out, d_mixed, grad_mix);
}

struct EncoderTrace {
  NodeTensor nodes;
  NodeTensor edges;
  BlockTrace in;
  std::array<BlockTrace, 2> hidden;
  NodeTensor head;  // order 1, channels (mu, raw logvar)
  Posterior posterior;
};

void encode_traced(const VaeParams& p, const Graph& g, EncoderTrace& t) {
  if (g.n != p.config.n || g.node_categories != p.config.node_categories ||
      g.edge_categories != p.config.edge_categories) {
    throw DimensionError("graph shape (n=" + std::to_string(g.n) + ", d_A=" +
                         std::to_string(g.node_categories) + ", d_E=" +
                         std::to_string(g.edge_categories) + ") does not match the model (n=" +
                         std::to_string(p.config.n) + ", d_A=" +
                         std::to_string(p.config.node_categories) + ", d_E=" +
                         std::to_string(p.config.edge_categories) + ")");
  }
  t.nodes = node_input(g);
  t.edges = edge_input(g);
  block_forward(p.enc_in.forward(t.nodes, t.edges), p.enc_in_mix, t.in);
  const NodeTensor* x = &t.in.output;
  for (std::size_t i = 0; i < p.enc_hidden.size(); ++i) {
    t.hidden[i].input = *x;
    block_forward(p.enc_hidden[i].forward(*x), p.enc_hidden_mix[i], t.hidden[i]);
    x = &t.hidden[i].output;
  }
  t.head = p.enc_head.forward(*x);
  const auto n = static_cast<Eigen::Index>(g.n);
  t.posterior.mu.resize(n);
  t.posterior.logvar.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.posterior.mu(i) = t.head.at(static_cast<std::size_t>(i), 0);
    t.posterior.logvar(i) =
        std::clamp(t.head.at(static_cast<std::size_t>(i), 1), kLogvarMin, kLogvarMax);
  }
}

void encode_backward(const VaeParams& p, const EncoderTrace& t, const Vector& d_mu,
                     const Vector& d_logvar, VaeParams& grad) {
  NodeTensor d_head = NodeTensor::zeros(1, t.head.n, 2);
  for (std::size_t i = 0; i < t.head.n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d_head.at(i, 0) = d_mu(ii);
    const double raw = t.head.at(i, 1);
    d_head.at(i, 1) = (raw > kLogvarMin && raw < kLogvarMax) ? d_logvar(ii) : 0.0;
  }
  NodeTensor d = p.enc_head.backward(t.hidden.back().output, d_head, grad.enc_head);
  for (std::size_t k = p.enc_hidden.size(); k-- > 0;) {
    const auto d_lin =
        block_backward_to_linear(t.hidden[k], p.enc_hidden_mix[k], d, grad.enc_hidden_mix[k]);
    d = p.enc_hidden[k].backward(t.hidden[k].input, d_lin, grad.enc_hidden[k]);
  }
  const auto d_lin = block_backward_to_linear(t.in, p.enc_in_mix, d, grad.enc_in_mix);
  p.enc_in.backward(t.nodes, t.edges, d_lin, grad.enc_in, nullptr, nullptr);
}

struct DecoderTrace {
  NodeTensor latent;  // order 1, one channel
  BlockTrace in;
  std::array<BlockTrace, 2> hidden;
  DecoderOutput out;
};

void decode_traced(const VaeParams& p, const Vector& z, DecoderTrace& t) {
  if (static_cast<std::size_t>(z.size()) != p.config.n) {
    throw DimensionError("latent of length " + std::to_string(z.size()) +
                         " does not match the model's n = " + std::to_string(p.config.n));
  }
  t.latent = NodeTensor::zeros(1, p.config.n, 1);
  for (std::size_t i = 0; i < p.config.n; ++i) t.latent.at(i, 0) = z(static_cast<Eigen::Index>(i));
  block_forward(p.dec_in.forward(t.latent), p.dec_in_mix, t.in);
  const NodeTensor* x = &t.in.output;
  for (std::size_t i = 0; i < p.dec_hidden.size(); ++i) {
    t.hidden[i].input = *x;
    block_forward(p.dec_hidden[i].forward(*x), p.dec_hidden_mix[i], t.hidden[i]);
    x = &t.hidden[i].output;
  }
  const NodeTensor raw_edges = p.dec_edge_head.forward(*x);
  t.out.edge_logits = raw_edges;
  const std::size_t n = p.config.n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < raw_edges.channels; ++c) {
        t.out.edge_logits.at(i * n + j, c) = raw_edges.at(i * n + j, c) + raw_edges.at(j * n + i, c);
      }
    }
  }
  t.out.node_logits = p.dec_node_head.forward(*x);
}

Vector decode_backward(const VaeParams& p, const DecoderTrace& t, const NodeTensor& d_node_logits,
                       const NodeTensor& d_edge_logits, VaeParams& grad) {
  const std::size_t n = p.config.n;
  NodeTensor d_raw = d_edge_logits;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < d_raw.channels; ++c) {
        d_raw.at(i * n + j, c) = d_edge_logits.at(i * n + j, c) + d_edge_logits.at(j * n + i, c);
      }
    }
  }
  const NodeTensor& top = t.hidden.back().output;
  NodeTensor d = p.dec_edge_head.backward(top, d_raw, grad.dec_edge_head);
  const NodeTensor d_from_nodes = p.dec_node_head.backward(top, d_node_logits, grad.dec_node_head);
  for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] += d_from_nodes.data[i];

  for (std::size_t k = p.dec_hidden.size(); k-- > 0;) {
    const auto d_lin =
        block_backward_to_linear(t.hidden[k], p.dec_hidden_mix[k], d, grad.dec_hidden_mix[k]);
    d = p.dec_hidden[k].backward(t.hidden[k].input, d_lin, grad.dec_hidden[k]);
  }
  const auto d_lin = block_backward_to_linear(t.in, p.dec_in_mix, d, grad.dec_in_mix);
  const NodeTensor dz = p.dec_in.backward(t.latent, d_lin, grad.dec_in);
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = dz.at(i, 0);
  return out;
}

// Reconstruction terms and their logit gradients.
void reconstruction(const Graph& g, const DecoderOutput& out, ElboParts& parts,
                    NodeTensor* d_nodes, NodeTensor* d_edges) {
  const std::size_t n = g.n;
  const std::size_t dA = g.node_categories;
  const std::size_t dE = g.edge_categories;
  std::vector<double> scratch(std::max(dA, dE));
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> logits(out.node_logits.data.data() + i * dA, dA);
    std::span<double> grad = d_nodes ? std::span<double>(d_nodes->data.data() + i * dA, dA)
                                     : std::span<double>{};
    parts.recon_nodes += softmax_cross_entropy(logits, g.node(i), grad);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t pos = i * n + j;
      std::span<const double> logits(out.edge_logits.data.data() + pos * dE, dE);
      std::span<double> grad = d_edges ? std::span<double>(d_edges->data.data() + pos * dE, dE)
                                       : std::span<double>{};
      parts.recon_edges += softmax_cross_entropy(logits, g.edge(i, j), grad);
    }
  }
}

double kl_divergence(const Posterior& q) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < q.mu.size(); ++i) {
    kl += 0.5 * (std::exp(q.logvar(i)) + q.mu(i) * q.mu(i) - 1.0 - q.logvar(i));
  }
  return kl;
}

Vector sample_latent(const Posterior& q, const Vector& eps) {
  if (eps.size() != q.mu.size()) throw DimensionError("noise length does not match latent size");
  return q.mu.array() + (0.5 * q.logvar.array()).exp() * eps.array();
}

void scale_tensor(NodeTensor& t, double w) {
  for (double& v : t.data) v *= w;
}

// ---------------------------------------------------------------------------
// Serialization helpers

json layer_to_json(const std::string& name, const EquivariantLayer& layer) {
  json partitions = json::array();
  for (const auto& p : enumerate_partitions(layer.in_order + layer.out_order)) {
    partitions.push_back(p.to_string());
  }
  return {{"name", name},         {"kind", "equivariant"},   {"in_order", layer.in_order},
          {"out_order", layer.out_order}, {"d_in", layer.d_in}, {"d_out", layer.d_out},
          {"partitions", partitions},     {"weights", layer.weights}, {"bias", layer.bias}};
}

json layer_to_json(const std::string& name, const ChannelMix& layer) {
  return {{"name", name},          {"kind", "channel_mix"}, {"d_in", layer.d_in},
          {"d_out", layer.d_out},  {"weights", layer.weights}, {"bias", layer.bias}};
}

void assign_values(std::vector<double>& dst, const json& src, const std::string& where) {
  auto values = src.get<std::vector<double>>();
  if (values.size() != dst.size()) {
    throw FormatError(where + ": expected " + std::to_string(dst.size()) + " values, got " +
                      std::to_string(values.size()));
  }
  dst = std::move(values);
}

}  // namespace

// ---------------------------------------------------------------------------
// VaeParams

VaeParams VaeParams::zeros(const VaeConfig& c) {
  if (c.n < 4) throw InputError("the VAE needs n >= 4 nodes (order 2 -> 2 basis)");
  if (c.n > kMaxNodes) throw InputError("the VAE supports at most 12 nodes");
  if (c.hidden == 0) throw InputError("hidden width must be positive");
  VaeParams p;
  p.config = c;
  const std::size_t h = c.hidden;
  p.enc_in = HybridLayer(c.node_categories, c.edge_categories, h, h);
  p.enc_in_mix = ChannelMix(2 * h, h);
  for (std::size_t i = 0; i < 2; ++i) {
    p.enc_hidden[i] = EquivariantLayer(2, 2, h, h);
    p.enc_hidden_mix[i] = ChannelMix(h, h);
    p.dec_hidden[i] = EquivariantLayer(2, 2, h, h);
    p.dec_hidden_mix[i] = ChannelMix(h, h);
  }
  p.enc_head = EquivariantLayer(2, 1, h, 2);
  p.dec_in = EquivariantLayer(1, 2, 1, h);
  p.dec_in_mix = ChannelMix(h, h);
  p.dec_edge_head = EquivariantLayer(2, 2, h, c.edge_categories);
  p.dec_node_head = EquivariantLayer(2, 1, h, c.node_categories);
  return p;
}

VaeParams VaeParams::initialize(const VaeConfig& c, std::uint64_t seed) {
  VaeParams p = zeros(c);
  Rng rng(seed);
  p.visit_layers([&](const std::string&, auto& layer) {
    using T = std::decay_t<decltype(layer)>;
    double fan_in = static_cast<double>(layer.d_in);
    if constexpr (std::is_same_v<T, EquivariantLayer>) {
      fan_in *= static_cast<double>(layer.basis_size());
    }
    fill_normal(layer.weights, 1.0 / std::sqrt(fan_in), rng);
  });
  return p;
}

std::size_t VaeParams::parameter_count() const {
  std::size_t count = 0;
  visit_layers([&](const std::string&, const auto& layer) {
    count += layer.weights.size() + layer.bias.size();
  });
  return count;
}

std::vector<double> VaeParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  visit_layers([&](const std::string&, const auto& layer) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  });
  return out;
}

void VaeParams::assign(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw DimensionError("parameter vector has " + std::to_string(values.size()) +
                         " entries, expected " + std::to_string(parameter_count()));
  }
  std::size_t offset = 0;
  visit_layers([&](const std::string&, auto& layer) {
    for (double& w : layer.weights) w = values[offset++];
    for (double& b : layer.bias) b = values[offset++];
  });
}

void VaeParams::scale_add(double alpha, const VaeParams& other) {
  const auto theirs = other.flatten();
  std::size_t offset = 0;
  visit_layers([&](const std::string&, auto& layer) {
    for (double& w : layer.weights) w += alpha * theirs[offset++];
    for (double& b : layer.bias) b += alpha * theirs[offset++];
  });
}

// ---------------------------------------------------------------------------
// Model

NodeTensor node_input(const Graph& g) {
  NodeTensor t = NodeTensor::zeros(1, g.n, g.node_categories);
  t.data = g.node_one_hot();
  return t;
}

NodeTensor edge_input(const Graph& g) {
  NodeTensor t = NodeTensor::zeros(2, g.n, g.edge_categories);
  t.data = g.edge_one_hot();
  return t;
}

Posterior encode(const VaeParams& params, const Graph& g) {
  EncoderTrace t;
  encode_traced(params, g, t);
  return std::move(t.posterior);
}

Vector standard_normal_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector eps(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
  return eps;
}

Vector reparam_sample(const Vector& mu, const Vector& logvar, std::uint64_t seed) {
  if (mu.size() != logvar.size()) throw DimensionError("mu and logvar lengths differ");
  const Vector lv = logvar.cwiseMax(kLogvarMin).cwiseMin(kLogvarMax);
  return sample_latent({mu, lv}, standard_normal_noise(static_cast<std::size_t>(mu.size()), seed));
}

DecoderOutput decode(const VaeParams& params, const Vector& z) {
  DecoderTrace t;
  decode_traced(params, z, t);
  return std::move(t.out);
}

Graph argmax_graph(const DecoderOutput& out, const VaeConfig& config) {
  Graph g = Graph::empty(config.n, config.node_categories, config.edge_categories);
  auto argmax = [](const double* row, std::size_t count) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < count; ++c) {
      if (row[c] > row[best]) best = c;
    }
    return static_cast<int>(best);
  };
  const std::size_t n = config.n;
  for (std::size_t i = 0; i < n; ++i) {
    g.node_labels[i] =
        argmax(out.node_logits.data.data() + i * config.node_categories, config.node_categories);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int category = argmax(out.edge_logits.data.data() + (i * n + j) * config.edge_categories,
                            config.edge_categories);
      if (g.node(i) == g.not_a_node() || g.node(j) == g.not_a_node()) category = g.not_an_edge();
      g.set_edge(i, j, category);
    }
  }
  return g;
}

Graph decode_graph(const VaeParams& params, const Vector& z) {
  return argmax_graph(decode(params, z), params.config);
}

ElboParts elbo(const VaeParams& params, const Graph& g, std::uint64_t seed) {
  return elbo_with_noise(params, g, standard_normal_noise(g.n, seed));
}

ElboParts elbo_with_noise(const VaeParams& params, const Graph& g, const Vector& eps) {
  EncoderTrace enc;
  encode_traced(params, g, enc);
  DecoderTrace dec;
  decode_traced(params, sample_latent(enc.posterior, eps), dec);
  ElboParts parts;
  reconstruction(g, dec.out, parts, nullptr, nullptr);
  parts.kl = kl_divergence(enc.posterior);
  parts.loss = parts.recon_nodes + parts.recon_edges + parts.kl;
  return parts;
}

ElboParts elbo_gradient(const VaeParams& params, const Graph& g, const Vector& eps,
                        VaeParams& grad, double weight) {
  EncoderTrace enc;
  encode_traced(params, g, enc);
  const Posterior& q = enc.posterior;
  const Vector z = sample_latent(q, eps);
  DecoderTrace dec;
  decode_traced(params, z, dec);

  ElboParts parts;
  NodeTensor d_nodes = NodeTensor::zeros(1, g.n, g.node_categories);
  NodeTensor d_edges = NodeTensor::zeros(2, g.n, g.edge_categories);
  reconstruction(g, dec.out, parts, &d_nodes, &d_edges);
  parts.kl = kl_divergence(q);
  parts.loss = parts.recon_nodes + parts.recon_edges + parts.kl;

  scale_tensor(d_nodes, weight);
  scale_tensor(d_edges, weight);
  const Vector dz = decode_backward(params, dec, d_nodes, d_edges, grad);

  const Vector sigma = (0.5 * q.logvar.array()).exp();
  const Vector d_mu = dz + weight * q.mu;
  const Vector d_logvar = (dz.array() * eps.array() * sigma.array() * 0.5 +
                           weight * 0.5 * (q.logvar.array().exp() - 1.0))
                              .matrix();
  encode_backward(params, enc, d_mu, d_logvar, grad);
  return parts;
}

std::vector<bool> relu_pattern(const VaeParams& params, const Graph& g, const Vector& eps) {
  EncoderTrace enc;
  encode_traced(params, g, enc);
  DecoderTrace dec;
  decode_traced(params, sample_latent(enc.posterior, eps), dec);
  std::vector<bool> pattern;
  auto scan = [&](const BlockTrace& t) {
    for (double v : t.mixed.data) pattern.push_back(v > 0.0);
  };
  scan(enc.in);
  for (const auto& t : enc.hidden) scan(t);
  scan(dec.in);
  for (const auto& t : dec.hidden) scan(t);
  return pattern;
}

// ---------------------------------------------------------------------------
// Training

VaeConfig config_for(const GraphDataset& dataset, std::size_t hidden) {
  VaeConfig c;
  c.n = dataset.n;
  c.node_categories = dataset.node_categories;
  c.edge_categories = dataset.edge_categories;
  c.hidden = hidden;
  return c;
}

TrainResult train(const GraphDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  return train_from(VaeParams::initialize(config_for(dataset, config.hidden), config.seed),
                    dataset, config, on_epoch);
}

TrainResult train_from(VaeParams params, const GraphDataset& dataset, const TrainConfig& config,
                       const EpochCallback& on_epoch) {
  if (dataset.graphs.empty()) throw InputError("cannot train on an empty dataset");
  if (config.batch_size == 0 || config.epochs == 0 || !(config.learning_rate > 0.0)) {
    throw InputError("training needs positive learning rate, batch size and epochs");
  }
  if (!(config.grad_clip >= 0.0)) throw InputError("grad_clip must be non-negative");
  TrainResult result;
  const std::size_t count = dataset.graphs.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix_seed(config.seed, 0x5eed));
  VaeParams grad = VaeParams::zeros(params.config);
  const std::vector<double> zero(params.parameter_count(), 0.0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < count; start += config.batch_size) {
      const std::size_t stop = std::min(count, start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      grad.assign(zero);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t idx = order[b];
        const Vector eps = standard_normal_noise(dataset.n, mix_seed(config.seed, epoch + 1, idx));
        const auto parts = elbo_gradient(params, dataset.graphs[idx], eps, grad, weight);
        if (!std::isfinite(parts.loss)) {
          throw TrainingDiverged(epoch + 1, "training diverged: non-finite loss in epoch " +
                                                std::to_string(epoch + 1));
        }
        epoch_loss += parts.loss;
      }
      double step = config.learning_rate;
      if (config.grad_clip > 0.0) {
        double sq = 0.0;
        for (double v : grad.flatten()) sq += v * v;
        const double norm = std::sqrt(sq);
        if (norm > config.grad_clip) step *= config.grad_clip / norm;
      }
      params.scale_add(-step, grad);
    }
    epoch_loss /= static_cast<double>(count);
    result.loss_curve.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch + 1, epoch_loss);
  }
  result.params = std::move(params);
  return result;
}

// ---------------------------------------------------------------------------
// Files

std::string dump_params(const VaeParams& params) {
  json layers = json::array();
  params.visit_layers(
      [&](const std::string& name, const auto& layer) { layers.push_back(layer_to_json(name, layer)); });
  json doc = {{"format", kParamsFormat},
              {"config",
               {{"n", params.config.n},
                {"d_A", params.config.node_categories},
                {"d_E", params.config.edge_categories},
                {"hidden", params.config.hidden}}},
              {"layers", std::move(layers)}};
  return doc.dump(1) + "\n";
}

VaeParams parse_params(std::string_view json_text, std::string_view source) {
  const std::string where(source);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(where + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != kParamsFormat) {
      throw FormatError(where + ": expected \"format\": \"" + std::string(kParamsFormat) + "\"");
    }
    VaeConfig c;
    const auto& cfg = doc.at("config");
    c.n = cfg.at("n").get<std::size_t>();
    c.node_categories = cfg.at("d_A").get<std::size_t>();
    c.edge_categories = cfg.at("d_E").get<std::size_t>();
    c.hidden = cfg.at("hidden").get<std::size_t>();
    VaeParams p = VaeParams::zeros(c);
    const auto& layers = doc.at("layers");
    std::size_t index = 0;
    p.visit_layers([&](const std::string& name, auto& layer) {
      if (index >= layers.size()) throw FormatError(where + ": missing layer '" + name + "'");
      const auto& entry = layers[index++];
      if (entry.at("name").get<std::string>() != name) {
        throw FormatError(where + ": expected layer '" + name + "' at position " +
                          std::to_string(index - 1));
      }
      assign_values(layer.weights, entry.at("weights"), where + ": " + name + ".weights");
      assign_values(layer.bias, entry.at("bias"), where + ": " + name + ".bias");
    });
    if (index != layers.size()) throw FormatError(where + ": unexpected extra layers");
    return p;
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const InputError& e) {
    throw FormatError(where + ": " + e.what());
  }
}

VaeParams read_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open parameter file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_params(buffer.str(), path.string());
}

void write_params(const std::filesystem::path& path, const VaeParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write parameter file '" + path.string() + "'");
  out << dump_params(params);
}

TrainConfig parse_train_config(std::string_view json_text, std::string_view source) {
  const std::string where(source);
  try {
    const json doc = json::parse(json_text);
    TrainConfig c;
    c.learning_rate = doc.value("learning_rate", c.learning_rate);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.epochs = doc.value("epochs", c.epochs);
    c.seed = doc.value("seed", c.seed);
    c.hidden = doc.value("hidden", c.hidden);
    c.grad_clip = doc.value("grad_clip", c.grad_clip);
    for (const auto& [key, value] : doc.items()) {
      if (key != "learning_rate" && key != "batch_size" && key != "epochs" && key != "seed" &&
          key != "hidden" && key != "grad_clip") {
        throw FormatError(where + ": unknown training option '" + key + "'");
      }
    }
    if (!(c.learning_rate > 0.0) || c.batch_size == 0 || c.epochs == 0 || c.hidden == 0) {
      throw FormatError(where + ": training options must be positive");
    }
    if (!(c.grad_clip >= 0.0)) throw FormatError(where + ": grad_clip must be non-negative");
    return c;
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

std::string dump_train_config(const TrainConfig& c) {
  const json doc = {{"learning_rate", c.learning_rate},
                    {"batch_size", c.batch_size},
                    {"epochs", c.epochs},
                    {"seed", c.seed},
                    {"hidden", c.hidden},
                    {"grad_clip", c.grad_clip}};
  return doc.dump(1) + "\n";
}

}  // namespace equilens
