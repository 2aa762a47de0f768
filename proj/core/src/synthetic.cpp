#include "equilens/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "equilens/error.hpp"

namespace equilens {

using nlohmann::json;

namespace {

constexpr std::string_view kSpecFormat = "equilens-synthetic/1";

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SyntheticSpec::validate() const {
  if (n < 2) throw InputError("synthetic spec: n must be at least 2");
  if (node_categories < 2 || edge_categories < 2) {
    throw InputError("synthetic spec: d_A and d_E need at least one real category each");
  }
  if (classes.empty()) throw InputError("synthetic spec: at least one motif class is required");
  if (!probability(label_noise)) throw InputError("synthetic spec: label_noise must be in [0, 1]");
  if (!(noise_std >= 0.0) || !std::isfinite(edge_weight)) {
    throw InputError("synthetic spec: property parameters must be finite, noise_std >= 0");
  }
  const int real_nodes = static_cast<int>(node_categories) - 1;
  const int real_edges = static_cast<int>(edge_categories) - 1;
  for (const auto& c : classes) {
    const std::string where = "synthetic spec class '" + c.name + "'";
    if (c.node_types.empty() || c.node_types.size() > n) {
      throw InputError(where + ": needs between 1 and n template nodes");
    }
    for (int t : c.node_types) {
      if (t < 0 || t >= real_nodes) throw InputError(where + ": node type out of range");
    }
    for (const auto& e : c.edges) {
      if (e.a >= c.node_types.size() || e.b >= c.node_types.size() || e.a == e.b) {
        throw InputError(where + ": edge endpoints must be distinct template nodes");
      }
      if (e.type < 0 || e.type >= real_edges) throw InputError(where + ": edge type out of range");
    }
    if (!probability(c.edge_keep)) throw InputError(where + ": edge_keep must be in [0, 1]");
    if (!std::isfinite(c.property_offset)) throw InputError(where + ": offset must be finite");
  }
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  MotifClass ring{"ring", {0, 0, 0, 0, 0, 0}, {}, 0.9, 0.0};
  for (std::size_t i = 0; i < 6; ++i) ring.edges.push_back({i, (i + 1) % 6, 0});
  MotifClass star{"star", {1, 0, 0, 0, 0}, {}, 0.9, 1.0};
  for (std::size_t i = 1; i < 5; ++i) star.edges.push_back({0, i, 1});
  MotifClass chain{"chain", {2, 2, 2, 2}, {}, 0.9, 2.0};
  for (std::size_t i = 0; i + 1 < 4; ++i) chain.edges.push_back({i, i + 1, 0});
  spec.classes = {ring, star, chain};
  return spec;
}

GraphDataset generate_synthetic(const SyntheticSpec& spec, std::size_t count, std::uint64_t seed) {
  spec.validate();
  GraphDataset out{spec.n, spec.node_categories, spec.edge_categories, {}};
  out.graphs.reserve(count);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_class(0, spec.classes.size() - 1);
  std::uniform_int_distribution<int> pick_node(0, static_cast<int>(spec.node_categories) - 2);
  std::uniform_int_distribution<int> pick_edge(0, static_cast<int>(spec.edge_categories) - 2);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t cls = pick_class(rng);
    const MotifClass& motif = spec.classes[cls];
    Graph g = Graph::empty(spec.n, spec.node_categories, spec.edge_categories);
    const std::size_t real = motif.node_types.size();
    for (std::size_t i = 0; i < real; ++i) {
      g.node_labels[i] = motif.node_types[i];
      if (unit(rng) < spec.label_noise) g.node_labels[i] = pick_node(rng);
    }
    std::vector<bool> templated(spec.n * spec.n, false);
    for (const auto& e : motif.edges) {
      templated[e.a * spec.n + e.b] = templated[e.b * spec.n + e.a] = true;
      if (unit(rng) < motif.edge_keep) g.set_edge(e.a, e.b, e.type);
    }
    for (std::size_t i = 0; i < real; ++i) {
      for (std::size_t j = i + 1; j < real; ++j) {
        if (!templated[i * spec.n + j] && unit(rng) < spec.label_noise) {
          g.set_edge(i, j, pick_edge(rng));
        }
      }
    }
    const double edges = static_cast<double>(g.real_edge_count());
    g.properties["class"] = static_cast<double>(cls);
    g.properties["prop"] = motif.property_offset +
                           spec.edge_weight * edges / static_cast<double>(spec.n) +
                           spec.noise_std * noise(rng);
    out.graphs.push_back(act_on_graph(random_permutation(spec.n, rng), g));
  }
  return out;
}

std::string dump_synthetic_spec(const SyntheticSpec& spec) {
  json classes = json::array();
  for (const auto& c : spec.classes) {
    json edges = json::array();
    for (const auto& e : c.edges) edges.push_back({e.a, e.b, e.type});
    classes.push_back({{"name", c.name},
                       {"node_types", c.node_types},
                       {"edges", edges},
                       {"edge_keep", c.edge_keep},
                       {"property_offset", c.property_offset}});
  }
  const json doc = {{"format", kSpecFormat},
                    {"n", spec.n},
                    {"d_A", spec.node_categories},
                    {"d_E", spec.edge_categories},
                    {"label_noise", spec.label_noise},
                    {"edge_weight", spec.edge_weight},
                    {"noise_std", spec.noise_std},
                    {"classes", classes}};
  return doc.dump(1) + "\n";
}

SyntheticSpec parse_synthetic_spec(std::string_view json_text, std::string_view source) {
  const std::string where(source);
  try {
    const json doc = json::parse(json_text);
    if (doc.contains("format") && doc.at("format").get<std::string>() != kSpecFormat) {
      throw FormatError(where + ": expected \"format\": \"" + std::string(kSpecFormat) + "\"");
    }
    SyntheticSpec spec = default_synthetic_spec();
    spec.n = doc.value("n", spec.n);
    spec.node_categories = doc.value("d_A", spec.node_categories);
    spec.edge_categories = doc.value("d_E", spec.edge_categories);
    spec.label_noise = doc.value("label_noise", spec.label_noise);
    spec.edge_weight = doc.value("edge_weight", spec.edge_weight);
    spec.noise_std = doc.value("noise_std", spec.noise_std);
    if (doc.contains("classes")) {
      spec.classes.clear();
      for (const auto& c : doc.at("classes")) {
        MotifClass m;
        m.name = c.value("name", std::string("class") + std::to_string(spec.classes.size()));
        m.node_types = c.at("node_types").get<std::vector<int>>();
        for (const auto& e : c.value("edges", json::array())) {
          m.edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                             e.at(2).get<int>()});
        }
        m.edge_keep = c.value("edge_keep", m.edge_keep);
        m.property_offset = c.value("property_offset", m.property_offset);
        spec.classes.push_back(std::move(m));
      }
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  } catch (const InputError& e) {
    throw FormatError(where + ": " + e.what());
  }
}

SyntheticSpec read_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open synthetic spec '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_synthetic_spec(buffer.str(), path.string());
}

LabeledLatents generate_rotation_latents(const RotationLatentSpec& spec, std::size_t count,
                                         std::uint64_t seed) {
  if (spec.k == 0 || spec.frequencies.empty() || spec.classes == 0) {
    throw InputError("rotation latents need k >= 1, a frequency layout and at least one class");
  }
  const GroupSpec group = GroupSpec::cyclic(spec.k, spec.frequencies);
  const std::size_t dim = group.dimension();
  Rng rng(seed);
  std::uniform_real_distribution<double> radius(spec.radius_min, spec.radius_max);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<std::size_t> pick_class(0, spec.classes - 1);
  std::uniform_int_distribution<std::size_t> pick_step(0, spec.k - 1);
  std::normal_distribution<double> noise(0.0, spec.noise_std);

  // Class prototypes are block magnitudes only.
  std::vector<std::vector<double>> prototypes(spec.classes);
  for (auto& proto : prototypes) {
    for (std::size_t b = 0; b < spec.frequencies.size(); ++b) proto.push_back(radius(rng));
  }

  LabeledLatents out;
  out.latents.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  out.labels.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t c = pick_class(rng);
    // Each rotated block gets its own phase, so relative phases are uninformative too.
    Vector z(static_cast<Eigen::Index>(dim));
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < spec.frequencies.size(); ++b) {
      const double r = prototypes[c][b];
      if (spec.frequencies[b] == 0) {
        z(offset++) = r;
      } else {
        const double a = phase(rng);
        z(offset++) = r * std::cos(a);
        z(offset++) = r * std::sin(a);
      }
    }
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += noise(rng);
    out.latents.row(static_cast<Eigen::Index>(s)) =
        (rotation_block_matrix(group, pick_step(rng)) * z).transpose();
    out.labels[s] = static_cast<int>(c);
  }
  return out;
}

}  // namespace equilens
