#include "equilens/graph.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "equilens/error.hpp"

namespace equilens {

using nlohmann::json;

namespace {

constexpr std::string_view kDatasetFormat = "equilens-graphs/1";

}  // namespace

Graph Graph::empty(std::size_t n, std::size_t node_categories, std::size_t edge_categories) {
  if (node_categories < 2 || edge_categories < 2) {
    throw InputError("graphs need at least one real category plus the padding category");
  }
  Graph g;
  g.n = n;
  g.node_categories = node_categories;
  g.edge_categories = edge_categories;
  g.node_labels.assign(n, static_cast<int>(node_categories) - 1);
  g.edge_labels.assign(n * n, static_cast<int>(edge_categories) - 1);
  return g;
}

void Graph::set_edge(std::size_t i, std::size_t j, int category) {
  edge_labels[i * n + j] = category;
  edge_labels[j * n + i] = category;
}

std::size_t Graph::real_node_count() const {
  std::size_t count = 0;
  for (int label : node_labels) count += (label != not_a_node());
  return count;
}

std::size_t Graph::real_edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) count += (edge(i, j) != not_an_edge());
  }
  return count;
}

void Graph::validate() const {
  if (node_categories < 2 || edge_categories < 2) {
    throw InputError("graph needs d_A >= 2 and d_E >= 2");
  }
  if (node_labels.size() != n) {
    throw InputError("graph has " + std::to_string(node_labels.size()) +
                     " node labels, expected " + std::to_string(n));
  }
  if (edge_labels.size() != n * n) {
    throw InputError("graph has " + std::to_string(edge_labels.size()) +
                     " edge slots, expected " + std::to_string(n * n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (node_labels[i] < 0 || node_labels[i] >= static_cast<int>(node_categories)) {
      throw InputError("node " + std::to_string(i) + " has category " +
                       std::to_string(node_labels[i]) + " outside [0, " +
                       std::to_string(node_categories) + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int e = edge(i, j);
      if (e < 0 || e >= static_cast<int>(edge_categories)) {
        throw InputError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                         ") has category " + std::to_string(e) + " outside [0, " +
                         std::to_string(edge_categories) + ")");
      }
      if (e != edge(j, i)) {
        throw InputError("edge labels are not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
      if (i == j && e != not_an_edge()) {
        throw InputError("self-edge at node " + std::to_string(i));
      }
      const bool padded = node_labels[i] == not_a_node() || node_labels[j] == not_a_node();
      if (padded && e != not_an_edge()) {
        throw InputError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                         ") touches a not-a-node slot");
      }
    }
  }
}

std::vector<double> Graph::node_one_hot() const {
  std::vector<double> out(n * node_categories, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i * node_categories + static_cast<std::size_t>(node_labels[i])] = 1.0;
  }
  return out;
}

std::vector<double> Graph::edge_one_hot() const {
  std::vector<double> out(n * n * edge_categories, 0.0);
  for (std::size_t s = 0; s < n * n; ++s) {
    out[s * edge_categories + static_cast<std::size_t>(edge_labels[s])] = 1.0;
  }
  return out;
}

bool Graph::same_structure(const Graph& other) const {
  return n == other.n && node_categories == other.node_categories &&
         edge_categories == other.edge_categories && node_labels == other.node_labels &&
         edge_labels == other.edge_labels;
}

Graph act_on_graph(const Permutation& p, const Graph& g) {
  if (p.size() != g.n) {
    throw DimensionError("permutation of size " + std::to_string(p.size()) +
                         " cannot act on a graph with " + std::to_string(g.n) + " nodes");
  }
  Graph out = g;
  for (std::size_t i = 0; i < g.n; ++i) {
    out.node_labels[p(i)] = g.node_labels[i];
    for (std::size_t j = 0; j < g.n; ++j) {
      out.edge_labels[p(i) * g.n + p(j)] = g.edge_labels[i * g.n + j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON dataset files

std::string dump_graph_dataset(const GraphDataset& dataset) {
  json graphs = json::array();
  for (const auto& g : dataset.graphs) {
    json edges = json::array();
    for (std::size_t i = 0; i < g.n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < g.n; ++j) row.push_back(g.edge(i, j));
      edges.push_back(std::move(row));
    }
    json props = json::object();
    for (const auto& [name, value] : g.properties) props[name] = value;
    graphs.push_back({{"n", g.n},
                      {"node_labels", g.node_labels},
                      {"edge_labels", std::move(edges)},
                      {"props", std::move(props)}});
  }
  json doc = {{"format", kDatasetFormat},
              {"header",
               {{"n", dataset.n},
                {"d_A", dataset.node_categories},
                {"d_E", dataset.edge_categories}}},
              {"graphs", std::move(graphs)}};
  return doc.dump(1) + "\n";
}

GraphDataset parse_graph_dataset(std::string_view json_text, std::string_view source) {
  const std::string where(source);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(where + ": invalid JSON at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != kDatasetFormat) {
      throw FormatError(where + ": expected an object with \"format\": \"" +
                        std::string(kDatasetFormat) + "\"");
    }
    GraphDataset ds;
    const auto& header = doc.at("header");
    ds.n = header.at("n").get<std::size_t>();
    ds.node_categories = header.at("d_A").get<std::size_t>();
    ds.edge_categories = header.at("d_E").get<std::size_t>();
    const auto& graphs = doc.at("graphs");
    for (std::size_t idx = 0; idx < graphs.size(); ++idx) {
      const auto& item = graphs[idx];
      const auto n = item.at("n").get<std::size_t>();
      if (n != ds.n) {
        throw FormatError(where + ": graph " + std::to_string(idx) + " has n = " +
                          std::to_string(n) + " but the header declares " +
                          std::to_string(ds.n));
      }
      Graph g = Graph::empty(n, ds.node_categories, ds.edge_categories);
      g.node_labels = item.at("node_labels").get<std::vector<int>>();
      const auto rows = item.at("edge_labels").get<std::vector<std::vector<int>>>();
      if (rows.size() != n) {
        throw FormatError(where + ": graph " + std::to_string(idx) +
                          " edge_labels must have n rows");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
          throw FormatError(where + ": graph " + std::to_string(idx) + " edge_labels row " +
                            std::to_string(i) + " must have n entries");
        }
        for (std::size_t j = 0; j < n; ++j) g.edge_labels[i * n + j] = rows[i][j];
      }
      if (item.contains("props")) {
        for (const auto& [name, value] : item.at("props").items()) {
          g.properties[name] = value.get<double>();
        }
      }
      try {
        g.validate();
      } catch (const InputError& e) {
        throw FormatError(where + ": graph " + std::to_string(idx) + ": " + e.what());
      }
      ds.graphs.push_back(std::move(g));
    }
    return ds;
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

GraphDataset read_graph_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open graph dataset '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_graph_dataset(buffer.str(), path.string());
}

void write_graph_dataset(const std::filesystem::path& path, const GraphDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write graph dataset '" + path.string() + "'");
  out << dump_graph_dataset(dataset);
}

}  // namespace equilens
