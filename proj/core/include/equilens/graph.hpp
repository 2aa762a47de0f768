#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "equilens/group.hpp"

namespace equilens {

// Padded categorical graph. Labels are stored as category indices, which is
// the one-hot encoding with exactly one active category per slot. The last
// node category is "not-a-node" and the last edge category "not-an-edge".
struct Graph {
  std::size_t n = 0;
  std::size_t node_categories = 0;  // d_A
  std::size_t edge_categories = 0;  // d_E
  std::vector<int> node_labels;     // n
  std::vector<int> edge_labels;     // n * n, row-major, symmetric
  std::map<std::string, double> properties;

  // All slots padded.
  static Graph empty(std::size_t n, std::size_t node_categories, std::size_t edge_categories);

  int not_a_node() const { return static_cast<int>(node_categories) - 1; }
  int not_an_edge() const { return static_cast<int>(edge_categories) - 1; }

  int node(std::size_t i) const { return node_labels[i]; }
  int edge(std::size_t i, std::size_t j) const { return edge_labels[i * n + j]; }
  // Writes both (i, j) and (j, i).
  void set_edge(std::size_t i, std::size_t j, int category);

  std::size_t real_node_count() const;
  std::size_t real_edge_count() const;  // over i < j

  // Throws InputError describing the first violated invariant: symmetric
  // edges, in-range categories, not-an-edge on the diagonal and on every slot
  // incident to a not-a-node.
  void validate() const;

  // n x d_A and (n*n) x d_E one-hot tables, row-major.
  std::vector<double> node_one_hot() const;
  std::vector<double> edge_one_hot() const;

  // Labels only; properties are ignored.
  bool same_structure(const Graph& other) const;
};

// (P V, P E P^T): node labels permuted, both edge indices permuted,
// properties unchanged.
Graph act_on_graph(const Permutation& p, const Graph& g);

struct GraphDataset {
  std::size_t n = 0;
  std::size_t node_categories = 0;
  std::size_t edge_categories = 0;
  std::vector<Graph> graphs;
};

// Dataset file:
//   {"format": "equilens-graphs/1",
//    "header": {"n": 6, "d_A": 4, "d_E": 3},
//    "graphs": [{"n": 6, "node_labels": [...], "edge_labels": [[...], ...],
//                "props": {"name": value}}, ...]}
std::string dump_graph_dataset(const GraphDataset& dataset);
GraphDataset parse_graph_dataset(std::string_view json_text, std::string_view source = "<memory>");
GraphDataset read_graph_dataset(const std::filesystem::path& path);
void write_graph_dataset(const std::filesystem::path& path, const GraphDataset& dataset);

}  // namespace equilens
