#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "equilens/graph.hpp"
#include "equilens/group.hpp"

namespace equilens {

struct MotifEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  int type = 0;
};

// A graph template. Nodes beyond node_types.size() are padding.
struct MotifClass {
  std::string name;
  std::vector<int> node_types;
  std::vector<MotifEdge> edges;
  double edge_keep = 0.9;  // probability each template edge is present
  double property_offset = 0.0;
};

// Property of a generated graph:
//   prop = property_offset[class] + edge_weight * real_edges / n + N(0, noise_std)
struct SyntheticSpec {
  std::size_t n = 6;
  std::size_t node_categories = 4;
  std::size_t edge_categories = 3;
  // Per real node: probability of relabeling to a uniform real type. Per
  // non-template pair of real nodes: probability of a spurious edge.
  double label_noise = 0.05;
  double edge_weight = 0.5;
  double noise_std = 0.1;
  std::vector<MotifClass> classes;

  void validate() const;
};

// Ring of six, five-node star and four-node chain on n = 6 with three real
// node types and two real edge types.
SyntheticSpec default_synthetic_spec();

// Classes are drawn uniformly; each graph is relabeled by a uniformly random
// node permutation. Properties "class" and "prop" are attached.
GraphDataset generate_synthetic(const SyntheticSpec& spec, std::size_t count, std::uint64_t seed);

std::string dump_synthetic_spec(const SyntheticSpec& spec);
SyntheticSpec parse_synthetic_spec(std::string_view json_text,
                                   std::string_view source = "<memory>");
SyntheticSpec read_synthetic_spec(const std::filesystem::path& path);

// Latents in a planar-rotation frequency layout whose classes differ only in
// their block magnitudes. Each rotated block of each sample gets an independent
// uniform phase and the sample is then moved by a uniform step of
// cyclic(k, frequencies), so neither absolute nor relative phases carry class
// information.
struct RotationLatentSpec {
  std::size_t k = 360;
  std::vector<int> frequencies{0, 1, 1, 2, 3};
  std::size_t classes = 4;
  double radius_min = 0.5;
  double radius_max = 2.0;
  double noise_std = 0.15;
};

struct LabeledLatents {
  Matrix latents;
  std::vector<int> labels;
};

LabeledLatents generate_rotation_latents(const RotationLatentSpec& spec, std::size_t count,
                                         std::uint64_t seed);

}  // namespace equilens
