#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "equilens/error.hpp"
#include "equilens/synthetic.hpp"
#include "oracles.hpp"

using namespace equilens;

namespace {

bool isomorphic(const Graph& a, const Graph& b) {
  std::vector<std::size_t> p(a.n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do {
    if (oracle::permute_graph(a, p).same_structure(b)) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

}  // namespace

TEST(Synthetic, IsDeterministicPerSeed) {
  const auto spec = default_synthetic_spec();
  const auto a = generate_synthetic(spec, 40, 5);
  const auto b = generate_synthetic(spec, 40, 5);
  const auto c = generate_synthetic(spec, 40, 6);
  ASSERT_EQ(a.graphs.size(), 40u);
  bool differs = false;
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_TRUE(a.graphs[i].same_structure(b.graphs[i]));
    EXPECT_EQ(a.graphs[i].properties, b.graphs[i].properties);
    differs |= !a.graphs[i].same_structure(c.graphs[i]);
  }
  EXPECT_TRUE(differs);
}

TEST(Synthetic, GraphsAreValidAndCarryProperties) {
  for (const auto& g : generate_synthetic(default_synthetic_spec(), 100, 1).graphs) {
    EXPECT_NO_THROW(g.validate());
    ASSERT_TRUE(g.properties.count("class"));
    ASSERT_TRUE(g.properties.count("prop"));
    EXPECT_GE(g.properties.at("class"), 0.0);
    EXPECT_LE(g.properties.at("class"), 2.0);
  }
}

TEST(Synthetic, NoiseFreeClassesAreSingleIsomorphismClasses) {
  auto spec = default_synthetic_spec();
  spec.label_noise = 0.0;
  for (auto& c : spec.classes) c.edge_keep = 1.0;
  const auto data = generate_synthetic(spec, 30, 3);
  std::vector<const Graph*> first(3, nullptr);
  for (const auto& g : data.graphs) {
    const auto cls = static_cast<std::size_t>(g.properties.at("class"));
    if (!first[cls]) {
      first[cls] = &g;
      continue;
    }
    EXPECT_TRUE(isomorphic(*first[cls], g));
  }
  // Ring, star and chain have 12, 24 and 4 automorphisms (padding slots included).
  std::vector<std::size_t> expect{12, 24, 4};
  for (std::size_t c = 0; c < 3; ++c) {
    ASSERT_NE(first[c], nullptr);
    EXPECT_EQ(oracle::automorphism_count(*first[c]), expect[c]) << c;
  }
}

TEST(Synthetic, PropertyTracksClassOffset) {
  const auto data = generate_synthetic(default_synthetic_spec(), 600, 9);
  // Point-biserial correlation of prop with a one-vs-rest class indicator.
  auto biserial = [&](double cls) {
    std::vector<double> x, y;
    for (const auto& g : data.graphs) {
      x.push_back(g.properties.at("class") == cls ? 1.0 : 0.0);
      y.push_back(g.properties.at("prop"));
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  // Ring has the lowest offset, chain the highest.
  EXPECT_LT(biserial(0.0), -0.5);
  EXPECT_GT(biserial(2.0), 0.5);
}

TEST(Synthetic, SpecRoundTripsAndValidates) {
  const auto spec = default_synthetic_spec();
  const auto back = parse_synthetic_spec(dump_synthetic_spec(spec));
  EXPECT_EQ(back.classes.size(), spec.classes.size());
  EXPECT_EQ(back.classes[1].edges.size(), spec.classes[1].edges.size());
  EXPECT_EQ(back.label_noise, spec.label_noise);
  auto bad = spec;
  bad.classes[0].node_types.push_back(0);  // seven real nodes on n = 6
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW(parse_synthetic_spec("{\"n\": \"six\"}"), FormatError);
}

TEST(RotationLatents, PhasesCarryNoClassInformation) {
  RotationLatentSpec spec;
  spec.noise_std = 0.0;
  const auto data = generate_rotation_latents(spec, 200, 4);
  ASSERT_EQ(data.latents.rows(), 200);
  ASSERT_EQ(data.latents.cols(), 9);
  // Without noise every sample of a class has the prototype's block norms.
  std::vector<std::vector<double>> norms(spec.classes);
  for (Eigen::Index r = 0; r < data.latents.rows(); ++r) {
    std::vector<double> blocks{data.latents(r, 0)};
    for (Eigen::Index c = 1; c < 9; c += 2) blocks.push_back(std::hypot(data.latents(r, c), data.latents(r, c + 1)));
    auto& ref = norms[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r)])];
    if (ref.empty()) {
      ref = blocks;
    } else {
      for (std::size_t b = 0; b < blocks.size(); ++b) EXPECT_NEAR(blocks[b], ref[b], 1e-12);
    }
  }
}
