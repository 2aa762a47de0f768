#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "equilens/error.hpp"
#include "equilens_cli/commands.hpp"
#include "equilens_cli/manifest.hpp"
#include "equilens_cli/svg.hpp"
#include "equilens_cli/table.hpp"

using namespace equilens;
using namespace equilens::cli;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "equilens");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("equilens_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(Csv, EscapesAndParsesBack) {
  const CsvRow row{"plain", "with,comma", "say \"hi\"", "two\nlines", ""};
  const std::string line = csv_line(row);
  EXPECT_EQ(line, "plain,\"with,comma\",\"say \"\"hi\"\"\",\"two\nlines\",\r\n");
  const auto parsed = parse_csv(line + csv_line({"a", "b", "c", "d", "e"}), "mem");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], row);
  EXPECT_EQ(parse_csv("x,y\ny,z", "mem").size(), 2u);
  EXPECT_THROW(parse_csv("\"open", "mem"), FormatError);
}

TEST(Csv, DoublesRoundTripExactly) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
    EXPECT_EQ(parse_double(format_double(v), "test"), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("1.5x", "test"), FormatError);
  EXPECT_THROW(parse_integer("", "test"), FormatError);
}

TEST(LatentTable, RoundTrips) {
  LatentTable t;
  t.ids = {"a", "b"};
  t.group = "sym:3";
  t.meta_names = {"prop"};
  t.meta.resize(2, 1);
  t.meta << 0.25, -1.5;
  t.values.resize(2, 3);
  t.values << 1, 2, 3, 4, 5, 6.125;
  const auto back = parse_latent_table(dump_latent_table(t), "mem");
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.group, t.group);
  EXPECT_EQ(back.meta, t.meta);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.row_of("b"), 1u);
  EXPECT_THROW(back.row_of("c"), InputError);
  EXPECT_THROW(back.meta_column("class"), InputError);
}

TEST(Options, KValuesAndThreads) {
  EXPECT_EQ(parse_k_values("3"), (std::vector<std::size_t>{3}));
  EXPECT_EQ(parse_k_values("1,5,10"), (std::vector<std::size_t>{1, 5, 10}));
  EXPECT_EQ(parse_k_values("2..4"), (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_THROW(parse_k_values("0"), InputError);
  EXPECT_THROW(parse_k_values("5..2"), InputError);
  EXPECT_EQ(resolve_threads(3), 3u);
  EXPECT_THROW(resolve_threads(0), InputError);
}

TEST(Manifest, Sha256KnownAnswers) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Svg, OutputDependsOnlyOnInputs) {
  std::vector<ScatterPoint> pts{{0, 0, 0}, {1, 2, 1}, {3, -1, 2}};
  ScatterOptions opt;
  opt.title = "a <b> & c";
  const auto a = svg_scatter(pts, opt);
  EXPECT_EQ(a, svg_scatter(pts, opt));
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("&lt;b&gt; &amp;"), std::string::npos);
  EXPECT_EQ(viridis(0.0), "#440154");
  EXPECT_EQ(viridis(1.0), "#fde725");
  EXPECT_EQ(category_color(0), category_color(10));
  EXPECT_NO_THROW(svg_scatter({{1, 1, 0}}, opt));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUserError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUserError);
  EXPECT_EQ(run({"train", "--data", "/nonexistent.json", "--out", "x"}).code, kExitUserError);
  EXPECT_EQ(run({"dist", "--in", "/nonexistent.csv", "--out", "x"}).code, kExitUserError);
}

TEST(Cli, PipelineEndToEnd) {
  TempDir dir;
  const auto data = dir / "graphs.json";
  ASSERT_EQ(run({"gen-data", "--count", "40", "--seed", "3", "--out", data}).code, 0);
  EXPECT_TRUE(fs::exists(data + ".manifest.json"));

  const auto params = dir / "params.json";
  auto r = run({"train", "--data", data, "--epochs", "3", "--hidden", "4", "--seed", "1", "--quiet",
                "--grad-clip", "5", "--out", params, "--curve", dir / "curve.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir / "curve.csv").size(), 4u);

  const auto latents = dir / "latents.csv";
  ASSERT_EQ(run({"embed", "--params", params, "--data", data, "--out", latents}).code, 0);
  const auto table = read_latent_table(latents);
  EXPECT_EQ(table.rows(), 40u);
  EXPECT_EQ(table.group, "sym:6");

  const auto sorted = dir / "sorted.csv";
  ASSERT_EQ(run({"project", "--in", latents, "--kind", "sort", "--out", sorted}).code, 0);
  const auto scrambled = dir / "scrambled.csv";
  ASSERT_EQ(run({"project", "--in", latents, "--kind", "sort", "--scramble", "--seed", "4", "--out", scrambled}).code, 0);
  EXPECT_EQ(read_text_file(sorted), read_text_file(scrambled));

  r = run({"dist", "--in", latents, "--out", dir / "dist.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir / "dist.csv").size(), 1u + 40u * 39u / 2u);

  r = run({"knn", "--in", sorted, "--k", "1..3", "--out", dir / "knn.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir / "knn.csv").size(), 4u);
  r = run({"knn", "--in", sorted, "--task", "classify", "--target", "class", "--k", "3", "--out", dir / "f1.csv"});
  ASSERT_EQ(r.code, 0) << r.err;

  r = run({"pca", "--in", latents, "--color-by", "class", "--out", dir / "pca.svg", "--csv", dir / "pca.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_text_file(dir / "pca.svg").find("<svg"), std::string::npos);

  r = run({"interpolate", "--params", params, "--latents", latents, "--ids", "g0,g1", "--steps", "5",
           "--mode", "invariant", "--out", dir / "path.json", "--hamming", dir / "ham.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_csv(dir / "ham.csv").size(), 5u);

  r = run({"stability", "--params", params, "--latents", latents, "--pairs", "10", "--steps", "5",
           "--mode", "both", "--out", dir / "hist.csv"});
  ASSERT_EQ(r.code, 0) << r.err;

  EXPECT_EQ(run({"interpolate", "--params", params, "--latents", latents, "--ids", "g0,nope", "--out",
                 dir / "bad.json"}).code,
            kExitUserError);
}

#ifdef EQUILENS_CLI_PATH
TEST(Cli, BinaryReportsVersion) {
  const std::string cmd = std::string("\"") + EQUILENS_CLI_PATH + "\" --version > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}
#endif
