#include "equilens_cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "equilens/analysis.hpp"
#include "equilens/error.hpp"
#include "equilens/invariant.hpp"
#include "equilens/parallel.hpp"
#include "equilens/quotient.hpp"
#include "equilens/selftest.hpp"
#include "equilens/synthetic.hpp"
#include "equilens/vae.hpp"
#include "equilens_cli/manifest.hpp"
#include "equilens_cli/svg.hpp"
#include "equilens_cli/table.hpp"

namespace equilens::cli {

namespace {

// Independent stream seeds derived from the command's --seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  std::uint64_t x = seed ^ (stream * 0x9e3779b97f4a7c15ULL) ^ (index * 0xc2b2ae3d27d4eb4fULL);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum Stream : std::uint64_t { kScramble = 1, kSplit = 2, kPairs = 3, kSample = 4 };

std::string graph_id(std::size_t index) { return "g" + std::to_string(index); }

std::vector<std::string> property_names(const GraphDataset& data) {
  std::set<std::string> names;
  for (const auto& g : data.graphs) {
    for (const auto& [name, value] : g.properties) names.insert(name);
  }
  return {names.begin(), names.end()};
}

LatentTable embed_dataset(const VaeParams& params, const GraphDataset& data, bool sample,
                          std::uint64_t seed, std::size_t threads) {
  LatentTable table;
  table.group = GroupSpec::symmetric(data.n).to_string();
  table.meta_names = property_names(data);
  const auto rows = static_cast<Eigen::Index>(data.graphs.size());
  table.values.resize(rows, static_cast<Eigen::Index>(data.n));
  table.meta.resize(rows, static_cast<Eigen::Index>(table.meta_names.size()));
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    table.ids.push_back(graph_id(i));
    for (std::size_t m = 0; m < table.meta_names.size(); ++m) {
      const auto it = data.graphs[i].properties.find(table.meta_names[m]);
      if (it == data.graphs[i].properties.end()) {
        throw InputError("graph " + std::to_string(i) + " lacks property '" + table.meta_names[m] + "'");
      }
      table.meta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = it->second;
    }
  }
  parallel_for(data.graphs.size(), threads, [&](std::size_t i) {
    const Posterior q = encode(params, data.graphs[i]);
    const Vector z = sample ? reparam_sample(q.mu, q.logvar, derive_seed(seed, kSample, i)) : q.mu;
    table.values.row(static_cast<Eigen::Index>(i)) = z.transpose();
  });
  return table;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  out.push_back(current);
  return out;
}

std::vector<double> column_values(const LatentTable& t, const std::string& name) {
  const std::size_t c = t.meta_column(name);
  std::vector<double> v(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    v[r] = t.meta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return v;
}

std::vector<int> label_values(const LatentTable& t, const std::string& name) {
  std::vector<int> labels;
  for (double v : column_values(t, name)) {
    if (v != std::round(v)) throw InputError("column '" + name + "' holds non-integer labels");
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

LatentTable select_rows(const LatentTable& t, const std::vector<std::size_t>& rows) {
  LatentTable out;
  out.group = t.group;
  out.meta_names = t.meta_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), t.values.cols());
  out.meta.resize(static_cast<Eigen::Index>(rows.size()), t.meta.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.ids.push_back(t.ids[rows[i]]);
    out.values.row(static_cast<Eigen::Index>(i)) = t.values.row(static_cast<Eigen::Index>(rows[i]));
    out.meta.row(static_cast<Eigen::Index>(i)) = t.meta.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

nlohmann::ordered_json graph_json(const Graph& g) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < g.n; ++i) {
    edges.push_back(std::vector<int>(g.edge_labels.begin() + static_cast<std::ptrdiff_t>(i * g.n),
                                     g.edge_labels.begin() + static_cast<std::ptrdiff_t>((i + 1) * g.n)));
  }
  return {{"node_labels", g.node_labels}, {"edge_labels", edges}};
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Latents for interpolation/stability: a latent table or posterior means of
// a graph dataset.
LatentTable load_latents(const std::string& latents_path, const std::string& data_path,
                         const VaeParams& params, std::size_t threads, RunManifest& manifest) {
  if (!latents_path.empty()) {
    manifest.add_input(latents_path);
    return read_latent_table(latents_path);
  }
  if (data_path.empty()) throw InputError("pass --latents or --data");
  manifest.add_input(data_path);
  return embed_dataset(params, read_graph_dataset(data_path), false, 0, threads);
}

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) {
    if (*flag == 0) throw InputError("--threads must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("EQUILENS_THREADS"); env && *env) {
    const long long v = parse_integer(env, "EQUILENS_THREADS");
    if (v < 1) throw InputError("EQUILENS_THREADS must be at least 1");
    return static_cast<std::size_t>(v);
  }
  return 1;
}

std::vector<std::size_t> parse_k_values(std::string_view text) {
  std::vector<std::size_t> ks;
  auto positive = [&](std::string_view part) {
    const long long v = parse_integer(part, "--k");
    if (v < 1) throw InputError("--k values must be positive");
    return static_cast<std::size_t>(v);
  };
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const std::size_t lo = positive(text.substr(0, dots));
    const std::size_t hi = positive(text.substr(dots + 2));
    if (hi < lo) throw InputError("--k range '" + std::string(text) + "' is empty");
    for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  }
  for (const auto& part : split(text, ',')) ks.push_back(positive(part));
  return ks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"equilens: quotient metrics, invariant projections and equivariant graph VAEs"};
  app.name(args.empty() ? "equilens" : args.front());
  app.require_subcommand(1);
  app.set_version_flag("--version", EQUILENS_VERSION);

  std::vector<Command> commands;
  std::optional<std::size_t> threads_flag;
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads_flag, "Worker threads (default: EQUILENS_THREADS or 1)");
  };
  auto manifest_for = [&](const std::string& name) { return RunManifest(name, args); };

  // ---------------------------------------------------------------- gen-data
  std::string gen_spec, gen_out;
  std::size_t gen_count = 600;
  std::uint64_t gen_seed = 0;
  {
    auto* sub = app.add_subcommand("gen-data", "Sample a synthetic motif graph dataset");
    sub->add_option("--spec", gen_spec, "Synthetic spec JSON (default: ring/star/chain motifs)")
        ->check(CLI::ExistingFile);
    sub->add_option("--count", gen_count, "Number of graphs")->capture_default_str();
    sub->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    sub->add_option("--out", gen_out, "Output graphs JSON")->required();
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("gen-data");
      SyntheticSpec spec = default_synthetic_spec();
      if (!gen_spec.empty()) {
        spec = read_synthetic_spec(gen_spec);
        manifest.add_input(gen_spec);
      }
      const GraphDataset data = generate_synthetic(spec, gen_count, gen_seed);
      write_graph_dataset(gen_out, data);
      manifest.add_seed("seed", gen_seed);
      manifest.add_output(gen_out);
      manifest.write(gen_out);
      out << "wrote " << data.graphs.size() << " graphs to " << gen_out << "\n";
    }});
  }

  // ------------------------------------------------------------------- train
  std::string train_data, train_config, train_out, train_curve;
  std::optional<std::size_t> train_epochs, train_batch, train_hidden;
  std::optional<double> train_lr, train_clip;
  std::optional<std::uint64_t> train_seed;
  bool train_quiet = false;
  {
    auto* sub = app.add_subcommand("train", "Train the equivariant graph VAE with SGD");
    sub->add_option("--data", train_data, "Graphs JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--config", train_config, "Training config JSON")->check(CLI::ExistingFile);
    sub->add_option("--epochs", train_epochs, "Override epochs");
    sub->add_option("--lr", train_lr, "Override learning rate");
    sub->add_option("--batch", train_batch, "Override batch size");
    sub->add_option("--hidden", train_hidden, "Override hidden channels");
    sub->add_option("--seed", train_seed, "Override seed");
    sub->add_option("--grad-clip", train_clip, "Override gradient norm clip (0 disables)");
    sub->add_option("--out", train_out, "Output parameter JSON")->required();
    sub->add_option("--curve", train_curve, "Per-epoch loss CSV");
    sub->add_flag("--quiet", train_quiet, "No progress output");
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("train");
      manifest.add_input(train_data);
      TrainConfig config;
      if (!train_config.empty()) {
        manifest.add_input(train_config);
        config = parse_train_config(read_text_file(train_config), train_config);
      }
      if (train_epochs) config.epochs = *train_epochs;
      if (train_lr) config.learning_rate = *train_lr;
      if (train_batch) config.batch_size = *train_batch;
      if (train_hidden) config.hidden = *train_hidden;
      if (train_seed) config.seed = *train_seed;
      if (train_clip) config.grad_clip = *train_clip;
      const GraphDataset data = read_graph_dataset(train_data);
      const std::size_t report_every = std::max<std::size_t>(1, config.epochs / 10);
      const auto result = train(data, config, [&](std::size_t epoch, double loss) {
        if (!train_quiet && (epoch % report_every == 0 || epoch == 1)) {
          err << "epoch " << epoch << "/" << config.epochs << " loss " << loss << "\n";
        }
      });
      write_params(train_out, result.params);
      manifest.add_seed("seed", config.seed);
      manifest.add_output(train_out);
      if (!train_curve.empty()) {
        std::string csv = csv_line({"epoch", "loss"});
        for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
          csv += csv_line({std::to_string(e + 1), format_double(result.loss_curve[e])});
        }
        write_text_file(train_curve, csv);
        manifest.add_output(train_curve);
      }
      manifest.write(train_out);
      out << "loss " << result.loss_curve.front() << " -> " << result.loss_curve.back() << "\n";
    }});
  }

  // ------------------------------------------------------------------- embed
  std::string embed_params, embed_data, embed_mode = "mean", embed_out;
  std::uint64_t embed_seed = 0;
  {
    auto* sub = app.add_subcommand("embed", "Encode graphs to per-node latents");
    sub->add_option("--params", embed_params, "Parameter JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--data", embed_data, "Graphs JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--mode", embed_mode, "mean (posterior mean) or sample")
        ->check(CLI::IsMember({"mean", "sample"}))
        ->capture_default_str();
    sub->add_option("--seed", embed_seed, "Seed for sample mode")->capture_default_str();
    sub->add_option("--out", embed_out, "Output latent CSV")->required();
    add_threads(sub);
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("embed");
      manifest.add_input(embed_params);
      manifest.add_input(embed_data);
      const VaeParams params = read_params(embed_params);
      const GraphDataset data = read_graph_dataset(embed_data);
      const auto table =
          embed_dataset(params, data, embed_mode == "sample", embed_seed, resolve_threads(threads_flag));
      write_text_file(embed_out, dump_latent_table(table));
      manifest.add_seed("seed", embed_seed);
      manifest.add_output(embed_out);
      manifest.write(embed_out);
      out << "wrote " << table.rows() << " latents to " << embed_out << "\n";
    }});
  }

  // ----------------------------------------------------------------- project
  std::string proj_in, proj_kind = "sort", proj_group, proj_out;
  std::optional<std::size_t> proj_dim;
  std::size_t proj_channels = 1;
  int proj_order = 1;
  std::uint64_t proj_seed = 0;
  bool proj_scramble = false;
  {
    auto* sub = app.add_subcommand("project", "Apply an invariant map to every latent");
    sub->add_option("--in", proj_in, "Latent CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--kind", proj_kind,
                    "sort, reynolds, partition, pool-sum, pool-mean, pool-max, block-norm, or "
                    "identity (no projection)")
        ->capture_default_str();
    sub->add_option("--group", proj_group, "Acting group (default: the table's group column)");
    sub->add_option("--out-dim", proj_dim, "Output dimension of random kinds");
    sub->add_option("--channels", proj_channels, "Channels per node (pooling, partition)")
        ->capture_default_str();
    sub->add_option("--order", proj_order, "Tensor order for partition (1 or 2)")->capture_default_str();
    sub->add_option("--seed", proj_seed, "Seed for random maps and --scramble")->capture_default_str();
    sub->add_flag("--scramble", proj_scramble,
                  "Act on every latent with an independent random group element first");
    sub->add_option("--out", proj_out, "Output CSV")->required();
    add_threads(sub);
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("project");
      manifest.add_input(proj_in);
      LatentTable table = read_latent_table(proj_in);
      const GroupSpec group = GroupSpec::parse(proj_group.empty() ? table.group : proj_group);
      const auto dim = static_cast<std::size_t>(table.values.cols());
      if (proj_scramble) {
        Rng rng(derive_seed(proj_seed, kScramble));
        for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
          const Vector z = table.values.row(r).transpose();
          table.values.row(r) = act(group, random_element(group, rng), z).transpose();
        }
      }
      LatentTable result = table;
      if (proj_kind != "identity") {
        const InvariantKind kind = parse_invariant_kind(proj_kind);
        InvariantMap map;
        switch (kind) {
          case InvariantKind::sort:
            map = sorting_map(dim);
            break;
          case InvariantKind::reynolds_linear:
            map = reynolds_random_projection(group, dim, proj_dim.value_or(default_projection_dim(dim)),
                                             proj_seed);
            break;
          case InvariantKind::partition_basis: {
            const std::size_t per = proj_channels * (proj_order == 2 ? group.degree() : 1);
            if (!group.is_symmetric() || group.degree() * per != dim) {
              throw DimensionError("partition projection expects " + std::string("n") +
                                   (proj_order == 2 ? "^2" : "") + " * channels latent columns");
            }
            map = partition_invariant_projection(group.degree(), proj_channels,
                                                 proj_dim.value_or(default_projection_dim(dim)),
                                                 proj_order, proj_seed);
            break;
          }
          case InvariantKind::pool_sum:
          case InvariantKind::pool_mean:
          case InvariantKind::pool_max: {
            const PoolKind pk = kind == InvariantKind::pool_sum    ? PoolKind::sum
                                : kind == InvariantKind::pool_mean ? PoolKind::mean
                                                                   : PoolKind::max;
            if (proj_channels == 0 || dim % proj_channels != 0) {
              throw DimensionError("latent width is not a multiple of --channels");
            }
            map = pooling_map(pk, dim / proj_channels, proj_channels);
            break;
          }
          case InvariantKind::block_norm:
            map = block_norm_map(group);
            break;
        }
        const auto projected = apply_invariant_map(map, table.values, resolve_threads(threads_flag));
        for (const auto& w : projected.warnings) err << "warning: " << w << "\n";
        result.values = projected.values;
        result.group = "none";
      }
      write_text_file(proj_out, dump_latent_table(result));
      manifest.add_seed("seed", proj_seed);
      manifest.add_output(proj_out);
      manifest.write(proj_out);
      out << "wrote " << result.rows() << " x " << result.values.cols() << " to " << proj_out << "\n";
    }});
  }

  // -------------------------------------------------------------------- dist
  std::string dist_group, dist_method = "auto", dist_in, dist_pairs, dist_out;
  std::size_t dist_grid = kDefaultRotationGrid;
  {
    auto* sub = app.add_subcommand("dist", "Quotient distances between latent orbits");
    sub->add_option("--group", dist_group, "Acting group (default: the table's group column)");
    sub->add_option("--method", dist_method, "auto, bruteforce, sorted or rotation")
        ->check(CLI::IsMember({"auto", "bruteforce", "sorted", "rotation"}))
        ->capture_default_str();
    sub->add_option("--in", dist_in, "Latent CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--pairs", dist_pairs, "CSV of id pairs (header a,b); default all pairs")
        ->check(CLI::ExistingFile);
    sub->add_option("--grid", dist_grid, "Rotation grid size")->capture_default_str();
    sub->add_option("--out", dist_out, "Output CSV")->required();
    add_threads(sub);
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("dist");
      manifest.add_input(dist_in);
      const LatentTable table = read_latent_table(dist_in);
      const GroupSpec group = GroupSpec::parse(dist_group.empty() ? table.group : dist_group);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      if (!dist_pairs.empty()) {
        manifest.add_input(dist_pairs);
        const auto rows = read_csv(dist_pairs);
        for (std::size_t r = 1; r < rows.size(); ++r) {
          if (rows[r].size() != 2) {
            throw FormatError(dist_pairs + ":" + std::to_string(r + 1) + ": expected two ids");
          }
          pairs.emplace_back(table.row_of(rows[r][0]), table.row_of(rows[r][1]));
        }
      } else {
        for (std::size_t i = 0; i < table.rows(); ++i) {
          for (std::size_t j = i + 1; j < table.rows(); ++j) pairs.emplace_back(i, j);
        }
      }
      std::vector<QuotientDistance> results(pairs.size());
      parallel_for(pairs.size(), resolve_threads(threads_flag), [&](std::size_t p) {
        const Vector a = table.values.row(static_cast<Eigen::Index>(pairs[p].first)).transpose();
        const Vector b = table.values.row(static_cast<Eigen::Index>(pairs[p].second)).transpose();
        if (dist_method == "bruteforce") {
          results[p] = quotient_dist_bruteforce(a, b, group);
        } else if (dist_method == "sorted") {
          if (!group.is_symmetric()) throw InputError("the sorted method needs a symmetric group");
          results[p] = quotient_dist_sorted(a, b);
        } else if (dist_method == "rotation") {
          if (!group.is_cyclic()) throw InputError("the rotation method needs a cyclic frequency layout");
          results[p] = quotient_dist_rotation(a, b, group.frequencies(), dist_grid);
        } else {
          results[p] = group.is_cyclic() ? quotient_dist_rotation(a, b, group.frequencies(), dist_grid)
                                         : quotient_dist_auto(a, b, group);
        }
      });
      std::string csv = csv_line({"a", "b", "distance", "method", "minimizer"});
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        csv += csv_line({table.ids[pairs[p].first], table.ids[pairs[p].second],
                         format_double(results[p].distance), to_string(results[p].method),
                         to_string(results[p].minimizer)});
      }
      write_text_file(dist_out, csv);
      manifest.add_output(dist_out);
      manifest.write(dist_out);
      out << "wrote " << pairs.size() << " distances to " << dist_out << "\n";
    }});
  }

  // --------------------------------------------------------------------- knn
  std::string knn_task = "regress", knn_train, knn_test, knn_in, knn_target, knn_k = "1..20", knn_out;
  double knn_test_fraction = 0.2;
  std::uint64_t knn_seed = 0;
  {
    auto* sub = app.add_subcommand("knn", "kNN regression (MAE) or classification (macro-F1)");
    sub->add_option("--task", knn_task, "regress or classify")
        ->check(CLI::IsMember({"regress", "classify"}))
        ->capture_default_str();
    sub->add_option("--train", knn_train, "Training latent CSV")->check(CLI::ExistingFile);
    sub->add_option("--test", knn_test, "Test latent CSV")->check(CLI::ExistingFile);
    sub->add_option("--in", knn_in, "Single latent CSV split by --test-fraction")
        ->check(CLI::ExistingFile);
    sub->add_option("--test-fraction", knn_test_fraction, "Held-out share with --in")
        ->capture_default_str();
    sub->add_option("--seed", knn_seed, "Seed of the --in split")->capture_default_str();
    sub->add_option("--target", knn_target, "Metadata column (default: prop or class)");
    sub->add_option("--k", knn_k, "k values: 5, 1,5,10 or 1..20")->capture_default_str();
    sub->add_option("--out", knn_out, "Output metrics CSV")->required();
    add_threads(sub);
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("knn");
      LatentTable train_t, test_t;
      if (!knn_in.empty()) {
        if (!knn_train.empty() || !knn_test.empty()) {
          throw InputError("use either --in or --train/--test");
        }
        if (!(knn_test_fraction > 0.0 && knn_test_fraction < 1.0)) {
          throw InputError("--test-fraction must be in (0, 1)");
        }
        manifest.add_input(knn_in);
        const LatentTable all = read_latent_table(knn_in);
        std::vector<std::size_t> order(all.rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(knn_seed, kSplit));
        std::shuffle(order.begin(), order.end(), rng);
        const auto test_count = static_cast<std::size_t>(
            std::llround(knn_test_fraction * static_cast<double>(all.rows())));
        std::vector<std::size_t> test_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
        std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(test_count), order.end());
        std::sort(test_rows.begin(), test_rows.end());
        std::sort(train_rows.begin(), train_rows.end());
        train_t = select_rows(all, train_rows);
        test_t = select_rows(all, test_rows);
        manifest.add_seed("seed", knn_seed);
      } else {
        if (knn_train.empty() || knn_test.empty()) throw InputError("pass --train and --test, or --in");
        manifest.add_input(knn_train);
        manifest.add_input(knn_test);
        train_t = read_latent_table(knn_train);
        test_t = read_latent_table(knn_test);
      }
      const auto ks = parse_k_values(knn_k);
      const std::size_t threads = resolve_threads(threads_flag);
      std::string csv;
      if (knn_task == "regress") {
        const std::string target = knn_target.empty() ? "prop" : knn_target;
        const auto mae = knn_regress_eval(train_t.values, column_values(train_t, target), test_t.values,
                                          column_values(test_t, target), ks, threads);
        csv = csv_line({"k", "mae"});
        for (std::size_t i = 0; i < ks.size(); ++i) csv += csv_line({std::to_string(ks[i]), format_double(mae[i])});
      } else {
        const std::string target = knn_target.empty() ? "class" : knn_target;
        const auto f1 = knn_classify_eval(train_t.values, label_values(train_t, target), test_t.values,
                                          label_values(test_t, target), ks, threads);
        csv = csv_line({"k", "macro_f1"});
        for (std::size_t i = 0; i < ks.size(); ++i) csv += csv_line({std::to_string(ks[i]), format_double(f1[i])});
      }
      write_text_file(knn_out, csv);
      manifest.add_output(knn_out);
      manifest.write(knn_out);
      out << "wrote " << ks.size() << " k values to " << knn_out << "\n";
    }});
  }

  // --------------------------------------------------------------------- pca
  std::string pca_in, pca_color, pca_out, pca_csv, pca_title;
  bool pca_categorical = false;
  {
    auto* sub = app.add_subcommand("pca", "First two principal components as SVG scatter");
    sub->add_option("--in", pca_in, "Latent CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--color-by", pca_color, "Metadata column used for colour");
    sub->add_flag("--categorical", pca_categorical, "Colour by category (default for 'class')");
    sub->add_option("--title", pca_title, "Plot title");
    sub->add_option("--out", pca_out, "Output SVG")->required();
    sub->add_option("--csv", pca_csv, "Output CSV of component scores");
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("pca");
      manifest.add_input(pca_in);
      const LatentTable table = read_latent_table(pca_in);
      const PcaModel model = pca_fit(table.values);
      const Matrix scores = pca_transform(model, table.values);
      std::vector<double> colors(table.rows(), 0.0);
      if (!pca_color.empty()) colors = column_values(table, pca_color);
      std::vector<ScatterPoint> points;
      for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto ri = static_cast<Eigen::Index>(r);
        points.push_back({scores(ri, 0), scores(ri, 1), colors[r]});
      }
      ScatterOptions options;
      options.title = pca_title;
      options.color_label = pca_color;
      options.scale = (pca_categorical || pca_color == "class") ? ColorScale::categorical
                                                                : ColorScale::continuous;
      write_text_file(pca_out, svg_scatter(points, options));
      manifest.add_output(pca_out);
      if (!pca_csv.empty()) {
        CsvRow header{"id", "pc1", "pc2"};
        if (!pca_color.empty()) header.push_back(pca_color);
        std::string csv = csv_line(header);
        for (std::size_t r = 0; r < table.rows(); ++r) {
          CsvRow row{table.ids[r], format_double(points[r].x), format_double(points[r].y)};
          if (!pca_color.empty()) row.push_back(format_double(colors[r]));
          csv += csv_line(row);
        }
        write_text_file(pca_csv, csv);
        manifest.add_output(pca_csv);
      }
      manifest.write(pca_out);
      out << "explained variance " << model.explained_variance(0) << " " << model.explained_variance(1)
          << "\n";
    }});
  }

  // ------------------------------------------------------------- interpolate
  std::string interp_params, interp_latents, interp_data, interp_ids, interp_mode = "equivariant",
                                                                     interp_out, interp_hamming;
  std::size_t interp_steps = 25;
  {
    auto* sub = app.add_subcommand("interpolate", "Decode a linear path between two latents");
    sub->add_option("--params", interp_params, "Parameter JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--latents", interp_latents, "Latent CSV")->check(CLI::ExistingFile);
    sub->add_option("--data", interp_data, "Graphs JSON, encoded to posterior means")
        ->check(CLI::ExistingFile);
    sub->add_option("--ids", interp_ids, "Endpoint ids 'a,b' (z1 = a, z2 = b)")->required();
    sub->add_option("--mode", interp_mode, "equivariant or invariant")
        ->check(CLI::IsMember({"equivariant", "invariant"}))
        ->capture_default_str();
    sub->add_option("--steps", interp_steps, "Points on the path")->capture_default_str();
    sub->add_option("--out", interp_out, "Output path JSON")->required();
    sub->add_option("--hamming", interp_hamming, "Consecutive Hamming CSV");
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("interpolate");
      manifest.add_input(interp_params);
      const VaeParams params = read_params(interp_params);
      const LatentTable table = load_latents(interp_latents, interp_data, params, 1, manifest);
      const auto ids = split(interp_ids, ',');
      if (ids.size() != 2) throw InputError("--ids needs exactly two ids separated by a comma");
      const Vector z1 = table.values.row(static_cast<Eigen::Index>(table.row_of(ids[0]))).transpose();
      const Vector z2 = table.values.row(static_cast<Eigen::Index>(table.row_of(ids[1]))).transpose();
      auto path = interpolate(z1, z2, parse_interpolation_mode(interp_mode), interp_steps);
      decode_path(params, path);
      const auto hd = consecutive_hamming(path);
      nlohmann::ordered_json doc;
      doc["format"] = "equilens-path/1";
      doc["mode"] = interp_mode;
      doc["ids"] = ids;
      doc["z1"] = to_std(z1);
      doc["z2"] = to_std(z2);
      doc["alphas"] = path.alphas;
      auto& pts = doc["points"] = nlohmann::ordered_json::array();
      for (const auto& p : path.points) pts.push_back(to_std(p));
      auto& graphs = doc["decoded"] = nlohmann::ordered_json::array();
      for (const auto& g : path.decoded) graphs.push_back(graph_json(g));
      doc["hamming"] = hd;
      doc["mean_hamming"] = mean_consecutive_hamming(path);
      write_text_file(interp_out, doc.dump(1) + "\n");
      manifest.add_output(interp_out);
      if (!interp_hamming.empty()) {
        std::string csv = csv_line({"step", "alpha_from", "alpha_to", "hamming"});
        for (std::size_t s = 0; s < hd.size(); ++s) {
          csv += csv_line({std::to_string(s + 1), format_double(path.alphas[s]),
                           format_double(path.alphas[s + 1]), std::to_string(hd[s])});
        }
        write_text_file(interp_hamming, csv);
        manifest.add_output(interp_hamming);
      }
      manifest.write(interp_out);
      out << "mean consecutive Hamming " << mean_consecutive_hamming(path) << "\n";
    }});
  }

  // --------------------------------------------------------------- stability
  std::string stab_params, stab_latents, stab_data, stab_mode = "both", stab_out, stab_per_path;
  std::size_t stab_pairs = 200, stab_steps = 25;
  std::uint64_t stab_seed = 0;
  {
    auto* sub = app.add_subcommand("stability", "Hamming stability of interpolations over random pairs");
    sub->add_option("--params", stab_params, "Parameter JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--latents", stab_latents, "Latent CSV")->check(CLI::ExistingFile);
    sub->add_option("--data", stab_data, "Graphs JSON, encoded to posterior means")->check(CLI::ExistingFile);
    sub->add_option("--pairs", stab_pairs, "Number of random pairs")->capture_default_str();
    sub->add_option("--seed", stab_seed, "Pair sampling seed")->capture_default_str();
    sub->add_option("--mode", stab_mode, "equivariant, invariant or both")
        ->check(CLI::IsMember({"equivariant", "invariant", "both"}))
        ->capture_default_str();
    sub->add_option("--steps", stab_steps, "Points per path")->capture_default_str();
    sub->add_option("--out", stab_out, "Histogram CSV")->required();
    sub->add_option("--per-path", stab_per_path, "Per-pair mean Hamming CSV");
    add_threads(sub);
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("stability");
      manifest.add_input(stab_params);
      const std::size_t threads = resolve_threads(threads_flag);
      const VaeParams params = read_params(stab_params);
      const LatentTable table = load_latents(stab_latents, stab_data, params, threads, manifest);
      if (table.rows() < 2) throw InputError("stability needs at least two latents");
      Rng rng(derive_seed(stab_seed, kPairs));
      std::uniform_int_distribution<std::size_t> pick(0, table.rows() - 1);
      std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
      std::vector<LatentPair> pairs;
      for (std::size_t p = 0; p < stab_pairs; ++p) {
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        while (b == a) b = pick(rng);
        index_pairs.emplace_back(a, b);
        pairs.push_back({table.values.row(static_cast<Eigen::Index>(a)).transpose(),
                         table.values.row(static_cast<Eigen::Index>(b)).transpose()});
      }
      std::vector<std::string> modes;
      if (stab_mode == "both" || stab_mode == "equivariant") modes.push_back("equivariant");
      if (stab_mode == "both" || stab_mode == "invariant") modes.push_back("invariant");
      std::vector<StabilityResult> results;
      for (const auto& m : modes) {
        results.push_back(interpolation_stability(params, pairs, parse_interpolation_mode(m), stab_steps, threads));
        out << m << " mean consecutive Hamming " << results.back().mean << "\n";
      }
      std::size_t bins = 0;
      for (const auto& r : results) bins = std::max(bins, r.histogram.counts.size());
      CsvRow header{"bin_lo", "bin_hi"};
      for (const auto& m : modes) header.push_back("count_" + m);
      std::string csv = csv_line(header);
      for (std::size_t b = 0; b < bins; ++b) {
        const double w = results.front().histogram.bin_width;
        CsvRow row{format_double(w * static_cast<double>(b)), format_double(w * static_cast<double>(b + 1))};
        for (const auto& r : results) {
          row.push_back(std::to_string(b < r.histogram.counts.size() ? r.histogram.counts[b] : 0));
        }
        csv += csv_line(row);
      }
      write_text_file(stab_out, csv);
      manifest.add_output(stab_out);
      if (!stab_per_path.empty()) {
        CsvRow h{"a", "b"};
        for (const auto& m : modes) h.push_back("mean_hamming_" + m);
        std::string pcsv = csv_line(h);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          CsvRow row{table.ids[index_pairs[p].first], table.ids[index_pairs[p].second]};
          for (const auto& r : results) row.push_back(format_double(r.per_path[p]));
          pcsv += csv_line(row);
        }
        write_text_file(stab_per_path, pcsv);
        manifest.add_output(stab_per_path);
      }
      manifest.add_seed("seed", stab_seed);
      manifest.write(stab_out);
    }});
  }

  // ---------------------------------------------------------------- selftest
  std::uint64_t self_seed = 0;
  std::string self_out;
  bool self_failed = false;
  {
    auto* sub = app.add_subcommand("selftest", "Run the built-in property suites");
    sub->add_option("--seed", self_seed, "Seed of the random instances")->capture_default_str();
    sub->add_option("--out", self_out, "Optional JSON report");
    commands.push_back({sub, [&] {
      auto manifest = manifest_for("selftest");
      const auto results = run_selftest(self_seed, [&](const CheckOutcome& c) {
        out << (c.passed ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << " ("
            << c.seconds << " s): " << c.detail << std::endl;
      });
      nlohmann::ordered_json doc = nlohmann::ordered_json::array();
      for (const auto& c : results) {
        self_failed = self_failed || !c.passed;
        doc.push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"detail", c.detail}});
      }
      if (!self_out.empty()) {
        write_text_file(self_out, doc.dump(1) + "\n");
        manifest.add_seed("seed", self_seed);
        manifest.add_output(self_out);
        manifest.write(self_out);
      }
    }});
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    for (auto& c : commands) {
      if (c.app->parsed()) c.run();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return self_failed ? kExitInternalError : kExitOk;
}

}  // namespace equilens::cli
