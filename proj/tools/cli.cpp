#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "patronage/embedding.hpp"
#include "patronage/error.hpp"
#include "patronage/features.hpp"
#include "patronage/graph.hpp"
#include "patronage/hits.hpp"
#include "patronage/ingest.hpp"
#include "patronage/studies.hpp"
#include "patronage/table_io.hpp"

namespace patronage::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutEnv = "PATRONAGE_OUT";

enum class Level { Error, Warn, Info, Debug };

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string log_level = "info";
  bool record_timings = false;

  Level level() const {
    if (log_level == "error") return Level::Error;
    if (log_level == "warn") return Level::Warn;
    if (log_level == "debug") return Level::Debug;
    return Level::Info;
  }
};

class Log {
 public:
  explicit Log(const Globals& g) : g_(g) {}
  void operator()(Level at, const std::string& msg) const {
    static constexpr const char* kTag[] = {"error", "warn", "info", "debug"};
    if (at <= g_.level()) std::cerr << "[" << kTag[static_cast<int>(at)] << "] " << msg << '\n';
  }

 private:
  const Globals& g_;
};

/// Output goes to `<out>.partial` first and replaces `<out>` only once the
/// command has finished, so a failed run leaves nothing half-written behind.
class Staging {
 public:
  explicit Staging(fs::path target)
      : target_(std::move(target)), partial_(target_.string() + ".partial") {
    fs::remove_all(partial_);
    fs::create_directories(partial_);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(partial_, ec);
    }
  }

  const fs::path& dir() const { return partial_; }

  void commit() {
    fs::remove_all(target_);
    fs::rename(partial_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path partial_;
  bool committed_ = false;
};

json option_values(const CLI::App& sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->get_type_size() == 0) {
      params[name] = opt->count() > 0;
      continue;
    }
    auto res = opt->reduced_results();
    if (res.empty())
      params[name] = opt->get_default_str();
    else if (res.size() == 1)
      params[name] = res.front();
    else
      params[name] = res;
  }
  return params;
}

std::optional<YearMonth> parse_cutoff(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto ym = YearMonth::parse(text);
  if (!ym) fail(ErrorCode::Config, fmt::format("cutoff '{}' is not YYYY-MM", text));
  return ym;
}

GraphKind resolve_kind(const std::string& kind, const std::string& variant) {
  if (kind == "home-origin") {
    if (variant == "full") return GraphKind::HomeOriginFull;
    if (variant == "worked") return GraphKind::HomeOriginWorked;
    fail(ErrorCode::Config, fmt::format("unknown home-origin variant '{}'", variant));
  }
  if (auto k = parse_kind(kind)) return *k;
  fail(ErrorCode::Config, fmt::format("unknown graph kind '{}'", kind));
}

const std::vector<std::string> kKinds = {"home-origin",  "home-origin-full", "home-origin-worked",
                                         "overlap", "promotion"};

struct DataArgs {
  std::string dir;
  int end_year = Dataset::kDefaultEndYear;
};

void add_data_options(CLI::App* sub, DataArgs& d) {
  sub->add_option("--data", d.dir, "Dataset directory with politicians/spells/promotions.csv")
      ->required();
  sub->add_option("--end-year", d.end_year, "Last observed year of the dataset");
}

struct GraphArgs {
  std::string kind = "overlap";
  std::string variant = "full";
  std::string cutoff;
};

void add_graph_options(CLI::App* sub, GraphArgs& g, bool with_cutoff) {
  sub->add_option("--kind", g.kind, "Graph kind")->check(CLI::IsMember(kKinds));
  sub->add_option("--variant", g.variant, "Home-origin variant")
      ->check(CLI::IsMember({"full", "worked"}));
  if (with_cutoff)
    sub->add_option("--cutoff", g.cutoff, "Ignore career records after this month (YYYY-MM)");
}

void add_embedding_options(CLI::App* sub, WalkConfig& w, EmbedConfig& e) {
  sub->add_option("--walks", w.walks_per_node, "Walks per sampled node");
  sub->add_option("--walk-length", w.walk_length, "Nodes per walk");
  sub->add_option("--return-weight", w.return_weight, "Weight of stepping back to the previous node");
  sub->add_option("--same-weight", w.same_distance_weight,
                  "Weight of neighbors adjacent to the previous node");
  sub->add_option("--explore-weight", w.explore_weight,
                  "Weight of neighbors two steps from the previous node");
  sub->add_option("--sample-fraction", w.node_sample_fraction, "Share of nodes kept for walking");
  sub->add_option("--dims", e.dimensions, "Embedding dimensions");
  sub->add_option("--window", e.window, "Skip-gram context window");
  sub->add_option("--negatives", e.negatives_per_positive, "Negative samples per positive pair");
  sub->add_option("--epochs", e.epochs, "Training epochs");
  sub->add_option("--lr", e.learning_rate, "Initial learning rate");
}

struct Context {
  Globals g;
  Log log{g};
  CLI::App* sub = nullptr;
  std::string command;
  json counts = json::object();

  fs::path out_dir() const {
    if (g.out.empty())
      fail(ErrorCode::Config,
           fmt::format("no output directory; pass --out or set {}", kOutEnv));
    return g.out;
  }
};

Dataset load(const DataArgs& d, Context& ctx) {
  Dataset ds = load_dataset(DatasetFiles::in_directory(d.dir), d.end_year);
  for (const auto& w : ds.warnings) ctx.log(Level::Warn, w);
  ctx.log(Level::Info, fmt::format("loaded {} politicians, {} spells, {} promotions",
                                   ds.politicians.size(), ds.spells.size(), ds.promotions.size()));
  return ds;
}

/// Runs `body` against a staging directory and writes the manifest.
void with_output(Context& ctx, const std::function<void(const fs::path&)>& body) {
  const auto started = std::chrono::steady_clock::now();
  Staging stage(ctx.out_dir());
  body(stage.dir());
  json manifest{{"tool", "patronage"},
                {"version", kVersion},
                {"command", ctx.command},
                {"seed", ctx.g.seed},
                {"threads", ctx.g.threads},
                {"parameters", option_values(*ctx.sub)},
                {"counts", ctx.counts}};
  if (ctx.g.record_timings)
    manifest["timings"] = {
        {"seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
  {
    auto out = open_output(stage.dir() / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  stage.commit();
  ctx.log(Level::Info, fmt::format("wrote {}", ctx.out_dir().string()));
}

PatronageGraph graph_for(const Dataset& ds, const GraphArgs& ga) {
  const GraphKind kind = resolve_kind(ga.kind, ga.variant);
  if (auto cut = parse_cutoff(ga.cutoff)) return build_graph(truncate_before(ds, *cut), kind);
  return build_graph(ds, kind);
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Usage:
      return 1;
    case ErrorCategory::Data:
      return 2;
    case ErrorCategory::Numerical:
      return 3;
  }
  return 2;
}

}  // namespace

int run(int argc, const char* const* argv) {
  Context ctx;
  CLI::App app{"Patronage network reconstruction and analysis"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.add_option("--out", ctx.g.out, "Run output directory")->envname(kOutEnv);
  app.add_option("--seed", ctx.g.seed, "Random seed");
  app.add_option("--threads", ctx.g.threads, "Worker threads (1 is fully deterministic)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", ctx.g.log_level, "Log verbosity")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_flag("--record-timings", ctx.g.record_timings, "Add wall-clock timings to the manifest");

  std::function<void()> action;
  auto command = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    return sub;
  };

  // synth
  SynthConfig synth;
  {
    CLI::App* sub = command("synth", "Generate a synthetic career-record dataset");
    sub->add_option("--n", synth.n_politicians, "Politicians");
    sub->add_option("--provinces", synth.n_provinces, "Provinces");
    sub->add_option("--cities", synth.n_cities, "Cities");
    sub->add_option("--strength", synth.planted_patronage_strength,
                    "Planted patronage effect on promotion hazard, in [0,1]");
    sub->add_option("--female-fraction", synth.female_fraction, "Share of female politicians");
    sub->add_option("--first-year", synth.first_year, "First simulated year");
    sub->add_option("--end-year", synth.end_year, "Last simulated year");
    sub->final_callback([&] {
      action = [&] {
        synth.seed = ctx.g.seed;
        Dataset ds = generate_synthetic(synth);
        with_output(ctx, [&](const fs::path& dir) {
          write_dataset(ds, DatasetFiles::in_directory(dir));
          auto s = summarize(ds);
          ctx.counts = {{"politicians", s.politicians}, {"provinces", s.provinces},
                        {"cities", s.cities},           {"spells", s.spell_rows},
                        {"promotions", s.promotions}};
        });
      };
    });
  }

  // summarize
  DataArgs sum_data;
  {
    CLI::App* sub = command("summarize", "Print dataset counts");
    add_data_options(sub, sum_data);
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(sum_data, ctx);
        auto s = summarize(ds);
        std::cout << "politicians: " << s.politicians << '\n'
                  << "provinces: " << s.provinces << '\n'
                  << "cities: " << s.cities << '\n'
                  << "spells: " << s.spell_rows << '\n'
                  << "promotions: " << s.promotions << '\n'
                  << "warnings: " << ds.warnings.size() << '\n';
      };
    });
  }

  // build
  DataArgs build_data;
  GraphArgs build_graph_args;
  {
    CLI::App* sub = command("build", "Write the edge list of one network");
    add_data_options(sub, build_data);
    add_graph_options(sub, build_graph_args, true);
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(build_data, ctx);
        PatronageGraph g = graph_for(ds, build_graph_args);
        with_output(ctx, [&](const fs::path& dir) {
          auto out = open_output(dir / "edges.csv");
          write_edge_list(g, out);
          ctx.counts = {{"nodes", g.node_count()}, {"edges", g.edge_count()}};
        });
      };
    });
  }

  // features
  DataArgs feat_data;
  GraphArgs feat_graph;
  int feat_hops = 2;
  {
    CLI::App* sub = command("features", "Write aggregated structural features per node");
    add_data_options(sub, feat_data);
    add_graph_options(sub, feat_graph, true);
    sub->add_option("--hops", feat_hops, "Aggregation rounds")->check(CLI::Range(0, 6));
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(feat_data, ctx);
        PatronageGraph g = graph_for(ds, feat_graph);
        FeatureMatrix fm = aggregate_features(g, feat_hops, ctx.g.threads);
        with_output(ctx, [&](const fs::path& dir) {
          auto out = open_output(dir / "features.csv");
          write_feature_matrix(fm, out);
          ctx.counts = {{"nodes", fm.nodes.size()}, {"width", fm.width}};
        });
      };
    });
  }

  // embed
  DataArgs emb_data;
  GraphArgs emb_graph;
  WalkConfig emb_walk;
  EmbedConfig emb_cfg;
  bool emb_write_walks = false;
  {
    CLI::App* sub = command("embed", "Biased random walks plus skip-gram node embeddings");
    add_data_options(sub, emb_data);
    add_graph_options(sub, emb_graph, true);
    add_embedding_options(sub, emb_walk, emb_cfg);
    sub->add_flag("--write-walks", emb_write_walks, "Also write the walk corpus");
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(emb_data, ctx);
        PatronageGraph g = graph_for(ds, emb_graph);
        emb_walk.seed = ctx.g.seed;
        emb_cfg.seed = ctx.g.seed;
        emb_cfg.threads = ctx.g.threads;
        auto walks = random_walks(g, emb_walk, ctx.g.threads);
        ctx.log(Level::Debug, fmt::format("{} walks", walks.size()));
        Embedding emb = train_skipgram(walks, emb_cfg);
        with_output(ctx, [&](const fs::path& dir) {
          {
            auto out = open_output(dir / "embedding.csv");
            write_embedding(emb, out);
          }
          {
            auto out = open_output(dir / "loss.csv");
            out << "epoch,mean_loss\n";
            for (std::size_t i = 0; i < emb.epoch_loss.size(); ++i)
              out << i << ',' << format_double(emb.epoch_loss[i]) << '\n';
          }
          if (emb_write_walks) {
            auto out = open_output(dir / "walks.txt");
            write_walks(walks, out);
          }
          ctx.counts = {{"walks", walks.size()}, {"embedded_nodes", emb.nodes.size()}};
        });
      };
    });
  }

  // hits
  DataArgs hits_data;
  GraphArgs hits_graph;
  HitsOptions hits_opts;
  bool hits_sym = false;
  {
    CLI::App* sub = command("hits", "Hub and authority scores");
    add_data_options(sub, hits_data);
    add_graph_options(sub, hits_graph, true);
    sub->add_flag("--symmetrize", hits_sym, "Add the reverse of every edge first");
    sub->add_option("--tol", hits_opts.tol, "Largest per-node change between iterates that stops the iteration");
    sub->add_option("--max-iter", hits_opts.max_iter, "Iteration cap");
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(hits_data, ctx);
        PatronageGraph g = graph_for(ds, hits_graph);
        if (hits_sym) g = symmetrize(g);
        HitsScores s = hits_scores(g, hits_opts);
        if (!s.converged)
          ctx.log(Level::Warn, fmt::format("HITS stopped after {} iterations", s.iterations_used));
        with_output(ctx, [&](const fs::path& dir) {
          auto out = open_output(dir / "hits.csv");
          write_hits_scores(s, out);
          ctx.counts = {{"nodes", s.nodes.size()},
                        {"iterations", s.iterations_used},
                        {"converged", s.converged}};
        });
      };
    });
  }

  // study1
  DataArgs s1_data;
  GraphArgs s1_graph;
  Study1Config s1;
  std::string s1_missing = "drop";
  std::string s1_mode = "folds";
  std::vector<std::string> s1_models{"ols", "ordinal"};
  {
    CLI::App* sub = command("study1", "Rank prediction from network features");
    add_data_options(sub, s1_data);
    sub->add_option("--kind", s1_graph.kind, "Graph kind")->check(CLI::IsMember(kKinds));
    sub->add_option("--variant", s1_graph.variant, "Home-origin variant")
        ->check(CLI::IsMember({"full", "worked"}));
    sub->add_option("--cutoff", s1_graph.cutoff,
                    "Build features from records up to this month (YYYY-MM or 'midpoint')");
    sub->add_option("--hops", s1.hops, "Aggregation rounds")->check(CLI::Range(0, 6));
    sub->add_flag("--features-only", s1.features_only, "Leave out biographical covariates");
    sub->add_option("--missing-promotion", s1_missing,
                    "Rows without a rank-5 promotion year: drop or indicator")
        ->check(CLI::IsMember({"drop", "indicator"}));
    sub->add_option("--folds", s1.holdout.folds, "Cross-validation folds or repetitions")
        ->check(CLI::Range(2, 1000));
    sub->add_option("--holdout", s1_mode, "folds (disjoint) or splits (repeated random)")
        ->check(CLI::IsMember({"folds", "splits"}));
    sub->add_option("--holdout-fraction", s1.holdout.holdout_fraction,
                    "Held-out share per repetition in splits mode");
    sub->add_option("--models", s1_models, "Comma-separated models to fit: ols, ordinal")
        ->delimiter(',')
        ->check(CLI::IsMember({"ols", "ordinal"}));
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(s1_data, ctx);
        s1.graph = resolve_kind(s1_graph.kind, s1_graph.variant);
        s1.cutoff = s1_graph.cutoff == "midpoint" ? std::optional(career_midpoint(ds))
                                                  : parse_cutoff(s1_graph.cutoff);
        s1.missing_promotion =
            s1_missing == "drop" ? MissingPromotion::Drop : MissingPromotion::IndicatorZero;
        s1.holdout.mode = s1_mode == "folds" ? HoldoutMode::DisjointFolds : HoldoutMode::RepeatedSplits;
        s1.models.clear();
        for (const auto& m : s1_models)
          s1.models.push_back(m == "ols" ? ModelKind::Ols : ModelKind::OrdinalLogit);
        s1.holdout.seed = ctx.g.seed;
        s1.threads = ctx.g.threads;
        Study1Result r = run_study1(ds, s1);
        for (const auto& c : r.dropped_columns)
          ctx.log(Level::Debug, fmt::format("dropped collinear column {}", c));
        with_output(ctx, [&](const fs::path& dir) {
          write_study1(r, s1, dir);
          ctx.counts = {{"rows", r.rows},
                        {"dropped_rows", r.dropped_rows},
                        {"dropped_columns", r.dropped_columns.size()}};
        });
      };
    });
  }

  // study2
  DataArgs s2_data;
  Study2Config s2;
  std::string s2_level = "city";
  std::string s2_gdp;
  {
    CLI::App* sub = command("study2", "Gender, home-origin and clique analyses");
    add_data_options(sub, s2_data);
    add_embedding_options(sub, s2.walk, s2.embed);
    sub->add_option("--clique-level", s2_level, "Clique key: home city or home province")
        ->check(CLI::IsMember({"city", "province"}));
    sub->add_option("--clique-min-rank", s2.clique.min_rank, "Lowest rank in the clique analysis");
    sub->add_flag("--strict", s2.clique.strict, "Use rank > min instead of rank >= min");
    sub->add_option("--origin-min-rank", s2.origin_min_rank, "Rank floor for origin counts");
    sub->add_option("--origin-top", s2.origin_top, "Provinces in the top-origin table");
    sub->add_option("--gdp", s2_gdp, "province,gdp table compared against top-origin counts");
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(s2_data, ctx);
        s2.clique_level = s2_level == "city" ? CliqueLevel::City : CliqueLevel::Province;
        if (!s2_gdp.empty()) s2.gdp = load_gdp_table(s2_gdp);
        s2.walk.seed = ctx.g.seed;
        s2.embed.seed = ctx.g.seed;
        s2.threads = ctx.g.threads;
        Study2Result r = run_study2(ds, s2);
        with_output(ctx, [&](const fs::path& dir) {
          write_study2(r, s2, dir);
          ctx.counts = {{"politicians", ds.politicians.size()},
                        {"embedded_nodes", r.embedded_nodes},
                        {"clique_rows", r.clique.rows.size()}};
        });
      };
    });
  }

  // study3
  DataArgs s3_data;
  Study3Config s3;
  {
    CLI::App* sub = command("study3", "Hub and authority scores against final rank");
    add_data_options(sub, s3_data);
    sub->add_flag("--symmetrize", s3.symmetrize_overlap, "Symmetrize the overlap graph first");
    sub->add_option("--tol", s3.hits.tol, "Largest per-node change between iterates that stops the iteration");
    sub->add_option("--max-iter", s3.hits.max_iter, "Iteration cap");
    sub->final_callback([&] {
      action = [&] {
        Dataset ds = load(s3_data, ctx);
        Study3Result r = run_study3(ds, s3);
        with_output(ctx, [&](const fs::path& dir) {
          write_study3(r, s3, dir);
          ctx.counts = {{"graphs", r.graphs.size()}};
        });
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ctx.sub = app.get_subcommands().front();
  ctx.command = ctx.sub->get_name();
  try {
    if (action) action();
    return 0;
  } catch (const ParseError& e) {
    ctx.log(Level::Error, e.what());
    return 2;
  } catch (const Error& e) {
    ctx.log(Level::Error, e.what());
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    ctx.log(Level::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    ctx.log(Level::Error, e.what());
    return 1;
  }
}

}  // namespace patronage::cli
