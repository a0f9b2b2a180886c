#include "patronage/studies.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "patronage/error.hpp"
#include "patronage/features.hpp"
#include "patronage/table_io.hpp"

namespace patronage {
namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json ttest_json(const std::optional<TTestResult>& t, const std::string& note = {}) {
  if (!t) return json{{"note", note}};
  return json{{"t", number(t->t)},        {"df", number(t->df)},     {"p", number(t->p)},
              {"mean_a", number(t->mean_a)}, {"mean_b", number(t->mean_b)}, {"n_a", t->n_a},
              {"n_b", t->n_b}};
}

std::string ttest_cells(const std::optional<TTestResult>& t) {
  if (!t) return ",,";
  return fmt::format("{},{},{}", format_double(t->t), format_double(t->df), format_double(t->p));
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

/// Minimal plot description next to a delimited data file.
void write_figure(const std::filesystem::path& dir, const std::string& name, const std::string& mark,
                  const std::string& data, const std::string& x, const std::string& y,
                  const std::string& title) {
  write_json(dir / "figures" / (name + ".json"),
             json{{"mark", mark}, {"data", data}, {"x", x}, {"y", y}, {"title", title}});
}

json fit_json(const ModelFit& fit) {
  json coefs = json::array();
  for (const auto& c : fit.coefficients)
    coefs.push_back({{"name", c.name},
                     {"estimate", number(c.estimate)},
                     {"std_error", number(c.std_error)},
                     {"statistic", number(c.statistic)},
                     {"p", number(c.p_value)},
                     {"fixed", c.fixed}});
  json j{{"model", model_name(fit.kind)}, {"observations", fit.observations}, {"coefficients", coefs}};
  if (!fit.thresholds.empty()) {
    j["thresholds"] = fit.thresholds;
    j["levels"] = fit.levels;
  }
  if (fit.r_squared) j["r_squared"] = number(*fit.r_squared);
  if (fit.log_likelihood) j["log_likelihood"] = number(*fit.log_likelihood);
  return j;
}

json rank_fit_json(const RankFit& f) {
  json means = json::array();
  for (auto [level, m] : f.rank_means)
    means.push_back({{"rank", level}, {"mean", number(m)}, {"count", f.rank_counts.at(level)}});
  auto term = [](const LinearTerm& t) {
    return json{{"estimate", number(t.estimate)}, {"std_error", number(t.std_error)},
                {"t", number(t.t_stat)},          {"p", number(t.p_value)},
                {"stars", significance_stars(t.p_value)}};
  };
  return json{{"rank_means", means},         {"slope", term(f.slope)},
              {"intercept", term(f.intercept)}, {"observations", f.observations},
              {"df", f.df},                  {"r_squared", number(f.r_squared)},
              {"residual_std_error", number(f.residual_std_error)}};
}

}  // namespace

const Study1Model& Study1Result::model(ModelKind kind) const {
  for (const auto& m : models)
    if (m.kind == kind) return m;
  fail(ErrorCode::Config, fmt::format("model {} was not fitted", model_name(kind)));
}

YearMonth career_midpoint(const Dataset& ds) {
  if (ds.spells.empty()) return YearMonth(ds.end_year, 12);
  YearMonth first = ds.spells.front().start;
  for (const auto& s : ds.spells) first = std::min(first, s.start);
  const YearMonth last(ds.end_year, 12);
  return YearMonth::from_index((first.index() + last.index()) / 2);
}

Study1Result run_study1(const Dataset& ds, const Study1Config& cfg) {
  const Dataset source = cfg.cutoff ? truncate_before(ds, *cfg.cutoff) : Dataset{};
  const PatronageGraph g = build_graph(cfg.cutoff ? source : ds, cfg.graph);
  const FeatureMatrix fm = aggregate_features(g, cfg.hops, cfg.threads);

  DesignOptions opts;
  opts.include_covariates = !cfg.features_only;
  opts.missing_promotion = cfg.missing_promotion;
  DesignBuild built = build_design(ds, fm, opts);

  Study1Result r;
  r.dropped_rows = built.dropped_rows;
  r.dropped_columns = prune_collinear(built.design);
  r.rows = built.design.rows.size();
  r.majority_baseline = majority_baseline(built.design.outcome);
  HoldoutConfig hc = cfg.holdout;
  hc.threads = cfg.threads;
  if (cfg.models.empty()) fail(ErrorCode::Config, "no models selected");
  for (auto kind : cfg.models)
    r.models.push_back({kind, holdout_eval(built.design, kind, hc)});
  return r;
}

void write_study1(const Study1Result& r, const Study1Config& cfg, const std::filesystem::path& dir) {
  {
    auto out = open_output(dir / "accuracy.csv");
    out << "model,in_sample_accuracy,out_of_sample_accuracy,majority_baseline\n";
    for (const auto& m : r.models)
      out << model_name(m.kind) << ',' << format_double(m.result.in_sample_accuracy) << ','
          << format_double(m.result.out_of_sample_accuracy) << ','
          << format_double(r.majority_baseline) << '\n';
  }
  {
    auto out = open_output(dir / "fold_accuracy.csv");
    out << "model,fold,accuracy\n";
    for (const auto& m : r.models)
      for (std::size_t f = 0; f < m.result.fold_accuracy.size(); ++f)
        out << model_name(m.kind) << ',' << f << ',' << format_double(m.result.fold_accuracy[f])
            << '\n';
  }
  json models = json::array();
  for (const auto& m : r.models) {
    auto out = open_output(dir / fmt::format("fit_{}.txt", model_name(m.kind)));
    write_fit_report(m.result.full_fit, out);
    json j = fit_json(m.result.full_fit);
    j["in_sample_accuracy"] = number(m.result.in_sample_accuracy);
    j["out_of_sample_accuracy"] = number(m.result.out_of_sample_accuracy);
    j["fold_accuracy"] = m.result.fold_accuracy;
    models.push_back(std::move(j));
  }
  json doc{{"study", "rank_prediction"},
           {"graph", kind_name(cfg.graph)},
           {"hops", cfg.hops},
           {"cutoff", cfg.cutoff ? json(cfg.cutoff->to_string()) : json(nullptr)},
           {"features_only", cfg.features_only},
           {"missing_promotion",
            cfg.missing_promotion == MissingPromotion::Drop ? "drop" : "indicator_zero"},
           {"folds", cfg.holdout.folds},
           {"holdout_mode",
            cfg.holdout.mode == HoldoutMode::DisjointFolds ? "disjoint_folds" : "repeated_splits"},
           {"seed", cfg.holdout.seed},
           {"rows", r.rows},
           {"dropped_rows", r.dropped_rows},
           {"dropped_collinear_columns", r.dropped_columns},
           {"majority_baseline", number(r.majority_baseline)},
           {"models", models}};
  write_json(dir / "report.json", doc);
}

std::map<std::string, double> load_gdp_table(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(reader.file(), 1, 0, "missing header");
  std::map<std::string, double> out;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 2)
      throw ParseError(reader.file(), reader.line_number(), 0, "expected province,gdp");
    auto v = parse_double(f[1]);
    if (!v) throw ParseError(reader.file(), reader.line_number(), 2, "invalid gdp value");
    out[std::string(f[0])] = *v;
  }
  return out;
}

Study2Result run_study2(const Dataset& ds, const Study2Config& cfg) {
  Study2Result r;
  const PatronageGraph overlap = build_overlap(ds);
  const PatronageGraph promotion = build_promotion(ds);
  r.gender.emplace("overlap", gender_report(overlap, ds));
  r.gender.emplace("promotion", gender_report(promotion, ds));

  r.origin = origin_distribution(ds, cfg.origin_min_rank);
  if (!cfg.gdp.empty()) {
    std::vector<double> counts, gdp;
    for (std::size_t i = 0; i < std::min(cfg.origin_top, r.origin.size()); ++i) {
      auto it = cfg.gdp.find(r.origin[i].province);
      if (it == cfg.gdp.end()) continue;
      counts.push_back(static_cast<double>(r.origin[i].count));
      gdp.push_back(it->second);
    }
    try {
      r.gdp_test = paired_group_t_test(counts, gdp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
      r.gdp_note = e.what();
    }
  }

  const PatronageGraph plain = undirect(overlap);
  const auto walks = random_walks(plain, cfg.walk, cfg.threads);
  EmbedConfig ec = cfg.embed;
  ec.threads = cfg.threads;
  const Embedding emb = train_skipgram(walks, ec);
  r.embedded_nodes = emb.nodes.size();
  r.similarity = province_similarity(emb, ds);
  std::vector<double> in_avg, out_avg;
  std::size_t higher = 0, both = 0;
  for (const auto& p : r.similarity)
    if (p.in_set_avg && p.out_set_avg) {
      in_avg.push_back(*p.in_set_avg);
      out_avg.push_back(*p.out_set_avg);
      ++both;
      higher += *p.in_set_avg > *p.out_set_avg;
    }
  r.share_in_set_higher = both ? static_cast<double>(higher) / static_cast<double>(both) : 0.0;
  try {
    r.similarity_test = welch_t_test(out_avg, in_avg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSample) throw;
    r.similarity_note = e.what();
  }

  r.clique = clique_ratio(plain, cliques_by_origin(ds, cfg.clique_level), final_ranks(ds), cfg.clique);
  return r;
}

void write_study2(const Study2Result& r, const Study2Config& cfg, const std::filesystem::path& dir) {
  json doc{{"study", "faction_detection"}};

  json gender = json::object();
  for (const auto& [graph, rep] : r.gender) {
    {
      auto out = open_output(dir / fmt::format("gender_summary_{}.csv", graph));
      out << "gender,nodes,mean_degree,mean_rank,high_rank_count,nodes_with_neighbors,"
             "mean_neighbor_rank\n";
      for (const GenderGroup* g : {&rep.male, &rep.female})
        out << (g->gender == Gender::Male ? "M" : "F") << ',' << g->nodes << ','
            << format_double(g->mean_degree) << ',' << format_double(g->mean_rank) << ','
            << g->high_rank_count << ',' << g->with_neighbors << ','
            << format_double(g->mean_neighbor_rank) << '\n';
    }
    {
      auto out = open_output(dir / fmt::format("degree_distribution_{}.csv", graph));
      out << "gender,total_degree,proportion\n";
      for (const GenderGroup* g : {&rep.male, &rep.female})
        for (auto [d, share] : g->degree_proportions)
          out << (g->gender == Gender::Male ? "M" : "F") << ',' << d << ',' << format_double(share)
              << '\n';
      write_figure(dir, fmt::format("degree_distribution_{}", graph), "line",
                   fmt::format("degree_distribution_{}.csv", graph), "total_degree", "proportion",
                   fmt::format("Total degree by gender ({})", graph));
    }
    {
      auto out = open_output(dir / fmt::format("rank_distribution_{}.csv", graph));
      out << "gender,final_rank,proportion\n";
      for (const GenderGroup* g : {&rep.male, &rep.female})
        for (auto [lv, share] : g->rank_proportions)
          out << (g->gender == Gender::Male ? "M" : "F") << ',' << lv << ',' << format_double(share)
              << '\n';
    }
    {
      auto out = open_output(dir / fmt::format("gender_tests_{}.csv", graph));
      out << "measure,t,df,p,note\n";
      for (const auto& c : rep.comparisons)
        out << c.measure << ',' << ttest_cells(c.test) << ',' << c.note << '\n';
    }
    json comps = json::array();
    for (const auto& c : rep.comparisons)
      comps.push_back({{"measure", c.measure}, {"test", ttest_json(c.test, c.note)}});
    auto group = [](const GenderGroup& g) {
      return json{{"nodes", g.nodes},
                  {"mean_degree", number(g.mean_degree)},
                  {"mean_rank", number(g.mean_rank)},
                  {"high_rank_count", g.high_rank_count},
                  {"nodes_with_neighbors", g.with_neighbors},
                  {"mean_neighbor_rank", number(g.mean_neighbor_rank)}};
    };
    gender[graph] = {{"male", group(rep.male)}, {"female", group(rep.female)}, {"tests", comps}};
  }
  doc["gender"] = gender;

  {
    auto out = open_output(dir / "origin_distribution.csv");
    out << "province,count\n";
    for (const auto& p : r.origin) out << p.province << ',' << p.count << '\n';
    auto top = open_output(dir / "origin_top.csv");
    top << "province,count\n";
    for (std::size_t i = 0; i < std::min(cfg.origin_top, r.origin.size()); ++i)
      top << r.origin[i].province << ',' << r.origin[i].count << '\n';
    write_figure(dir, "origin_top", "bar", "origin_top.csv", "province", "count",
                 fmt::format("Home provinces of politicians at rank >= {}", cfg.origin_min_rank));
  }
  json origin = json::array();
  for (const auto& p : r.origin) origin.push_back({{"province", p.province}, {"count", p.count}});
  doc["origin_distribution"] = {{"min_rank", cfg.origin_min_rank}, {"provinces", origin}};
  if (!cfg.gdp.empty()) doc["gdp_test"] = ttest_json(r.gdp_test, r.gdp_note);

  {
    auto out = open_output(dir / "province_similarity.csv");
    out << "province,members,in_set_pairs,out_set_pairs,in_set_avg,out_set_avg\n";
    for (const auto& p : r.similarity)
      out << p.province << ',' << p.members << ',' << p.in_set_pairs << ',' << p.out_set_pairs << ','
          << (p.in_set_avg ? format_double(*p.in_set_avg) : "") << ','
          << (p.out_set_avg ? format_double(*p.out_set_avg) : "") << '\n';
    write_figure(dir, "province_similarity", "bar", "province_similarity.csv", "province",
                 "in_set_avg,out_set_avg", "Embedding similarity within and across provinces");
  }
  json sim = json::array();
  for (const auto& p : r.similarity)
    sim.push_back({{"province", p.province},
                   {"members", p.members},
                   {"in_set_avg", p.in_set_avg ? number(*p.in_set_avg) : json(nullptr)},
                   {"out_set_avg", p.out_set_avg ? number(*p.out_set_avg) : json(nullptr)}});
  doc["home_origin_similarity"] = {{"embedded_nodes", r.embedded_nodes},
                                   {"share_in_set_higher", number(r.share_in_set_higher)},
                                   {"test_out_vs_in", ttest_json(r.similarity_test, r.similarity_note)},
                                   {"provinces", sim}};

  {
    auto out = open_output(dir / "clique_ratio_nodes.csv");
    out << "id,within,between,ratio\n";
    for (const auto& row : r.clique.rows)
      out << row.id.value << ',' << row.within << ',' << row.between << ','
          << format_double(row.ratio) << '\n';
    auto lv = open_output(dir / "clique_ratio_by_rank.csv");
    lv << "rank,nodes,mean_ratio\n";
    for (const auto& s : r.clique.by_rank)
      lv << s.level << ',' << s.nodes << ',' << format_double(s.mean_ratio) << '\n';
    auto jumps = open_output(dir / "clique_ratio_jumps.csv");
    jumps << "# unit of analysis: per-node capped clique ratios at each rank level\n";
    jumps << "from_rank,to_rank,t,df,p\n";
    for (const auto& [levels, t] : r.clique.level_jumps)
      jumps << levels.first << ',' << levels.second << ',' << ttest_cells(t) << '\n';
    write_figure(dir, "clique_ratio_by_rank", "line", "clique_ratio_by_rank.csv", "rank",
                 "mean_ratio", "Within/between clique edge ratio by rank");
  }
  json by_rank = json::array();
  for (const auto& s : r.clique.by_rank)
    by_rank.push_back({{"rank", s.level}, {"nodes", s.nodes}, {"mean_ratio", number(s.mean_ratio)}});
  json jumps = json::array();
  for (const auto& [levels, t] : r.clique.level_jumps)
    jumps.push_back({{"from", levels.first}, {"to", levels.second}, {"test", ttest_json(t, "degenerate sample")}});
  doc["clique_ratio"] = {{"clique_level", cfg.clique_level == CliqueLevel::City ? "city" : "province"},
                         {"min_rank", cfg.clique.min_rank},
                         {"strict", cfg.clique.strict},
                         {"cap", CliqueRatioReport::kCap},
                         {"isolated_nodes", r.clique.isolated},
                         {"by_rank", by_rank},
                         {"jumps", jumps},
                         {"unit_of_analysis", "per-node ratios at each rank level"}};
  write_json(dir / "report.json", doc);
}

Study3Result run_study3(const Dataset& ds, const Study3Config& cfg) {
  const auto ranks = final_ranks(ds);
  Study3Result r;
  const PatronageGraph overlap = build_overlap(ds);
  std::vector<std::pair<std::string, PatronageGraph>> graphs;
  graphs.emplace_back("overlap", cfg.symmetrize_overlap ? symmetrize(overlap) : overlap);
  graphs.emplace_back("promotion", build_promotion(ds));
  for (auto& [name, g] : graphs) {
    Study3Graph out;
    out.name = name;
    out.scores = hits_scores(g, cfg.hits);
    std::vector<PoliticianId> ids;
    std::vector<double> hub, auth;
    for (std::size_t i = 0; i < out.scores.nodes.size(); ++i)
      if (ranks.contains(out.scores.nodes[i])) {
        ids.push_back(out.scores.nodes[i]);
        hub.push_back(out.scores.hub[i]);
        auth.push_back(out.scores.authority[i]);
      }
    try {
      out.hub_fit = score_vs_rank(ids, hub, ranks);
      out.authority_fit = score_vs_rank(ids, auth, ranks);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FewerThanThreeRanks) throw;
      out.note = e.what();
    }
    r.graphs.push_back(std::move(out));
  }
  return r;
}

void write_study3(const Study3Result& r, const Study3Config& cfg, const std::filesystem::path& dir) {
  json graphs = json::array();
  for (const auto& g : r.graphs) {
    {
      auto out = open_output(dir / fmt::format("hits_{}.csv", g.name));
      write_hits_scores(g.scores, out);
    }
    json j{{"graph", g.name},
           {"iterations", g.scores.iterations_used},
           {"converged", g.scores.converged}};
    if (!g.note.empty()) j["note"] = g.note;
    for (auto [label, fit] : {std::pair{"hub", &g.hub_fit}, std::pair{"authority", &g.authority_fit}}) {
      if (!*fit) continue;
      const RankFit& f = **fit;
      {
        auto out = open_output(dir / fmt::format("rank_means_{}_{}.csv", g.name, label));
        out << "rank,count,mean_score\n";
        for (auto [level, m] : f.rank_means)
          out << level << ',' << f.rank_counts.at(level) << ',' << format_double(m) << '\n';
      }
      {
        auto out = open_output(dir / fmt::format("scatter_{}_{}.csv", g.name, label));
        out << "final_rank,score\n";
        for (auto [level, s] : f.scatter) out << level << ',' << format_double(s) << '\n';
      }
      {
        auto out = open_output(dir / fmt::format("fit_{}_{}.txt", g.name, label));
        write_rank_fit_report(f, fmt::format("{} score ({})", label, g.name), out);
      }
      write_figure(dir, fmt::format("{}_{}_vs_rank", g.name, label), "scatter+line",
                   fmt::format("scatter_{}_{}.csv", g.name, label), "final_rank", "score",
                   fmt::format("{} score vs final rank ({})", label, g.name));
      j[label] = rank_fit_json(f);
    }
    graphs.push_back(std::move(j));
  }
  write_json(dir / "report.json",
             json{{"study", "hubs_and_authorities"},
                  {"normalization", "l2"},
                  {"tol", cfg.hits.tol},
                  {"max_iter", cfg.hits.max_iter},
                  {"symmetrized_overlap", cfg.symmetrize_overlap},
                  {"graphs", graphs}});
}

}  // namespace patronage
