// Acceptance checks, one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "graph_fixtures.hpp"
#include "oracle/graph_oracle.hpp"
#include "oracle/numeric_oracle.hpp"
#include "patronage/embedding.hpp"
#include "patronage/faction.hpp"
#include "patronage/features.hpp"
#include "patronage/graph.hpp"
#include "patronage/hits.hpp"
#include "patronage/ingest.hpp"
#include "patronage/rng.hpp"
#include "patronage/stats.hpp"
#include "patronage/studies.hpp"
#include "support.hpp"

using namespace patronage;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double logistic_draw(Rng& rng) {
  const double u = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
  return std::log(u / (1.0 - u));
}

std::vector<PoliticianId> ids(std::size_t n) {
  std::vector<PoliticianId> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(PoliticianId{i});
  return out;
}

PatronageGraph make_graph(bool directed, std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  for (auto [a, b] : pairs)
    edges.push_back({PoliticianId{static_cast<std::uint64_t>(a)}, PoliticianId{static_cast<std::uint64_t>(b)}, 1});
  return PatronageGraph({directed, false}, ids(n), edges);
}

/// Random digraph with its dense 0/1 adjacency.
std::pair<PatronageGraph, std::vector<std::vector<int>>> random_digraph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.bernoulli(p)) {
        adj[i][j] = 1;
        pairs.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1)});
      }
  return {make_graph(true, n, pairs), adj};
}

std::vector<oracle::Arc> arcs(const PatronageGraph& g) {
  std::vector<oracle::Arc> out;
  for (const auto& e : g.edges()) out.push_back({e.src.value, e.dst.value, g.weighted() ? e.weight : 1});
  std::sort(out.begin(), out.end());
  return out;
}

bool same_arcs(std::vector<oracle::Arc> a, std::vector<oracle::Arc> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].src != b[i].src || a[i].dst != b[i].dst || a[i].weight != b[i].weight) return false;
  return true;
}

Verdict graph_construction() {
  const auto fixtures = test::graph_fixtures();
  std::size_t checked = 0, mismatches = 0;
  for (const auto& f : fixtures) {
    if (f.ds.politicians.size() > 12) continue;
    ++checked;
    mismatches += !same_arcs(arcs(build_overlap(f.ds)), oracle::overlap_arcs(f.ds));
    mismatches += !same_arcs(arcs(build_home_origin(f.ds, HomeOriginVariant::Full)), oracle::home_origin_arcs(f.ds, false));
    mismatches += !same_arcs(arcs(build_home_origin(f.ds, HomeOriginVariant::Worked)), oracle::home_origin_arcs(f.ds, true));
    mismatches += !same_arcs(arcs(build_promotion(f.ds)), oracle::promotion_arcs(f.ds));
  }
  return {checked >= 10 && mismatches == 0, fmt::format("{} fixtures, {} mismatching builds", checked, mismatches)};
}

Verdict complete_subgraphs() {
  SynthConfig cfg;
  cfg.n_politicians = 1000;
  cfg.n_cities = 50;
  cfg.seed = 11;
  const Dataset ds = generate_synthetic(cfg);
  const PatronageGraph g = build_home_origin(ds, HomeOriginVariant::Full);
  std::map<std::string, std::vector<PoliticianId>> members;
  for (const auto& [id, p] : ds.politicians) members[p.home_city].push_back(id);
  std::size_t bad = 0, cross = 0;
  for (const auto& [city, m] : members) {
    const auto sub = induced_subgraph(g, m);
    if (sub.edge_count() != m.size() * (m.size() - 1) / 2) ++bad;
  }
  for (const auto& e : g.edges())
    cross += ds.politicians.at(e.src).home_city != ds.politicians.at(e.dst).home_city;
  return {members.size() >= 50 && bad == 0 && cross == 0,
          fmt::format("{} cities, {} incomplete, {} cross-city edges", members.size(), bad, cross)};
}

Verdict feature_shape() {
  const std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}};
  const auto g = make_graph(false, 5, pairs);
  bool widths = true;
  for (int k = 0; k <= 3; ++k) {
    const auto fm = aggregate_features(g, k);
    widths = widths && fm.width == static_cast<std::size_t>(3 * std::pow(3, k)) &&
             fm.values.size() == fm.width * 5;
  }
  std::vector<std::vector<int>> adj(5, std::vector<int>(5, 0));
  for (auto [a, b] : pairs) adj[a - 1][b - 1] = adj[b - 1][a - 1] = 1;
  const auto want = oracle::aggregate(adj, 2);
  const auto fm = aggregate_features(g, 2);
  long double worst = 0;
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t j = 0; j < fm.width; ++j)
      worst = std::max(worst, std::fabs(fm.values[u * fm.width + j] - want[u][j]));
  return {widths && worst <= 1e-12L, fmt::format("widths {}, max deviation {:.3g}", widths ? "3*3^k" : "wrong",
                                                 static_cast<double>(worst))};
}

/// (prev, cur) -> next -> count over every walk.
std::map<std::pair<std::uint64_t, std::uint64_t>, std::map<std::uint64_t, std::size_t>> transitions(
    const std::vector<Walk>& walks) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::map<std::uint64_t, std::size_t>> out;
  for (const auto& w : walks)
    for (std::size_t s = 2; s < w.size(); ++s) out[{w[s - 2].value, w[s - 1].value}][w[s].value]++;
  return out;
}

Verdict walk_bias() {
  struct Case {
    const char* name;
    PatronageGraph g;
    std::size_t length;
  };
  std::vector<Case> cases;
  cases.push_back({"path", make_graph(false, 3, {{1, 2}, {2, 3}}), 200});
  cases.push_back({"triangle", make_graph(false, 4, {{1, 2}, {2, 3}, {1, 3}, {2, 4}}), 400});
  double worst = 0;
  std::size_t min_steps = SIZE_MAX;
  for (auto& c : cases) {
    WalkConfig wc;
    wc.node_sample_fraction = 1.0;
    wc.walks_per_node = 1000;
    wc.walk_length = c.length;
    wc.seed = 3;
    auto counts = transitions(random_walks(c.g, wc));
    for (const auto& [state, next] : counts) {
      const auto weights = transition_weights(c.g, PoliticianId{state.first}, PoliticianId{state.second}, wc);
      double wsum = 0;
      for (auto [id, w] : weights) wsum += w;
      std::size_t total = 0;
      for (auto [id, k] : next) total += k;
      if (total < 100000) continue;
      min_steps = std::min(min_steps, total);
      for (auto [id, w] : weights) {
        auto it = next.find(id.value);
        const double freq = it == next.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
        worst = std::max(worst, std::fabs(freq - w / wsum));
      }
    }
  }
  const bool enough = min_steps != SIZE_MAX;
  return {enough && worst <= 0.02,
          fmt::format("max |freq - p| {:.4f} over states with >= {} steps", worst, enough ? min_steps : 0)};
}

Verdict embedding_separation() {
  std::vector<std::pair<int, int>> pairs;
  for (int block = 0; block < 2; ++block)
    for (int a = 1; a <= 30; ++a)
      for (int b = a + 1; b <= 30; ++b) pairs.push_back({block * 30 + a, block * 30 + b});
  const auto g = make_graph(false, 60, pairs);
  int separated = 0;
  std::string margins;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    WalkConfig wc;
    wc.node_sample_fraction = 1.0;
    wc.seed = seed;
    EmbedConfig ec;
    ec.seed = seed;
    ec.threads = 1;
    const Embedding emb = train_skipgram(random_walks(g, wc), ec);
    double intra = 0, inter = 0;
    std::size_t n_intra = 0, n_inter = 0;
    for (std::size_t a = 0; a < emb.nodes.size(); ++a)
      for (std::size_t b = a + 1; b < emb.nodes.size(); ++b) {
        const bool same = (emb.nodes[a].value - 1) / 30 == (emb.nodes[b].value - 1) / 30;
        (same ? intra : inter) += emb.dot(a, b);
        ++(same ? n_intra : n_inter);
      }
    intra /= static_cast<double>(n_intra);
    inter /= static_cast<double>(n_inter);
    separated += intra > inter;
    margins += fmt::format("{}{:.2f}", margins.empty() ? "" : " ", intra - inter);
  }
  return {separated >= 9, fmt::format("{}/10 seeds separated; intra-inter: {}", separated, margins)};
}

Verdict hits_oracle() {
  long double worst = 0;
  bool duality = true, converged = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [g, adj] = random_digraph(20, 0.15, seed);
    const auto s = hits_scores(g);
    converged = converged && s.converged;
    auto [auth, hub] = oracle::hits(adj);
    for (std::size_t i = 0; i < 20; ++i)
      worst = std::max({worst, std::fabs(s.authority[i] - auth[i]), std::fabs(s.hub[i] - hub[i])});
    const auto r = hits_scores(reverse(g));
    duality = duality && r.authority == s.hub && r.hub == s.authority;
  }
  return {converged && worst < 1e-8L && duality,
          fmt::format("max deviation {:.3g}, reversal duality {}", static_cast<double>(worst),
                      duality ? "exact" : "broken")};
}

Verdict symmetric_identity() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [g, adj] = random_digraph(40, 0.08, 100 + seed);
    const auto s = hits_scores(symmetrize(g));
    for (std::size_t i = 0; i < s.hub.size(); ++i) worst = std::max(worst, std::fabs(s.hub[i] - s.authority[i]));
  }
  SynthConfig cfg;
  cfg.n_politicians = 500;
  cfg.seed = 4;
  const auto s = hits_scores(symmetrize(build_overlap(generate_synthetic(cfg))));
  for (std::size_t i = 0; i < s.hub.size(); ++i) worst = std::max(worst, std::fabs(s.hub[i] - s.authority[i]));
  return {worst < 1e-10, fmt::format("max |hub - authority| {:.3g} over 11 graphs", worst)};
}

DesignMatrix random_design(std::size_t n, std::size_t p, Rng& rng) {
  DesignMatrix dm;
  for (std::size_t j = 0; j + 1 < p; ++j) dm.columns.push_back("x" + std::to_string(j));
  dm.columns.push_back(DesignMatrix::kIntercept);
  dm.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    dm.rows.push_back(PoliticianId{i + 1});
    double s = 4.5;
    for (std::size_t j = 0; j + 1 < p; ++j) {
      const double v = normal(rng);
      dm.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      s += v;
    }
    dm.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p - 1)) = 1.0;
    dm.outcome.push_back(static_cast<int>(std::clamp(std::round(s + normal(rng)), 0.0, 9.0)));
  }
  return dm;
}

Verdict ols_oracle() {
  long double worst_rel = 0;
  double worst_orth = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 7919);
    const std::size_t n = 30 + seed * 5, p = 2 + seed % 6;
    const auto dm = random_design(n, p, rng);
    const auto fit = fit_ols(dm);
    oracle::Matrix x(n, std::vector<long double>(p));
    std::vector<long double> y(dm.outcome.begin(), dm.outcome.end());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) x[i][j] = dm.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    const auto want = oracle::pseudo_inverse_solve(x, y);
    for (std::size_t j = 0; j < p; ++j)
      worst_rel = std::max(worst_rel, std::fabs(fit.coefficients[j].estimate - want[j]) /
                                          std::max(std::fabs(want[j]), 1e-12L));
    Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) yv[static_cast<Eigen::Index>(i)] = dm.outcome[i];
    const Eigen::VectorXd r = yv - dm.x * fit.beta();
    worst_orth = std::max(worst_orth, (dm.x.transpose() * r).cwiseAbs().maxCoeff() / static_cast<double>(n));
  }
  return {worst_rel <= 1e-6L && worst_orth < 1e-8,
          fmt::format("max relative deviation {:.3g}, max |X'r|/n {:.3g}", static_cast<double>(worst_rel), worst_orth)};
}

DesignMatrix ordinal_sample(std::size_t n, double beta, double t0, double t1, std::uint64_t seed) {
  Rng rng(seed);
  DesignMatrix dm;
  dm.columns = {"x", DesignMatrix::kIntercept};
  dm.x.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = normal(rng);
    dm.rows.push_back(PoliticianId{i + 1});
    dm.x(static_cast<Eigen::Index>(i), 0) = x;
    dm.x(static_cast<Eigen::Index>(i), 1) = 1.0;
    const double latent = beta * x + logistic_draw(rng);
    dm.outcome.push_back(latent < t0 ? 0 : latent < t1 ? 1 : 2);
  }
  return dm;
}

Verdict ordinal_checks() {
  // Analytic vs central-difference gradient at 20 random points.
  Rng rng(5);
  const Eigen::Index n = 60, q = 3;
  Eigen::MatrixXd x(n, q);
  std::vector<int> cats;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) x(i, j) = normal(rng);
    cats.push_back(static_cast<int>(rng.below(4)));
  }
  OrdinalObjective obj(x, cats, 4);
  const auto dim = static_cast<Eigen::Index>(obj.parameter_count());
  double worst_grad = 0;
  for (int point = 0; point < 20; ++point) {
    Eigen::VectorXd theta(dim);
    for (Eigen::Index k = 0; k < dim; ++k) theta[k] = normal(rng);
    Eigen::VectorXd grad;
    obj.evaluate(theta, &grad);
    Eigen::VectorXd numeric(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double h = 1e-6;
      Eigen::VectorXd tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      numeric[k] = (obj.evaluate(tp, nullptr) - obj.evaluate(tm, nullptr)) / (2 * h);
    }
    const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index k = 0; k < dim; ++k)
      worst_grad = std::max(worst_grad, std::fabs(grad[k] - numeric[k]) / std::max(std::fabs(numeric[k]), 1e-2 * scale));
  }

  // Probabilities and planted-slope recovery over 100 seeds.
  double worst_sum = 0;
  int within = 0, failed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto dm = ordinal_sample(200, 1.5, -1, 1, seed);
    try {
      const auto fit = fit_ordinal_logit(dm);
      within += std::fabs(fit.coefficients[0].estimate - 1.5) <= 0.3;
      const Eigen::VectorXd eta = dm.x * fit.beta();
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const auto p = category_probabilities(fit.thresholds, eta[i]);
        worst_sum = std::max(worst_sum, std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
      }
    } catch (const Error&) {
      ++failed;
    }
  }
  return {worst_grad <= 1e-4 && worst_sum <= 1e-12 && within >= 95,
          fmt::format("gradient max relative error {:.3g}; probability sums within {:.3g}; "
                      "slope within 0.3 of 1.5 in {}/100 seeds ({} fits failed)",
                      worst_grad, worst_sum, within, failed)};
}

Verdict planted_effect() {
  std::vector<double> gain_full, gain_cut;
  int positive = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc;
    sc.n_politicians = 2000;
    sc.planted_patronage_strength = 0.5;
    sc.seed = seed;
    const Dataset ds = generate_synthetic(sc);

    Study1Config s1;
    s1.models = {ModelKind::Ols};
    s1.holdout.seed = seed;
    const auto full = run_study1(ds, s1);
    s1.cutoff = career_midpoint(ds);
    const auto cut = run_study1(ds, s1);
    const double acc_full = full.model(ModelKind::Ols).result.out_of_sample_accuracy;
    const double acc_cut = cut.model(ModelKind::Ols).result.out_of_sample_accuracy;
    gain_full.push_back(acc_full - full.majority_baseline);
    gain_cut.push_back(acc_cut - cut.majority_baseline);

    const auto s3 = run_study3(ds, {});
    const auto& overlap = s3.graphs.front();
    const bool up = overlap.authority_fit && overlap.authority_fit->slope.estimate > 0;
    positive += up;
    per_seed += fmt::format("{}{:+.3f}/{:+.3f}/{}", per_seed.empty() ? "" : " ", gain_full.back(), gain_cut.back(),
                            up ? "+" : "-");
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double mf = mean(gain_full), mc = mean(gain_cut);
  const double retention = mf > 0 ? mc / mf : 0.0;
  return {mf >= 0.10 && retention >= 0.80 && positive >= 9,
          fmt::format("(a) mean gain over baseline {:.3f}; (b) midpoint cutoff retains {:.0f}% of it; "
                      "(c) authority slope positive in {}/10 [gain full/cut/slope per seed: {}]",
                      mf, 100 * retention, positive, per_seed)};
}

Verdict clique_identities() {
  SynthConfig sc;
  sc.n_politicians = 1000;
  sc.seed = 6;
  const Dataset ds = generate_synthetic(sc);
  const PatronageGraph g = undirect(build_overlap(ds));
  const auto ranks = final_ranks(ds);
  std::size_t broken = 0;
  for (auto level : {CliqueLevel::City, CliqueLevel::Province}) {
    const auto rep = clique_ratio(g, cliques_by_origin(ds, level), ranks);
    for (const auto& row : rep.rows) broken += row.within + row.between != total_degree(g, row.id);
  }
  // Zero-between fixture: a star of five inside one clique.
  const auto star = make_graph(false, 6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}});
  CliqueAssignment one;
  std::map<PoliticianId, Rank> r5;
  for (auto id : ids(6)) {
    one[id] = "A";
    r5.emplace(id, Rank(5));
  }
  const auto capped = clique_ratio(star, one, r5);
  bool cap = true;
  for (const auto& row : capped.rows) cap = cap && row.between == 0 && row.ratio == CliqueRatioReport::kCap;
  cap = cap && capped.rows.front().within == 5;
  return {broken == 0 && cap, fmt::format("{} identity violations on {} nodes x 2 clique levels; cap {}", broken,
                                          g.node_count(), cap ? "30 as expected" : "wrong")};
}

Verdict welch_oracle() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const std::size_t na = 2 + seed % 7, nb = 3 + (seed * 5) % 11;
    const double shift = 0.3 * static_cast<double>(seed % 5);
    const double spread = 0.5 + static_cast<double>(seed % 3);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < na; ++i) a.push_back(normal(rng));
    for (std::size_t i = 0; i < nb; ++i) b.push_back(shift + spread * normal(rng));
    const auto r = welch_t_test(a, b);
    long double ma = 0, mb = 0, va = 0, vb = 0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    ma /= na;
    mb /= nb;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    const long double sa = va / (na - 1) / na, sb = vb / (nb - 1) / nb;
    const long double t = (ma - mb) / std::sqrt(sa + sb);
    const long double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
    worst = std::max(worst, static_cast<double>(std::fabs(r.p - oracle::t_two_sided_p(t, df))));
  }
  const std::vector<double> s{1.0, 2.5, 3.0, 4.5};
  const auto same = welch_t_test(s, s);
  const bool exact = same.t == 0.0 && same.p == 1.0;
  return {worst < 1e-8 && exact, fmt::format("max p deviation {:.3g} over 20 fixtures; identical samples {}", worst,
                                             exact ? "t=0 p=1" : "inexact")};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "patronage");
  args.insert(args.end(), {"--threads", "1", "--log-level", "error"});
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

/// Every subcommand into one run tree. Returns the first failing exit code.
int pipeline(const fs::path& root) {
  const std::string data = (root / "data").string();
  std::vector<std::vector<std::string>> steps{
      {"synth", "--n", "500", "--seed", "13", "--out", data},
      {"summarize", "--data", data},
      {"build", "--data", data, "--kind", "overlap", "--out", (root / "build_overlap").string()},
      {"build", "--data", data, "--kind", "promotion", "--out", (root / "build_promotion").string()},
      {"build", "--data", data, "--kind", "home-origin", "--variant", "worked", "--out", (root / "build_home").string()},
      {"features", "--data", data, "--hops", "2", "--out", (root / "features").string()},
      {"embed", "--data", data, "--seed", "13", "--write-walks", "--out", (root / "embed").string()},
      {"hits", "--data", data, "--out", (root / "hits").string()},
      {"study1", "--data", data, "--seed", "13", "--out", (root / "study1").string()},
      {"study1", "--data", data, "--seed", "13", "--cutoff", "midpoint", "--out", (root / "study1_early").string()},
      {"study2", "--data", data, "--seed", "13", "--out", (root / "study2").string()},
      {"study3", "--data", data, "--out", (root / "study3").string()},
  };
  for (auto& s : steps) {
    // summarize prints to stdout; keep the acceptance report clean.
    if (s.front() == "summarize") {
      std::fflush(stdout);
      const int saved = dup(1);
      std::FILE* null = std::fopen("/dev/null", "w");
      dup2(fileno(null), 1);
      const int code = cli(s);
      std::fflush(stdout);
      dup2(saved, 1);
      close(saved);
      std::fclose(null);
      if (code != 0) return code;
      continue;
    }
    if (int code = cli(s); code != 0) return code;
  }
  return 0;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = test::read_file(e.path());
  return out;
}

Verdict determinism() {
  test::TempDir tmp;
  double slowest = 0;
  // Both runs use the same paths, since manifests record the arguments.
  for (const char* run : {"a", "b"}) {
    const auto t0 = std::chrono::steady_clock::now();
    if (int code = pipeline(tmp / "run"); code != 0) return {false, fmt::format("pipeline run {} exited {}", run, code)};
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    fs::rename(tmp / "run", tmp / run);
  }
  const auto a = tree(tmp / "a"), b = tree(tmp / "b");
  std::size_t differing = 0, bytes = 0;
  for (const auto& [path, content] : a) {
    auto it = b.find(path);
    differing += it == b.end() || it->second != content;
    bytes += content.size();
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  return {differing == 0 && a.size() > 20 && slowest < 180,
          fmt::format("{} files ({} bytes) per run, {} differ; slowest run {:.1f} s", a.size(), bytes, differing,
                      slowest)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 when the criterion sets no runtime bound
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "graph construction matches enumeration", 1, graph_construction},
      {2, "home-origin cities are complete subgraphs", 0, complete_subgraphs},
      {3, "feature width and brute-force recurrence", 0, feature_shape},
      {4, "walk next-step frequencies", 10, walk_bias},
      {5, "embedding separates two cliques", 60, embedding_separation},
      {6, "HITS matches the dense eigen oracle", 0, hits_oracle},
      {7, "symmetric graphs give hub = authority", 0, symmetric_identity},
      {8, "OLS matches the pseudo-inverse oracle", 0, ols_oracle},
      {9, "ordinal gradient, probabilities and refit", 120, ordinal_checks},
      {10, "planted effect end to end", 300, planted_effect},
      {11, "clique-ratio identities and cap", 0, clique_identities},
      {12, "Welch test matches the quadrature oracle", 0, welch_oracle},
      {13, "pipeline runs are byte-identical", 0, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt::format("{:.2f} s", secs);
    if (c.limit_seconds > 0) {
      timing += fmt::format(" of {:.0f} s allowed", c.limit_seconds);
      if (secs >= c.limit_seconds) v.pass = false;
    }
    failures += !v.pass;
    std::printf("%s criterion %2d: %s | %s | %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
