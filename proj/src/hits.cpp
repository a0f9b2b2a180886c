#include "patronage/hits.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/stats.hpp"
#include "patronage/table_io.hpp"

namespace patronage {
namespace {

using Index = PatronageGraph::Index;

void normalize(std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  if (s > 0)
    for (double& x : v) x /= s;
}

}  // namespace

HitsScores hits_scores(const PatronageGraph& g, const HitsOptions& opts) {
  const std::size_t n = g.node_count();
  if (n == 0) fail(ErrorCode::EmptyGraph, "HITS on a graph without nodes");
  if (!(opts.tol > 0) || opts.max_iter <= 0)
    fail(ErrorCode::Config, "HITS needs positive tol and max_iter");

  HitsScores s;
  s.nodes.assign(g.nodes().begin(), g.nodes().end());
  if (g.edge_count() == 0) {
    s.hub.assign(n, 0.0);
    s.authority.assign(n, 0.0);
    s.converged = true;
    return s;
  }

  const double start = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> hub(n, start), auth(n, start), next_hub(n), next_auth(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t u = 0; u < n; ++u) {
      double a = 0;
      for (Index v : g.in(static_cast<Index>(u))) a += hub[v];
      next_auth[u] = a;
      double h = 0;
      for (Index v : g.out(static_cast<Index>(u))) h += auth[v];
      next_hub[u] = h;
    }
    normalize(next_auth);
    normalize(next_hub);
    double change = 0;
    for (std::size_t u = 0; u < n; ++u)
      change = std::max({change, std::abs(next_auth[u] - auth[u]), std::abs(next_hub[u] - hub[u])});
    hub.swap(next_hub);
    auth.swap(next_auth);
    s.iterations_used = it;
    if (change < opts.tol) {
      s.converged = true;
      break;
    }
  }
  s.hub = std::move(hub);
  s.authority = std::move(auth);
  return s;
}

RankFit score_vs_rank(const std::vector<PoliticianId>& nodes, const std::vector<double>& scores,
                      const std::map<PoliticianId, Rank>& final_ranks) {
  if (nodes.size() != scores.size())
    fail(ErrorCode::LengthMismatch, "score vector does not match node list");
  RankFit fit;
  std::map<int, double> sums;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto it = final_ranks.find(nodes[i]);
    if (it == final_ranks.end())
      fail(ErrorCode::MissingRank, fmt::format("no final rank for node {}", nodes[i].value));
    const int level = it->second.level();
    fit.scatter.emplace_back(level, scores[i]);
    sums[level] += scores[i];
    ++fit.rank_counts[level];
  }
  for (auto& [level, total] : sums)
    fit.rank_means[level] = total / static_cast<double>(fit.rank_counts[level]);

  const std::size_t m = fit.rank_means.size();
  if (m < 3)
    fail(ErrorCode::FewerThanThreeRanks,
         fmt::format("linear fit needs at least three rank levels, found {}", m));
  fit.observations = m;
  fit.df = static_cast<int>(m) - 2;

  double mx = 0, my = 0;
  for (auto [x, y] : fit.rank_means) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : fit.rank_means) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0;
  for (auto [x, y] : fit.rank_means) {
    const double r = y - (intercept + slope * x);
    ssr += r * r;
  }
  const double sigma2 = ssr / fit.df;
  fit.residual_std_error = std::sqrt(sigma2);
  fit.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;

  auto term = [&](double est, double se) {
    LinearTerm t;
    t.estimate = est;
    t.std_error = se;
    if (se > 0) {
      t.t_stat = est / se;
      t.p_value = t_two_sided_p(t.t_stat, fit.df);
    } else {
      // Exact fit: the estimate is known without error.
      t.t_stat = est == 0 ? 0.0 : std::copysign(INFINITY, est);
      t.p_value = est == 0 ? 1.0 : 0.0;
    }
    return t;
  };
  fit.slope = term(slope, std::sqrt(sigma2 / sxx));
  fit.intercept =
      term(intercept, std::sqrt(sigma2 * (1.0 / static_cast<double>(m) + mx * mx / sxx)));
  return fit;
}

const char* significance_stars(double p) {
  if (p < 0.005) return "**";
  if (p < 0.05) return "*";
  if (p < 0.15) return ".";
  return "";
}

void write_hits_scores(const HitsScores& s, std::ostream& os) {
  os << "id,hub,authority\n";
  for (std::size_t i = 0; i < s.nodes.size(); ++i)
    os << s.nodes[i].value << ',' << format_double(s.hub[i]) << ','
       << format_double(s.authority[i]) << '\n';
}

void write_rank_fit_report(const RankFit& fit, const std::string& dependent, std::ostream& os) {
  os << "dependent_variable: " << dependent << '\n';
  os << "final_rank.estimate: " << format_double(fit.slope.estimate)
     << significance_stars(fit.slope.p_value) << '\n';
  os << "final_rank.std_error: " << format_double(fit.slope.std_error) << '\n';
  os << "final_rank.t: " << format_double(fit.slope.t_stat) << '\n';
  os << "final_rank.p: " << format_double(fit.slope.p_value) << '\n';
  os << "intercept.estimate: " << format_double(fit.intercept.estimate)
     << significance_stars(fit.intercept.p_value) << '\n';
  os << "intercept.std_error: " << format_double(fit.intercept.std_error) << '\n';
  os << "intercept.t: " << format_double(fit.intercept.t_stat) << '\n';
  os << "intercept.p: " << format_double(fit.intercept.p_value) << '\n';
  os << "observations: " << fit.observations << '\n';
  os << "df: " << fit.df << '\n';
  os << "residual_std_error: " << format_double(fit.residual_std_error) << '\n';
  os << "r_squared: " << format_double(fit.r_squared) << '\n';
  os << "note: . p<0.15; * p<0.05; ** p<0.005\n";
}

}  // namespace patronage
