#include "patronage/faction.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/features.hpp"

namespace patronage {

CliqueAssignment cliques_by_origin(const Dataset& ds, CliqueLevel level) {
  CliqueAssignment out;
  for (const auto& [id, p] : ds.politicians)
    out.emplace(id, level == CliqueLevel::City ? p.home_city : p.home_province);
  return out;
}

CliqueRatioReport clique_ratio(const PatronageGraph& input, const CliqueAssignment& cliques,
                               const std::map<PoliticianId, Rank>& ranks,
                               const CliqueRatioOptions& opts) {
  const PatronageGraph g = input.directed() ? undirect(input) : input;
  auto clique_of = [&](PoliticianId id) -> const std::string& {
    auto it = cliques.find(id);
    if (it == cliques.end()) fail(ErrorCode::MissingClique, fmt::format("no clique for {}", id.value));
    return it->second;
  };

  CliqueRatioReport report;
  std::map<int, std::vector<double>> by_level;
  for (PatronageGraph::Index u = 0; u < g.node_count(); ++u) {
    CliqueRatioRow row;
    row.id = g.id_at(u);
    const std::string& own = clique_of(row.id);
    for (auto v : g.neighbors(u)) (clique_of(g.id_at(v)) == own ? row.within : row.between)++;
    row.ratio = row.between == 0
                    ? CliqueRatioReport::kCap
                    : std::min(CliqueRatioReport::kCap,
                               static_cast<double>(row.within) / static_cast<double>(row.between));
    if (row.within + row.between == 0) {
      ++report.isolated;
    } else if (auto rk = ranks.find(row.id); rk != ranks.end()) {
      const int level = rk->second.level();
      if (opts.strict ? level > opts.min_rank : level >= opts.min_rank)
        by_level[level].push_back(row.ratio);
    }
    report.rows.push_back(row);
  }
  for (auto& [level, ratios] : by_level) {
    RankRatioSummary s;
    s.level = level;
    s.nodes = ratios.size();
    s.mean_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    s.ratios = std::move(ratios);
    report.by_rank.push_back(std::move(s));
  }
  for (std::size_t k = 1; k < report.by_rank.size(); ++k) {
    const auto& lo = report.by_rank[k - 1];
    const auto& hi = report.by_rank[k];
    std::optional<TTestResult> t;
    try {
      t = welch_t_test(lo.ratios, hi.ratios);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
    }
    report.level_jumps.push_back({{lo.level, hi.level}, t});
  }
  return report;
}

GenderReport gender_report(const PatronageGraph& g, const Dataset& ds) {
  const auto ranks = final_ranks(ds);
  GenderReport report;
  report.male.gender = Gender::Male;
  report.female.gender = Gender::Female;
  for (PoliticianId id : g.nodes())
    if (!ds.politicians.contains(id))
      fail(ErrorCode::MissingGender, fmt::format("no gender for node {}", id.value));
  std::vector<std::int64_t> deg[2], rk[2];
  for (PatronageGraph::Index u = 0; u < g.node_count(); ++u) {
    const PoliticianId id = g.id_at(u);
    auto it = ds.politicians.find(id);
    const int side = it->second.gender == Gender::Male ? 0 : 1;
    GenderGroup& grp = side == 0 ? report.male : report.female;
    ++grp.nodes;
    const auto d = static_cast<std::int64_t>(total_degree(g, id));
    deg[side].push_back(d);
    grp.degrees.push_back(static_cast<double>(d));
    if (auto r = ranks.find(id); r != ranks.end()) {
      rk[side].push_back(r->second.level());
      grp.ranks.push_back(r->second.level());
      if (r->second.is_high()) ++grp.high_rank_count;
    }
    if (!g.neighbors(u).empty()) grp.neighbor_ranks.push_back(neighbor_rank(g, ranks, id));
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  for (int side = 0; side < 2; ++side) {
    GenderGroup& grp = side == 0 ? report.male : report.female;
    grp.degree_proportions = proportions(deg[side]);
    grp.rank_proportions = proportions(rk[side]);
    grp.mean_degree = mean(grp.degrees);
    grp.mean_rank = mean(grp.ranks);
    grp.with_neighbors = grp.neighbor_ranks.size();
    grp.mean_neighbor_rank = mean(grp.neighbor_ranks);
  }
  auto compare = [&](std::string measure, const std::vector<double>& a, const std::vector<double>& b) {
    GenderComparison c;
    c.measure = std::move(measure);
    try {
      c.test = welch_t_test(a, b);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
      c.note = e.what();
    }
    report.comparisons.push_back(std::move(c));
  };
  compare("total_degree", report.male.degrees, report.female.degrees);
  compare("final_rank", report.male.ranks, report.female.ranks);
  compare("neighbor_rank", report.male.neighbor_ranks, report.female.neighbor_ranks);
  return report;
}

std::vector<ProvinceCount> origin_distribution(const Dataset& ds, int min_rank) {
  const auto ranks = final_ranks(ds);
  std::map<std::string, std::size_t> counts;
  for (const auto& [id, p] : ds.politicians) {
    auto& c = counts[p.home_province];
    if (auto r = ranks.find(id); r != ranks.end() && r->second.level() >= min_rank) ++c;
  }
  std::vector<ProvinceCount> out;
  for (auto& [prov, c] : counts) out.push_back({prov, c});
  std::stable_sort(out.begin(), out.end(),
                   [](const ProvinceCount& a, const ProvinceCount& b) { return a.count > b.count; });
  return out;
}

TTestResult paired_group_t_test(std::span<const double> a, std::span<const double> b) {
  return welch_t_test(a, b);
}

}  // namespace patronage
