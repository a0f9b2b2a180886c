#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patronage/data_model.hpp"
#include "patronage/graph.hpp"
#include "patronage/ingest.hpp"
#include "patronage/stats.hpp"

namespace patronage {

using CliqueAssignment = std::map<PoliticianId, std::string>;

enum class CliqueLevel { City, Province };

CliqueAssignment cliques_by_origin(const Dataset& ds, CliqueLevel level);

struct CliqueRatioRow {
  PoliticianId id;
  std::size_t within = 0;
  std::size_t between = 0;
  double ratio = 0;
};

struct RankRatioSummary {
  int level = 0;
  double mean_ratio = 0;
  std::size_t nodes = 0;
  std::vector<double> ratios;
};

struct CliqueRatioReport {
  static constexpr double kCap = 30.0;

  std::vector<CliqueRatioRow> rows;
  std::vector<RankRatioSummary> by_rank;
  /// Nodes with no incident edges, left out of by_rank.
  std::size_t isolated = 0;
  /// Welch tests between consecutive levels in by_rank.
  std::vector<std::pair<std::pair<int, int>, std::optional<TTestResult>>> level_jumps;
};

struct CliqueRatioOptions {
  int min_rank = 5;
  /// Use level > min_rank instead of level >= min_rank.
  bool strict = false;
};

/// within / between per node, capped at 30 (between == 0 reports the cap).
/// Expects an undirected graph; a directed input is undirected first.
CliqueRatioReport clique_ratio(const PatronageGraph& g, const CliqueAssignment& cliques,
                               const std::map<PoliticianId, Rank>& ranks,
                               const CliqueRatioOptions& opts = {});

struct GenderGroup {
  Gender gender = Gender::Male;
  std::size_t nodes = 0;
  std::map<std::int64_t, double> degree_proportions;
  double mean_degree = 0;
  std::map<std::int64_t, double> rank_proportions;
  double mean_rank = 0;
  std::size_t high_rank_count = 0;
  std::size_t with_neighbors = 0;
  double mean_neighbor_rank = 0;
  std::vector<double> degrees;
  std::vector<double> ranks;
  std::vector<double> neighbor_ranks;
};

struct GenderComparison {
  std::string measure;
  std::optional<TTestResult> test;
  std::string note;
};

struct GenderReport {
  GenderGroup male;
  GenderGroup female;
  std::vector<GenderComparison> comparisons;
};

GenderReport gender_report(const PatronageGraph& g, const Dataset& ds);

struct ProvinceCount {
  std::string province;
  std::size_t count = 0;
};

/// Politicians with final rank >= min_rank per province, descending by count
/// then by name. Every province of the dataset is listed.
std::vector<ProvinceCount> origin_distribution(const Dataset& ds, int min_rank);

/// Welch test on two per-group value lists (e.g. politician counts vs GDP).
TTestResult paired_group_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace patronage
