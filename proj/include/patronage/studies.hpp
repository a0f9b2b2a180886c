#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patronage/embedding.hpp"
#include "patronage/faction.hpp"
#include "patronage/graph.hpp"
#include "patronage/hits.hpp"
#include "patronage/ingest.hpp"
#include "patronage/stats.hpp"

namespace patronage {

// Rank prediction from k-hop network features.

struct Study1Config {
  GraphKind graph = GraphKind::OverlapBased;
  int hops = 2;
  /// Network features come from the dataset truncated at this month; final
  /// ranks and biographical covariates always come from the full dataset.
  std::optional<YearMonth> cutoff;
  bool features_only = false;
  MissingPromotion missing_promotion = MissingPromotion::Drop;
  HoldoutConfig holdout;
  /// Fitted in this order; a deterministic outcome separates the ordinal model.
  std::vector<ModelKind> models{ModelKind::Ols, ModelKind::OrdinalLogit};
  unsigned threads = 1;
};

struct Study1Model {
  ModelKind kind = ModelKind::Ols;
  HoldoutResult result;
};

struct Study1Result {
  std::size_t rows = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> dropped_columns;
  double majority_baseline = 0;
  std::vector<Study1Model> models;

  const Study1Model& model(ModelKind kind) const;
};

Study1Result run_study1(const Dataset& ds, const Study1Config& cfg);
void write_study1(const Study1Result& r, const Study1Config& cfg, const std::filesystem::path& dir);

/// Midpoint month between the earliest spell start and December of the end year.
YearMonth career_midpoint(const Dataset& ds);

// Faction detection: gender, home origin, clique ratios.

struct Study2Config {
  WalkConfig walk;
  EmbedConfig embed;
  CliqueLevel clique_level = CliqueLevel::City;
  CliqueRatioOptions clique;
  int origin_min_rank = 8;
  std::size_t origin_top = 10;
  /// Province -> GDP, compared against the top-origin counts when present.
  std::map<std::string, double> gdp;
  unsigned threads = 1;
};

struct Study2Result {
  std::map<std::string, GenderReport> gender;  // keyed by graph name
  std::vector<ProvinceCount> origin;
  std::optional<TTestResult> gdp_test;
  std::string gdp_note;
  std::vector<ProvinceSimilarity> similarity;
  std::optional<TTestResult> similarity_test;
  std::string similarity_note;
  double share_in_set_higher = 0;
  std::size_t embedded_nodes = 0;
  CliqueRatioReport clique;
};

Study2Result run_study2(const Dataset& ds, const Study2Config& cfg);
void write_study2(const Study2Result& r, const Study2Config& cfg, const std::filesystem::path& dir);

/// Parses `province,gdp` rows (header required).
std::map<std::string, double> load_gdp_table(const std::filesystem::path& path);

// Hubs and authorities against final rank.

struct Study3Config {
  HitsOptions hits;
  bool symmetrize_overlap = false;
};

struct Study3Graph {
  std::string name;
  HitsScores scores;
  std::optional<RankFit> hub_fit;
  std::optional<RankFit> authority_fit;
  std::string note;
};

struct Study3Result {
  std::vector<Study3Graph> graphs;
};

Study3Result run_study3(const Dataset& ds, const Study3Config& cfg);
void write_study3(const Study3Result& r, const Study3Config& cfg, const std::filesystem::path& dir);

}  // namespace patronage
