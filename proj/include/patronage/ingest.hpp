#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "patronage/data_model.hpp"

namespace patronage {

struct Dataset {
  static constexpr int kDefaultEndYear = 2015;

  std::map<PoliticianId, Politician> politicians;
  std::vector<JobSpell> spells;
  std::vector<PromotionEvent> promotions;
  int end_year = kDefaultEndYear;
  /// Non-fatal notes collected while loading (e.g. clamped ranks).
  std::vector<std::string> warnings;

  std::size_t province_count() const;
  std::size_t city_count() const;

  /// Spell indices grouped by politician, in file order.
  std::unordered_map<PoliticianId, std::vector<std::size_t>> spell_index() const;
};

struct DatasetFiles {
  std::filesystem::path politicians;
  std::filesystem::path spells;
  std::filesystem::path promotions;

  /// politicians.csv / spells.csv / promotions.csv inside `dir`.
  static DatasetFiles in_directory(const std::filesystem::path& dir);
};

Dataset load_dataset(const DatasetFiles& files, int end_year = Dataset::kDefaultEndYear);

/// Writes the three schema files. Text fields may not contain ',' or newlines.
void write_dataset(const Dataset& ds, const DatasetFiles& files);

/// Referential and schema checks shared by the loader and the generator.
void validate_dataset(const Dataset& ds);

struct DatasetSummary {
  std::size_t politicians = 0;
  std::size_t provinces = 0;
  std::size_t cities = 0;
  std::size_t spell_rows = 0;
  std::size_t promotions = 0;
};

DatasetSummary summarize(const Dataset& ds);

/// Final rank of every politician that has at least one spell.
std::map<PoliticianId, Rank> final_ranks(const Dataset& ds);

/// Year of the earliest spell at rank 5 or above.
std::optional<int> promotion_to_rank5_year(const Dataset& ds, PoliticianId id);

struct SynthConfig {
  std::size_t n_politicians = 500;
  std::size_t n_provinces = 8;
  std::size_t n_cities = 50;
  std::uint64_t seed = 1;
  double planted_patronage_strength = 0.5;
  double female_fraction = 0.15;
  int first_year = 1990;
  int end_year = Dataset::kDefaultEndYear;
};

/// Simulates careers on a six-month clock. See README for the generative model.
Dataset generate_synthetic(const SynthConfig& cfg);

}  // namespace patronage
