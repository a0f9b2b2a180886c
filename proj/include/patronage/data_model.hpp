#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patronage {

struct PoliticianId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(PoliticianId, PoliticianId) = default;
};

/// Calendar month, stored as a single month index (year * 12 + month - 1).
class YearMonth {
 public:
  constexpr YearMonth() = default;
  constexpr YearMonth(int year, int month) : index_(year * 12 + (month - 1)) {}

  static constexpr YearMonth from_index(int index) {
    YearMonth ym;
    ym.index_ = index;
    return ym;
  }
  /// Parses `YYYY-MM`; returns nullopt on any malformed input.
  static std::optional<YearMonth> parse(std::string_view text);

  constexpr int index() const { return index_; }
  constexpr int year() const { return index_ >= 0 ? index_ / 12 : (index_ - 11) / 12; }
  constexpr int month() const { return index_ - year() * 12 + 1; }

  std::string to_string() const;

  friend constexpr auto operator<=>(YearMonth, YearMonth) = default;

 private:
  int index_ = 0;
};

/// Inclusive count of months in [start, end]; 0 when end < start.
constexpr int months_between(YearMonth start, YearMonth end) {
  return end < start ? 0 : end.index() - start.index() + 1;
}

/// Months shared by two inclusive month intervals.
constexpr int months_intersection(YearMonth a_start, YearMonth a_end, YearMonth b_start,
                                  YearMonth b_end) {
  YearMonth lo = a_start < b_start ? b_start : a_start;
  YearMonth hi = a_end < b_end ? a_end : b_end;
  return months_between(lo, hi);
}

/// Cadre level on the canonical 0-9 scale.
class Rank {
 public:
  static constexpr int kMin = 0;
  static constexpr int kMax = 9;
  /// Levels strictly above this count as high rank.
  static constexpr int kHighRankFloor = 7;

  constexpr Rank() = default;
  /// Requires kMin <= level <= kMax; use clamp() for untrusted input.
  explicit constexpr Rank(int level) : level_(level) {}

  /// Clamps levels above kMax down to kMax. Negative input is not clamped
  /// and must be rejected by the caller.
  static constexpr Rank clamp(int level, bool* clamped = nullptr) {
    if (clamped) *clamped = level > kMax;
    return Rank(level > kMax ? kMax : level);
  }

  constexpr int level() const { return level_; }
  constexpr bool is_high() const { return level_ > kHighRankFloor; }

  friend constexpr auto operator<=>(Rank, Rank) = default;

 private:
  int level_ = 0;
};

enum class Gender { Male, Female };

struct Politician {
  PoliticianId id;
  std::string name;
  Gender gender = Gender::Male;
  int birth_year = 0;
  int party_join_year = 0;
  std::string home_city;
  std::string home_province;
  std::optional<int> retirement_year;
};

struct JobSpell {
  PoliticianId politician_id;
  YearMonth start;
  YearMonth end;  // inclusive
  std::string province;
  std::string municipality;
  std::string organization;
  Rank rank;

  int months() const { return months_between(start, end); }
};

struct PromotionEvent {
  static constexpr int kFromRank = 4;
  static constexpr int kToRank = 5;
  static constexpr std::size_t kMaxPromoters = 2;

  PoliticianId promotee;
  std::vector<PoliticianId> promoters;
  YearMonth date;
  Rank from_rank{kFromRank};
  Rank to_rank{kToRank};
};

struct FinalRank {
  PoliticianId politician_id;
  Rank level;
};

/// Months two spells spend in the same (province, municipality).
int overlap_months(const JobSpell& a, const JobSpell& b);

/// Rank held at min(end_year, retirement year). Spells of other politicians in
/// `spells` are ignored. Throws NoSpells when none belong to `p`.
FinalRank final_rank(const Politician& p, std::span<const JobSpell> spells, int end_year);

}  // namespace patronage

template <>
struct std::hash<patronage::PoliticianId> {
  std::size_t operator()(patronage::PoliticianId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
