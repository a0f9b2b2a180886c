#include "patronage/data_model.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/table_io.hpp"

namespace patronage {

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  auto year = parse_int(text.substr(0, 4));
  auto month = parse_int(text.substr(5, 2));
  if (!year || !month || *month < 1 || *month > 12) return std::nullopt;
  return YearMonth(static_cast<int>(*year), static_cast<int>(*month));
}

std::string YearMonth::to_string() const { return fmt::format("{:04d}-{:02d}", year(), month()); }

int overlap_months(const JobSpell& a, const JobSpell& b) {
  if (a.province != b.province || a.municipality != b.municipality) return 0;
  return months_intersection(a.start, a.end, b.start, b.end);
}

FinalRank final_rank(const Politician& p, std::span<const JobSpell> spells, int end_year) {
  const int cutoff = p.retirement_year ? std::min(end_year, *p.retirement_year) : end_year;

  std::optional<Rank> active;
  const JobSpell* latest = nullptr;
  for (const auto& s : spells) {
    if (s.politician_id != p.id) continue;
    if (s.start.year() <= cutoff && s.end.year() >= cutoff)
      active = active ? std::max(*active, s.rank) : s.rank;
    if (!latest || s.end > latest->end || (s.end == latest->end && s.rank > latest->rank))
      latest = &s;
  }
  if (!latest) fail(ErrorCode::NoSpells, fmt::format("politician {} has no job spells", p.id.value));
  return FinalRank{p.id, active ? *active : latest->rank};
}

}  // namespace patronage
