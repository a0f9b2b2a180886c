#include "patronage/ingest.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/table_io.hpp"

namespace patronage {
namespace {

constexpr std::string_view kPoliticianHeader =
    "id,name,gender,birth_year,party_join_year,home_city,home_province,retirement_year";
constexpr std::string_view kSpellHeader =
    "politician_id,start,end,province,municipality,organization,rank";

constexpr int kMinPartyAge = 14;

/// Field access with parse errors carrying file/line/column.
class Row {
 public:
  Row(const LineReader& reader, std::vector<std::string_view> fields)
      : reader_(reader), fields_(std::move(fields)) {}

  std::size_t size() const { return fields_.size(); }

  std::string_view text(std::size_t col) const { return fields_[col]; }

  std::string key(std::size_t col, std::string_view what) const {
    if (fields_[col].empty()) error(col, fmt::format("empty {}", what));
    return std::string(fields_[col]);
  }

  long long integer(std::size_t col, std::string_view what) const {
    auto v = parse_int(fields_[col]);
    if (!v) error(col, fmt::format("invalid {} '{}'", what, fields_[col]));
    return *v;
  }

  std::optional<long long> optional_integer(std::size_t col, std::string_view what) const {
    if (fields_[col].empty()) return std::nullopt;
    return integer(col, what);
  }

  PoliticianId id(std::size_t col) const {
    auto v = integer(col, "id");
    if (v < 0) error(col, "negative id");
    return PoliticianId{static_cast<std::uint64_t>(v)};
  }

  YearMonth month(std::size_t col) const {
    auto ym = YearMonth::parse(fields_[col]);
    if (!ym) error(col, fmt::format("invalid date '{}' (expected YYYY-MM)", fields_[col]));
    return *ym;
  }

  Rank rank(std::size_t col, std::vector<std::string>& warnings) const {
    auto v = integer(col, "rank");
    if (v < Rank::kMin) error(col, fmt::format("negative rank {}", v));
    bool clamped = false;
    Rank r = Rank::clamp(static_cast<int>(v), &clamped);
    if (clamped)
      warnings.push_back(
          fmt::format("{}:{}: rank {} clamped to {}", reader_.file(), reader_.line_number(), v,
                      Rank::kMax));
    return r;
  }

  [[noreturn]] void error(std::size_t col, std::string reason) const {
    throw ParseError(reader_.file(), reader_.line_number(), col + 1, std::move(reason));
  }

 private:
  const LineReader& reader_;
  std::vector<std::string_view> fields_;
};

template <class Fn>
void read_table(const std::filesystem::path& path, std::string_view expected_header, Fn&& on_row) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(reader.file(), 1, 0, "missing header");
  if (!expected_header.empty() && line != expected_header)
    throw ParseError(reader.file(), 1, 0,
                     fmt::format("unexpected header '{}', expected '{}'", line, expected_header));
  const auto width = split_fields(line).size();
  while (reader.next(line)) {
    if (line.empty()) continue;
    Row row(reader, split_fields(line));
    if (row.size() != width)
      throw ParseError(reader.file(), reader.line_number(), 0,
                       fmt::format("expected {} fields, found {}", width, row.size()));
    on_row(row);
  }
}

void check_text(const std::string& s, std::string_view what) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    fail(ErrorCode::Config, fmt::format("{} '{}' contains a delimiter", what, s));
}

}  // namespace

std::size_t Dataset::province_count() const {
  std::set<std::string_view> keys;
  for (const auto& [id, p] : politicians) keys.insert(p.home_province);
  for (const auto& s : spells) keys.insert(s.province);
  return keys.size();
}

std::size_t Dataset::city_count() const {
  std::set<std::string_view> keys;
  for (const auto& [id, p] : politicians) keys.insert(p.home_city);
  return keys.size();
}

std::unordered_map<PoliticianId, std::vector<std::size_t>> Dataset::spell_index() const {
  std::unordered_map<PoliticianId, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < spells.size(); ++i) out[spells[i].politician_id].push_back(i);
  return out;
}

DatasetFiles DatasetFiles::in_directory(const std::filesystem::path& dir) {
  return {dir / "politicians.csv", dir / "spells.csv", dir / "promotions.csv"};
}

void validate_dataset(const Dataset& ds) {
  std::unordered_map<std::string, std::string> city_province;
  for (const auto& [id, p] : ds.politicians) {
    if (p.party_join_year < p.birth_year + kMinPartyAge)
      fail(ErrorCode::Integrity,
           fmt::format("party_join_year_before_age_{} for politician {}", kMinPartyAge, id.value));
    auto [it, inserted] = city_province.emplace(p.home_city, p.home_province);
    if (!inserted && it->second != p.home_province)
      fail(ErrorCode::Integrity, fmt::format("city_in_two_provinces '{}' for politician {}",
                                             p.home_city, id.value));
  }
  for (const auto& s : ds.spells) {
    if (!ds.politicians.contains(s.politician_id))
      fail(ErrorCode::Integrity,
           fmt::format("spell_unknown_politician {}", s.politician_id.value));
    if (s.end < s.start)
      fail(ErrorCode::Integrity, fmt::format("spell_end_before_start for politician {}",
                                             s.politician_id.value));
  }
  for (const auto& e : ds.promotions) {
    if (!ds.politicians.contains(e.promotee))
      fail(ErrorCode::Integrity, fmt::format("promotion_unknown_promotee {}", e.promotee.value));
    if (e.promoters.empty() || e.promoters.size() > PromotionEvent::kMaxPromoters)
      fail(ErrorCode::Integrity,
           fmt::format("promoter_count {} for promotee {} (at most two direct promoters)",
                       e.promoters.size(), e.promotee.value));
    for (auto pr : e.promoters) {
      if (!ds.politicians.contains(pr))
        fail(ErrorCode::Integrity, fmt::format("promotion_unknown_promoter {}", pr.value));
      if (pr == e.promotee)
        fail(ErrorCode::Integrity, fmt::format("self_promotion {}", pr.value));
    }
    if (e.promoters.size() == 2 && e.promoters[0] == e.promoters[1])
      fail(ErrorCode::Integrity, fmt::format("duplicate_promoter {}", e.promoters[0].value));
    if (e.from_rank.level() != PromotionEvent::kFromRank ||
        e.to_rank.level() != PromotionEvent::kToRank)
      fail(ErrorCode::Integrity, fmt::format("promotion_not_4_to_5 for promotee {}",
                                             e.promotee.value));
  }
}

Dataset load_dataset(const DatasetFiles& files, int end_year) {
  Dataset ds;
  ds.end_year = end_year;

  read_table(files.politicians, kPoliticianHeader, [&](const Row& row) {
    Politician p;
    p.id = row.id(0);
    p.name = std::string(row.text(1));
    if (row.text(2) == "M")
      p.gender = Gender::Male;
    else if (row.text(2) == "F")
      p.gender = Gender::Female;
    else
      row.error(2, fmt::format("invalid gender '{}' (expected M or F)", row.text(2)));
    p.birth_year = static_cast<int>(row.integer(3, "birth_year"));
    p.party_join_year = static_cast<int>(row.integer(4, "party_join_year"));
    p.home_city = row.key(5, "home_city");
    p.home_province = row.key(6, "home_province");
    if (auto r = row.optional_integer(7, "retirement_year")) p.retirement_year = static_cast<int>(*r);
    auto id = p.id;
    if (!ds.politicians.emplace(id, std::move(p)).second)
      fail(ErrorCode::DuplicateId, fmt::format("politician id {} appears twice", id.value));
  });

  read_table(files.spells, kSpellHeader, [&](const Row& row) {
    JobSpell s;
    s.politician_id = row.id(0);
    s.start = row.month(1);
    s.end = row.month(2);
    if (s.end < s.start) row.error(2, "end before start");
    s.province = row.key(3, "province");
    s.municipality = row.key(4, "municipality");
    s.organization = row.key(5, "organization");
    s.rank = row.rank(6, ds.warnings);
    ds.spells.push_back(std::move(s));
  });

  // promotee_id, promoter1_id .. promoterK_id, date, from_rank, to_rank. The
  // loader accepts any K so over-long promoter lists surface as integrity errors.
  LineReader header_peek(files.promotions);
  std::string header;
  if (!header_peek.next(header)) throw ParseError(header_peek.file(), 1, 0, "missing header");
  auto cols = split_fields(header);
  const bool header_ok = cols.size() >= 5 && cols.front() == "promotee_id" &&
                         cols[cols.size() - 3] == "date" && cols[cols.size() - 2] == "from_rank" &&
                         cols.back() == "to_rank" &&
                         std::all_of(cols.begin() + 1, cols.end() - 3, [](std::string_view c) {
                           return c.starts_with("promoter") && c.ends_with("_id");
                         });
  if (!header_ok)
    throw ParseError(header_peek.file(), 1, 0,
                     fmt::format("unexpected header '{}', expected "
                                 "'promotee_id,promoter1_id,promoter2_id,date,from_rank,to_rank'",
                                 header));
  const std::size_t n_promoter_cols = cols.size() - 4;
  read_table(files.promotions, "", [&](const Row& row) {
    PromotionEvent e;
    e.promotee = row.id(0);
    for (std::size_t c = 1; c <= n_promoter_cols; ++c)
      if (!row.text(c).empty()) e.promoters.push_back(row.id(c));
    e.date = row.month(n_promoter_cols + 1);
    e.from_rank = row.rank(n_promoter_cols + 2, ds.warnings);
    e.to_rank = row.rank(n_promoter_cols + 3, ds.warnings);
    ds.promotions.push_back(std::move(e));
  });

  validate_dataset(ds);
  return ds;
}

void write_dataset(const Dataset& ds, const DatasetFiles& files) {
  {
    auto out = open_output(files.politicians);
    out << kPoliticianHeader << '\n';
    for (const auto& [id, p] : ds.politicians) {
      check_text(p.name, "name");
      check_text(p.home_city, "home_city");
      check_text(p.home_province, "home_province");
      out << fmt::format("{},{},{},{},{},{},{},{}\n", id.value, p.name,
                         p.gender == Gender::Male ? "M" : "F", p.birth_year, p.party_join_year,
                         p.home_city, p.home_province,
                         p.retirement_year ? std::to_string(*p.retirement_year) : "");
    }
  }
  {
    auto out = open_output(files.spells);
    out << kSpellHeader << '\n';
    for (const auto& s : ds.spells) {
      check_text(s.province, "province");
      check_text(s.municipality, "municipality");
      check_text(s.organization, "organization");
      out << fmt::format("{},{},{},{},{},{},{}\n", s.politician_id.value, s.start.to_string(),
                         s.end.to_string(), s.province, s.municipality, s.organization,
                         s.rank.level());
    }
  }
  {
    auto out = open_output(files.promotions);
    out << "promotee_id,promoter1_id,promoter2_id,date,from_rank,to_rank\n";
    for (const auto& e : ds.promotions) {
      if (e.promoters.empty() || e.promoters.size() > PromotionEvent::kMaxPromoters)
        fail(ErrorCode::Integrity, fmt::format("promoter_count {} for promotee {}",
                                               e.promoters.size(), e.promotee.value));
      out << fmt::format("{},{},{},{},{},{}\n", e.promotee.value, e.promoters[0].value,
                         e.promoters.size() > 1 ? std::to_string(e.promoters[1].value) : "",
                         e.date.to_string(), e.from_rank.level(), e.to_rank.level());
    }
  }
}

DatasetSummary summarize(const Dataset& ds) {
  return {ds.politicians.size(), ds.province_count(), ds.city_count(), ds.spells.size(),
          ds.promotions.size()};
}

std::map<PoliticianId, Rank> final_ranks(const Dataset& ds) {
  std::map<PoliticianId, Rank> out;
  auto index = ds.spell_index();
  std::vector<JobSpell> own;
  for (const auto& [id, p] : ds.politicians) {
    auto it = index.find(id);
    if (it == index.end()) continue;
    own.clear();
    for (auto i : it->second) own.push_back(ds.spells[i]);
    out.emplace(id, final_rank(p, own, ds.end_year).level);
  }
  return out;
}

std::optional<int> promotion_to_rank5_year(const Dataset& ds, PoliticianId id) {
  std::optional<YearMonth> first;
  for (const auto& s : ds.spells)
    if (s.politician_id == id && s.rank.level() >= PromotionEvent::kToRank &&
        (!first || s.start < *first))
      first = s.start;
  if (!first) return std::nullopt;
  return first->year();
}

}  // namespace patronage
