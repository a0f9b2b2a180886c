#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/ingest.hpp"
#include "patronage/rng.hpp"

namespace patronage {
namespace {

constexpr int kStepMonths = 6;
constexpr int kMinTenureSteps = 2;
constexpr int kCareerEntryAge = 24;
constexpr int kRetirementAge = 60;
constexpr int kMaxEntryRank = 4;
constexpr double kMoveProbability = 0.12;
constexpr double kMoveOnPromotion = 0.5;
// Per-step promotion hazard by current rank, before the patronage boost.
constexpr std::array<double, 9> kBaseHazard = {0.30, 0.28, 0.25, 0.20, 0.16,
                                               0.12, 0.09, 0.06, 0.04};
constexpr std::array<const char*, 3> kOrganizations = {"party", "government", "congress"};
constexpr std::uint64_t kEventStream = 0x6576656e74ULL;

struct Career {
  std::size_t politician = 0;
  int entry_step = 0;
  int retire_step = 0;
  int rank = 0;
  int tenure = 0;
  std::size_t city = 0;
  std::size_t org = 0;
};

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

void validate(const SynthConfig& cfg) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::Config, msg); };
  if (cfg.n_politicians == 0) bad("n_politicians must be positive");
  if (cfg.n_politicians > 1'000'000) bad("n_politicians above 1000000");
  if (cfg.n_provinces == 0) bad("n_provinces must be positive");
  if (cfg.n_cities < cfg.n_provinces) bad("n_cities must be at least n_provinces");
  if (!(cfg.planted_patronage_strength >= 0 && cfg.planted_patronage_strength <= 1))
    bad("planted_patronage_strength must lie in [0,1]");
  if (!(cfg.female_fraction >= 0 && cfg.female_fraction <= 1))
    bad("female_fraction must lie in [0,1]");
  if (cfg.end_year <= cfg.first_year) bad("end_year must follow first_year");
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.n_politicians;
  const int steps = (cfg.end_year - cfg.first_year + 1) * 2;
  const YearMonth origin(cfg.first_year, 1);

  auto province_name = [](std::size_t p) { return fmt::format("prov{:02d}", p); };
  auto city_name = [](std::size_t c) { return fmt::format("city{:03d}", c); };
  auto province_of = [&](std::size_t c) { return c % cfg.n_provinces; };

  // Integer population weights keep the home-city draw platform independent.
  std::vector<double> city_weight(cfg.n_cities);
  for (std::size_t c = 0; c < cfg.n_cities; ++c)
    city_weight[c] = std::floor(1e6 / std::pow(static_cast<double>(c + 1), 0.7));
  std::vector<std::vector<std::size_t>> province_cities(cfg.n_provinces);
  for (std::size_t c = 0; c < cfg.n_cities; ++c) province_cities[province_of(c)].push_back(c);

  Dataset ds;
  ds.end_year = cfg.end_year;
  std::vector<Rng> streams;
  streams.reserve(n);
  std::vector<Career> careers(n);
  std::vector<std::size_t> home_city(n);

  for (std::size_t i = 0; i < n; ++i) {
    const PoliticianId id{i + 1};
    Rng& rng = streams.emplace_back(Rng::derive(cfg.seed, id.value));
    Politician p;
    p.id = id;
    p.name = fmt::format("P{:06d}", id.value);
    p.gender = rng.bernoulli(cfg.female_fraction) ? Gender::Female : Gender::Male;
    p.birth_year = cfg.first_year - (kRetirementAge - 5) + static_cast<int>(rng.below(50));
    p.party_join_year = p.birth_year + 18 + static_cast<int>(rng.below(10));
    home_city[i] = rng.weighted(city_weight);
    p.home_city = city_name(home_city[i]);
    p.home_province = province_name(province_of(home_city[i]));

    const int entry_year = p.birth_year + kCareerEntryAge + static_cast<int>(rng.below(8));
    const int retire_year = p.birth_year + kRetirementAge;
    if (retire_year <= cfg.end_year) p.retirement_year = retire_year;

    Career& c = careers[i];
    c.politician = i;
    c.entry_step = std::clamp((entry_year - cfg.first_year) * 2 + static_cast<int>(rng.below(2)),
                              0, steps - 1);
    c.retire_step = std::clamp((retire_year - cfg.first_year) * 2, c.entry_step + 1, steps);
    const int years_before = std::max(0, cfg.first_year - entry_year);
    c.rank = std::min(kMaxEntryRank, years_before / 5 + static_cast<int>(rng.below(2)));
    const auto roll = rng.below(10);
    if (roll < 4) {
      c.city = home_city[i];
    } else if (roll < 8) {
      const auto& local = province_cities[province_of(home_city[i])];
      c.city = local[rng.below(local.size())];
    } else {
      c.city = rng.weighted(city_weight);
    }
    c.org = rng.below(kOrganizations.size());
    ds.politicians.emplace(id, std::move(p));
  }

  std::unordered_map<std::uint64_t, int> shared_months;
  // Per politician: (step, city, org, rank) history, collapsed into spells at the end.
  struct Post {
    int step;
    std::size_t city, org;
    int rank;
  };
  std::vector<std::vector<Post>> history(n);
  std::vector<std::vector<std::size_t>> ties(n);
  auto is_active = [&](std::size_t j, int t) {
    return careers[j].entry_step <= t && t < careers[j].retire_step;
  };
  Rng events = Rng::derive(cfg.seed, kEventStream);

  std::vector<std::vector<std::size_t>> by_city(cfg.n_cities);
  for (int t = 0; t < steps; ++t) {
    for (auto& members : by_city) members.clear();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
      if (is_active(i, t)) {
        active.push_back(i);
        by_city[careers[i].city].push_back(i);
      }
    for (auto i : active)
      history[i].push_back({t, careers[i].city, careers[i].org, careers[i].rank});

    // Decisions read the state at the start of the step and apply afterwards.
    struct Decision {
      std::size_t who;
      bool promote;
      bool move;
      std::vector<std::size_t> promoters;
    };
    std::vector<Decision> decisions;
    decisions.reserve(active.size());
    for (auto i : active) {
      const Career& c = careers[i];
      Rng& rng = streams[i];
      Decision d{i, false, false, {}};

      // Patrons: anyone who once shared at least six months with i, is still
      // active and now outranks i, ordered by shared time then id. Ties persist
      // after the two part ways, so early colleagues keep shaping a career.
      std::vector<std::pair<int, std::size_t>> seniors;
      for (auto j : ties[i]) {
        if (!is_active(j, t) || careers[j].rank <= c.rank) continue;
        seniors.emplace_back(shared_months.at(pair_key(i, j)), j);
      }
      const bool has_patron = !seniors.empty();

      if (c.rank < Rank::kMax && c.tenure >= kMinTenureSteps) {
        double hazard = kBaseHazard[static_cast<std::size_t>(c.rank)];
        if (has_patron) hazard *= 1.0 + cfg.planted_patronage_strength;
        d.promote = rng.bernoulli(hazard);
      }
      d.move = rng.bernoulli(d.promote ? kMoveOnPromotion : kMoveProbability);

      if (d.promote && c.rank == PromotionEvent::kFromRank) {
        const std::size_t want = 1 + rng.below(2);
        if (cfg.planted_patronage_strength > 0 && !seniors.empty()) {
          std::sort(seniors.begin(), seniors.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
          });
          for (std::size_t k = 0; k < std::min(want, seniors.size()); ++k)
            d.promoters.push_back(seniors[k].second);
        } else {
          std::vector<std::size_t> pool;
          for (auto j : active)
            if (j != i && careers[j].rank >= PromotionEvent::kToRank) pool.push_back(j);
          for (std::size_t k = 0; k < want && !pool.empty(); ++k) {
            auto pick = events.below(pool.size());
            d.promoters.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
          }
        }
      }
      decisions.push_back(std::move(d));
    }

    for (const auto& members : by_city)
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
        {
          int& m = shared_months[pair_key(members[a], members[b])];
          m += kStepMonths;
          if (m == kStepMonths) {
            ties[members[a]].push_back(members[b]);
            ties[members[b]].push_back(members[a]);
          }
        }

    for (auto& d : decisions) {
      Career& c = careers[d.who];
      Rng& rng = streams[d.who];
      if (d.promote) {
        if (c.rank == PromotionEvent::kFromRank && !d.promoters.empty()) {
          PromotionEvent e;
          e.promotee = PoliticianId{d.who + 1};
          for (auto j : d.promoters) e.promoters.push_back(PoliticianId{j + 1});
          e.date = YearMonth::from_index(origin.index() + (t + 1) * kStepMonths);
          if (t + 1 < steps) ds.promotions.push_back(std::move(e));
        }
        ++c.rank;
        c.tenure = 0;
      } else {
        ++c.tenure;
      }
      if (d.move) {
        const std::size_t prov = province_of(c.city);
        if (rng.below(5) < 4) {
          const auto& local = province_cities[prov];
          c.city = local[rng.below(local.size())];
        } else {
          c.city = rng.weighted(city_weight);
        }
      }
      if (d.move || d.promote) c.org = rng.below(kOrganizations.size());
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& posts = history[i];
    for (std::size_t k = 0; k < posts.size();) {
      std::size_t e = k;
      while (e + 1 < posts.size() && posts[e + 1].step == posts[e].step + 1 &&
             posts[e + 1].city == posts[k].city && posts[e + 1].org == posts[k].org &&
             posts[e + 1].rank == posts[k].rank)
        ++e;
      JobSpell s;
      s.politician_id = PoliticianId{i + 1};
      s.start = YearMonth::from_index(origin.index() + posts[k].step * kStepMonths);
      s.end = YearMonth::from_index(origin.index() + (posts[e].step + 1) * kStepMonths - 1);
      s.province = province_name(province_of(posts[k].city));
      s.municipality = city_name(posts[k].city);
      s.organization = fmt::format("{}/{}", s.municipality, kOrganizations[posts[k].org]);
      s.rank = Rank(posts[k].rank);
      ds.spells.push_back(std::move(s));
      k = e + 1;
    }
  }
  std::stable_sort(ds.promotions.begin(), ds.promotions.end(),
                   [](const PromotionEvent& a, const PromotionEvent& b) {
                     return a.date != b.date ? a.date < b.date : a.promotee < b.promotee;
                   });
  validate_dataset(ds);
  return ds;
}

}  // namespace patronage
