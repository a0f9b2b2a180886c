#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracle/numeric_oracle.hpp"
#include "patronage/faction.hpp"
#include "patronage/features.hpp"
#include "patronage/rng.hpp"
#include "support.hpp"

using namespace patronage;
using test::Fixture;
using test::pid;
using test::thrown_code;

namespace {

PatronageGraph undirected(std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<PoliticianId> nodes;
  for (std::size_t i = 1; i <= n; ++i) nodes.push_back(pid(i));
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) edges.push_back({pid(a), pid(b), 1});
  return PatronageGraph({false, false}, nodes, edges);
}

std::map<PoliticianId, Rank> uniform_ranks(std::size_t n, int level) {
  std::map<PoliticianId, Rank> out;
  for (std::size_t i = 1; i <= n; ++i) out.emplace(pid(i), Rank(level));
  return out;
}

const CliqueRatioRow& row_of(const CliqueRatioReport& r, std::uint64_t id) {
  for (const auto& row : r.rows)
    if (row.id == pid(id)) return row;
  throw std::runtime_error("missing row");
}

}  // namespace

TEST_CASE("clique ratio hand examples") {
  // Node 1 has neighbors 2, 3, 4 in its clique and 5 outside.
  auto g = undirected(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}});
  CliqueAssignment c{{pid(1), "A"}, {pid(2), "A"}, {pid(3), "A"}, {pid(4), "A"}, {pid(5), "B"}};
  auto r = clique_ratio(g, c, uniform_ranks(5, 6));
  CHECK(row_of(r, 1).within == 3);
  CHECK(row_of(r, 1).between == 1);
  CHECK(row_of(r, 1).ratio == 3.0);
  CHECK(row_of(r, 2).within == 1);
  CHECK(row_of(r, 2).ratio == CliqueRatioReport::kCap);
  CHECK(row_of(r, 5).within == 0);
  CHECK(row_of(r, 5).between == 1);
  CHECK(row_of(r, 5).ratio == 0.0);
}

TEST_CASE("clique ratio caps zero-between nodes at 30") {
  // Star of five in-clique edges.
  auto g = undirected(6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}});
  CliqueAssignment c;
  for (std::uint64_t i = 1; i <= 6; ++i) c[pid(i)] = "A";
  auto r = clique_ratio(g, c, uniform_ranks(6, 5));
  CHECK(row_of(r, 1).within == 5);
  CHECK(row_of(r, 1).between == 0);
  CHECK(row_of(r, 1).ratio == 30.0);
  for (const auto& row : r.rows) CHECK(row.ratio == 30.0);
}

TEST_CASE("ratios above the cap are clipped") {
  std::vector<std::pair<int, int>> pairs;
  for (int v = 2; v <= 33; ++v) pairs.push_back({1, v});
  pairs.push_back({1, 34});
  auto g = undirected(34, pairs);
  CliqueAssignment c;
  for (std::uint64_t i = 1; i <= 33; ++i) c[pid(i)] = "A";
  c[pid(34)] = "B";
  auto r = clique_ratio(g, c, uniform_ranks(34, 5));
  CHECK(row_of(r, 1).within == 32);
  CHECK(row_of(r, 1).between == 1);
  CHECK(row_of(r, 1).ratio == 30.0);
}

TEST_CASE("clique ratio identities on random graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const std::size_t n = 40;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 1; a <= static_cast<int>(n); ++a)
      for (int b = a + 1; b <= static_cast<int>(n); ++b)
        if (rng.bernoulli(0.12)) pairs.push_back({a, b});
    auto g = undirected(n, pairs);
    CliqueAssignment c;
    std::map<PoliticianId, Rank> ranks;
    for (std::uint64_t i = 1; i <= n; ++i) {
      c[pid(i)] = "C" + std::to_string(rng.below(4));
      ranks.emplace(pid(i), Rank(static_cast<int>(rng.below(10))));
    }
    auto r = clique_ratio(g, c, ranks);

    // Brute force over the edge list.
    std::map<PoliticianId, std::size_t> within, between;
    std::size_t intra = 0, inter = 0;
    for (auto [a, b] : pairs) {
      const bool same = c[pid(a)] == c[pid(b)];
      (same ? intra : inter)++;
      (same ? within : between)[pid(a)]++;
      (same ? within : between)[pid(b)]++;
    }
    std::size_t sum_within = 0, sum_between = 0, isolated = 0;
    for (const auto& row : r.rows) {
      CHECK(row.within == within[row.id]);
      CHECK(row.between == between[row.id]);
      CHECK(row.within + row.between == total_degree(g, row.id));
      CHECK(row.ratio >= 0.0);
      CHECK(row.ratio <= 30.0);
      sum_within += row.within;
      sum_between += row.between;
      isolated += row.within + row.between == 0;
    }
    CHECK(sum_within == 2 * intra);
    CHECK(sum_between == 2 * inter);
    CHECK(r.isolated == isolated);

    // Per-level means over non-isolated nodes with level >= 5.
    std::map<int, std::vector<double>> want;
    for (const auto& row : r.rows)
      if (row.within + row.between > 0 && ranks.at(row.id).level() >= 5)
        want[ranks.at(row.id).level()].push_back(row.ratio);
    REQUIRE(r.by_rank.size() == want.size());
    for (const auto& s : r.by_rank) {
      const auto& v = want.at(s.level);
      CHECK(s.nodes == v.size());
      CHECK(s.mean_ratio == doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0) / v.size()));
    }
    CHECK(r.level_jumps.size() == (r.by_rank.empty() ? 0 : r.by_rank.size() - 1));
  }
}

TEST_CASE("clique ratio strict mode and isolated nodes") {
  auto g = undirected(4, {{1, 2}});
  CliqueAssignment c{{pid(1), "A"}, {pid(2), "B"}, {pid(3), "A"}, {pid(4), "A"}};
  std::map<PoliticianId, Rank> ranks{{pid(1), Rank(5)}, {pid(2), Rank(6)}, {pid(3), Rank(9)}, {pid(4), Rank(9)}};
  auto inclusive = clique_ratio(g, c, ranks);
  CHECK(inclusive.isolated == 2);
  REQUIRE(inclusive.by_rank.size() == 2);
  CHECK(inclusive.by_rank[0].level == 5);
  CHECK(inclusive.by_rank[1].level == 6);
  // One node per level: the Welch test is degenerate and reported as absent.
  REQUIRE(inclusive.level_jumps.size() == 1);
  CHECK_FALSE(inclusive.level_jumps[0].second.has_value());

  auto strict = clique_ratio(g, c, ranks, {5, true});
  REQUIRE(strict.by_rank.size() == 1);
  CHECK(strict.by_rank[0].level == 6);
}

TEST_CASE("clique ratio undirects directed input") {
  PatronageGraph d({true, true}, {pid(1), pid(2), pid(3)}, {{pid(1), pid(2), 7}, {pid(2), pid(1), 3}, {pid(3), pid(1), 1}});
  CliqueAssignment c{{pid(1), "A"}, {pid(2), "A"}, {pid(3), "B"}};
  auto r = clique_ratio(d, c, uniform_ranks(3, 5));
  CHECK(row_of(r, 1).within == 1);
  CHECK(row_of(r, 1).between == 1);
  CHECK(row_of(r, 2).within == 1);
}

TEST_CASE("clique ratio requires a total assignment") {
  auto g = undirected(3, {{1, 2}});
  CliqueAssignment c{{pid(1), "A"}, {pid(2), "A"}};
  CHECK(thrown_code([&] { clique_ratio(g, c, uniform_ranks(3, 5)); }) == ErrorCode::MissingClique);
}

TEST_CASE("cliques by origin") {
  Fixture f;
  f.person(1, "Wuhan", "Hubei").person(2, "Yichang", "Hubei").person(3, "Wuhan", "Hubei");
  auto city = cliques_by_origin(f.ds, CliqueLevel::City);
  auto prov = cliques_by_origin(f.ds, CliqueLevel::Province);
  CHECK(city.size() == 3);
  CHECK(city[pid(1)] == city[pid(3)]);
  CHECK(city[pid(1)] != city[pid(2)]);
  CHECK(prov[pid(1)] == prov[pid(2)]);
}

namespace {

/// Every person holds one spell at `rank` running through the end year.
Fixture gendered(const std::vector<std::pair<Gender, int>>& people) {
  Fixture f;
  for (std::size_t i = 0; i < people.size(); ++i) {
    const auto id = i + 1;
    f.person(id, "X", "P1", people[i].first);
    f.spell(id, "2000-01", "2015-12", "X", people[i].second);
  }
  return f;
}

}  // namespace

TEST_CASE("gender report on a single-gender dataset") {
  auto f = gendered({{Gender::Male, 3}, {Gender::Male, 8}, {Gender::Male, 9}});
  auto g = undirected(3, {{1, 2}, {2, 3}});
  auto r = gender_report(g, f.ds);
  CHECK(r.male.nodes == 3);
  CHECK(r.female.nodes == 0);
  CHECK(r.female.degree_proportions.empty());
  CHECK(r.female.rank_proportions.empty());
  CHECK(r.male.high_rank_count == 2);
  REQUIRE(r.comparisons.size() == 3);
  for (const auto& c : r.comparisons) {
    CHECK_FALSE(c.test.has_value());
    CHECK_FALSE(c.note.empty());
  }
}

TEST_CASE("gender report tables") {
  // Path 1-2-3-4 plus isolated node 5; males 1, 2, 5 and females 3, 4.
  auto f = gendered({{Gender::Male, 2}, {Gender::Male, 8}, {Gender::Female, 9},
                     {Gender::Female, 4}, {Gender::Male, 6}});
  auto g = undirected(5, {{1, 2}, {2, 3}, {3, 4}});
  auto r = gender_report(g, f.ds);
  CHECK(r.male.nodes == 3);
  CHECK(r.female.nodes == 2);
  CHECK(r.male.mean_degree == doctest::Approx(1.0));
  CHECK(r.female.mean_degree == doctest::Approx(1.5));
  CHECK(r.male.degree_proportions.at(0) == doctest::Approx(1.0 / 3));
  CHECK(r.male.degree_proportions.at(1) == doctest::Approx(1.0 / 3));
  CHECK(r.male.degree_proportions.at(2) == doctest::Approx(1.0 / 3));
  CHECK(r.male.high_rank_count == 1);
  CHECK(r.female.high_rank_count == 1);
  CHECK(r.male.mean_rank == doctest::Approx(16.0 / 3));
  // Neighbor means: 1 -> 8, 2 -> (2 + 9) / 2; node 5 excluded.
  CHECK(r.male.with_neighbors == 2);
  CHECK(r.male.mean_neighbor_rank == doctest::Approx((8.0 + 5.5) / 2));
  // 3 -> (8 + 4) / 2, 4 -> 9.
  CHECK(r.female.mean_neighbor_rank == doctest::Approx((6.0 + 9.0) / 2));
  for (const auto* grp : {&r.male, &r.female}) {
    double s = 0;
    for (auto [k, p] : grp->degree_proportions) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identical degree sequences give t = 0") {
  // Two disjoint paths of three, one all male and one all female.
  auto f = gendered({{Gender::Male, 3}, {Gender::Male, 5}, {Gender::Male, 7},
                     {Gender::Female, 3}, {Gender::Female, 5}, {Gender::Female, 7}});
  auto g = undirected(6, {{1, 2}, {2, 3}, {4, 5}, {5, 6}});
  auto r = gender_report(g, f.ds);
  REQUIRE(r.comparisons.size() == 3);
  CHECK(r.comparisons[0].measure == "total_degree");
  REQUIRE(r.comparisons[0].test.has_value());
  CHECK(r.comparisons[0].test->t == 0.0);
  CHECK(r.comparisons[0].test->p == 1.0);
  CHECK(r.comparisons[1].test->t == 0.0);
}

TEST_CASE("gender report requires every node in the dataset") {
  auto f = gendered({{Gender::Male, 3}});
  auto g = undirected(2, {{1, 2}});
  auto code = thrown_code([&] { gender_report(g, f.ds); });
  REQUIRE(code.has_value());
  CHECK(*code == ErrorCode::MissingGender);
}

TEST_CASE("origin distribution") {
  SUBCASE("five in one province") {
    Fixture f;
    for (std::uint64_t i = 1; i <= 5; ++i) {
      f.person(i, "C", "Hubei");
      f.spell(i, "2000-01", "2015-12", "C", static_cast<int>(i + 2));
    }
    auto d = origin_distribution(f.ds, 0);
    REQUIRE(d.size() == 1);
    CHECK(d[0].province == "Hubei");
    CHECK(d[0].count == 5);
    auto none = origin_distribution(f.ds, 10);
    REQUIRE(none.size() == 1);
    CHECK(none[0].count == 0);
  }
  SUBCASE("ordering and totals on synthetic data") {
    SynthConfig cfg;
    cfg.n_politicians = 400;
    cfg.seed = 3;
    auto ds = generate_synthetic(cfg);
    const auto ranks = final_ranks(ds);
    for (int min_rank : {0, 5, 8, 10}) {
      auto d = origin_distribution(ds, min_rank);
      std::set<std::string> provinces;
      for (const auto& [id, p] : ds.politicians) provinces.insert(p.home_province);
      CHECK(d.size() == provinces.size());
      std::size_t total = 0, want = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        total += d[i].count;
        if (i > 0) {
          CHECK(d[i - 1].count >= d[i].count);
          if (d[i - 1].count == d[i].count) CHECK(d[i - 1].province < d[i].province);
        }
      }
      for (const auto& [id, r] : ranks) want += r.level() >= min_rank;
      CHECK(total == want);
      if (min_rank == 10) CHECK(total == 0);
    }
  }
}

TEST_CASE("paired group t test") {
  std::vector<double> a{3596, 2110, 1890, 4200, 3100};
  auto same = paired_group_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      x.push_back(std::sqrt(-2 * std::log(u1)) * std::cos(2 * 3.14159265358979323846 * u2));
      y.push_back(x.back() + 10);
    }
    auto t = paired_group_t_test(x, y);
    CHECK(t.p < 0.001);
    CHECK(t.t < 0);
    CHECK(std::fabs(t.p - oracle::t_two_sided_p(t.t, t.df)) < 1e-8L);
  }
  std::vector<double> one{1.0};
  CHECK(thrown_code([&] { paired_group_t_test(one, a); }) == ErrorCode::DegenerateSample);
}
