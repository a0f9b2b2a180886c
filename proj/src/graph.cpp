#include "patronage/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "patronage/error.hpp"

namespace patronage {
namespace {

using Index = PatronageGraph::Index;

void build_csr(std::size_t n, const std::vector<std::pair<Index, Index>>& arcs,
               std::vector<std::size_t>& offsets, std::vector<Index>& adj) {
  offsets.assign(n + 1, 0);
  for (auto [a, b] : arcs) ++offsets[a + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  adj.assign(arcs.size(), 0);
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (auto [a, b] : arcs) adj[fill[a]++] = b;
  for (std::size_t i = 0; i < n; ++i)
    std::sort(adj.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
              adj.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
}

std::vector<PoliticianId> all_ids(const Dataset& ds) {
  std::vector<PoliticianId> ids;
  ids.reserve(ds.politicians.size());
  for (const auto& [id, p] : ds.politicians) ids.push_back(id);
  return ids;
}

}  // namespace

std::string_view kind_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::HomeOriginFull: return "home-origin-full";
    case GraphKind::HomeOriginWorked: return "home-origin-worked";
    case GraphKind::OverlapBased: return "overlap";
    case GraphKind::PromotionBased: return "promotion";
  }
  return "unknown";
}

std::optional<GraphKind> parse_kind(std::string_view name) {
  for (auto k : {GraphKind::HomeOriginFull, GraphKind::HomeOriginWorked, GraphKind::OverlapBased,
                 GraphKind::PromotionBased})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

GraphShape shape_of(GraphKind kind) {
  switch (kind) {
    case GraphKind::HomeOriginFull:
    case GraphKind::HomeOriginWorked: return {false, false};
    case GraphKind::OverlapBased: return {true, true};
    case GraphKind::PromotionBased: return {true, false};
  }
  return {};
}

PatronageGraph::PatronageGraph(GraphShape shape, std::vector<PoliticianId> nodes,
                               std::vector<Edge> edges, std::optional<GraphKind> kind)
    : shape_(shape), kind_(kind), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], static_cast<Index>(i));

  for (auto& e : edges) {
    if (e.src == e.dst) fail(ErrorCode::Integrity, fmt::format("self_loop at {}", e.src.value));
    if (!index_.contains(e.src) || !index_.contains(e.dst))
      fail(ErrorCode::Integrity,
           fmt::format("edge_unknown_endpoint {}->{}", e.src.value, e.dst.value));
    if (!shape_.directed && e.dst < e.src) std::swap(e.src, e.dst);
    if (!shape_.weighted) e.weight = 1;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) {
                            return a.src == b.src && a.dst == b.dst;
                          }),
              edges.end());
  edges_ = std::move(edges);

  const std::size_t n = nodes_.size();
  std::vector<std::pair<Index, Index>> out_arcs, in_arcs, nbr_arcs;
  out_arcs.reserve(edges_.size() * (shape_.directed ? 1 : 2));
  for (const auto& e : edges_) {
    Index s = index_.at(e.src), d = index_.at(e.dst);
    out_arcs.emplace_back(s, d);
    in_arcs.emplace_back(d, s);
    if (!shape_.directed) {
      out_arcs.emplace_back(d, s);
      in_arcs.emplace_back(s, d);
    }
    nbr_arcs.emplace_back(s, d);
    nbr_arcs.emplace_back(d, s);
  }
  std::sort(nbr_arcs.begin(), nbr_arcs.end());
  nbr_arcs.erase(std::unique(nbr_arcs.begin(), nbr_arcs.end()), nbr_arcs.end());
  build_csr(n, out_arcs, out_offsets_, out_adj_);
  build_csr(n, in_arcs, in_offsets_, in_adj_);
  build_csr(n, nbr_arcs, nbr_offsets_, nbr_adj_);
}

PatronageGraph::Index PatronageGraph::index_of(PoliticianId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::UnknownNode, fmt::format("node {} not in graph", id.value));
  return it->second;
}

bool PatronageGraph::adjacent_ignoring_direction(Index a, Index b) const {
  auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool share_department(const Dataset& ds, PoliticianId a, PoliticianId b) {
  for (const auto& s : ds.spells) {
    if (s.politician_id != a) continue;
    for (const auto& t : ds.spells)
      if (t.politician_id == b && s.organization == t.organization &&
          months_intersection(s.start, s.end, t.start, t.end) > 0)
        return true;
  }
  return false;
}

PatronageGraph build_home_origin(const Dataset& ds, HomeOriginVariant variant) {
  std::map<std::string_view, std::vector<PoliticianId>> by_city;
  for (const auto& [id, p] : ds.politicians) by_city[p.home_city].push_back(id);

  // organization -> spells, for the worked-together test
  std::unordered_map<PoliticianId, std::vector<const JobSpell*>> own;
  if (variant == HomeOriginVariant::Worked)
    for (const auto& s : ds.spells) own[s.politician_id].push_back(&s);
  auto worked_together = [&](PoliticianId a, PoliticianId b) {
    auto ia = own.find(a), ib = own.find(b);
    if (ia == own.end() || ib == own.end()) return false;
    for (const JobSpell* s : ia->second)
      for (const JobSpell* t : ib->second)
        if (s->organization == t->organization &&
            months_intersection(s->start, s->end, t->start, t->end) > 0)
          return true;
    return false;
  };

  std::vector<Edge> edges;
  for (const auto& [city, members] : by_city)
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (variant == HomeOriginVariant::Full || worked_together(members[i], members[j]))
          edges.push_back({members[i], members[j], 1});
  auto kind = variant == HomeOriginVariant::Full ? GraphKind::HomeOriginFull
                                                 : GraphKind::HomeOriginWorked;
  return PatronageGraph(shape_of(kind), all_ids(ds), std::move(edges), kind);
}

PatronageGraph build_overlap(const Dataset& ds) {
  constexpr int kMinOverlapMonths = 6;

  // Monthly rank in force per politician (max over concurrent spells).
  struct Timeline {
    int first = 0;
    std::vector<int> rank;  // -1 where no spell is active
    int at(int month) const {
      int k = month - first;
      return (k >= 0 && k < static_cast<int>(rank.size())) ? rank[static_cast<std::size_t>(k)] : -1;
    }
  };
  std::unordered_map<PoliticianId, Timeline> timelines;
  for (const auto& s : ds.spells) {
    auto& tl = timelines[s.politician_id];
    const int lo = s.start.index(), hi = s.end.index();
    if (tl.rank.empty()) {
      tl.first = lo;
      tl.rank.assign(static_cast<std::size_t>(hi - lo + 1), -1);
    }
    if (lo < tl.first) {
      tl.rank.insert(tl.rank.begin(), static_cast<std::size_t>(tl.first - lo), -1);
      tl.first = lo;
    }
    const int last = tl.first + static_cast<int>(tl.rank.size()) - 1;
    if (hi > last) tl.rank.resize(tl.rank.size() + static_cast<std::size_t>(hi - last), -1);
    for (int m = lo; m <= hi; ++m) {
      auto& slot = tl.rank[static_cast<std::size_t>(m - tl.first)];
      slot = std::max(slot, s.rank.level());
    }
  }

  std::map<std::pair<std::string_view, std::string_view>, std::vector<const JobSpell*>> by_place;
  for (const auto& s : ds.spells) by_place[{s.province, s.municipality}].push_back(&s);
  for (auto& [place, spells] : by_place)
    std::stable_sort(spells.begin(), spells.end(),
                     [](const JobSpell* a, const JobSpell* b) { return a->start < b->start; });

  struct PairOverlap {
    std::int64_t months = 0;
    std::vector<std::pair<int, int>> windows;
  };
  std::map<std::pair<PoliticianId, PoliticianId>, PairOverlap> pairs;
  for (const auto& [place, spells] : by_place)
    for (std::size_t i = 0; i < spells.size(); ++i)
      for (std::size_t j = i + 1; j < spells.size() && spells[j]->start <= spells[i]->end; ++j) {
        const JobSpell* a = spells[i];
        const JobSpell* b = spells[j];
        if (a->politician_id == b->politician_id) continue;
        const int m = overlap_months(*a, *b);
        if (m == 0) continue;
        if (b->politician_id < a->politician_id) std::swap(a, b);
        auto& po = pairs[{a->politician_id, b->politician_id}];
        po.months += m;
        po.windows.emplace_back(std::max(a->start.index(), b->start.index()),
                                std::min(a->end.index(), b->end.index()));
      }

  std::vector<Edge> edges;
  for (auto& [key, po] : pairs) {
    if (po.months < kMinOverlapMonths) continue;
    auto& w = po.windows;
    std::sort(w.begin(), w.end());
    // Union of overlap windows; both sides share the same month count, so the
    // rank sums compare the time-weighted averages exactly.
    long long sum_u = 0, sum_v = 0;
    int covered_to = std::numeric_limits<int>::min();
    const auto& tu = timelines.at(key.first);
    const auto& tv = timelines.at(key.second);
    for (auto [lo, hi] : w) {
      for (int m = std::max(lo, covered_to + 1); m <= hi; ++m) {
        sum_u += tu.at(m);
        sum_v += tv.at(m);
      }
      covered_to = std::max(covered_to, hi);
    }
    PoliticianId u = key.first, v = key.second;
    bool u_senior;
    if (sum_u != sum_v) {
      u_senior = sum_u > sum_v;
    } else {
      const auto& pu = ds.politicians.at(u);
      const auto& pv = ds.politicians.at(v);
      u_senior = pu.party_join_year != pv.party_join_year ? pu.party_join_year < pv.party_join_year
                                                          : u < v;
    }
    // junior -> senior
    if (u_senior)
      edges.push_back({v, u, po.months});
    else
      edges.push_back({u, v, po.months});
  }
  return PatronageGraph(shape_of(GraphKind::OverlapBased), all_ids(ds), std::move(edges),
                        GraphKind::OverlapBased);
}

PatronageGraph build_promotion(const Dataset& ds) {
  std::vector<Edge> edges;
  for (const auto& e : ds.promotions)
    for (auto pr : e.promoters) edges.push_back({e.promotee, pr, 1});
  return PatronageGraph(shape_of(GraphKind::PromotionBased), all_ids(ds), std::move(edges),
                        GraphKind::PromotionBased);
}

PatronageGraph build_graph(const Dataset& ds, GraphKind kind) {
  switch (kind) {
    case GraphKind::HomeOriginFull: return build_home_origin(ds, HomeOriginVariant::Full);
    case GraphKind::HomeOriginWorked: return build_home_origin(ds, HomeOriginVariant::Worked);
    case GraphKind::OverlapBased: return build_overlap(ds);
    case GraphKind::PromotionBased: return build_promotion(ds);
  }
  return {};
}

PatronageGraph undirect(const PatronageGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({e.src, e.dst, 1});
  std::vector<PoliticianId> nodes(g.nodes().begin(), g.nodes().end());
  return PatronageGraph({false, false}, std::move(nodes), std::move(edges), g.kind());
}

PatronageGraph reverse(const PatronageGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({e.dst, e.src, e.weight});
  std::vector<PoliticianId> nodes(g.nodes().begin(), g.nodes().end());
  return PatronageGraph(g.shape(), std::move(nodes), std::move(edges), g.kind());
}

PatronageGraph symmetrize(const PatronageGraph& g) {
  if (!g.directed()) return g;
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (const auto& e : g.edges()) edges.push_back({e.dst, e.src, e.weight});
  std::vector<PoliticianId> nodes(g.nodes().begin(), g.nodes().end());
  return PatronageGraph(g.shape(), std::move(nodes), std::move(edges), g.kind());
}

PatronageGraph induced_subgraph(const PatronageGraph& g, std::span<const PoliticianId> keep) {
  std::set<PoliticianId> kept;
  for (auto id : keep)
    if (g.contains(id)) kept.insert(id);
  std::vector<Edge> edges;
  for (const auto& e : g.edges())
    if (kept.contains(e.src) && kept.contains(e.dst)) edges.push_back(e);
  return PatronageGraph(g.shape(), {kept.begin(), kept.end()}, std::move(edges), g.kind());
}

PatronageGraph ego_subgraph(const PatronageGraph& g, PoliticianId center, int hops) {
  if (hops < 0) fail(ErrorCode::Config, "hops must be nonnegative");
  const Index c = g.index_of(center);
  std::vector<int> dist(g.node_count(), -1);
  std::deque<Index> queue{c};
  dist[c] = 0;
  std::vector<PoliticianId> keep{center};
  while (!queue.empty()) {
    Index u = queue.front();
    queue.pop_front();
    if (dist[u] == hops) continue;
    for (Index v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        keep.push_back(g.id_at(v));
        queue.push_back(v);
      }
  }
  return induced_subgraph(g, keep);
}

Dataset truncate_before(const Dataset& ds, YearMonth cutoff) {
  Dataset out;
  out.politicians = ds.politicians;
  out.end_year = ds.end_year;
  out.warnings = ds.warnings;
  for (const auto& s : ds.spells) {
    if (s.start > cutoff) continue;
    JobSpell clipped = s;
    if (clipped.end > cutoff) clipped.end = cutoff;
    out.spells.push_back(std::move(clipped));
  }
  for (const auto& e : ds.promotions)
    if (e.date <= cutoff) out.promotions.push_back(e);
  return out;
}

void write_edge_list(const PatronageGraph& g, std::ostream& os) {
  os << (g.weighted() ? "src,dst,weight\n" : "src,dst\n");
  for (const auto& e : g.edges()) {
    if (g.weighted())
      os << e.src.value << ',' << e.dst.value << ',' << e.weight << '\n';
    else
      os << e.src.value << ',' << e.dst.value << '\n';
  }
}

}  // namespace patronage
