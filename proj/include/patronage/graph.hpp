#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patronage/data_model.hpp"
#include "patronage/ingest.hpp"

namespace patronage {

enum class GraphKind { HomeOriginFull, HomeOriginWorked, OverlapBased, PromotionBased };

std::string_view kind_name(GraphKind kind);
std::optional<GraphKind> parse_kind(std::string_view name);

struct GraphShape {
  bool directed = false;
  bool weighted = false;
};

GraphShape shape_of(GraphKind kind);

struct Edge {
  PoliticianId src;
  PoliticianId dst;
  std::int64_t weight = 1;
};

/// Immutable graph over politician ids. Nodes are kept in ascending id order
/// and referred to internally by dense index. Undirected edges are stored
/// once with src < dst; every adjacency list is sorted by index.
class PatronageGraph {
 public:
  using Index = std::uint32_t;

  PatronageGraph() = default;

  /// Canonicalizes `edges`: drops duplicates (first weight wins) and, for
  /// undirected graphs, orients each pair as (min, max). Throws Integrity on
  /// self-loops or endpoints outside `nodes`.
  PatronageGraph(GraphShape shape, std::vector<PoliticianId> nodes, std::vector<Edge> edges,
                 std::optional<GraphKind> kind = std::nullopt);

  bool directed() const { return shape_.directed; }
  bool weighted() const { return shape_.weighted; }
  GraphShape shape() const { return shape_; }
  std::optional<GraphKind> kind() const { return kind_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const PoliticianId> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  bool contains(PoliticianId id) const { return index_.contains(id); }
  /// Throws UnknownNode.
  Index index_of(PoliticianId id) const;
  PoliticianId id_at(Index i) const { return nodes_[i]; }

  /// For undirected graphs out, in and neighbors coincide.
  std::span<const Index> out(Index i) const { return slice(out_offsets_, out_adj_, i); }
  std::span<const Index> in(Index i) const { return slice(in_offsets_, in_adj_, i); }
  /// Direction-ignoring neighbor set, antiparallel edges merged.
  std::span<const Index> neighbors(Index i) const { return slice(nbr_offsets_, nbr_adj_, i); }

  bool adjacent_ignoring_direction(Index a, Index b) const;

 private:
  static std::span<const Index> slice(const std::vector<std::size_t>& offsets,
                                      const std::vector<Index>& adj, Index i) {
    return {adj.data() + offsets[i], adj.data() + offsets[i + 1]};
  }

  GraphShape shape_;
  std::optional<GraphKind> kind_;
  std::vector<PoliticianId> nodes_;
  std::unordered_map<PoliticianId, Index> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_, in_offsets_, nbr_offsets_;
  std::vector<Index> out_adj_, in_adj_, nbr_adj_;
};

enum class HomeOriginVariant { Full, Worked };

PatronageGraph build_home_origin(const Dataset& ds, HomeOriginVariant variant);
PatronageGraph build_overlap(const Dataset& ds);
PatronageGraph build_promotion(const Dataset& ds);
PatronageGraph build_graph(const Dataset& ds, GraphKind kind);

/// True iff the two politicians held spells in the same organization with at
/// least one shared month.
bool share_department(const Dataset& ds, PoliticianId a, PoliticianId b);

PatronageGraph undirect(const PatronageGraph& g);
PatronageGraph reverse(const PatronageGraph& g);
/// Adds the reverse of every directed edge; reverse copies take the forward weight.
PatronageGraph symmetrize(const PatronageGraph& g);
/// Induced subgraph on `keep` (ids not in g are ignored).
PatronageGraph induced_subgraph(const PatronageGraph& g, std::span<const PoliticianId> keep);
PatronageGraph ego_subgraph(const PatronageGraph& g, PoliticianId center, int hops);

/// Clips spells to end at `cutoff`, drops spells starting after it and
/// promotions dated after it.
Dataset truncate_before(const Dataset& ds, YearMonth cutoff);

/// `src,dst,weight` (or `src,dst` when unweighted), sorted by (src, dst).
void write_edge_list(const PatronageGraph& g, std::ostream& os);

}  // namespace patronage
