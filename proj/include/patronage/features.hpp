#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "patronage/data_model.hpp"
#include "patronage/graph.hpp"

namespace patronage {

/// Row-major per-node structural features in the graph's node order.
struct FeatureMatrix {
  std::vector<PoliticianId> nodes;
  int hops = 0;
  std::size_t width = 0;
  std::vector<double> values;

  static constexpr std::size_t width_for(int hops) {
    std::size_t w = 3;
    for (int i = 0; i < hops; ++i) w *= 3;
    return w;
  }

  std::span<const double> row(std::size_t i) const { return {values.data() + i * width, width}; }
  /// Throws UnknownNode.
  std::span<const double> row_of(PoliticianId id) const;
};

/// in + out degree for directed graphs, degree otherwise.
std::size_t total_degree(const PatronageGraph& g, PoliticianId u);

/// [degree, edges inside the 1-hop egonet, edges leaving the egonet], all on
/// the direction-ignoring view.
std::array<double, 3> base_features(const PatronageGraph& g, PoliticianId u);

/// Each round appends the neighbor mean and neighbor sum of the previous
/// round's vector, so the width is 3 * 3^hops.
FeatureMatrix aggregate_features(const PatronageGraph& g, int hops, unsigned threads = 1);

/// Zero/zero compares as identical (1), zero/nonzero as unrelated (0).
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Histogram {
  double lo = 0;
  double hi = 1;
  std::vector<std::size_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  std::size_t total() const;
};

/// Histogram on [-1, 1] of cosine similarity between the anchor and every other node.
Histogram similarity_distribution(const FeatureMatrix& fm, PoliticianId anchor, std::size_t bins);

/// Mean rank of direction-ignoring 1-hop neighbors.
double neighbor_rank(const PatronageGraph& g, const std::map<PoliticianId, Rank>& ranks,
                     PoliticianId u);

/// value -> share of samples; shares sum to 1 for nonempty input.
std::map<std::int64_t, double> proportions(std::span<const std::int64_t> values);

/// `id,f0,...` one row per node.
void write_feature_matrix(const FeatureMatrix& fm, std::ostream& os);

}  // namespace patronage
