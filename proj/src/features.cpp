#include "patronage/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/parallel.hpp"
#include "patronage/table_io.hpp"

namespace patronage {
namespace {

using Index = PatronageGraph::Index;

std::array<double, 3> base_at(const PatronageGraph& g, Index u, std::vector<char>& mark) {
  const auto nb = g.neighbors(u);
  for (Index v : nb) mark[v] = 1;
  std::size_t among = 0;  // each neighbor-neighbor edge counted twice
  std::size_t degree_sum = 0;
  for (Index v : nb) {
    const auto nv = g.neighbors(v);
    degree_sum += nv.size();
    for (Index w : nv) among += mark[w];
  }
  for (Index v : nb) mark[v] = 0;
  const double degree = static_cast<double>(nb.size());
  const double internal = degree + static_cast<double>(among / 2);
  // Degree sum over the egonet counts internal edges twice and boundary edges once.
  const double boundary = degree + static_cast<double>(degree_sum) - 2.0 * internal;
  return {degree, internal, boundary};
}

}  // namespace

std::span<const double> FeatureMatrix::row_of(PoliticianId id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id)
    fail(ErrorCode::UnknownNode, fmt::format("node {} not in feature matrix", id.value));
  return row(static_cast<std::size_t>(it - nodes.begin()));
}

std::size_t total_degree(const PatronageGraph& g, PoliticianId u) {
  const Index i = g.index_of(u);
  return g.directed() ? g.out(i).size() + g.in(i).size() : g.out(i).size();
}

std::array<double, 3> base_features(const PatronageGraph& g, PoliticianId u) {
  const Index i = g.index_of(u);
  std::vector<char> mark(g.node_count(), 0);
  return base_at(g, i, mark);
}

FeatureMatrix aggregate_features(const PatronageGraph& g, int hops, unsigned threads) {
  if (hops < 0) fail(ErrorCode::Config, "hops must be nonnegative");
  const std::size_t n = g.node_count();
  const std::size_t final_width = FeatureMatrix::width_for(hops);

  FeatureMatrix fm;
  fm.nodes.assign(g.nodes().begin(), g.nodes().end());
  fm.hops = hops;
  fm.width = final_width;
  fm.values.assign(n * final_width, 0.0);

  // Row stride is the final width; round r occupies the first 3*3^r slots.
  const unsigned workers = std::max(1u, threads);
  std::vector<std::vector<char>> marks(workers, std::vector<char>(n, 0));
  parallel_for(workers, workers, [&](std::size_t w) {
    for (std::size_t u = n * w / workers; u < n * (w + 1) / workers; ++u) {
      auto b = base_at(g, static_cast<Index>(u), marks[w]);
      std::copy(b.begin(), b.end(), fm.values.begin() + static_cast<std::ptrdiff_t>(u * final_width));
    }
  });

  std::size_t width = 3;
  for (int round = 0; round < hops; ++round) {
    std::vector<double> next(n * width * 2, 0.0);
    parallel_for(n, threads, [&](std::size_t u) {
      double* mean = next.data() + u * width * 2;
      double* sum = mean + width;
      const auto nb = g.neighbors(static_cast<Index>(u));
      for (Index v : nb) {
        const double* src = fm.values.data() + static_cast<std::size_t>(v) * final_width;
        for (std::size_t k = 0; k < width; ++k) sum[k] += src[k];
      }
      if (!nb.empty())
        for (std::size_t k = 0; k < width; ++k) mean[k] = sum[k] / static_cast<double>(nb.size());
    });
    for (std::size_t u = 0; u < n; ++u)
      std::copy(next.begin() + static_cast<std::ptrdiff_t>(u * width * 2),
                next.begin() + static_cast<std::ptrdiff_t>((u + 1) * width * 2),
                fm.values.begin() + static_cast<std::ptrdiff_t>(u * final_width + width));
    width *= 3;
  }
  return fm;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorCode::LengthMismatch,
         fmt::format("cosine of vectors with lengths {} and {}", a.size(), b.size()));
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

Histogram similarity_distribution(const FeatureMatrix& fm, PoliticianId anchor, std::size_t bins) {
  if (bins == 0) fail(ErrorCode::Config, "bins must be positive");
  const auto a = fm.row_of(anchor);
  Histogram h{-1.0, 1.0, std::vector<std::size_t>(bins, 0)};
  for (std::size_t i = 0; i < fm.nodes.size(); ++i) {
    if (fm.nodes[i] == anchor) continue;
    const double s = cosine_similarity(a, fm.row(i));
    auto bin = static_cast<std::size_t>((s - h.lo) / h.bin_width());
    ++h.counts[std::min(bin, bins - 1)];
  }
  return h;
}

double neighbor_rank(const PatronageGraph& g, const std::map<PoliticianId, Rank>& ranks,
                     PoliticianId u) {
  const auto nb = g.neighbors(g.index_of(u));
  if (nb.empty()) fail(ErrorCode::NoNeighbors, fmt::format("node {} has no neighbors", u.value));
  double total = 0;
  for (Index v : nb) {
    auto it = ranks.find(g.id_at(v));
    if (it == ranks.end())
      fail(ErrorCode::MissingRank, fmt::format("no rank for node {}", g.id_at(v).value));
    total += it->second.level();
  }
  return total / static_cast<double>(nb.size());
}

std::map<std::int64_t, double> proportions(std::span<const std::int64_t> values) {
  std::map<std::int64_t, double> out;
  for (auto v : values) out[v] += 1.0;
  for (auto& [k, c] : out) c /= static_cast<double>(values.size());
  return out;
}

void write_feature_matrix(const FeatureMatrix& fm, std::ostream& os) {
  os << "id";
  for (std::size_t k = 0; k < fm.width; ++k) os << ",f" << k;
  os << '\n';
  for (std::size_t i = 0; i < fm.nodes.size(); ++i) {
    os << fm.nodes[i].value;
    for (double v : fm.row(i)) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace patronage
