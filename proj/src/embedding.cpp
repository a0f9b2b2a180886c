#include "patronage/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/parallel.hpp"
#include "patronage/rng.hpp"

namespace patronage {
namespace {

using Index = PatronageGraph::Index;

constexpr std::uint64_t kSampleStream = 0x73616d706c65ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kTrainStream = 0x747261696eULL;
constexpr std::uint64_t kEvalStream = 0x6576616cULL;

double distance_weight(const PatronageGraph& g, Index prev, Index x, const WalkConfig& wc) {
  if (x == prev) return wc.return_weight;
  if (g.adjacent_ignoring_direction(prev, x)) return wc.same_distance_weight;
  return wc.explore_weight;
}

Walk walk_from(const PatronageGraph& g, Index start, std::size_t length, Rng& rng,
               const WalkConfig& wc, std::vector<double>& weights) {
  Walk walk{g.id_at(start)};
  if (length <= 1) return walk;
  auto first = g.neighbors(start);
  if (first.empty()) return walk;
  Index prev = start;
  Index cur = first[rng.below(first.size())];
  walk.push_back(g.id_at(cur));
  while (walk.size() < length) {
    const auto nb = g.neighbors(cur);
    if (nb.empty()) break;
    weights.resize(nb.size());
    for (std::size_t k = 0; k < nb.size(); ++k) weights[k] = distance_weight(g, prev, nb[k], wc);
    const Index next = nb[rng.weighted(weights)];
    prev = cur;
    cur = next;
    walk.push_back(g.id_at(cur));
  }
  return walk;
}

double sigmoid(double f) {
  f = std::clamp(f, -30.0, 30.0);
  return 1.0 / (1.0 + std::exp(-f));
}

/// One worker's pass over walks[lo, hi). Shared mode accesses vectors through
/// relaxed atomics so concurrent workers race benignly. Frozen mode only
/// measures the loss.
template <bool Shared, bool Frozen = false>
struct SkipGramPass {
  std::vector<float>& syn0;
  std::vector<float>& syn1;
  const std::vector<std::vector<std::uint32_t>>& corpus;
  const std::vector<double>& cumulative;
  const EmbedConfig& ec;
  std::atomic<std::uint64_t>& processed;
  std::uint64_t total_tokens;

  static float load(float& v) {
    if constexpr (Shared) return std::atomic_ref<float>(v).load(std::memory_order_relaxed);
    else return v;
  }
  static void store(float& v, float x) {
    if constexpr (Shared) std::atomic_ref<float>(v).store(x, std::memory_order_relaxed);
    else v = x;
  }

  /// Eight independent lanes let the compiler vectorize while keeping a fixed
  /// summation order.
  static double dot(float* a, float* b, std::size_t d) {
    float lane[8] = {};
    std::size_t k = 0;
    for (; k + 8 <= d; k += 8)
      for (std::size_t l = 0; l < 8; ++l) lane[l] += load(a[k + l]) * load(b[k + l]);
    double f = 0;
    for (float v : lane) f += v;
    for (; k < d; ++k) f += static_cast<double>(load(a[k])) * load(b[k]);
    return f;
  }

  std::uint32_t negative(Rng& rng) const {
    const double target = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return static_cast<std::uint32_t>(
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                              cumulative.size() - 1));
  }

  /// Returns (summed loss, pair count); the loss is only accumulated when frozen.
  std::pair<double, std::uint64_t> run(std::size_t lo, std::size_t hi, Rng& rng,
                                       std::size_t stride = 1) {
    const std::size_t d = ec.dimensions;
    std::vector<float> grad(d);
    double loss = 0;
    std::uint64_t pairs = 0;
    for (std::size_t w = lo; w < hi; w += stride) {
      const auto& walk = corpus[w];
      for (std::size_t i = 0; i < walk.size(); ++i) {
        float lr = 0;
        if constexpr (!Frozen) {
          const double progress =
              static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed)) /
              static_cast<double>(total_tokens + 1);
          lr = static_cast<float>(ec.learning_rate * std::max(1e-4, 1.0 - progress));
        }
        const std::size_t span = ec.window - rng.below(ec.window);
        const std::size_t from = i >= span ? i - span : 0;
        const std::size_t to = std::min(walk.size() - 1, i + span);
        float* in = syn0.data() + static_cast<std::size_t>(walk[i]) * d;
        for (std::size_t j = from; j <= to; ++j) {
          if (j == i) continue;
          std::fill(grad.begin(), grad.end(), 0.0f);
          const std::uint32_t context = walk[j];
          for (std::size_t s = 0; s <= ec.negatives_per_positive; ++s) {
            std::uint32_t target;
            float label;
            if (s == 0) {
              target = context;
              label = 1.0f;
            } else {
              target = negative(rng);
              if (target == context) continue;
              label = 0.0f;
            }
            float* out = syn1.data() + static_cast<std::size_t>(target) * d;
            const double p = sigmoid(dot(in, out, d));
            if constexpr (Frozen) {
              loss -= std::log(std::max(label > 0 ? p : 1.0 - p, 1e-300));
              continue;
            }
            const float g = static_cast<float>((label - p) * lr);
            for (std::size_t k = 0; k < d; ++k) {
              grad[k] += g * load(out[k]);
              store(out[k], load(out[k]) + g * load(in[k]));
            }
          }
          if constexpr (!Frozen)
            for (std::size_t k = 0; k < d; ++k) store(in[k], load(in[k]) + grad[k]);
          ++pairs;
        }
      }
    }
    return {loss, pairs};
  }
};

}  // namespace

void WalkConfig::validate() const {
  if (walks_per_node == 0 || walk_length == 0)
    fail(ErrorCode::Config, "walks_per_node and walk_length must be positive");
  if (!(return_weight > 0 && same_distance_weight > 0 && explore_weight > 0))
    fail(ErrorCode::Config, "transition weights must be positive");
  if (!(node_sample_fraction > 0 && node_sample_fraction <= 1))
    fail(ErrorCode::Config, "node_sample_fraction must lie in (0,1]");
}

void EmbedConfig::validate() const {
  if (dimensions == 0 || window == 0 || negatives_per_positive == 0)
    fail(ErrorCode::Config, "dimensions, window and negatives must be positive");
  if (!(learning_rate > 0)) fail(ErrorCode::Config, "learning_rate must be positive");
}

std::optional<std::size_t> Embedding::find(PoliticianId id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

double Embedding::dot(std::size_t a, std::size_t b) const {
  const float* x = row(a);
  const float* y = row(b);
  double s = 0;
  for (std::size_t k = 0; k < dimensions; ++k) s += static_cast<double>(x[k]) * y[k];
  return s;
}

std::map<PoliticianId, double> transition_weights(const PatronageGraph& g, PoliticianId prev,
                                                  PoliticianId cur, const WalkConfig& wc) {
  const Index p = g.index_of(prev);
  const Index c = g.index_of(cur);
  if (!g.adjacent_ignoring_direction(p, c))
    fail(ErrorCode::NotAdjacent, fmt::format("{} and {} are not adjacent", prev.value, cur.value));
  std::map<PoliticianId, double> out;
  for (Index x : g.neighbors(c)) out.emplace(g.id_at(x), distance_weight(g, p, x, wc));
  return out;
}

std::vector<PoliticianId> sample_nodes(const PatronageGraph& g, const WalkConfig& wc) {
  wc.validate();
  std::vector<PoliticianId> ids(g.nodes().begin(), g.nodes().end());
  if (ids.empty() || wc.node_sample_fraction >= 1.0) return ids;
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(wc.node_sample_fraction * static_cast<double>(ids.size()))));
  Rng rng = Rng::derive(wc.seed, kSampleStream);
  rng.shuffle(ids.begin(), ids.end());
  ids.resize(std::min(keep, ids.size()));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Walk> random_walks(const PatronageGraph& g, const WalkConfig& wc, unsigned threads) {
  if (g.node_count() == 0) fail(ErrorCode::EmptyGraph, "random walks on an empty graph");
  const auto sample = sample_nodes(g, wc);
  const PatronageGraph sub = induced_subgraph(g, sample);
  const std::size_t n = sub.node_count();
  std::vector<Walk> walks(n * wc.walks_per_node);
  const unsigned workers = std::max(1u, threads);
  parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<double> scratch;
    for (std::size_t u = n * w / workers; u < n * (w + 1) / workers; ++u)
      for (std::size_t k = 0; k < wc.walks_per_node; ++k) {
        Rng rng = Rng::derive(wc.seed, sub.id_at(static_cast<Index>(u)).value, k);
        walks[u * wc.walks_per_node + k] =
            walk_from(sub, static_cast<Index>(u), wc.walk_length, rng, wc, scratch);
      }
  });
  return walks;
}

Embedding train_skipgram(const std::vector<Walk>& walks, const EmbedConfig& ec) {
  ec.validate();
  Embedding emb;
  for (const auto& w : walks) emb.nodes.insert(emb.nodes.end(), w.begin(), w.end());
  std::sort(emb.nodes.begin(), emb.nodes.end());
  emb.nodes.erase(std::unique(emb.nodes.begin(), emb.nodes.end()), emb.nodes.end());
  if (emb.nodes.empty()) fail(ErrorCode::EmptyCorpus, "no nodes in walk corpus");

  const std::size_t v = emb.nodes.size();
  const std::size_t d = ec.dimensions;
  emb.dimensions = d;

  std::vector<std::vector<std::uint32_t>> corpus;
  corpus.reserve(walks.size());
  std::vector<double> counts(v, 0.0);
  std::uint64_t tokens = 0;
  for (const auto& w : walks) {
    auto& enc = corpus.emplace_back();
    enc.reserve(w.size());
    for (auto id : w) {
      auto idx = static_cast<std::uint32_t>(*emb.find(id));
      enc.push_back(idx);
      counts[idx] += 1.0;
    }
    tokens += w.size();
  }
  std::vector<double> cumulative(v);
  double acc = 0;
  for (std::size_t i = 0; i < v; ++i) cumulative[i] = acc += std::pow(counts[i], 0.75);

  std::vector<float> syn0(v * d), syn1(v * d, 0.0f);
  Rng init = Rng::derive(ec.seed, kInitStream);
  for (auto& x : syn0) x = static_cast<float>((init.uniform() - 0.5) / static_cast<double>(d));

  std::atomic<std::uint64_t> processed{0};
  const std::uint64_t total = tokens * ec.epochs;
  const unsigned workers = std::max(1u, std::min<unsigned>(ec.threads, static_cast<unsigned>(corpus.size())));
  constexpr std::size_t kEvalWalks = 256;
  const std::size_t eval_stride = (corpus.size() + kEvalWalks - 1) / kEvalWalks;
  for (std::size_t epoch = 0; epoch < ec.epochs; ++epoch) {
    if (workers <= 1) {
      Rng rng = Rng::derive(ec.seed, kTrainStream, epoch);
      SkipGramPass<false> pass{syn0, syn1, corpus, cumulative, ec, processed, total};
      pass.run(0, corpus.size(), rng);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          Rng rng = Rng::derive(ec.seed, kTrainStream + 1 + w, epoch);
          SkipGramPass<true> pass{syn0, syn1, corpus, cumulative, ec, processed, total};
          pass.run(corpus.size() * w / workers, corpus.size() * (w + 1) / workers, rng);
        });
      for (auto& t : pool) t.join();
    }
    // The loss seen during updates is biased low while the learning rate is
    // high, so each epoch is scored by a separate pass with frozen vectors over
    // a fixed, evenly spaced set of walks with the same negative draws.
    Rng eval_rng = Rng::derive(ec.seed, kEvalStream);
    SkipGramPass<false, true> eval{syn0, syn1, corpus, cumulative, ec, processed, total};
    const auto [loss, pairs] = eval.run(0, corpus.size(), eval_rng, eval_stride);
    emb.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    if (ec.on_epoch) ec.on_epoch(epoch, syn0);
  }
  emb.values = std::move(syn0);
  return emb;
}

std::vector<ProvinceSimilarity> province_similarity(const Embedding& emb, const Dataset& ds) {
  std::vector<std::string> province(emb.nodes.size());
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) {
    auto it = ds.politicians.find(emb.nodes[i]);
    if (it == ds.politicians.end() || it->second.home_province.empty())
      fail(ErrorCode::MissingProvince, fmt::format("no home province for {}", emb.nodes[i].value));
    province[i] = it->second.home_province;
  }
  std::map<std::string, ProvinceSimilarity> acc;
  std::map<std::string, std::pair<double, double>> sums;
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) {
    auto& row = acc[province[i]];
    row.province = province[i];
    ++row.members;
    auto& [in_sum, out_sum] = sums[province[i]];
    for (std::size_t j = 0; j < emb.nodes.size(); ++j) {
      if (j == i) continue;
      const double s = emb.dot(i, j);
      if (province[j] == province[i]) {
        in_sum += s;
        ++row.in_set_pairs;
      } else {
        out_sum += s;
        ++row.out_set_pairs;
      }
    }
  }
  std::vector<ProvinceSimilarity> out;
  for (auto& [name, row] : acc) {
    const auto [in_sum, out_sum] = sums[name];
    if (row.in_set_pairs) row.in_set_avg = in_sum / static_cast<double>(row.in_set_pairs);
    if (row.out_set_pairs) row.out_set_avg = out_sum / static_cast<double>(row.out_set_pairs);
    out.push_back(row);
  }
  return out;
}

void write_embedding(const Embedding& emb, std::ostream& os) {
  os << "id";
  for (std::size_t k = 0; k < emb.dimensions; ++k) os << ",v" << k;
  os << '\n';
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) {
    os << emb.nodes[i].value;
    const float* r = emb.row(i);
    for (std::size_t k = 0; k < emb.dimensions; ++k) os << ',' << fmt::format("{}", r[k]);
    os << '\n';
  }
}

void write_walks(const std::vector<Walk>& walks, std::ostream& os) {
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << w[i].value;
    os << '\n';
  }
}

}  // namespace patronage
