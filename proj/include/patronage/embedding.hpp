#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "patronage/graph.hpp"
#include "patronage/ingest.hpp"

namespace patronage {

struct WalkConfig {
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  /// Unnormalized weight of stepping to a node at distance 0, 1, 2 from the previous node.
  double return_weight = 1.0;
  double same_distance_weight = 1.0;
  double explore_weight = 2.0;
  std::uint64_t seed = 1;
  double node_sample_fraction = 0.1;

  void validate() const;
};

struct EmbedConfig {
  std::size_t dimensions = 128;
  std::size_t window = 10;
  std::size_t negatives_per_positive = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
  /// 1 is deterministic; more workers update shared vectors without locks.
  unsigned threads = 1;
  /// Called after each epoch with the epoch index and the current input
  /// vectors (row-major, ascending id order).
  std::function<void(std::size_t, std::span<const float>)> on_epoch;

  void validate() const;
};

using Walk = std::vector<PoliticianId>;

struct Embedding {
  std::vector<PoliticianId> nodes;
  std::size_t dimensions = 0;
  std::vector<float> values;
  /// Mean negative-sampling loss over the corpus at the end of each epoch.
  std::vector<double> epoch_loss;

  const float* row(std::size_t i) const { return values.data() + i * dimensions; }
  std::optional<std::size_t> find(PoliticianId id) const;
  double dot(std::size_t a, std::size_t b) const;
};

/// Unnormalized second-order weights for leaving `cur` having arrived from
/// `prev`, keyed by neighbor. Walks ignore direction; throws NotAdjacent.
std::map<PoliticianId, double> transition_weights(const PatronageGraph& g, PoliticianId prev,
                                                  PoliticianId cur, const WalkConfig& wc);

/// Walks on the induced subgraph of a seeded node sample. Output is ordered
/// by (start node, walk index) regardless of `threads`.
std::vector<Walk> random_walks(const PatronageGraph& g, const WalkConfig& wc,
                               unsigned threads = 1);

/// Nodes retained by the sampling step of random_walks, ascending.
std::vector<PoliticianId> sample_nodes(const PatronageGraph& g, const WalkConfig& wc);

/// Skip-gram with negative sampling. Nodes are embedded in ascending id order.
Embedding train_skipgram(const std::vector<Walk>& walks, const EmbedConfig& ec);

struct ProvinceSimilarity {
  std::string province;
  std::size_t members = 0;
  std::size_t in_set_pairs = 0;
  std::size_t out_set_pairs = 0;
  std::optional<double> in_set_avg;
  std::optional<double> out_set_avg;
};

/// Pairwise dot products split into same-province and cross-province lists per
/// node, flattened per province and averaged.
std::vector<ProvinceSimilarity> province_similarity(const Embedding& emb, const Dataset& ds);

void write_embedding(const Embedding& emb, std::ostream& os);
void write_walks(const std::vector<Walk>& walks, std::ostream& os);

}  // namespace patronage
