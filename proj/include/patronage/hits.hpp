#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "patronage/data_model.hpp"
#include "patronage/graph.hpp"

namespace patronage {

struct HitsScores {
  std::vector<PoliticianId> nodes;
  std::vector<double> hub;
  std::vector<double> authority;
  int iterations_used = 0;
  bool converged = false;
};

struct HitsOptions {
  double tol = 1e-10;
  int max_iter = 1000;
};

/// Unit-weight mutual reinforcement with L2 normalization. Both vectors are
/// updated from the previous iterate, which makes hub(G) and
/// authority(reverse(G)) bit-identical.
HitsScores hits_scores(const PatronageGraph& g, const HitsOptions& opts = {});

struct LinearTerm {
  double estimate = 0;
  double std_error = 0;
  double t_stat = 0;
  double p_value = 1;
};

struct RankFit {
  std::vector<std::pair<int, double>> scatter;  // (rank level, score) per node
  std::map<int, double> rank_means;
  std::map<int, std::size_t> rank_counts;
  LinearTerm slope;
  LinearTerm intercept;
  std::size_t observations = 0;
  int df = 0;
  double r_squared = 0;
  double residual_std_error = 0;
};

/// Per-rank mean score regressed on rank level. Nodes without a final rank are
/// an error (MissingRank).
RankFit score_vs_rank(const std::vector<PoliticianId>& nodes, const std::vector<double>& scores,
                      const std::map<PoliticianId, Rank>& final_ranks);

/// `.` p<0.15, `*` p<0.05, `**` p<0.005.
const char* significance_stars(double p);

void write_hits_scores(const HitsScores& s, std::ostream& os);
void write_rank_fit_report(const RankFit& fit, const std::string& dependent, std::ostream& os);

}  // namespace patronage
