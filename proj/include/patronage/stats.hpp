#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patronage/data_model.hpp"
#include "patronage/features.hpp"
#include "patronage/ingest.hpp"

namespace patronage {

struct DesignMatrix {
  static constexpr const char* kIntercept = "intercept";

  std::vector<PoliticianId> rows;
  std::vector<std::string> columns;
  Eigen::MatrixXd x;
  /// Final rank level per row.
  std::vector<int> outcome;

  std::optional<std::size_t> column_index(const std::string& name) const;
  DesignMatrix subset_rows(std::span<const std::size_t> idx) const;
  DesignMatrix drop_columns(std::span<const std::string> names) const;
};

enum class MissingPromotion {
  Drop,
  /// Zero fill plus a `never_promoted_to_5` indicator column.
  IndicatorZero,
};

struct DesignOptions {
  bool include_covariates = true;
  MissingPromotion missing_promotion = MissingPromotion::Drop;
};

struct DesignBuild {
  DesignMatrix design;
  std::size_t dropped_rows = 0;
};

/// Network features f0..f{w-1}, then birth_year, party_join_year,
/// promotion_to_rank5_year (when covariates are on), then the intercept.
/// `outcome_source` supplies covariates and final ranks; `features` may come
/// from a truncated network and must cover every politician kept.
DesignBuild build_design(const Dataset& outcome_source, const FeatureMatrix& features,
                         const DesignOptions& opts = {});

/// Greedy left-to-right removal of columns that are (numerically) linear
/// combinations of earlier kept columns. Returns the removed names.
std::vector<std::string> prune_collinear(DesignMatrix& x, double tol = 1e-9);

enum class ModelKind { Ols, OrdinalLogit };

const char* model_name(ModelKind kind);

struct Coefficient {
  std::string name;
  double estimate = 0;
  double std_error = 0;
  double statistic = 0;
  double p_value = 1;
  /// Held at zero by the model (the intercept under the ordinal model).
  bool fixed = false;
};

struct ModelFit {
  ModelKind kind = ModelKind::Ols;
  std::vector<Coefficient> coefficients;
  /// Ordinal only: cut points between consecutive observed levels.
  std::vector<double> thresholds;
  std::vector<int> levels;
  std::optional<double> r_squared;
  std::optional<double> log_likelihood;
  std::size_t observations = 0;
  int iterations = 0;
  std::optional<double> in_sample_accuracy;
  std::optional<double> out_of_sample_accuracy;

  std::vector<std::string> column_names() const;
  Eigen::VectorXd beta() const;
};

/// Column-pivoted Householder QR. Throws RankDeficient naming the dependent columns.
ModelFit fit_ols(const DesignMatrix& x);

struct OrdinalOptions {
  double gradient_tol = 1e-6;
  int max_iter = 500;
  /// Range of the fitted linear predictor (or threshold magnitude) treated as divergence.
  double separation_bound = 100.0;
};

/// Proportional-odds maximum likelihood. Any intercept column is held at
/// zero since the thresholds absorb it.
ModelFit fit_ordinal_logit(const DesignMatrix& x, const OrdinalOptions& opts = {});

/// P(Y = level_j) for a linear predictor under ordered cut points.
std::vector<double> category_probabilities(std::span<const double> thresholds, double eta);

/// Log-likelihood and gradient of the ordinal model in its internal
/// parameterization: [beta over non-fixed columns..., tau_0, log(tau_j - tau_{j-1})...].
/// Exposed for gradient checking.
struct OrdinalObjective {
  OrdinalObjective(const Eigen::MatrixXd& x, std::vector<int> categories, int n_categories);

  std::size_t parameter_count() const;
  /// Mean log-likelihood; fills `grad` when non-null.
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;
  std::vector<double> thresholds(const Eigen::VectorXd& theta) const;

  const Eigen::MatrixXd& x;
  std::vector<int> categories;
  int n_categories;
};

std::vector<int> predict_rank(const ModelFit& fit, const DesignMatrix& x);

double accuracy(std::span<const int> predicted, std::span<const int> actual);

enum class HoldoutMode { DisjointFolds, RepeatedSplits };

struct HoldoutConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  HoldoutMode mode = HoldoutMode::DisjointFolds;
  /// Held-out share per repetition in RepeatedSplits mode.
  double holdout_fraction = 0.1;
  unsigned threads = 1;
  OrdinalOptions ordinal;
};

struct HoldoutResult {
  ModelFit full_fit;
  double in_sample_accuracy = 0;
  double out_of_sample_accuracy = 0;
  std::vector<double> fold_accuracy;
};

HoldoutResult holdout_eval(const DesignMatrix& x, ModelKind kind, const HoldoutConfig& cfg);

/// Share of the most frequent outcome.
double majority_baseline(std::span<const int> outcome);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1;
  double mean_a = 0;
  double mean_b = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Unequal-variance two-sample t-test, two-sided.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided p-value of a t statistic.
double t_two_sided_p(double t, double df);

/// Coefficient table plus fit statistics.
void write_fit_report(const ModelFit& fit, std::ostream& os);

}  // namespace patronage
