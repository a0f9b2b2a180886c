#include "patronage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "patronage/error.hpp"
#include "patronage/parallel.hpp"
#include "patronage/rng.hpp"
#include "patronage/table_io.hpp"

namespace patronage {
namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_density(double x) {
  if (!std::isfinite(x)) return 0.0;
  const double f = logistic(x);
  return f * (1.0 - f);
}

/// Unit-norm columns; zero columns keep scale 1.
Eigen::VectorXd column_scales(const Eigen::MatrixXd& x) {
  Eigen::VectorXd s = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (s[j] == 0) s[j] = 1;
  return s;
}

/// Indices of columns that are linear combinations of earlier kept columns.
std::vector<std::size_t> dependent_columns(const Eigen::MatrixXd& x, double tol) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::VectorXd> basis;
  std::vector<std::size_t> dependent;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0) {
      dependent.push_back(static_cast<std::size_t>(j));
      continue;
    }
    Eigen::VectorXd v = x.col(j) / norm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    const double residual = v.norm();
    if (residual <= tol || n == 0) {
      dependent.push_back(static_cast<std::size_t>(j));
      continue;
    }
    basis.push_back(v / residual);
  }
  return dependent;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

std::optional<std::size_t> DesignMatrix::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

DesignMatrix DesignMatrix::subset_rows(std::span<const std::size_t> idx) const {
  DesignMatrix out;
  out.columns = columns;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.rows.push_back(rows[idx[r]]);
    out.outcome.push_back(outcome[idx[r]]);
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r]));
  }
  return out;
}

DesignMatrix DesignMatrix::drop_columns(std::span<const std::string> names) const {
  std::vector<Eigen::Index> keep;
  DesignMatrix out;
  out.rows = rows;
  out.outcome = outcome;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (std::find(names.begin(), names.end(), columns[j]) == names.end()) {
      keep.push_back(static_cast<Eigen::Index>(j));
      out.columns.push_back(columns[j]);
    }
  out.x.resize(x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.x.col(static_cast<Eigen::Index>(k)) = x.col(keep[k]);
  return out;
}

DesignBuild build_design(const Dataset& ds, const FeatureMatrix& features,
                         const DesignOptions& opts) {
  const auto ranks = final_ranks(ds);
  std::map<PoliticianId, int> promo5;
  for (const auto& s : ds.spells)
    if (s.rank.level() >= PromotionEvent::kToRank) {
      auto [it, inserted] = promo5.emplace(s.politician_id, s.start.year());
      if (!inserted) it->second = std::min(it->second, s.start.year());
    }

  DesignBuild out;
  DesignMatrix& dm = out.design;
  for (std::size_t k = 0; k < features.width; ++k) dm.columns.push_back(fmt::format("f{}", k));
  const bool indicator = opts.include_covariates &&
                         opts.missing_promotion == MissingPromotion::IndicatorZero;
  if (opts.include_covariates) {
    dm.columns.insert(dm.columns.end(),
                      {"birth_year", "party_join_year", "promotion_to_rank5_year"});
    if (indicator) dm.columns.push_back("never_promoted_to_5");
  }
  dm.columns.push_back(DesignMatrix::kIntercept);

  std::vector<std::vector<double>> rows;
  for (const auto& [id, p] : ds.politicians) {
    auto rk = ranks.find(id);
    if (rk == ranks.end()) {
      ++out.dropped_rows;
      continue;
    }
    auto pr = promo5.find(id);
    if (opts.include_covariates && pr == promo5.end() && !indicator) {
      ++out.dropped_rows;
      continue;
    }
    const auto f = features.row_of(id);
    std::vector<double> row(f.begin(), f.end());
    if (opts.include_covariates) {
      row.push_back(p.birth_year);
      row.push_back(p.party_join_year);
      row.push_back(pr == promo5.end() ? 0.0 : pr->second);
      if (indicator) row.push_back(pr == promo5.end() ? 1.0 : 0.0);
    }
    row.push_back(1.0);
    rows.push_back(std::move(row));
    dm.rows.push_back(id);
    dm.outcome.push_back(rk->second.level());
  }
  dm.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dm.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      dm.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

std::vector<std::string> prune_collinear(DesignMatrix& x, double tol) {
  std::vector<std::string> names;
  for (auto j : dependent_columns(x.x, tol)) names.push_back(x.columns[j]);
  if (!names.empty()) x = x.drop_columns(names);
  return names;
}

const char* model_name(ModelKind kind) { return kind == ModelKind::Ols ? "ols" : "ordinal_logit"; }

std::vector<std::string> ModelFit::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : coefficients) out.push_back(c.name);
  return out;
}

Eigen::VectorXd ModelFit::beta() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(coefficients.size()));
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    b[static_cast<Eigen::Index>(j)] = coefficients[j].estimate;
  return b;
}

ModelFit fit_ols(const DesignMatrix& dm) {
  const Eigen::Index n = dm.x.rows(), p = dm.x.cols();
  if (n < p || p == 0)
    fail(ErrorCode::TooFewRows, fmt::format("OLS needs rows >= columns ({} < {})", n, p));
  const Eigen::VectorXd scale = column_scales(dm.x);
  const Eigen::MatrixXd xs = dm.x * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string names;
    for (auto j : dependent_columns(dm.x, 1e-9)) names += (names.empty() ? "" : ", ") + dm.columns[j];
    fail(ErrorCode::RankDeficient, fmt::format("collinear design columns: {}", names));
  }
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = dm.outcome[static_cast<std::size_t>(i)];
  const Eigen::VectorXd beta_s = qr.solve(y);
  const Eigen::VectorXd beta = beta_s.cwiseQuotient(scale);
  const Eigen::VectorXd resid = y - dm.x * beta;
  const double ssr = resid.squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();

  ModelFit fit;
  fit.kind = ModelKind::Ols;
  fit.observations = static_cast<std::size_t>(n);
  fit.r_squared = sst > 0 ? 1.0 - ssr / sst : (ssr == 0 ? 1.0 : 0.0);

  const Eigen::Index df = n - p;
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const auto perm = qr.colsPermutation();
  const Eigen::MatrixXd cov_s = perm * cov_perm * perm.transpose();
  const double sigma2 = df > 0 ? ssr / static_cast<double>(df) : NAN;
  for (Eigen::Index j = 0; j < p; ++j) {
    Coefficient c;
    c.name = dm.columns[static_cast<std::size_t>(j)];
    c.estimate = beta[j];
    c.std_error = std::sqrt(sigma2 * cov_s(j, j)) / scale[j];
    c.statistic = c.estimate / c.std_error;
    c.p_value = df > 0 ? t_two_sided_p(c.statistic, static_cast<double>(df)) : NAN;
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

std::vector<double> category_probabilities(std::span<const double> thresholds, double eta) {
  std::vector<double> p(thresholds.size() + 1);
  double prev = 0;
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const double cum = logistic(thresholds[j] - eta);
    p[j] = cum - prev;
    prev = cum;
  }
  p.back() = 1.0 - prev;
  return p;
}

OrdinalObjective::OrdinalObjective(const Eigen::MatrixXd& x_, std::vector<int> categories_,
                                   int n_categories_)
    : x(x_), categories(std::move(categories_)), n_categories(n_categories_) {}

std::size_t OrdinalObjective::parameter_count() const {
  return static_cast<std::size_t>(x.cols()) + static_cast<std::size_t>(n_categories - 1);
}

std::vector<double> OrdinalObjective::thresholds(const Eigen::VectorXd& theta) const {
  const Eigen::Index q = x.cols();
  std::vector<double> tau(static_cast<std::size_t>(n_categories - 1));
  tau[0] = theta[q];
  for (std::size_t j = 1; j < tau.size(); ++j)
    tau[j] = tau[j - 1] + std::exp(theta[q + static_cast<Eigen::Index>(j)]);
  return tau;
}

double OrdinalObjective::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
  const Eigen::Index q = x.cols();
  const int top = n_categories - 1;
  const auto tau = thresholds(theta);
  const Eigen::VectorXd eta = x * theta.head(q);

  double ll = 0;
  Eigen::VectorXd g_beta = Eigen::VectorXd::Zero(q);
  std::vector<double> g_tau(tau.size(), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = categories[static_cast<std::size_t>(i)];
    const double b = c < top ? tau[static_cast<std::size_t>(c)] - eta[i] : INFINITY;
    const double a = c > 0 ? tau[static_cast<std::size_t>(c - 1)] - eta[i] : -INFINITY;
    double prob;
    if (c == 0)
      prob = logistic(b);
    else if (c == top)
      prob = logistic(-a);
    else if (a > 0)
      prob = logistic(-a) - logistic(-b);
    else
      prob = logistic(b) - logistic(a);
    prob = std::max(prob, 1e-300);
    ll += std::log(prob);
    if (grad) {
      const double fb = logistic_density(b), fa = logistic_density(a);
      g_beta -= ((fb - fa) / prob) * x.row(i).transpose();
      if (c < top) g_tau[static_cast<std::size_t>(c)] += fb / prob;
      if (c > 0) g_tau[static_cast<std::size_t>(c - 1)] -= fa / prob;
    }
  }
  const double n = static_cast<double>(x.rows());
  if (grad) {
    grad->resize(static_cast<Eigen::Index>(parameter_count()));
    grad->head(q) = g_beta / n;
    // tau_j = theta_q + sum_{k<=j} exp(theta_{q+k})
    double tail = 0;
    for (std::size_t j = g_tau.size(); j-- > 1;) {
      tail += g_tau[j];
      (*grad)[q + static_cast<Eigen::Index>(j)] =
          std::exp(theta[q + static_cast<Eigen::Index>(j)]) * tail / n;
    }
    tail += g_tau[0];
    (*grad)[q] = tail / n;
  }
  return ll / n;
}

ModelFit fit_ordinal_logit(const DesignMatrix& dm, const OrdinalOptions& opts) {
  const Eigen::Index n = dm.x.rows();
  std::vector<int> levels(dm.outcome.begin(), dm.outcome.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2)
    fail(ErrorCode::DegenerateOutcome, "ordinal model needs at least two outcome levels");
  const int n_cat = static_cast<int>(levels.size());

  // Standardize every free column; the intercept is absorbed by the thresholds.
  std::vector<Eigen::Index> free_cols;
  for (std::size_t j = 0; j < dm.columns.size(); ++j)
    if (dm.columns[j] != DesignMatrix::kIntercept) free_cols.push_back(static_cast<Eigen::Index>(j));
  const auto q = static_cast<Eigen::Index>(free_cols.size());
  Eigen::MatrixXd z(n, q);
  Eigen::VectorXd mu(q), sd(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    const auto col = dm.x.col(free_cols[static_cast<std::size_t>(k)]);
    mu[k] = col.mean();
    sd[k] = std::sqrt((col.array() - mu[k]).square().sum() / static_cast<double>(std::max<Eigen::Index>(n, 1)));
    if (!(sd[k] > 0))
      fail(ErrorCode::RankDeficient, fmt::format("constant design column {} is collinear with the "
                                                 "thresholds",
                                                 dm.columns[static_cast<std::size_t>(free_cols[static_cast<std::size_t>(k)])]));
    z.col(k) = (col.array() - mu[k]) / sd[k];
  }

  std::vector<int> cat(static_cast<std::size_t>(n));
  std::vector<double> share(levels.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    cat[static_cast<std::size_t>(i)] = static_cast<int>(
        std::lower_bound(levels.begin(), levels.end(), dm.outcome[static_cast<std::size_t>(i)]) -
        levels.begin());
    share[static_cast<std::size_t>(cat[static_cast<std::size_t>(i)])] += 1.0 / static_cast<double>(n);
  }
  OrdinalObjective obj(z, cat, n_cat);
  const auto dim = static_cast<Eigen::Index>(obj.parameter_count());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  {
    double cum = 0, prev_tau = 0;
    for (int j = 0; j + 1 < n_cat; ++j) {
      cum += share[static_cast<std::size_t>(j)];
      const double tau = std::log(cum / (1.0 - cum));
      if (j == 0)
        theta[q] = tau;
      else
        theta[q + j] = std::log(std::max(tau - prev_tau, 1e-6));
      prev_tau = tau;
    }
  }

  Eigen::VectorXd grad;
  double ll = obj.evaluate(theta, &grad);
  double damping = 0;
  int iter = 0;
  bool converged = false;
  Eigen::MatrixXd hess(dim, dim);
  auto numeric_hessian = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd gp, gm;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(at[k]));
      Eigen::VectorXd tp = at, tm = at;
      tp[k] += h;
      tm[k] -= h;
      obj.evaluate(tp, &gp);
      obj.evaluate(tm, &gm);
      hess.col(k) = (gp - gm) / (2 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
  };

  // Quasi-separation shows up as parameters that keep drifting while the
  // likelihood has all but stopped rising toward its supremum.
  constexpr int kDriftWindow = 50;
  constexpr double kDriftStep = 0.1, kDriftGain = 1e-6;
  std::vector<Eigen::VectorXd> theta_hist{theta};
  std::vector<double> ll_hist{ll};

  for (; iter < opts.max_iter; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tol) {
      converged = true;
      break;
    }
    numeric_hessian(theta);
    const Eigen::MatrixXd neg_h = -hess;
    const double diag_scale = std::max(1e-8, neg_h.diagonal().cwiseAbs().maxCoeff());
    bool stepped = false;
    while (!stepped) {
      Eigen::MatrixXd sys = neg_h;
      sys.diagonal().array() += damping * diag_scale;
      Eigen::LLT<Eigen::MatrixXd> llt(sys);
      if (llt.info() == Eigen::Success) {
        const Eigen::VectorXd dir = llt.solve(grad);
        const double slope = grad.dot(dir);
        double t = 1.0;
        for (int ls = 0; ls < 40 && !stepped; ++ls, t *= 0.5) {
          Eigen::VectorXd trial = theta + t * dir;
          Eigen::VectorXd trial_grad;
          const double trial_ll = obj.evaluate(trial, &trial_grad);
          if (std::isfinite(trial_ll) && trial_ll >= ll + 1e-4 * t * slope) {
            theta = std::move(trial);
            grad = std::move(trial_grad);
            ll = trial_ll;
            stepped = true;
          }
        }
      }
      if (stepped) {
        damping = damping > 1e-12 ? damping / 10 : 0;
      } else {
        damping = damping == 0 ? 1e-8 : damping * 10;
        if (damping > 1e12) break;
      }
    }
    if (!stepped)
      fail(ErrorCode::NonConvergence, fmt::format("ordinal fit stalled at iteration {}", iter));
    // Near-collinear columns can carry large offsetting coefficients, so
    // divergence is judged on the linear predictor rather than on beta.
    const Eigen::VectorXd eta = z * theta.head(q);
    const double spread = q > 0 ? eta.maxCoeff() - eta.minCoeff() : 0.0;
    const auto tau = obj.thresholds(theta);
    if (spread > opts.separation_bound || std::abs(tau.front()) > opts.separation_bound ||
        std::abs(tau.back()) > opts.separation_bound)
      fail(ErrorCode::Separation,
           fmt::format("linear predictor diverges (spread {:.3g}, thresholds [{:.3g}, {:.3g}])",
                       spread, tau.front(), tau.back()));
    theta_hist.push_back(theta);
    ll_hist.push_back(ll);
    if (theta_hist.size() > 2 * kDriftWindow) {
      const std::size_t back = theta_hist.size() - 1 - kDriftWindow;
      const double drift = (theta - theta_hist[back]).lpNorm<Eigen::Infinity>();
      if (drift > kDriftStep && ll - ll_hist[back] < kDriftGain)
        fail(ErrorCode::Separation,
             fmt::format("parameters drift by {:.3g} over {} iterations with negligible likelihood gain",
                         drift, kDriftWindow));
    }
  }
  if (!converged)
    fail(ErrorCode::NonConvergence,
         fmt::format("gradient max-norm {:.3g} after {} iterations",
                     grad.lpNorm<Eigen::Infinity>(), opts.max_iter));

  numeric_hessian(theta);
  Eigen::MatrixXd cov = (-hess * static_cast<double>(n)).inverse();

  ModelFit fit;
  fit.kind = ModelKind::OrdinalLogit;
  fit.observations = static_cast<std::size_t>(n);
  fit.levels = levels;
  fit.iterations = iter;
  fit.log_likelihood = ll * static_cast<double>(n);
  double shift = 0;
  for (Eigen::Index k = 0; k < q; ++k) shift += theta[k] * mu[k] / sd[k];
  for (double t : obj.thresholds(theta)) fit.thresholds.push_back(t + shift);
  std::size_t k = 0;
  for (std::size_t j = 0; j < dm.columns.size(); ++j) {
    Coefficient c;
    c.name = dm.columns[j];
    if (c.name == DesignMatrix::kIntercept) {
      c.fixed = true;
      c.std_error = NAN;
      c.statistic = NAN;
      c.p_value = NAN;
    } else {
      const auto kk = static_cast<Eigen::Index>(k++);
      c.estimate = theta[kk] / sd[kk];
      c.std_error = std::sqrt(std::max(0.0, cov(kk, kk))) / sd[kk];
      c.statistic = c.estimate / c.std_error;
      c.p_value = normal_two_sided_p(c.statistic);
    }
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

std::vector<int> predict_rank(const ModelFit& fit, const DesignMatrix& dm) {
  if (fit.column_names() != dm.columns)
    fail(ErrorCode::ColumnMismatch, "design columns differ from the fitted model");
  const Eigen::VectorXd eta = dm.x * fit.beta();
  std::vector<int> out(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (fit.kind == ModelKind::Ols) {
      const double r = std::round(eta[i]);
      out[static_cast<std::size_t>(i)] =
          static_cast<int>(std::clamp(r, static_cast<double>(Rank::kMin), static_cast<double>(Rank::kMax)));
    } else {
      const auto p = category_probabilities(fit.thresholds, eta[i]);
      const auto best = std::max_element(p.begin(), p.end()) - p.begin();
      out[static_cast<std::size_t>(i)] = fit.levels[static_cast<std::size_t>(best)];
    }
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size())
    fail(ErrorCode::LengthMismatch, "prediction and outcome lengths differ");
  if (actual.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) hit += predicted[i] == actual[i];
  return static_cast<double>(hit) / static_cast<double>(actual.size());
}

namespace {

ModelFit fit_kind(const DesignMatrix& x, ModelKind kind, const OrdinalOptions& opts) {
  return kind == ModelKind::Ols ? fit_ols(x) : fit_ordinal_logit(x, opts);
}

}  // namespace

HoldoutResult holdout_eval(const DesignMatrix& x, ModelKind kind, const HoldoutConfig& cfg) {
  const std::size_t n = x.rows.size();
  if (cfg.folds < 2) fail(ErrorCode::TooFewRows, "holdout needs at least two folds");
  if (n < cfg.folds)
    fail(ErrorCode::TooFewRows, fmt::format("{} rows cannot fill {} folds", n, cfg.folds));

  HoldoutResult res;
  res.full_fit = fit_kind(x, kind, cfg.ordinal);
  res.in_sample_accuracy = accuracy(predict_rank(res.full_fit, x), x.outcome);

  std::vector<std::vector<std::size_t>> held(cfg.folds);
  if (cfg.mode == HoldoutMode::DisjointFolds) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    rng.shuffle(order.begin(), order.end());
    for (std::size_t f = 0; f < cfg.folds; ++f)
      held[f].assign(order.begin() + static_cast<std::ptrdiff_t>(n * f / cfg.folds),
                     order.begin() + static_cast<std::ptrdiff_t>(n * (f + 1) / cfg.folds));
  } else {
    if (!(cfg.holdout_fraction > 0 && cfg.holdout_fraction < 1))
      fail(ErrorCode::Config, "holdout_fraction must lie in (0,1)");
    const auto take = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(cfg.holdout_fraction * static_cast<double>(n))), 1,
        n - 1);
    for (std::size_t f = 0; f < cfg.folds; ++f) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      Rng rng = Rng::derive(cfg.seed, f);
      rng.shuffle(order.begin(), order.end());
      held[f].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    }
  }

  res.fold_accuracy.assign(cfg.folds, 0.0);
  parallel_for(cfg.folds, cfg.threads, [&](std::size_t f) {
    auto test_idx = held[f];
    std::sort(test_idx.begin(), test_idx.end());
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - test_idx.size());
    for (std::size_t i = 0, t = 0; i < n; ++i) {
      if (t < test_idx.size() && test_idx[t] == i) {
        ++t;
        continue;
      }
      train_idx.push_back(i);
    }
    const DesignMatrix train = x.subset_rows(train_idx);
    const DesignMatrix test = x.subset_rows(test_idx);
    const ModelFit fit = fit_kind(train, kind, cfg.ordinal);
    res.fold_accuracy[f] = accuracy(predict_rank(fit, test), test.outcome);
  });
  res.out_of_sample_accuracy =
      std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) /
      static_cast<double>(cfg.folds);
  res.full_fit.in_sample_accuracy = res.in_sample_accuracy;
  res.full_fit.out_of_sample_accuracy = res.out_of_sample_accuracy;
  return res;
}

double majority_baseline(std::span<const int> outcome) {
  if (outcome.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int y : outcome) ++counts[y];
  std::size_t best = 0;
  for (auto [level, c] : counts) best = std::max(best, c);
  return static_cast<double>(best) / static_cast<double>(outcome.size());
}

double t_two_sided_p(double t, double df) {
  if (std::isnan(t) || !(df > 0)) return NAN;
  if (std::isinf(t)) return 0.0;
  if (t == 0) return 1.0;
  if (df > 1e12) return normal_two_sided_p(t);
  boost::math::students_t_distribution<double> dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    fail(ErrorCode::DegenerateSample,
         fmt::format("Welch test needs two observations per sample ({} and {})", a.size(), b.size()));
  auto moments = [](std::span<const double> v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  if (va == 0 && vb == 0) fail(ErrorCode::DegenerateSample, "both samples have zero variance");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = va / na, sb = vb / nb;
  TTestResult r;
  r.mean_a = ma;
  r.mean_b = mb;
  r.n_a = a.size();
  r.n_b = b.size();
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  r.p = t_two_sided_p(r.t, r.df);
  return r;
}

void write_fit_report(const ModelFit& fit, std::ostream& os) {
  os << "model: " << model_name(fit.kind) << '\n';
  os << "observations: " << fit.observations << '\n';
  os << fmt::format("{:<28} {:>24} {:>24} {:>24} {:>24}\n", "term", "estimate", "std_error",
                    fit.kind == ModelKind::Ols ? "t" : "z", "p");
  for (const auto& c : fit.coefficients) {
    if (c.fixed) {
      os << fmt::format("{:<28} {:>24} {:>24} {:>24} {:>24}\n", c.name, "0 (fixed)", "-", "-", "-");
      continue;
    }
    os << fmt::format("{:<28} {:>24} {:>24} {:>24} {:>24}\n", c.name, format_double(c.estimate),
                      format_double(c.std_error), format_double(c.statistic),
                      format_double(c.p_value));
  }
  for (std::size_t j = 0; j < fit.thresholds.size(); ++j)
    os << fmt::format("threshold {}|{}: {}\n", fit.levels[j], fit.levels[j + 1],
                      format_double(fit.thresholds[j]));
  if (fit.r_squared) os << "r_squared: " << format_double(*fit.r_squared) << '\n';
  if (fit.log_likelihood) os << "log_likelihood: " << format_double(*fit.log_likelihood) << '\n';
  if (fit.kind == ModelKind::OrdinalLogit) os << "iterations: " << fit.iterations << '\n';
  if (fit.in_sample_accuracy)
    os << "in_sample_accuracy: " << format_double(*fit.in_sample_accuracy) << '\n';
  if (fit.out_of_sample_accuracy)
    os << "out_of_sample_accuracy: " << format_double(*fit.out_of_sample_accuracy) << '\n';
}

}  // namespace patronage
