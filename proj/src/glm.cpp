#include "xgw/glm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "xgw/error.hpp"
#include "xgw/simd/kernels.hpp"

namespace xgw {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Rounding noise of a log-likelihood summed over n rows.
double roundoff_slack(double ll, std::size_t n) {
  return 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
         std::max(1.0, std::abs(ll) / static_cast<double>(std::max<std::size_t>(n, 1)));
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

// True when some fitted probability is numerically 0 or 1, which a finite
// optimum only reaches under separation.
bool fitted_at_boundary(const Matrix& design, std::span<const double> beta) {
  const double limit = std::log((1.0 - 10.0 * std::numeric_limits<double>::epsilon()) /
                                (10.0 * std::numeric_limits<double>::epsilon()));
  for (std::size_t i = 0; i < design.rows(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < design.cols(); ++j) eta += design(i, j) * beta[j];
    if (std::abs(eta) > limit) return true;
  }
  return false;
}

std::string column_name(const std::vector<std::string>& names, std::size_t design_col) {
  return design_col == 0 ? std::string("intercept") : names[design_col - 1];
}

// Reports the first design column that is (numerically) a linear combination
// of the columns before it, together with those columns.
void check_rank(const Matrix& design, const std::vector<std::string>& names, double tolerance) {
  const std::size_t p = design.cols();
  Matrix gram(p, p);
  const std::vector<double> ones(design.rows(), 1.0);
  simd::weighted_gram(design.view(), ones, gram.data());

  // Scale to unit diagonal so the pivot test is independent of units.
  std::vector<double> scale(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) scale[j] = gram(j, j) > 0.0 ? 1.0 / std::sqrt(gram(j, j)) : 0.0;
  Matrix scaled(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) scaled(i, j) = gram(i, j) * scale[i] * scale[j];
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (scale[j] == 0.0) scaled(j, j) = 1.0;  // all-zero column, flagged below
  }

  const Cholesky full = cholesky(scaled, tolerance);
  std::optional<std::size_t> bad = full.failed_column;
  for (std::size_t j = 0; j < p && !bad; ++j) {
    if (scale[j] == 0.0) bad = j;
  }
  if (!bad) return;

  const std::size_t j = *bad;
  std::string partners;
  if (scale[j] != 0.0 && j > 0) {
    Matrix leading(j, j);
    std::vector<double> rhs(j);
    for (std::size_t a = 0; a < j; ++a) {
      rhs[a] = scaled(a, j);
      for (std::size_t b = 0; b < j; ++b) leading(a, b) = scaled(a, b);
    }
    const Cholesky lf = cholesky(leading, tolerance);
    if (lf.ok()) {
      const auto coef = cholesky_solve(lf, rhs);
      for (std::size_t a = 0; a < j; ++a) {
        if (std::abs(coef[a]) > 1e-6) {
          partners += (partners.empty() ? "" : ", ") + column_name(names, a);
        }
      }
    }
  }
  std::string message = "design matrix is rank deficient: column '" + column_name(names, j) + "'";
  message += scale[j] == 0.0 ? " is identically zero"
                             : " is collinear with [" + partners + "]";
  throw Error(ErrorCode::kRankDeficient, message, column_name(names, j));
}

}  // namespace

LogisticLikelihood::LogisticLikelihood(const Matrix& design, std::span<const double> outcomes)
    : design_(design), outcomes_(outcomes) {}

std::vector<double> LogisticLikelihood::linear_predictor(std::span<const double> beta) const {
  std::vector<double> eta(design_.rows());
  simd::matvec(design_.view(), beta, eta);
  return eta;
}

double LogisticLikelihood::value(std::span<const double> beta) const {
  const auto eta = linear_predictor(beta);
  double ll = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) ll += outcomes_[i] * eta[i] - softplus(eta[i]);
  return ll;
}

std::vector<double> LogisticLikelihood::gradient(std::span<const double> beta) const {
  auto residual = linear_predictor(beta);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = outcomes_[i] - logistic(residual[i]);
  std::vector<double> g(design_.cols());
  simd::matvec_transposed(design_.view(), residual, g);
  return g;
}

Matrix LogisticLikelihood::information(std::span<const double> beta) const {
  auto w = linear_predictor(beta);
  for (double& v : w) {
    const double mu = logistic(v);
    v = mu * (1.0 - mu);
  }
  Matrix info(design_.cols(), design_.cols());
  simd::weighted_gram(design_.view(), w, info.data());
  return info;
}

Matrix design_with_intercept(const Matrix& features) {
  Matrix design(features.rows(), features.cols() + 1);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    design(i, 0) = 1.0;
    const auto src = features.row(i);
    std::copy(src.begin(), src.end(), design.row(i).begin() + 1);
  }
  return design;
}

Matrix feature_matrix(std::span<const FeatureVector> rows) {
  Matrix m(rows.size(), kNumFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].values.begin(), rows[i].values.end(), m.row(i).begin());
  }
  return m;
}

FittedModel fit_logistic(const Matrix& features, std::span<const double> outcomes,
                         std::vector<std::string> feature_names, std::string competition_id,
                         const FitOptions& options, FitTrace* trace) {
  const std::size_t n = features.rows();
  const std::size_t m = features.cols();
  if (outcomes.size() != n) {
    throw Error(ErrorCode::kContractViolation, "outcome count does not match design rows");
  }
  if (feature_names.size() != m) {
    throw Error(ErrorCode::kContractViolation, "feature name count does not match design columns");
  }
  std::size_t goals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes[i] != 0.0 && outcomes[i] != 1.0) {
      throw Error(ErrorCode::kContractViolation, "outcomes must be 0 or 1");
    }
    if (outcomes[i] == 1.0) ++goals;
    for (const double v : features.row(i)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kContractViolation,
                    "non-finite feature value in row " + std::to_string(i));
      }
    }
  }
  if (goals == 0 || goals == n) {
    throw Error(ErrorCode::kDegenerateFit,
                "outcomes contain a single class (" + std::to_string(goals) + " goals of " +
                    std::to_string(n) + " shots)");
  }

  const Matrix design = design_with_intercept(features);
  check_rank(design, feature_names, options.rank_tolerance);
  const LogisticLikelihood likelihood(design, outcomes);

  FittedModel model;
  model.competition_id = std::move(competition_id);
  model.feature_names = std::move(feature_names);
  model.n_shots = n;
  model.n_goals = goals;
  model.feature_means.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) model.feature_means[j] += features(i, j);
  }
  for (double& mean : model.feature_means) mean /= static_cast<double>(n);

  const std::size_t p = m + 1;
  std::vector<double> beta(p, 0.0);
  const double rate = static_cast<double>(goals) / static_cast<double>(n);
  beta[0] = std::log(rate / (1.0 - rate));
  double ll = likelihood.value(beta);
  if (trace) trace->log_likelihoods = {ll};

  std::vector<double> grad = likelihood.gradient(beta);
  bool converged = false;
  bool stalled = false;
  int iteration = 0;
  while (iteration < options.max_iterations) {
    ++iteration;
    const Cholesky factor = cholesky(likelihood.information(beta), 0.0);
    if (!factor.ok()) {
      stalled = true;
      break;
    }
    const std::vector<double> step = cholesky_solve(factor, grad);

    std::vector<double> candidate(p);
    double candidate_ll = ll;
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_step_halvings; ++h, t *= 0.5) {
      for (std::size_t j = 0; j < p; ++j) candidate[j] = beta[j] + t * step[j];
      candidate_ll = likelihood.value(candidate);
      // Near the optimum the Newton gain is below the rounding noise of the
      // summed log-likelihood; such steps are accepted.
      if (std::isfinite(candidate_ll) && candidate_ll >= ll - roundoff_slack(ll, n)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent direction left at working precision.
      converged = max_abs(grad) < options.gradient_tolerance;
      stalled = !converged;
      break;
    }
    const double change = candidate_ll - ll;
    beta = candidate;
    ll = candidate_ll;
    grad = likelihood.gradient(beta);
    if (trace) trace->log_likelihoods.push_back(ll);
    if (change < options.loglik_tolerance && max_abs(grad) < options.gradient_tolerance) {
      converged = true;
      break;
    }
  }

  // A vanishing gradient with saturated fits means the likelihood is still
  // rising toward infinite coefficients.
  if (converged && fitted_at_boundary(design, beta)) {
    converged = false;
    stalled = true;
  }

  model.intercept = beta[0];
  model.coefficients.assign(beta.begin() + 1, beta.end());
  model.log_likelihood = ll;
  model.converged = converged;
  model.iterations = iteration;
  model.gradient_max_norm = max_abs(grad);
  if (!converged) {
    model.warnings.push_back(
        stalled ? "IRLS stalled before convergence; possible quasi-complete separation"
                : "IRLS reached the iteration limit without converging; possible quasi-complete "
                  "separation");
    warn("competition " + model.competition_id + ": " + model.warnings.back());
  }

  model.standard_errors.assign(p, std::numeric_limits<double>::infinity());
  model.p_values.assign(p, 1.0);
  const Cholesky info = cholesky(likelihood.information(beta), 0.0);
  if (info.ok()) {
    const Matrix covariance = cholesky_inverse(info);
    for (std::size_t j = 0; j < p; ++j) {
      const double se = std::sqrt(covariance(j, j));
      model.standard_errors[j] = se;
      model.p_values[j] = std::erfc(std::abs(beta[j] / se) / std::sqrt(2.0));
    }
  } else {
    model.warnings.push_back("information matrix is singular at the final iterate; "
                             "standard errors are unavailable");
  }
  return model;
}

FittedModel fit(std::span<const FeatureVector> design, std::span<const int> outcomes,
                std::string_view competition_id, const FitOptions& options) {
  if (design.size() != outcomes.size()) {
    throw Error(ErrorCode::kContractViolation, "design and outcome lengths differ");
  }
  std::vector<double> y(outcomes.begin(), outcomes.end());
  std::vector<std::string> names;
  for (const FeatureInfo& info : kFeatureSchema) names.emplace_back(info.name);
  return fit_logistic(feature_matrix(design), y, std::move(names), std::string(competition_id),
                      options);
}

double logistic(double log_odds) {
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

double predict_log_odds(const FittedModel& model, std::span<const double> x) {
  if (x.size() != model.coefficients.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "feature vector length does not match the model");
  }
  double log_odds = model.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) log_odds += model.coefficients[j] * x[j];
  return log_odds;
}

double predict_log_odds(const FittedModel& model, const FeatureVector& x) {
  return predict_log_odds(model, x.span());
}

double predict_xg(const FittedModel& model, const FeatureVector& x) {
  return logistic(predict_log_odds(model, x));
}

std::string summary_table(const FittedModel& model) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-30s %14s %12s %9s %9s\n", "term", "coef", "std_err", "z",
                "p_value");
  out << line;
  for (std::size_t j = 0; j <= model.num_features(); ++j) {
    const double coef = j == 0 ? model.intercept : model.coefficients[j - 1];
    const double se = model.standard_errors[j];
    std::snprintf(line, sizeof(line), "%-30s %14.6f %12.6f %9.3f %9.4f\n",
                  j == 0 ? "intercept" : model.feature_names[j - 1].c_str(), coef, se, coef / se,
                  model.p_values[j]);
    out << line;
  }
  out << "n_shots=" << model.n_shots << " n_goals=" << model.n_goals
      << " log_likelihood=" << model.log_likelihood
      << " converged=" << (model.converged ? "yes" : "no") << '\n';
  return out.str();
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> CorrelationReport::find(std::string_view a, std::string_view b) const {
  for (const CorrelationPair& pair : pairs) {
    if ((pair.feature_a == a && pair.feature_b == b) ||
        (pair.feature_a == b && pair.feature_b == a)) {
      return pair.r;
    }
  }
  return std::nullopt;
}

CorrelationReport correlation_diagnostics(
    std::span<const DiagnosticFeatures> diagnostics, std::span<const FeatureVector> features,
    std::span<const std::pair<std::string, std::string>> extra_pairs) {
  if (diagnostics.size() != features.size()) {
    throw Error(ErrorCode::kContractViolation, "diagnostic and feature row counts differ");
  }
  auto column = [&](std::string_view name) {
    std::vector<double> values(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      const DiagnosticFeatures& d = diagnostics[i];
      if (name == "angle_to_goal") {
        values[i] = d.angle_to_goal;
      } else if (name == "distance_to_gk") {
        values[i] = d.distance_to_gk;
      } else if (name == "vertical_distance_to_center") {
        values[i] = d.vertical_distance_to_center;
      } else if (name == "angle_to_nearest_opponent") {
        values[i] = d.angle_to_nearest_opponent;
      } else if (const auto f = find_feature(name)) {
        values[i] = features[i][*f];
      } else {
        throw Error(ErrorCode::kContractViolation, "unknown column " + std::string(name));
      }
    }
    return values;
  };

  std::vector<std::pair<std::string, std::string>> wanted{{"angle_to_goal", "angle_to_gk"},
                                                          {"distance_to_gk", "distance_to_goal"}};
  wanted.insert(wanted.end(), extra_pairs.begin(), extra_pairs.end());
  CorrelationReport report;
  for (const auto& [a, b] : wanted) {
    report.pairs.push_back({a, b, pearson(column(a), column(b))});
  }
  return report;
}

}  // namespace xgw
