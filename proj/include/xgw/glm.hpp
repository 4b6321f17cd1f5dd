#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xgw/features.hpp"
#include "xgw/linalg.hpp"

namespace xgw {

struct FitOptions {
  int max_iterations = 100;
  double loglik_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  int max_step_halvings = 60;
  // Relative pivot threshold used to flag collinear design columns.
  double rank_tolerance = 1e-10;
};

// Per-competition logistic xG model. Vectors indexed by feature follow
// feature_names; standard_errors and p_values carry the intercept in slot 0.
struct FittedModel {
  std::string competition_id;
  std::vector<std::string> feature_names;
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<double> feature_means;
  std::vector<double> standard_errors;
  std::vector<double> p_values;
  std::size_t n_shots = 0;
  std::size_t n_goals = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_max_norm = 0.0;
  std::vector<std::string> warnings;

  std::size_t num_features() const { return feature_names.size(); }
  friend bool operator==(const FittedModel&, const FittedModel&) = default;
};

// Bernoulli log-likelihood of a logistic model over a design matrix whose
// first column is the intercept.
class LogisticLikelihood {
 public:
  LogisticLikelihood(const Matrix& design, std::span<const double> outcomes);

  double value(std::span<const double> beta) const;
  std::vector<double> gradient(std::span<const double> beta) const;
  // Observed (= expected) information X^T W X.
  Matrix information(std::span<const double> beta) const;

  std::size_t num_rows() const { return design_.rows(); }
  std::size_t num_params() const { return design_.cols(); }

 private:
  std::vector<double> linear_predictor(std::span<const double> beta) const;

  const Matrix& design_;
  std::span<const double> outcomes_;
};

struct FitTrace {
  std::vector<double> log_likelihoods;  // one entry per accepted iterate, starting point first
};

Matrix design_with_intercept(const Matrix& features);
Matrix feature_matrix(std::span<const FeatureVector> rows);

// Fits by IRLS (Newton) with step-halving. `features` excludes the intercept.
FittedModel fit_logistic(const Matrix& features, std::span<const double> outcomes,
                         std::vector<std::string> feature_names, std::string competition_id,
                         const FitOptions& options = {}, FitTrace* trace = nullptr);

// Fits the fixed 11-feature schema.
FittedModel fit(std::span<const FeatureVector> design, std::span<const int> outcomes,
                std::string_view competition_id, const FitOptions& options = {});

double logistic(double log_odds);
double predict_log_odds(const FittedModel& model, std::span<const double> x);
double predict_log_odds(const FittedModel& model, const FeatureVector& x);
double predict_xg(const FittedModel& model, const FeatureVector& x);

// Coefficient / SE / z / p table, one row per parameter.
std::string summary_table(const FittedModel& model);

std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct CorrelationPair {
  std::string feature_a;
  std::string feature_b;
  std::optional<double> r;  // empty when either column is constant
};

struct CorrelationReport {
  std::vector<CorrelationPair> pairs;
  std::optional<double> find(std::string_view a, std::string_view b) const;
};

// Columns addressable by name: the model schema plus kDiagnosticFeatureNames.
// Always reports (angle_to_goal, angle_to_gk) and (distance_to_gk,
// distance_to_goal), then any extra pairs.
CorrelationReport correlation_diagnostics(
    std::span<const DiagnosticFeatures> diagnostics, std::span<const FeatureVector> features,
    std::span<const std::pair<std::string, std::string>> extra_pairs = {});

}  // namespace xgw
