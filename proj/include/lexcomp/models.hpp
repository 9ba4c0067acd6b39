#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lexcomp::models {

/// Row-major feature matrix: one inner vector per sample.
using Features = std::vector<std::vector<double>>;

/// Linear regression with an L2 penalty on the weights; the intercept is not
/// penalized. Predictions are clipped to [0,1].
struct RidgeModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double intercept = 0.0;
  double l2_strength = 1.0;
};

/// Minimizes sum (y - Xw - b)^2 + l2 * |w|^2 in closed form on centered data.
/// Throws ComputationError when the system is singular (only possible at l2 = 0).
RidgeModel ridge_fit(const Features& x, std::span<const double> y, double l2_strength = 1.0);
/// Xw + b without clipping.
std::vector<double> ridge_predict_raw(const RidgeModel& model, const Features& x);
/// Xw + b clamped to [0,1].
std::vector<double> ridge_predict(const RidgeModel& model, const Features& x);

enum class ClassWeighting { Balanced, None };

/// Binary logistic regression. `class_weights` is (positive, negative).
struct LogisticModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double intercept = 0.0;
  double l2_strength = 1.0;
  std::pair<double, double> class_weights{1.0, 1.0};
  int iterations = 0;
  std::vector<double> objective_trace;  // at the start and after each accepted step; not serialized
};

/// n / (2 n_c) per class, returned as (positive, negative).
std::pair<double, double> balanced_class_weights(const std::vector<bool>& labels);

struct LogisticOptions {
  double l2_strength = 1.0;
  ClassWeighting weighting = ClassWeighting::Balanced;
  int max_iterations = 1000;
  double tolerance = 1e-10;  // on the largest parameter update
};

/// Minimizes the weighted negative log-likelihood plus (l2/2)|w|^2 with
/// Newton steps from zero, halving a step whenever it increases the objective
/// by more than its rounding error.
LogisticModel logistic_fit(const Features& x, const std::vector<bool>& labels, const LogisticOptions& options = {});

/// Same objective with explicit per-sample weights (class weighting in
/// `options` is ignored).
LogisticModel logistic_fit_weighted(const Features& x, const std::vector<bool>& labels,
                                    std::span<const double> sample_weights, const LogisticOptions& options = {});

std::vector<double> logistic_probability(const LogisticModel& model, const Features& x);
/// probability >= threshold.
std::vector<bool> logistic_predict(const LogisticModel& model, const Features& x, double decision_threshold = 0.5);

/// Objective and gradient (weights then intercept) at the model's parameters.
struct LogisticObjective {
  double value = 0.0;
  std::vector<double> gradient;
};
LogisticObjective logistic_objective(const LogisticModel& model, const Features& x, const std::vector<bool>& labels,
                                     std::span<const double> sample_weights);

/// Element-wise value >= threshold.
std::vector<bool> lcp_to_cwi(std::span<const double> predictions, double threshold = 0.375);

nlohmann::json to_json(const RidgeModel& model);
nlohmann::json to_json(const LogisticModel& model);
RidgeModel ridge_from_json(const nlohmann::json& j);
LogisticModel logistic_from_json(const nlohmann::json& j);

}  // namespace lexcomp::models
