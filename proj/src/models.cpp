#include "lexcomp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "lexcomp/error.hpp"

namespace lexcomp::models {

namespace {

Eigen::MatrixXd to_matrix(const Features& x, std::size_t expected_cols, const char* who) {
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto cols = static_cast<Eigen::Index>(expected_cols);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = x[static_cast<std::size_t>(i)];
    if (r.size() != expected_cols) {
      throw ComputationError(fmt::format("{}: row {} has {} features, expected {}", who, i, r.size(), expected_cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r[static_cast<std::size_t>(j)];
  }
  return m;
}

std::size_t feature_count(const Features& x, const char* who) {
  if (x.empty()) throw ComputationError(fmt::format("{}: no samples", who));
  if (x.front().empty()) throw ComputationError(fmt::format("{}: no features", who));
  return x.front().size();
}

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n; ++j) names.push_back(fmt::format("x{}", j));
  return names;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

// --- ridge ------------------------------------------------------------------------

RidgeModel ridge_fit(const Features& x, std::span<const double> y, double l2_strength) {
  const auto p = feature_count(x, "ridge_fit");
  if (x.size() != y.size()) throw ComputationError("ridge_fit: feature rows and targets differ in length");
  if (x.size() < 2) throw ComputationError("ridge_fit: need at least two samples");
  if (!(l2_strength >= 0.0)) throw ComputationError("ridge_fit: l2 strength must be nonnegative");

  Eigen::MatrixXd xm = to_matrix(x, p, "ridge_fit");
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::RowVectorXd x_mean = xm.colwise().mean();
  const double y_mean = yv.mean();
  xm.rowwise() -= x_mean;
  const Eigen::VectorXd yc = yv.array() - y_mean;

  Eigen::MatrixXd gram = xm.transpose() * xm;
  gram.diagonal().array() += l2_strength;
  const Eigen::VectorXd rhs = xm.transpose() * yc;

  Eigen::VectorXd w;
  if (l2_strength > 0.0) {
    w = gram.ldlt().solve(rhs);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw ComputationError("ridge_fit: singular system (degenerate features with l2 = 0)");
    w = lu.solve(rhs);
  }

  RidgeModel model;
  model.feature_names = default_names(p);
  model.weights.assign(w.data(), w.data() + w.size());
  model.intercept = y_mean - x_mean.dot(w);
  model.l2_strength = l2_strength;
  return model;
}

std::vector<double> ridge_predict_raw(const RidgeModel& model, const Features& x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != model.weights.size()) {
      throw ComputationError(fmt::format("ridge_predict: row {} has {} features, model expects {}", i, x[i].size(),
                                         model.weights.size()));
    }
    double v = model.intercept;
    for (std::size_t j = 0; j < x[i].size(); ++j) v += model.weights[j] * x[i][j];
    out.push_back(v);
  }
  return out;
}

std::vector<double> ridge_predict(const RidgeModel& model, const Features& x) {
  auto out = ridge_predict_raw(model, x);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

// --- logistic ---------------------------------------------------------------------

std::pair<double, double> balanced_class_weights(const std::vector<bool>& labels) {
  const auto n = static_cast<double>(labels.size());
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const double neg = n - pos;
  if (pos == 0.0 || neg == 0.0) throw ComputationError("balanced class weights: only one class present");
  return {n / (2.0 * pos), n / (2.0 * neg)};
}

namespace {

struct Problem {
  Eigen::MatrixXd xa;  // features plus a trailing column of ones
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double l2;

  [[nodiscard]] Eigen::Index params() const { return xa.cols(); }

  [[nodiscard]] double objective(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = xa * theta;
    double f = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) f += s(i) * (softplus(z(i)) - y(i) * z(i));
    const auto w = theta.head(params() - 1);
    return f + 0.5 * l2 * w.squaredNorm();
  }

  [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = xa * theta;
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) r(i) = s(i) * (sigmoid(z(i)) - y(i));
    Eigen::VectorXd g = xa.transpose() * r;
    g.head(params() - 1) += l2 * theta.head(params() - 1);
    return g;
  }

  [[nodiscard]] Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = xa * theta;
    Eigen::VectorXd d(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = sigmoid(z(i));
      d(i) = s(i) * p * (1.0 - p);
    }
    Eigen::MatrixXd h = xa.transpose() * d.asDiagonal() * xa;
    for (Eigen::Index j = 0; j + 1 < params(); ++j) h(j, j) += l2;
    return h;
  }
};

Problem make_problem(const Features& x, const std::vector<bool>& labels, std::span<const double> weights, double l2) {
  const auto p = feature_count(x, "logistic_fit");
  if (x.size() != labels.size()) throw ComputationError("logistic_fit: feature rows and labels differ in length");
  if (weights.size() != labels.size()) throw ComputationError("logistic_fit: sample weights differ in length");
  if (!(l2 >= 0.0)) throw ComputationError("logistic_fit: l2 strength must be nonnegative");
  const auto pos = std::count(labels.begin(), labels.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw ComputationError("logistic_fit: both classes must be present");
  }
  Problem prob;
  const auto n = static_cast<Eigen::Index>(x.size());
  prob.xa.resize(n, static_cast<Eigen::Index>(p) + 1);
  prob.xa.leftCols(static_cast<Eigen::Index>(p)) = to_matrix(x, p, "logistic_fit");
  prob.xa.col(static_cast<Eigen::Index>(p)).setOnes();
  prob.y.resize(n);
  prob.s.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    prob.y(i) = labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    prob.s(i) = weights[static_cast<std::size_t>(i)];
    if (!(prob.s(i) > 0.0)) throw ComputationError("logistic_fit: sample weights must be positive");
  }
  prob.l2 = l2;
  return prob;
}

}  // namespace

LogisticModel logistic_fit_weighted(const Features& x, const std::vector<bool>& labels,
                                    std::span<const double> sample_weights, const LogisticOptions& options) {
  const auto prob = make_problem(x, labels, sample_weights, options.l2_strength);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(prob.params());
  double f = prob.objective(theta);
  std::vector<double> trace{f};

  int iteration = 0;
  bool converged = false;
  while (iteration < options.max_iterations && !converged) {
    ++iteration;
    const Eigen::VectorXd g = prob.gradient(theta);
    const auto h = prob.hessian(theta);
    const auto ldlt = h.ldlt();
    Eigen::VectorXd step = -ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      throw ComputationError(fmt::format("logistic_fit: singular Hessian at iteration {}", iteration));
    }
    // Close to the optimum the objective change drops below its rounding
    // error; there a step is accepted when it shrinks the gradient.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    const double g_norm = g.cwiseAbs().maxCoeff();
    const auto acceptable = [&](double f_new, const Eigen::VectorXd& s) {
      if (f_new <= f) return true;
      return f_new <= f + noise && prob.gradient(theta + s).cwiseAbs().maxCoeff() < g_norm;
    };
    double f_new = prob.objective(theta + step);
    bool accepted = acceptable(f_new, step);
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      step *= 0.5;
      f_new = prob.objective(theta + step);
      accepted = acceptable(f_new, step);
    }
    if (!accepted) {
      // No progress along the Newton direction at any scale: stationary to
      // machine precision.
      converged = true;
      break;
    }
    theta += step;
    f = f_new;
    trace.push_back(f);
    converged = step.cwiseAbs().maxCoeff() < options.tolerance;
  }
  if (!converged) {
    throw ComputationError(fmt::format("logistic_fit: no convergence after {} iterations", iteration));
  }

  LogisticModel model;
  const auto p = prob.params() - 1;
  model.feature_names = default_names(static_cast<std::size_t>(p));
  model.weights.assign(theta.data(), theta.data() + p);
  model.intercept = theta(p);
  model.l2_strength = options.l2_strength;
  model.iterations = iteration;
  model.objective_trace = std::move(trace);
  return model;
}

LogisticModel logistic_fit(const Features& x, const std::vector<bool>& labels, const LogisticOptions& options) {
  std::pair<double, double> cw{1.0, 1.0};
  if (options.weighting == ClassWeighting::Balanced) cw = balanced_class_weights(labels);
  std::vector<double> weights;
  weights.reserve(labels.size());
  for (const bool l : labels) weights.push_back(l ? cw.first : cw.second);
  auto model = logistic_fit_weighted(x, labels, weights, options);
  model.class_weights = cw;
  return model;
}

std::vector<double> logistic_probability(const LogisticModel& model, const Features& x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != model.weights.size()) {
      throw ComputationError(fmt::format("logistic_predict: row {} has {} features, model expects {}", i, x[i].size(),
                                         model.weights.size()));
    }
    double z = model.intercept;
    for (std::size_t j = 0; j < x[i].size(); ++j) z += model.weights[j] * x[i][j];
    out.push_back(sigmoid(z));
  }
  return out;
}

std::vector<bool> logistic_predict(const LogisticModel& model, const Features& x, double decision_threshold) {
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ComputationError("logistic_predict: decision threshold must be in (0,1)");
  }
  std::vector<bool> out;
  for (const double p : logistic_probability(model, x)) out.push_back(p >= decision_threshold);
  return out;
}

LogisticObjective logistic_objective(const LogisticModel& model, const Features& x, const std::vector<bool>& labels,
                                     std::span<const double> sample_weights) {
  const auto prob = make_problem(x, labels, sample_weights, model.l2_strength);
  Eigen::VectorXd theta(prob.params());
  for (std::size_t j = 0; j < model.weights.size(); ++j) theta(static_cast<Eigen::Index>(j)) = model.weights[j];
  theta(prob.params() - 1) = model.intercept;
  const Eigen::VectorXd g = prob.gradient(theta);
  return {prob.objective(theta), std::vector<double>(g.data(), g.data() + g.size())};
}

std::vector<bool> lcp_to_cwi(std::span<const double> predictions, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ComputationError("lcp_to_cwi: threshold must be in [0,1]");
  std::vector<bool> out;
  out.reserve(predictions.size());
  for (const double p : predictions) out.push_back(p >= threshold);
  return out;
}

// --- serialization ------------------------------------------------------------------

nlohmann::json to_json(const RidgeModel& model) {
  return {{"type", "ridge"},
          {"feature_names", model.feature_names},
          {"weights", model.weights},
          {"intercept", model.intercept},
          {"l2_strength", model.l2_strength},
          {"clip", {0.0, 1.0}}};
}

nlohmann::json to_json(const LogisticModel& model) {
  return {{"type", "logistic"},
          {"feature_names", model.feature_names},
          {"weights", model.weights},
          {"intercept", model.intercept},
          {"l2_strength", model.l2_strength},
          {"class_weights", {model.class_weights.first, model.class_weights.second}},
          {"iterations", model.iterations}};
}

RidgeModel ridge_from_json(const nlohmann::json& j) {
  if (j.at("type") != "ridge") throw InputError("model JSON is not a ridge model");
  RidgeModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.l2_strength = j.at("l2_strength").get<double>();
  return m;
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
  if (j.at("type") != "logistic") throw InputError("model JSON is not a logistic model");
  LogisticModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.l2_strength = j.at("l2_strength").get<double>();
  const auto cw = j.at("class_weights");
  m.class_weights = {cw.at(0).get<double>(), cw.at(1).get<double>()};
  m.iterations = j.value("iterations", 0);
  return m;
}

}  // namespace lexcomp::models
