#include "lexcomp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "lexcomp/error.hpp"
#include "lexcomp/text.hpp"

namespace lexcomp::eval {

double r_squared(std::span<const double> gold, std::span<const double> pred) {
  if (gold.size() != pred.size()) throw ComputationError("r_squared: gold and predictions differ in length");
  if (gold.size() < 2) throw ComputationError("r_squared: need at least two points");
  const double mean = std::accumulate(gold.begin(), gold.end(), 0.0) / static_cast<double>(gold.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ss_res += (gold[i] - pred[i]) * (gold[i] - pred[i]);
    ss_tot += (gold[i] - mean) * (gold[i] - mean);
  }
  if (ss_tot == 0.0) throw ComputationError("r_squared: gold values are constant");
  return 1.0 - ss_res / ss_tot;
}

double macro_f1(const std::vector<bool>& gold, const std::vector<bool>& pred) {
  if (gold.size() != pred.size()) throw ComputationError("macro_f1: gold and predictions differ in length");
  if (gold.empty()) throw ComputationError("macro_f1: no samples");
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && pred[i]) ++tp;
    else if (!gold[i] && pred[i]) ++fp;
    else if (gold[i] && !pred[i]) ++fn;
    else ++tn;
  }
  // F1 = 2TP / (2TP + FP + FN); zero when the denominator vanishes.
  const auto f1 = [](std::size_t t, std::size_t false_pos, std::size_t false_neg) {
    const auto denom = 2 * t + false_pos + false_neg;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(t) / static_cast<double>(denom);
  };
  return 0.5 * (f1(tp, fp, fn) + f1(tn, fn, fp));
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::LCP: return "LCP";
    case Task::CWI: return "CWI";
    case Task::LCP_CWI: return "LCP-CWI";
  }
  return "?";
}

std::string_view to_string(Source source) { return source == Source::Group ? "Group" : "Individual"; }

Task parse_task(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "lcp") return Task::LCP;
  if (v == "cwi") return Task::CWI;
  if (v == "lcp-cwi" || v == "lcp_cwi") return Task::LCP_CWI;
  throw UsageError(fmt::format("unknown task '{}' (expected lcp, cwi or lcp-cwi)", s));
}

GroupLabels parse_group_labels(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "majority") return GroupLabels::Majority;
  if (v == "mean" || v == "mean-threshold") return GroupLabels::MeanThreshold;
  throw UsageError(fmt::format("unknown group label rule '{}' (expected majority or mean)", s));
}

// --- experiment runner -------------------------------------------------------------

namespace {

struct Prepared {
  std::unordered_map<std::string, std::size_t> row_of;
  models::Features features;
};

Prepared prepare(const Dataset& ds, std::span<const FeatureSource> sources) {
  Prepared p;
  auto m = build_feature_matrix(ds.instances, sources);
  p.features = std::move(m.rows);
  for (std::size_t i = 0; i < ds.instances.size(); ++i) p.row_of.emplace(ds.instances[i].id, i);
  return p;
}

models::Features rows_for(const Prepared& p, const std::vector<std::string>& ids) {
  models::Features out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = p.row_of.find(id);
    if (it == p.row_of.end()) throw InputError(fmt::format("no features for instance '{}'", id));
    out.push_back(p.features[it->second]);
  }
  return out;
}

/// A trained model: either a regressor or a classifier depending on task.
struct Trained {
  std::optional<models::RidgeModel> ridge;
  std::optional<models::LogisticModel> logistic;
};

class Runner {
 public:
  Runner(const ExperimentConfig& config, const Dataset& trial, const Dataset& test)
      : config_(config), trial_(trial), test_(test), train_x_(prepare(trial, config.features)),
        test_x_(prepare(test, config.features)) {}

  [[nodiscard]] Trained train(Source source, const std::string& annotator) const {
    Trained t;
    if (config_.task == Task::CWI) {
      const auto labels = source == Source::Group ? group_labels(trial_.ratings)
                                                  : individual_labels(trial_.ratings, annotator, config_.threshold);
      t.logistic = models::logistic_fit(rows_for(train_x_, labels.instance_ids), labels.targets, config_.logistic);
    } else {
      const auto view = source == Source::Group ? group_mean(trial_.ratings)
                                                : individual_ratings(trial_.ratings, annotator);
      t.ridge = models::ridge_fit(rows_for(train_x_, view.instance_ids), view.targets, config_.ridge_l2);
    }
    return t;
  }

  [[nodiscard]] double score(const Trained& model, Source source, const std::string& annotator) const {
    if (config_.task == Task::LCP) {
      const auto gold = source == Source::Group ? group_mean(test_.ratings)
                                                : individual_ratings(test_.ratings, annotator);
      const auto pred = models::ridge_predict(*model.ridge, rows_for(test_x_, gold.instance_ids));
      return r_squared(gold.targets, pred);
    }
    const auto gold = source == Source::Group ? group_labels(test_.ratings)
                                              : individual_labels(test_.ratings, annotator, config_.threshold);
    const auto x = rows_for(test_x_, gold.instance_ids);
    if (config_.task == Task::CWI) return macro_f1(gold.targets, models::logistic_predict(*model.logistic, x));
    return macro_f1(gold.targets, models::lcp_to_cwi(models::ridge_predict(*model.ridge, x), config_.threshold));
  }

 private:
  [[nodiscard]] LabelView group_labels(const RatingMatrix& m) const {
    if (config_.group_labels == GroupLabels::Majority) return group_majority(m, config_.threshold);
    auto view = threshold_view(group_mean(m), config_.threshold);
    view.provenance.kind = Provenance::Kind::GroupMean;
    return view;
  }

  const ExperimentConfig& config_;
  const Dataset& trial_;
  const Dataset& test_;
  Prepared train_x_;
  Prepared test_x_;
};

std::vector<std::string> shared_annotators(const Dataset& trial, const Dataset& test) {
  std::vector<std::string> a = trial.ratings.annotator_ids();
  std::vector<std::string> b = test.ratings.annotator_ids();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw InputError("trial and test ratings do not share the same annotators");
  return a;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& trial, const Dataset& test) {
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) throw UsageError("threshold must be in [0,1]");
  if (config.features.empty()) throw UsageError("no features configured");

  ExperimentReport report;
  report.task = config.task;
  report.train_source = config.train_source;
  report.test_source = config.test_source;
  report.metric_name = config.task == Task::LCP ? "r2" : "macro_f1";
  for (const auto& f : config.features) report.features.push_back(f.name);

  const Runner runner(config, trial, test);
  const bool individual = config.train_source == Source::Individual || config.test_source == Source::Individual;
  if (!individual) {
    report.mean = runner.score(runner.train(Source::Group, {}), Source::Group, {});
    return report;
  }

  const auto annotators = shared_annotators(trial, test);
  std::map<std::string, double> scores;
  std::optional<Trained> group_model;
  if (config.train_source == Source::Group) group_model = runner.train(Source::Group, {});
  for (const auto& a : annotators) {
    Trained model;
    if (group_model) {
      model = *group_model;
    } else {
      try {
        model = runner.train(Source::Individual, a);
      } catch (const ComputationError& e) {
        // Single-class individual CWI training data cannot be fit.
        if (config.task != Task::CWI) throw;
        report.excluded.push_back(fmt::format("{}: {}", a, e.what()));
        continue;
      }
    }
    scores.emplace(a, runner.score(model, config.test_source, a));
  }
  if (scores.empty()) throw ComputationError("every per-annotator run was excluded");

  std::vector<double> values;
  for (const auto& [a, v] : scores) values.push_back(v);
  const auto summary = stats::summarize(values);
  report.mean = summary.mean;
  if (values.size() > 1) report.std = summary.std;
  report.per_annotator = std::move(scores);
  return report;
}

std::vector<ExperimentReport> run_all_settings(ExperimentConfig config, const Dataset& trial, const Dataset& test) {
  std::vector<ExperimentReport> out;
  for (const auto train : {Source::Group, Source::Individual}) {
    for (const auto test_source : {Source::Group, Source::Individual}) {
      config.train_source = train;
      config.test_source = test_source;
      out.push_back(run_experiment(config, trial, test));
    }
  }
  return out;
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j{{"task", to_string(report.task)},
                   {"train", to_string(report.train_source)},
                   {"test", to_string(report.test_source)},
                   {"metric", report.metric_name},
                   {"features", report.features},
                   {"mean", report.mean}};
  j["std"] = report.std ? nlohmann::json(*report.std) : nlohmann::json(nullptr);
  if (report.per_annotator) j["per_annotator"] = *report.per_annotator;
  j["excluded"] = report.excluded;
  return j;
}

// --- tables ---------------------------------------------------------------------

std::string format_cell(const ExperimentReport& report) {
  auto s = text::format_fixed(report.mean, 2);
  if (report.std) s += "(" + text::format_fixed(*report.std, 2) + ")";
  return s;
}

std::vector<ResultTable> report_tables(std::span<const ExperimentReport> reports) {
  std::vector<Task> order;
  for (const auto& r : reports) {
    if (std::find(order.begin(), order.end(), r.task) == order.end()) order.push_back(r.task);
  }
  std::vector<ResultTable> tables;
  for (const auto task : order) {
    ResultTable t;
    t.task = task;
    bool filled[2][2] = {{false, false}, {false, false}};
    for (const auto& r : reports) {
      if (r.task != task) continue;
      const auto i = static_cast<std::size_t>(r.train_source);
      const auto j = static_cast<std::size_t>(r.test_source);
      t.cells[i][j] = format_cell(r);
      t.metric_name = r.metric_name;
      filled[i][j] = true;
    }
    for (const auto i : {0, 1}) {
      for (const auto j : {0, 1}) {
        if (!filled[i][j]) {
          throw InputError(fmt::format("{} results lack the {}-{} setting", to_string(task),
                                       to_string(static_cast<Source>(i)), to_string(static_cast<Source>(j))));
        }
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string render_tsv(const ResultTable& table) {
  std::string out = fmt::format("# {} ({})\ntrain\\test\tGroup\tIndividual\n", to_string(table.task), table.metric_name);
  for (const auto i : {0, 1}) {
    out += fmt::format("{}\t{}\t{}\n", to_string(static_cast<Source>(i)), table.cells[i][0], table.cells[i][1]);
  }
  return out;
}

// --- per-word tables and plot data ------------------------------------------------

std::vector<DiffRow> difference_table(std::span<const Instance> instances, std::span<const double> log_freq,
                                      const ComplexityView& base, const ComplexityView& other) {
  if (!log_freq.empty() && log_freq.size() != instances.size()) {
    throw InputError("difference table: log-frequency values do not match the instance list");
  }
  const auto b = stats::align(base, instances);
  const auto o = stats::align(other, instances);
  std::vector<DiffRow> rows;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    DiffRow r{instances[i].id, instances[i].target, instances[i].origin, std::nullopt, b[i], o[i], o[i] - b[i]};
    if (!log_freq.empty()) r.log_freq = log_freq[i];
    rows.push_back(std::move(r));
  }
  // rounded sort key
  const auto key = [](double d) { return std::llround(d * 1e9); };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const DiffRow& l, const DiffRow& r) { return key(l.difference) < key(r.difference); });
  return rows;
}

PlotData plot_data(std::span<const Instance> instances, std::span<const double> log_freq,
                   std::span<const stats::NamedView> views, int bins) {
  if (bins < 1) throw UsageError("bins must be at least 1");
  if (views.empty()) throw UsageError("plot data needs at least one view");
  if (!log_freq.empty() && log_freq.size() != instances.size()) {
    throw InputError("plot data: log-frequency values do not match the instance list");
  }
  PlotData out;
  std::set<Split> splits;
  for (const auto& inst : instances) splits.insert(inst.split);

  for (const auto& named : views) {
    std::unordered_map<std::string_view, double> by_id;
    for (std::size_t i = 0; i < named.view.instance_ids.size(); ++i) {
      by_id.emplace(named.view.instance_ids[i], named.view.targets[i]);
    }
    for (const auto split : splits) {
      std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
      bool any = false;
      for (const auto& inst : instances) {
        const auto it = by_id.find(inst.id);
        if (inst.split != split || it == by_id.end()) continue;
        any = true;
        const auto b = std::min(static_cast<std::size_t>(it->second * bins), static_cast<std::size_t>(bins - 1));
        ++counts[b];
      }
      if (!any) continue;
      for (int b = 0; b < bins; ++b) {
        out.histogram.push_back({named.name, split, static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins,
                                 counts[static_cast<std::size_t>(b)]});
      }
    }

    if (log_freq.empty()) continue;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto it = by_id.find(instances[i].id);
      if (it == by_id.end()) continue;
      out.scatter.push_back(
          {named.name, instances[i].id, instances[i].target, instances[i].origin, log_freq[i], it->second});
      xs.push_back(log_freq[i]);
      ys.push_back(it->second);
    }
    const auto n = xs.size();
    if (n < 3) throw ComputationError(fmt::format("view '{}': a confidence band needs at least 3 points", named.name));
    const double nn = static_cast<double>(n);
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nn;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nn;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw ComputationError(fmt::format("view '{}': log-frequency is constant", named.name));
    LinearFit fit{named.name, sxy / sxx, 0.0, n};
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += r * r;
    }
    const double s = std::sqrt(ss_res / (nn - 2.0));
    const boost::math::students_t dist(nn - 2.0);
    const double t = boost::math::quantile(dist, 0.975);
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    for (int k = 0; k < kBandPoints; ++k) {
      const double x = *lo_it + (*hi_it - *lo_it) * k / (kBandPoints - 1);
      const double y = fit.intercept + fit.slope * x;
      const double half = t * s * std::sqrt(1.0 / nn + (x - mx) * (x - mx) / sxx);
      out.bands.push_back({named.name, x, y, y - half, y + half});
    }
    out.fits.push_back(std::move(fit));
  }
  return out;
}

}  // namespace lexcomp::eval
