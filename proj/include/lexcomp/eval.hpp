#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexcomp/dataset.hpp"
#include "lexcomp/lexfeatures.hpp"
#include "lexcomp/models.hpp"
#include "lexcomp/stats.hpp"

namespace lexcomp::eval {

/// 1 - SSres / SStot, SStot taken around the mean of `gold`.
double r_squared(std::span<const double> gold, std::span<const double> pred);

/// Mean of the positive-class and negative-class F1. A class whose
/// precision + recall is zero contributes 0.
double macro_f1(const std::vector<bool>& gold, const std::vector<bool>& pred);

enum class Task { LCP, CWI, LCP_CWI };
enum class Source { Group, Individual };
/// How group CWI labels are formed from a rating matrix.
enum class GroupLabels { Majority, MeanThreshold };

std::string_view to_string(Task task);
std::string_view to_string(Source source);
Task parse_task(std::string_view s);
GroupLabels parse_group_labels(std::string_view s);

struct ExperimentConfig {
  Task task = Task::LCP;
  Source train_source = Source::Group;
  Source test_source = Source::Group;
  std::vector<FeatureSource> features;
  double threshold = kDefaultCwiThreshold;
  double ridge_l2 = 1.0;
  models::LogisticOptions logistic{};
  GroupLabels group_labels = GroupLabels::Majority;
};

struct ExperimentReport {
  Task task = Task::LCP;
  Source train_source = Source::Group;
  Source test_source = Source::Group;
  std::string metric_name;
  std::vector<std::string> features;
  double mean = 0.0;
  std::optional<double> std;  // sample std over runs; absent for a single run
  std::optional<std::map<std::string, double>> per_annotator;
  std::vector<std::string> excluded;  // "<annotator>: <reason>"
};

/// Trains on `trial` and scores on `test` in one train/test setting. Runs
/// that need per-annotator models iterate annotators in sorted id order.
ExperimentReport run_experiment(const ExperimentConfig& config, const Dataset& trial, const Dataset& test);

/// All four train/test settings for the config's task.
std::vector<ExperimentReport> run_all_settings(ExperimentConfig config, const Dataset& trial, const Dataset& test);

nlohmann::json to_json(const ExperimentReport& report);

/// One 2x2 results table: rows are train sources, columns test sources.
struct ResultTable {
  Task task = Task::LCP;
  std::string metric_name;
  std::string cells[2][2];  // [train][test], formatted
};

/// "0.41" for a single run, "-0.10(0.41)" with a standard deviation.
std::string format_cell(const ExperimentReport& report);

/// One table per task, in order of first appearance. Throws InputError when a
/// task lacks one of the four settings.
std::vector<ResultTable> report_tables(std::span<const ExperimentReport> reports);
std::string render_tsv(const ResultTable& table);

struct DiffRow {
  std::string id;
  std::string target;
  Origin origin = Origin::Japanese;
  std::optional<double> log_freq;
  double base = 0.0;
  double other = 0.0;
  double difference = 0.0;
};

/// Per-word (other - base) complexity, sorted ascending by difference with
/// ties kept in instance order.
std::vector<DiffRow> difference_table(std::span<const Instance> instances, std::span<const double> log_freq,
                                      const ComplexityView& base, const ComplexityView& other);

struct HistogramRow {
  std::string view;
  Split split = Split::Test;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct ScatterRow {
  std::string view;
  std::string id;
  std::string target;
  Origin origin = Origin::Japanese;
  double log_freq = 0.0;
  double complexity = 0.0;
};

struct LinearFit {
  std::string view;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
};

struct BandRow {
  std::string view;
  double x = 0.0;
  double fit = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PlotData {
  std::vector<HistogramRow> histogram;
  std::vector<ScatterRow> scatter;
  std::vector<LinearFit> fits;
  std::vector<BandRow> bands;
};

/// Number of abscissae in each confidence band.
inline constexpr int kBandPoints = 100;

/// Histogram of each view per split over [0,1] in `bins` equal bins (1.0
/// falls in the last bin). With `log_freq` aligned to `instances`, also
/// scatter rows and a least-squares fit with a 95% confidence band for the
/// mean response per view.
PlotData plot_data(std::span<const Instance> instances, std::span<const double> log_freq,
                   std::span<const stats::NamedView> views, int bins);

}  // namespace lexcomp::eval
