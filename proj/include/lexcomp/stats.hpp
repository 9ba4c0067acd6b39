#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexcomp/dataset.hpp"
#include "lexcomp/lexfeatures.hpp"

namespace lexcomp::stats {

/// Standard normal CDF.
double normal_cdf(double x);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for n == 1
  std::size_t n = 0;
};
Summary summarize(std::span<const double> values);

/// Product-moment correlation. Throws ComputationError on constant input or
/// fewer than two points.
double pearson(std::span<const double> x, std::span<const double> y);

/// Krippendorff's alpha with the interval (squared difference) metric,
/// computed from the coincidence of pairable values. Units with a single
/// rating do not contribute.
double krippendorff_alpha_interval(const RatingMatrix& matrix);

/// Unweighted mean of the Pearson correlations of all annotator pairs, each
/// computed on the instances both annotators rated.
double mean_pairwise_pcc(const RatingMatrix& matrix);

struct PermutationResult {
  enum class Mode { Exact, MonteCarlo };
  double observed_diff = 0.0;  // mean(a) - mean(b)
  double p_value = 1.0;
  Mode mode = Mode::Exact;
  std::uint64_t relabelings = 0;  // partitions enumerated, or samples + 1
  std::uint64_t seed = 0;         // Monte-Carlo only
};

struct PermutationOptions {
  std::uint64_t exact_limit = 10'000'000;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
};

/// Two-sided unpaired permutation test on the difference of means. Exact
/// when C(|a|+|b|, |a|) <= exact_limit, seeded Monte-Carlo otherwise; the
/// observed labeling is always counted.
PermutationResult permutation_test(std::span<const double> a, std::span<const double> b,
                                   const PermutationOptions& options = {});

struct SteigerResult {
  double z_statistic = 0.0;
  double p_value = 1.0;
  int n = 0;
};

/// Compares two dependent correlations r_jk and r_jh sharing variable j,
/// given r_kh, with the pooled-r Fisher-z statistic.
SteigerResult steiger_test(double r_jk, double r_jh, double r_kh, int n);

struct OriginGroup {
  Origin origin = Origin::Japanese;
  std::size_t words = 0;
  std::vector<Summary> columns;
};

/// Per-origin summaries of log-frequency, base complexity and differences
/// to other views, with a permutation p-value per column.
struct OriginGapTable {
  std::vector<std::string> columns;
  std::pair<OriginGroup, OriginGroup> groups;
  std::vector<PermutationResult> p_values;
};

struct NamedView {
  std::string name;
  ComplexityView view;
};

/// `log_freq`, when non-empty, is aligned with `instances`. Views are looked
/// up by instance id and must cover every instance of the two origins.
OriginGapTable origin_gap_analysis(std::span<const Instance> instances, std::span<const double> log_freq,
                                   const ComplexityView& base, std::span<const NamedView> others,
                                   std::pair<Origin, Origin> origins, const PermutationOptions& options = {});

struct CorrelationRow {
  std::string name;
  double pcc = 0.0;
  double potential_pcc = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

/// PCC of each feature with the complexity view over all instances, and over
/// the instances the resource covers. Rows are sorted by |PCC| descending.
std::vector<CorrelationRow> correlation_table(std::span<const Instance> instances, const ComplexityView& complexity,
                                              std::span<const FeatureSource> sources);

/// Targets of `view` reordered to follow `instances`.
std::vector<double> align(const ComplexityView& view, std::span<const Instance> instances);

}  // namespace lexcomp::stats
