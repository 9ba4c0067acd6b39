#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexcomp {

/// Complexity threshold separating simple from complex words: the midpoint
/// between the "easy" (0.25) and "neutral" (0.5) rating levels.
inline constexpr double kDefaultCwiThreshold = 0.375;

enum class Origin { Japanese, Chinese, Mixed, Other };
enum class Split { Trial, Test };

std::string_view to_string(Origin origin);
std::string_view to_string(Split split);
/// Accepts the canonical names case-insensitively plus a few aliases
/// ("english"/"foreign" for Other, "ch+ja" for Mixed, "wago"/"kango").
Origin parse_origin(std::string_view s);
Split parse_split(std::string_view s);

struct Instance {
  std::string id;
  std::string target;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
  Origin origin = Origin::Japanese;
  std::string pos;
  Split split = Split::Test;

  /// Code points of the target, in order.
  [[nodiscard]] std::vector<std::string> characters() const;
};

struct AnnotatorProfile {
  std::string annotator_id;
  std::vector<std::string> native_languages;
  std::string jlpt_level;
  double years_in_japan = 0.0;
  double reading_hours_per_week = 0.0;
  double age_years = 0.0;
  double education_years = 0.0;
};

/// Annotators x instances grid of complexity ratings in [0,1]; absent cells
/// are missing ratings. Immutable once constructed.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  /// `values` is row-major, one row per annotator. Throws InputError when an
  /// invariant is violated (range, duplicate ids, empty instance column, and
  /// the 5-level grid when `strict_grid` is set).
  RatingMatrix(std::vector<std::string> annotator_ids, std::vector<std::string> instance_ids,
               std::vector<std::optional<double>> values, bool strict_grid = false);

  [[nodiscard]] std::size_t annotator_count() const { return annotator_ids_.size(); }
  [[nodiscard]] std::size_t instance_count() const { return instance_ids_.size(); }
  [[nodiscard]] const std::vector<std::string>& annotator_ids() const { return annotator_ids_; }
  [[nodiscard]] const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  [[nodiscard]] std::optional<double> at(std::size_t annotator, std::size_t instance) const {
    return values_[annotator * instance_ids_.size() + instance];
  }
  [[nodiscard]] std::span<const std::optional<double>> row(std::size_t annotator) const {
    return {values_.data() + annotator * instance_ids_.size(), instance_ids_.size()};
  }
  [[nodiscard]] std::size_t annotator_index(std::string_view id) const;
  [[nodiscard]] std::size_t present_count() const;

  /// Keeps the given annotator rows, in the given order.
  [[nodiscard]] RatingMatrix select_annotators(std::span<const std::string> ids) const;
  /// Keeps the given instance columns, in the given order.
  [[nodiscard]] RatingMatrix select_instances(std::span<const std::string> ids) const;

  friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

 private:
  std::vector<std::string> annotator_ids_;
  std::vector<std::string> instance_ids_;
  std::vector<std::optional<double>> values_;
};

/// Where the targets of a view came from.
struct Provenance {
  enum class Kind { GroupMean, GroupMajority, Individual };
  Kind kind = Kind::GroupMean;
  std::string annotator_id;  // set for Individual

  [[nodiscard]] std::string describe() const;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Real-valued (LCP) targets for a list of instances.
struct ComplexityView {
  std::vector<std::string> instance_ids;
  std::vector<double> targets;
  Provenance provenance;
};

/// Binary (CWI) targets for a list of instances; true means complex.
struct LabelView {
  std::vector<std::string> instance_ids;
  std::vector<bool> targets;
  Provenance provenance;
};

struct Dataset {
  std::vector<Instance> instances;
  RatingMatrix ratings;

  /// Instances of one split together with the matching rating columns.
  [[nodiscard]] Dataset split(Split which) const;
};

std::vector<Instance> load_instances(const std::filesystem::path& path);
/// Rows follow the file order; use RatingMatrix::select_instances to align.
RatingMatrix load_ratings(const std::filesystem::path& path, bool strict_grid = false);
std::vector<AnnotatorProfile> load_profiles(const std::filesystem::path& path);

/// Loads both files and aligns the rating columns to the instance order.
/// Every instance must have a ratings row and vice versa.
Dataset load_dataset(const std::filesystem::path& instances_path,
                     const std::filesystem::path& ratings_path, bool strict_grid = false);

void save_instances(const std::vector<Instance>& instances, const std::filesystem::path& path);
void save_ratings(const RatingMatrix& matrix, const std::filesystem::path& path);

/// Per instance, the mean of the present ratings.
ComplexityView group_mean(const RatingMatrix& matrix);

/// True iff value >= threshold.
bool cwi_label(double value, double threshold = kDefaultCwiThreshold);

/// Per instance, majority vote over binarized present ratings. A tie counts
/// as complex.
LabelView group_majority(const RatingMatrix& matrix, double threshold = kDefaultCwiThreshold);

/// One annotator's present ratings; instances the annotator skipped are dropped.
ComplexityView individual_ratings(const RatingMatrix& matrix, std::string_view annotator_id);
LabelView individual_labels(const RatingMatrix& matrix, std::string_view annotator_id,
                            double threshold = kDefaultCwiThreshold);

/// Thresholds every target of a complexity view.
LabelView threshold_view(const ComplexityView& view, double threshold = kDefaultCwiThreshold);

struct NamedMatrix {
  std::string name;
  RatingMatrix matrix;
};

/// Row-concatenation of matrices over an identical instance list. When any
/// annotator id occurs in more than one group, every id is rewritten to
/// "<group>:<id>".
RatingMatrix union_matrices(std::span<const NamedMatrix> groups);

/// Composition of a list of instances: share of each category per split.
struct CompositionRow {
  std::string section;   // "origin", "contains_origin" or "pos"
  std::string category;
  std::map<Split, double> percent;  // only splits present in the input
  std::map<Split, std::size_t> count;
};

/// "contains_origin" reproduces the convention of reporting words that
/// contain any Chinese-origin token (Chinese + Mixed) or foreign tokens.
std::vector<CompositionRow> describe(const std::vector<Instance>& instances);

}  // namespace lexcomp
