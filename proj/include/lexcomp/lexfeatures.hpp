#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lexcomp/dataset.hpp"

namespace lexcomp {

/// What a frequency table is keyed by, and therefore which part of an
/// instance is looked up in it.
enum class LookupUnit { WordSurface, Lemma, Character };

std::string_view to_string(LookupUnit unit);
LookupUnit parse_lookup_unit(std::string_view s);

/// Corpus counts with the totals used for Laplace smoothing.
class FrequencyTable {
 public:
  /// Totals default to the sum of counts and the number of entries. Throws
  /// InputError on zero counts or inconsistent totals.
  FrequencyTable(std::unordered_map<std::string, std::int64_t> counts, LookupUnit unit = LookupUnit::WordSurface,
                 std::optional<std::int64_t> token_total = std::nullopt,
                 std::optional<std::int64_t> type_total = std::nullopt);

  /// `word<TAB>count` rows, optionally preceded by `#tokens=N`, `#types=N`
  /// and `#unit=word_surface|lemma|character` directives. `unit` overrides
  /// the directive when given.
  static FrequencyTable load(const std::filesystem::path& path,
                             std::optional<LookupUnit> unit = std::nullopt);

  [[nodiscard]] std::int64_t count(std::string_view item) const;
  [[nodiscard]] bool contains(std::string_view item) const { return count(item) > 0; }
  [[nodiscard]] std::int64_t token_total() const { return token_total_; }
  [[nodiscard]] std::int64_t type_total() const { return type_total_; }
  [[nodiscard]] std::size_t size() const { return counts_.size(); }
  [[nodiscard]] LookupUnit unit() const { return unit_; }

  /// Copy with one more word; totals grow by `count` tokens and one type.
  [[nodiscard]] FrequencyTable with_added(std::string word, std::int64_t count) const;

 private:
  std::unordered_map<std::string, std::int64_t> counts_;
  std::int64_t token_total_ = 0;
  std::int64_t type_total_ = 0;
  LookupUnit unit_ = LookupUnit::WordSurface;
};

/// Pedagogical word levels 1..max_level. Words not in the list get
/// max_level + 1.
class LevelTable {
 public:
  /// `max_level` defaults to the largest stored level.
  explicit LevelTable(std::unordered_map<std::string, int> levels, std::optional<int> max_level = std::nullopt);
  /// `lemma<TAB>level` rows; an optional `#max_level=N` directive.
  static LevelTable load(const std::filesystem::path& path);

  [[nodiscard]] std::optional<int> level(std::string_view lemma) const;
  [[nodiscard]] bool contains(std::string_view lemma) const { return level(lemma).has_value(); }
  [[nodiscard]] int max_level() const { return max_level_; }
  [[nodiscard]] int dummy() const { return max_level_ + 1; }

 private:
  std::unordered_map<std::string, int> levels_;
  int max_level_ = 0;
};

/// Word familiarity norms. Words not in the list get the minimum stored value.
class FamiliarityTable {
 public:
  explicit FamiliarityTable(std::unordered_map<std::string, double> familiarity);
  /// `lemma<TAB>value` rows.
  static FamiliarityTable load(const std::filesystem::path& path);

  [[nodiscard]] std::optional<double> familiarity(std::string_view lemma) const;
  [[nodiscard]] bool contains(std::string_view lemma) const { return familiarity(lemma).has_value(); }
  [[nodiscard]] double floor() const { return floor_; }

 private:
  std::unordered_map<std::string, double> familiarity_;
  double floor_ = 0.0;
};

/// A precomputed per-instance value, e.g. the output of an external model.
struct ExternalFeature {
  std::string name;
  std::unordered_map<std::string, double> values;

  /// `instance_id<TAB>value` rows.
  static ExternalFeature load(const std::filesystem::path& path, std::string name);
};

/// log10((count + 1) / (#tokens + #types)).
double smoothed_log_freq(const FrequencyTable& table, std::string_view item);
/// Minimum smoothed log-frequency over the items.
double sequence_log_freq(const FrequencyTable& table, std::span<const std::string> items);
/// Maximum level over the lemmas, out-of-list lemmas counting as dummy().
int level_feature(const LevelTable& table, std::span<const std::string> lemmas);
/// Minimum familiarity over the lemmas, out-of-list lemmas counting as floor().
double familiarity_feature(const FamiliarityTable& table, std::span<const std::string> lemmas);
/// Minimum smoothed log-frequency over the code points of `target`.
double char_log_freq(const FrequencyTable& table, std::string_view target);

/// A named feature source. Frequency tables look up tokens, lemmas or
/// characters according to their unit.
struct FeatureSource {
  using Resource = std::variant<std::shared_ptr<const FrequencyTable>, std::shared_ptr<const LevelTable>,
                                std::shared_ptr<const FamiliarityTable>, std::shared_ptr<const ExternalFeature>>;
  std::string name;
  Resource resource;
};

/// The lookup units an instance needs from a frequency table of the given unit.
std::vector<std::string> lookup_items(const Instance& instance, LookupUnit unit);

/// Feature value for one instance, with the missing-value substitutions
/// applied. Throws InputError when an external feature lacks the instance.
double feature_value(const FeatureSource& source, const Instance& instance);

/// True where every lookup unit of the instance is present in the resource,
/// i.e. the feature value involves no smoothing or dummy substitution.
std::vector<bool> coverage_mask(const FeatureSource& source, std::span<const Instance> instances);

struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one per instance
};

FeatureMatrix build_feature_matrix(std::span<const Instance> instances, std::span<const FeatureSource> sources);

}  // namespace lexcomp
