#include "lexcomp/lexfeatures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lexcomp/error.hpp"
#include "lexcomp/text.hpp"

namespace lexcomp {

std::string_view to_string(LookupUnit unit) {
  switch (unit) {
    case LookupUnit::WordSurface: return "word_surface";
    case LookupUnit::Lemma: return "lemma";
    case LookupUnit::Character: return "character";
  }
  return "?";
}

LookupUnit parse_lookup_unit(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "word_surface" || v == "surface" || v == "word" || v == "token") return LookupUnit::WordSurface;
  if (v == "lemma") return LookupUnit::Lemma;
  if (v == "character" || v == "char") return LookupUnit::Character;
  throw InputError(fmt::format("unknown lookup unit '{}'", s));
}

namespace {

struct Directive {
  std::string key;
  std::string value;
};

/// `#key=value` with no tab; other lines starting with '#' and no tab are comments.
std::optional<Directive> parse_directive(const text::TsvRow& row) {
  if (row.fields.size() != 1 || !row.fields[0].starts_with('#')) return std::nullopt;
  const auto& s = row.fields[0];
  const auto eq = s.find('=');
  if (eq == std::string::npos) return Directive{};
  return Directive{std::string(text::trim(std::string_view(s).substr(1, eq - 1))),
                   std::string(text::trim(std::string_view(s).substr(eq + 1)))};
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return fmt::format("{}:{}", path.string(), line);
}

}  // namespace

// --- FrequencyTable ---------------------------------------------------------

FrequencyTable::FrequencyTable(std::unordered_map<std::string, std::int64_t> counts, LookupUnit unit,
                               std::optional<std::int64_t> token_total, std::optional<std::int64_t> type_total)
    : counts_(std::move(counts)), unit_(unit) {
  std::int64_t sum = 0;
  for (const auto& [word, c] : counts_) {
    if (c < 1) throw InputError(fmt::format("count for '{}' must be at least 1", word));
    sum += c;
  }
  token_total_ = token_total.value_or(sum);
  type_total_ = type_total.value_or(static_cast<std::int64_t>(counts_.size()));
  if (type_total_ < 1 || token_total_ < type_total_ || token_total_ < sum ||
      type_total_ < static_cast<std::int64_t>(counts_.size())) {
    throw InputError(fmt::format("inconsistent totals: #tokens={} #types={}", token_total_, type_total_));
  }
}

FrequencyTable FrequencyTable::load(const std::filesystem::path& path, std::optional<LookupUnit> unit) {
  std::unordered_map<std::string, std::int64_t> counts;
  std::optional<std::int64_t> tokens;
  std::optional<std::int64_t> types;
  std::optional<LookupUnit> declared;
  bool data_started = false;
  for (const auto& row : text::read_tsv(path)) {
    const auto loc = where(path, row.line);
    if (const auto d = parse_directive(row)) {
      if (d->key.empty()) continue;
      if (data_started) throw InputError(fmt::format("{}: directive after data rows", loc));
      if (d->key == "tokens") tokens = text::parse_int(d->value, loc);
      else if (d->key == "types") types = text::parse_int(d->value, loc);
      else if (d->key == "unit") declared = parse_lookup_unit(d->value);
      else throw InputError(fmt::format("{}: unknown directive '#{}'", loc, d->key));
      continue;
    }
    data_started = true;
    if (row.fields.size() != 2) {
      throw InputError(fmt::format("{}: expected 'word<TAB>count', found {} columns", loc, row.fields.size()));
    }
    const auto c = text::parse_int(row.fields[1], loc);
    if (c < 1) throw InputError(fmt::format("{}: count must be at least 1", loc));
    if (!counts.emplace(row.fields[0], c).second) {
      throw InputError(fmt::format("{}: duplicate word '{}'", loc, row.fields[0]));
    }
  }
  if (counts.empty()) throw InputError(fmt::format("{}: no counts", path.string()));
  try {
    return FrequencyTable(std::move(counts), unit.value_or(declared.value_or(LookupUnit::WordSurface)), tokens,
                          types);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::int64_t FrequencyTable::count(std::string_view item) const {
  const auto it = counts_.find(std::string(item));
  return it == counts_.end() ? 0 : it->second;
}

FrequencyTable FrequencyTable::with_added(std::string word, std::int64_t count) const {
  if (contains(word)) throw InputError(fmt::format("'{}' is already in the table", word));
  auto counts = counts_;
  counts.emplace(std::move(word), count);
  return FrequencyTable(std::move(counts), unit_, token_total_ + count, type_total_ + 1);
}

// --- LevelTable ---------------------------------------------------------------

LevelTable::LevelTable(std::unordered_map<std::string, int> levels, std::optional<int> max_level)
    : levels_(std::move(levels)) {
  int highest = 0;
  for (const auto& [lemma, l] : levels_) highest = std::max(highest, l);
  max_level_ = max_level.value_or(highest);
  if (max_level_ < 1) throw InputError("level table needs max_level >= 1");
  for (const auto& [lemma, l] : levels_) {
    if (l < 1 || l > max_level_) {
      throw InputError(fmt::format("level {} of '{}' is outside [1, {}]", l, lemma, max_level_));
    }
  }
}

LevelTable LevelTable::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, int> levels;
  std::optional<int> max_level;
  for (const auto& row : text::read_tsv(path)) {
    const auto loc = where(path, row.line);
    if (const auto d = parse_directive(row)) {
      if (d->key == "max_level") max_level = static_cast<int>(text::parse_int(d->value, loc));
      else if (!d->key.empty()) throw InputError(fmt::format("{}: unknown directive '#{}'", loc, d->key));
      continue;
    }
    if (row.fields.size() != 2) {
      throw InputError(fmt::format("{}: expected 'lemma<TAB>level', found {} columns", loc, row.fields.size()));
    }
    const auto l = static_cast<int>(text::parse_int(row.fields[1], loc));
    if (!levels.emplace(row.fields[0], l).second) {
      throw InputError(fmt::format("{}: duplicate lemma '{}'", loc, row.fields[0]));
    }
  }
  if (levels.empty()) throw InputError(fmt::format("{}: no levels", path.string()));
  try {
    return LevelTable(std::move(levels), max_level);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::optional<int> LevelTable::level(std::string_view lemma) const {
  const auto it = levels_.find(std::string(lemma));
  if (it == levels_.end()) return std::nullopt;
  return it->second;
}

// --- FamiliarityTable -------------------------------------------------------

FamiliarityTable::FamiliarityTable(std::unordered_map<std::string, double> familiarity)
    : familiarity_(std::move(familiarity)) {
  if (familiarity_.empty()) throw InputError("familiarity table is empty");
  floor_ = std::numeric_limits<double>::infinity();
  for (const auto& [lemma, f] : familiarity_) floor_ = std::min(floor_, f);
}

FamiliarityTable FamiliarityTable::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, double> values;
  for (const auto& row : text::read_tsv(path)) {
    const auto loc = where(path, row.line);
    if (parse_directive(row)) continue;
    if (row.fields.size() != 2) {
      throw InputError(fmt::format("{}: expected 'lemma<TAB>value', found {} columns", loc, row.fields.size()));
    }
    if (!values.emplace(row.fields[0], text::parse_double(row.fields[1], loc)).second) {
      throw InputError(fmt::format("{}: duplicate lemma '{}'", loc, row.fields[0]));
    }
  }
  if (values.empty()) throw InputError(fmt::format("{}: no values", path.string()));
  return FamiliarityTable(std::move(values));
}

std::optional<double> FamiliarityTable::familiarity(std::string_view lemma) const {
  const auto it = familiarity_.find(std::string(lemma));
  if (it == familiarity_.end()) return std::nullopt;
  return it->second;
}

ExternalFeature ExternalFeature::load(const std::filesystem::path& path, std::string name) {
  ExternalFeature feature{std::move(name), {}};
  for (const auto& row : text::read_tsv(path)) {
    const auto loc = where(path, row.line);
    if (parse_directive(row)) continue;
    if (row.fields.size() != 2) {
      throw InputError(fmt::format("{}: expected 'instance_id<TAB>value', found {} columns", loc, row.fields.size()));
    }
    if (!feature.values.emplace(std::string(text::trim(row.fields[0])), text::parse_double(row.fields[1], loc)).second) {
      throw InputError(fmt::format("{}: duplicate instance id '{}'", loc, row.fields[0]));
    }
  }
  return feature;
}

// --- feature formulas -------------------------------------------------------

double smoothed_log_freq(const FrequencyTable& table, std::string_view item) {
  const auto numerator = static_cast<double>(table.count(item) + 1);
  const auto denominator = static_cast<double>(table.token_total() + table.type_total());
  return std::log10(numerator / denominator);
}

double sequence_log_freq(const FrequencyTable& table, std::span<const std::string> items) {
  if (items.empty()) throw InputError("log-frequency of an empty sequence");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& item : items) best = std::min(best, smoothed_log_freq(table, item));
  return best;
}

int level_feature(const LevelTable& table, std::span<const std::string> lemmas) {
  if (lemmas.empty()) throw InputError("level of an empty sequence");
  int worst = 0;
  for (const auto& lemma : lemmas) worst = std::max(worst, table.level(lemma).value_or(table.dummy()));
  return worst;
}

double familiarity_feature(const FamiliarityTable& table, std::span<const std::string> lemmas) {
  if (lemmas.empty()) throw InputError("familiarity of an empty sequence");
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& lemma : lemmas) lowest = std::min(lowest, table.familiarity(lemma).value_or(table.floor()));
  return lowest;
}

double char_log_freq(const FrequencyTable& table, std::string_view target) {
  if (target.empty()) throw InputError("character log-frequency of an empty target");
  const auto chars = text::code_points(target);
  return sequence_log_freq(table, chars);
}

std::vector<std::string> lookup_items(const Instance& instance, LookupUnit unit) {
  switch (unit) {
    case LookupUnit::WordSurface: return instance.tokens;
    case LookupUnit::Lemma: return instance.lemmas;
    case LookupUnit::Character: return instance.characters();
  }
  return {};
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double feature_value(const FeatureSource& source, const Instance& instance) {
  return std::visit(
      Overloaded{
          [&](const std::shared_ptr<const FrequencyTable>& t) {
            const auto items = lookup_items(instance, t->unit());
            return sequence_log_freq(*t, items);
          },
          [&](const std::shared_ptr<const LevelTable>& t) {
            return static_cast<double>(level_feature(*t, instance.lemmas));
          },
          [&](const std::shared_ptr<const FamiliarityTable>& t) { return familiarity_feature(*t, instance.lemmas); },
          [&](const std::shared_ptr<const ExternalFeature>& t) {
            const auto it = t->values.find(instance.id);
            if (it == t->values.end()) {
              throw InputError(fmt::format("feature '{}' has no value for instance '{}'", source.name, instance.id));
            }
            return it->second;
          },
      },
      source.resource);
}

std::vector<bool> coverage_mask(const FeatureSource& source, std::span<const Instance> instances) {
  std::vector<bool> mask;
  mask.reserve(instances.size());
  for (const auto& inst : instances) {
    const bool covered = std::visit(
        Overloaded{
            [&](const std::shared_ptr<const FrequencyTable>& t) {
              const auto items = lookup_items(inst, t->unit());
              return std::all_of(items.begin(), items.end(), [&](const auto& x) { return t->contains(x); });
            },
            [&](const std::shared_ptr<const LevelTable>& t) {
              return std::all_of(inst.lemmas.begin(), inst.lemmas.end(), [&](const auto& x) { return t->contains(x); });
            },
            [&](const std::shared_ptr<const FamiliarityTable>& t) {
              return std::all_of(inst.lemmas.begin(), inst.lemmas.end(), [&](const auto& x) { return t->contains(x); });
            },
            [&](const std::shared_ptr<const ExternalFeature>& t) { return t->values.contains(inst.id); },
        },
        source.resource);
    mask.push_back(covered);
  }
  return mask;
}

FeatureMatrix build_feature_matrix(std::span<const Instance> instances, std::span<const FeatureSource> sources) {
  if (sources.empty()) throw InputError("no features requested");
  FeatureMatrix m;
  for (const auto& s : sources) m.columns.push_back(s.name);
  m.rows.reserve(instances.size());
  for (const auto& inst : instances) {
    std::vector<double> row;
    row.reserve(sources.size());
    for (const auto& s : sources) row.push_back(feature_value(s, inst));
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace lexcomp
