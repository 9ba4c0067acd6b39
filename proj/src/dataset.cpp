#include "lexcomp/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "lexcomp/error.hpp"
#include "lexcomp/text.hpp"

namespace lexcomp {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::Japanese: return "Japanese";
    case Origin::Chinese: return "Chinese";
    case Origin::Mixed: return "Mixed";
    case Origin::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(Split split) { return split == Split::Trial ? "trial" : "test"; }

Origin parse_origin(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "japanese" || v == "wago" || v == "ja") return Origin::Japanese;
  if (v == "chinese" || v == "kango" || v == "zh") return Origin::Chinese;
  if (v == "mixed" || v == "ch+ja" || v == "ch. + ja.") return Origin::Mixed;
  if (v == "other" || v == "english" || v == "foreign" || v == "gairaigo") return Origin::Other;
  throw InputError(fmt::format("unknown word origin '{}'", s));
}

Split parse_split(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "trial") return Split::Trial;
  if (v == "test") return Split::Test;
  throw InputError(fmt::format("unknown split '{}'", s));
}

std::vector<std::string> Instance::characters() const { return text::code_points(target); }

namespace {

bool on_grid(double v) {
  constexpr std::array<double, 5> kGrid{0.0, 0.25, 0.5, 0.75, 1.0};
  return std::any_of(kGrid.begin(), kGrid.end(), [v](double g) { return std::abs(v - g) < 1e-12; });
}

template <typename Ids>
void require_unique(const Ids& ids, std::string_view what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw InputError(fmt::format("duplicate {} '{}'", what, id));
  }
}

}  // namespace

RatingMatrix::RatingMatrix(std::vector<std::string> annotator_ids, std::vector<std::string> instance_ids,
                           std::vector<std::optional<double>> values, bool strict_grid)
    : annotator_ids_(std::move(annotator_ids)),
      instance_ids_(std::move(instance_ids)),
      values_(std::move(values)) {
  if (annotator_ids_.empty()) throw InputError("no annotators");
  if (values_.size() != annotator_ids_.size() * instance_ids_.size()) {
    throw InputError("rating grid size does not match annotator and instance counts");
  }
  require_unique(annotator_ids_, "annotator id");
  require_unique(instance_ids_, "instance id");
  for (std::size_t a = 0; a < annotator_ids_.size(); ++a) {
    for (std::size_t i = 0; i < instance_ids_.size(); ++i) {
      const auto& v = values_[a * instance_ids_.size() + i];
      if (!v) continue;
      if (!(*v >= 0.0 && *v <= 1.0)) {
        throw InputError(fmt::format("rating {} for instance '{}' by '{}' is outside [0,1]", *v,
                                     instance_ids_[i], annotator_ids_[a]));
      }
      if (strict_grid && !on_grid(*v)) {
        throw InputError(fmt::format("rating {} for instance '{}' by '{}' is not on the 5-level grid", *v,
                                     instance_ids_[i], annotator_ids_[a]));
      }
    }
  }
  for (std::size_t i = 0; i < instance_ids_.size(); ++i) {
    bool any = false;
    for (std::size_t a = 0; a < annotator_ids_.size() && !any; ++a) any = at(a, i).has_value();
    if (!any) throw InputError(fmt::format("instance '{}' has no ratings", instance_ids_[i]));
  }
}

std::size_t RatingMatrix::annotator_index(std::string_view id) const {
  const auto it = std::find(annotator_ids_.begin(), annotator_ids_.end(), id);
  if (it == annotator_ids_.end()) throw InputError(fmt::format("unknown annotator '{}'", id));
  return static_cast<std::size_t>(it - annotator_ids_.begin());
}

std::size_t RatingMatrix::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

RatingMatrix RatingMatrix::select_annotators(std::span<const std::string> ids) const {
  std::vector<std::optional<double>> values;
  values.reserve(ids.size() * instance_count());
  for (const auto& id : ids) {
    const auto r = row(annotator_index(id));
    values.insert(values.end(), r.begin(), r.end());
  }
  return {std::vector<std::string>(ids.begin(), ids.end()), instance_ids_, std::move(values)};
}

RatingMatrix RatingMatrix::select_instances(std::span<const std::string> ids) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < instance_ids_.size(); ++i) index.emplace(instance_ids_[i], i);
  std::vector<std::size_t> columns;
  columns.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) throw InputError(fmt::format("instance '{}' has no ratings row", id));
    columns.push_back(it->second);
  }
  std::vector<std::optional<double>> values;
  values.reserve(annotator_count() * ids.size());
  for (std::size_t a = 0; a < annotator_count(); ++a) {
    for (const auto c : columns) values.push_back(at(a, c));
  }
  return {annotator_ids_, std::vector<std::string>(ids.begin(), ids.end()), std::move(values)};
}

std::string Provenance::describe() const {
  switch (kind) {
    case Kind::GroupMean: return "group_mean";
    case Kind::GroupMajority: return "group_majority";
    case Kind::Individual: return "individual(" + annotator_id + ")";
  }
  return "?";
}

Dataset Dataset::split(Split which) const {
  Dataset out;
  std::vector<std::string> ids;
  for (const auto& inst : instances) {
    if (inst.split != which) continue;
    out.instances.push_back(inst);
    ids.push_back(inst.id);
  }
  if (ids.empty()) throw InputError(fmt::format("dataset has no {} instances", to_string(which)));
  out.ratings = ratings.select_instances(ids);
  return out;
}

// --- file formats ----------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 7> kInstanceColumns{"id",     "target", "tokens", "lemmas",
                                                           "origin", "pos",    "split"};

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& w : text::split(text::trim(s), ' ')) {
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return fmt::format("{}:{}", path.string(), line);
}

}  // namespace

std::vector<Instance> load_instances(const std::filesystem::path& path) {
  const auto rows = text::read_tsv(path);
  if (rows.empty()) throw InputError(fmt::format("{}: missing header row", path.string()));
  const auto& header = rows.front().fields;
  std::array<std::size_t, kInstanceColumns.size()> col{};
  for (std::size_t k = 0; k < kInstanceColumns.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), kInstanceColumns[k]);
    if (it == header.end()) {
      throw InputError(fmt::format("{}: header lacks column '{}'", where(path, rows.front().line),
                                   kInstanceColumns[k]));
    }
    col[k] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<Instance> out;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const auto loc = where(path, rows[r].line);
    if (f.size() != header.size()) {
      throw InputError(fmt::format("{}: expected {} columns, found {}", loc, header.size(), f.size()));
    }
    Instance inst;
    inst.id = std::string(text::trim(f[col[0]]));
    inst.target = std::string(text::trim(f[col[1]]));
    inst.tokens = split_words(f[col[2]]);
    inst.lemmas = split_words(f[col[3]]);
    try {
      inst.origin = parse_origin(f[col[4]]);
      inst.split = parse_split(f[col[6]]);
      text::code_points(inst.target);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}: {}", loc, e.what()));
    }
    inst.pos = std::string(text::trim(f[col[5]]));
    if (inst.id.empty()) throw InputError(fmt::format("{}: empty id", loc));
    if (inst.target.empty()) throw InputError(fmt::format("{}: empty target", loc));
    if (inst.tokens.empty()) throw InputError(fmt::format("{}: no tokens", loc));
    if (inst.lemmas.size() != inst.tokens.size()) {
      throw InputError(fmt::format("{}: {} lemmas for {} tokens", loc, inst.lemmas.size(), inst.tokens.size()));
    }
    if (!seen.insert(inst.id).second) throw InputError(fmt::format("{}: duplicate id '{}'", loc, inst.id));
    out.push_back(std::move(inst));
  }
  if (out.empty()) throw InputError(fmt::format("{}: no instances", path.string()));
  return out;
}

RatingMatrix load_ratings(const std::filesystem::path& path, bool strict_grid) {
  const auto rows = text::read_tsv(path);
  if (rows.empty() || rows.front().fields.size() < 2) {
    throw InputError(fmt::format("{}: no annotators", path.string()));
  }
  const auto& header = rows.front().fields;
  if (text::trim(header[0]) != "id") {
    throw InputError(fmt::format("{}: first header column must be 'id'", where(path, rows.front().line)));
  }
  std::vector<std::string> annotators;
  for (std::size_t c = 1; c < header.size(); ++c) annotators.emplace_back(text::trim(header[c]));
  require_unique(annotators, "annotator id");

  const std::size_t n_inst = rows.size() - 1;
  std::vector<std::string> instance_ids;
  std::vector<std::optional<double>> values(annotators.size() * n_inst);
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const auto loc = where(path, rows[r].line);
    if (f.size() != header.size()) {
      throw InputError(fmt::format("{}: expected {} columns, found {}", loc, header.size(), f.size()));
    }
    std::string id(text::trim(f[0]));
    if (!seen.insert(id).second) throw InputError(fmt::format("{}: duplicate id '{}'", loc, id));
    const std::size_t i = r - 1;
    bool any = false;
    for (std::size_t a = 0; a < annotators.size(); ++a) {
      const auto cell = text::trim(f[a + 1]);
      if (cell.empty()) continue;
      const double v = text::parse_double(cell, fmt::format("{} column '{}'", loc, annotators[a]));
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError(fmt::format("{} column '{}': rating {} is outside [0,1]", loc, annotators[a], cell));
      }
      if (strict_grid && !on_grid(v)) {
        throw InputError(fmt::format("{} column '{}': rating {} is not on the 5-level grid", loc, annotators[a], cell));
      }
      values[a * n_inst + i] = v;
      any = true;
    }
    if (!any) throw InputError(fmt::format("{}: instance '{}' has no ratings", loc, id));
    instance_ids.push_back(std::move(id));
  }
  if (instance_ids.empty()) throw InputError(fmt::format("{}: no rating rows", path.string()));
  return {std::move(annotators), std::move(instance_ids), std::move(values), strict_grid};
}

std::vector<AnnotatorProfile> load_profiles(const std::filesystem::path& path) {
  static constexpr std::array<std::string_view, 7> kColumns{
      "annotator_id", "native_languages", "jlpt_level",     "years_in_japan",
      "reading_hours_per_week", "age_years", "education_years"};
  const auto rows = text::read_tsv(path);
  if (rows.empty()) throw InputError(fmt::format("{}: missing header row", path.string()));
  const auto& header = rows.front().fields;
  std::array<std::size_t, kColumns.size()> col{};
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), kColumns[k]);
    if (it == header.end()) throw InputError(fmt::format("{}: header lacks column '{}'", path.string(), kColumns[k]));
    col[k] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<AnnotatorProfile> out;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const auto loc = where(path, rows[r].line);
    if (f.size() != header.size()) {
      throw InputError(fmt::format("{}: expected {} columns, found {}", loc, header.size(), f.size()));
    }
    AnnotatorProfile p;
    p.annotator_id = std::string(text::trim(f[col[0]]));
    for (auto& lang : text::split(f[col[1]], ';')) {
      const auto t = text::trim(lang);
      if (!t.empty()) p.native_languages.emplace_back(t);
    }
    p.jlpt_level = std::string(text::trim(f[col[2]]));
    const auto nonneg = [&](std::size_t k) {
      const double v = text::parse_double(f[col[k]], fmt::format("{} column '{}'", loc, kColumns[k]));
      if (v < 0) throw InputError(fmt::format("{} column '{}': negative value", loc, kColumns[k]));
      return v;
    };
    p.years_in_japan = nonneg(3);
    p.reading_hours_per_week = nonneg(4);
    p.age_years = nonneg(5);
    p.education_years = nonneg(6);
    if (!seen.insert(p.annotator_id).second) {
      throw InputError(fmt::format("{}: duplicate annotator id '{}'", loc, p.annotator_id));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& instances_path, const std::filesystem::path& ratings_path,
                     bool strict_grid) {
  Dataset ds;
  ds.instances = load_instances(instances_path);
  const auto ratings = load_ratings(ratings_path, strict_grid);
  std::vector<std::string> ids;
  ids.reserve(ds.instances.size());
  for (const auto& inst : ds.instances) ids.push_back(inst.id);
  if (ratings.instance_count() != ids.size()) {
    const std::set<std::string> known(ids.begin(), ids.end());
    for (const auto& id : ratings.instance_ids()) {
      if (!known.contains(id)) {
        throw InputError(fmt::format("{}: instance '{}' is not in {}", ratings_path.string(), id,
                                     instances_path.string()));
      }
    }
  }
  ds.ratings = ratings.select_instances(ids);
  return ds;
}

void save_instances(const std::vector<Instance>& instances, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << text::join({kInstanceColumns.begin(), kInstanceColumns.end()}, "\t") << '\n';
  for (const auto& inst : instances) {
    out << inst.id << '\t' << inst.target << '\t' << text::join(inst.tokens, " ") << '\t'
        << text::join(inst.lemmas, " ") << '\t' << to_string(inst.origin) << '\t' << inst.pos << '\t'
        << to_string(inst.split) << '\n';
  }
}

void save_ratings(const RatingMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << "id";
  for (const auto& a : matrix.annotator_ids()) out << '\t' << a;
  out << '\n';
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    out << matrix.instance_ids()[i];
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      out << '\t';
      if (const auto v = matrix.at(a, i)) out << text::format_double(*v);
    }
    out << '\n';
  }
}

// --- views ------------------------------------------------------------------

ComplexityView group_mean(const RatingMatrix& matrix) {
  if (matrix.annotator_count() == 0 || matrix.instance_count() == 0) throw InputError("empty rating matrix");
  ComplexityView view{matrix.instance_ids(), {}, {Provenance::Kind::GroupMean, {}}};
  view.targets.reserve(matrix.instance_count());
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      if (const auto v = matrix.at(a, i)) {
        sum += *v;
        ++n;
      }
    }
    view.targets.push_back(sum / static_cast<double>(n));
  }
  return view;
}

bool cwi_label(double value, double threshold) { return value >= threshold; }

LabelView group_majority(const RatingMatrix& matrix, double threshold) {
  if (matrix.annotator_count() == 0 || matrix.instance_count() == 0) throw InputError("empty rating matrix");
  LabelView view{matrix.instance_ids(), {}, {Provenance::Kind::GroupMajority, {}}};
  view.targets.reserve(matrix.instance_count());
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    std::size_t complex = 0;
    std::size_t n = 0;
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      if (const auto v = matrix.at(a, i)) {
        complex += cwi_label(*v, threshold) ? 1 : 0;
        ++n;
      }
    }
    view.targets.push_back(2 * complex >= n);
  }
  return view;
}

ComplexityView individual_ratings(const RatingMatrix& matrix, std::string_view annotator_id) {
  const auto a = matrix.annotator_index(annotator_id);
  ComplexityView view{{}, {}, {Provenance::Kind::Individual, std::string(annotator_id)}};
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    if (const auto v = matrix.at(a, i)) {
      view.instance_ids.push_back(matrix.instance_ids()[i]);
      view.targets.push_back(*v);
    }
  }
  return view;
}

LabelView threshold_view(const ComplexityView& view, double threshold) {
  LabelView out{view.instance_ids, {}, view.provenance};
  out.targets.reserve(view.targets.size());
  for (const double v : view.targets) out.targets.push_back(cwi_label(v, threshold));
  return out;
}

LabelView individual_labels(const RatingMatrix& matrix, std::string_view annotator_id, double threshold) {
  return threshold_view(individual_ratings(matrix, annotator_id), threshold);
}

RatingMatrix union_matrices(std::span<const NamedMatrix> groups) {
  if (groups.empty()) throw InputError("union of zero matrices");
  const auto& ids = groups.front().matrix.instance_ids();
  std::unordered_map<std::string, int> occurrences;
  for (const auto& g : groups) {
    if (g.matrix.instance_ids() != ids) {
      throw InputError(fmt::format("group '{}' does not share the instance list of group '{}'", g.name,
                                   groups.front().name));
    }
    for (const auto& a : g.matrix.annotator_ids()) ++occurrences[a];
  }
  const bool prefix = std::any_of(occurrences.begin(), occurrences.end(), [](const auto& kv) { return kv.second > 1; });

  std::vector<std::string> annotators;
  std::vector<std::optional<double>> values;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.matrix.annotator_count(); ++a) {
      const auto& id = g.matrix.annotator_ids()[a];
      annotators.push_back(prefix ? g.name + ":" + id : id);
      const auto r = g.matrix.row(a);
      values.insert(values.end(), r.begin(), r.end());
    }
  }
  return {std::move(annotators), ids, std::move(values)};
}

// --- composition ------------------------------------------------------------

std::vector<CompositionRow> describe(const std::vector<Instance>& instances) {
  if (instances.empty()) throw InputError("describe: no instances");
  std::map<Split, std::size_t> totals;
  for (const auto& inst : instances) ++totals[inst.split];

  std::vector<CompositionRow> rows;
  const auto add_row = [&](std::string section, std::string category, auto&& predicate) {
    CompositionRow row{std::move(section), std::move(category), {}, {}};
    std::size_t all = 0;
    for (const auto& [split, total] : totals) {
      std::size_t n = 0;
      for (const auto& inst : instances) n += (inst.split == split && predicate(inst)) ? 1 : 0;
      row.count[split] = n;
      row.percent[split] = 100.0 * static_cast<double>(n) / static_cast<double>(total);
      all += n;
    }
    if (all > 0) rows.push_back(std::move(row));
  };

  for (const auto origin : {Origin::Japanese, Origin::Chinese, Origin::Mixed, Origin::Other}) {
    add_row("origin", std::string(to_string(origin)), [origin](const Instance& i) { return i.origin == origin; });
  }
  add_row("contains_origin", "Chinese",
          [](const Instance& i) { return i.origin == Origin::Chinese || i.origin == Origin::Mixed; });
  add_row("contains_origin", "Other", [](const Instance& i) { return i.origin == Origin::Other; });

  std::map<std::string, std::size_t> pos_counts;
  for (const auto& inst : instances) ++pos_counts[inst.pos];
  std::vector<std::pair<std::string, std::size_t>> pos_sorted(pos_counts.begin(), pos_counts.end());
  std::stable_sort(pos_sorted.begin(), pos_sorted.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  for (const auto& [pos, _] : pos_sorted) {
    add_row("pos", pos, [&pos](const Instance& i) { return i.pos == pos; });
  }
  return rows;
}

}  // namespace lexcomp
