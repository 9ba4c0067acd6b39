#include "lexcomp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lexcomp/dataset.hpp"
#include "lexcomp/error.hpp"
#include "lexcomp/eval.hpp"
#include "lexcomp/stats.hpp"
#include "lexcomp/text.hpp"

namespace lexcomp::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::string format = "tsv";
  std::string out_path;
  std::uint64_t seed = 0;
  bool strict_grid = false;
};

/// A command's result in both output formats.
struct Output {
  std::string tsv;
  json data;
};

std::pair<std::string, std::string> split_assignment(const std::string& spec, const char* what) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw UsageError(fmt::format("{} '{}' must look like NAME=VALUE", what, spec));
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

std::string fixed(double v, int decimals = 4) { return text::format_fixed(v, decimals); }

std::string signed_fixed(double v, int decimals) {
  auto s = text::format_fixed(v, decimals);
  if (s.find_first_not_of("0.") != std::string::npos && !s.starts_with('-')) s.insert(0, "+");
  return s;
}

std::vector<std::string> ids_of(const std::vector<Instance>& instances) {
  std::vector<std::string> ids;
  ids.reserve(instances.size());
  for (const auto& i : instances) ids.push_back(i.id);
  return ids;
}

std::vector<Instance> filter_split(std::vector<Instance> instances, const std::string& split) {
  if (split.empty() || split == "all") return instances;
  const auto which = parse_split(split);
  std::erase_if(instances, [which](const Instance& i) { return i.split != which; });
  if (instances.empty()) throw InputError(fmt::format("no {} instances", split));
  return instances;
}

/// Loads a ratings matrix and aligns it to `ids`; the file must rate exactly
/// those instances.
RatingMatrix load_aligned(const std::string& path, const std::vector<std::string>& ids, bool strict, bool exact) {
  const auto m = load_ratings(path, strict);
  if (exact) {
    const std::set<std::string> want(ids.begin(), ids.end());
    const std::set<std::string> have(m.instance_ids().begin(), m.instance_ids().end());
    if (want != have) throw InputError(fmt::format("{}: instance set does not match", path));
  }
  return m.select_instances(ids);
}

std::vector<double> resource_values(const FeatureSource& source, const std::vector<Instance>& instances) {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(feature_value(source, inst));
  return out;
}

}  // namespace

FeatureSource load_resource(const std::string& spec) {
  const auto [name, rest] = split_assignment(spec, "resource");
  const auto colon = rest.find(':');
  if (colon == std::string::npos) throw UsageError(fmt::format("resource '{}' must look like NAME=KIND:PATH", spec));
  const auto kind = rest.substr(0, colon);
  const std::filesystem::path path = rest.substr(colon + 1);
  if (!std::filesystem::exists(path)) throw UsageError(fmt::format("resource file '{}' does not exist", path.string()));
  FeatureSource source{name, {}};
  if (kind == "freq") {
    source.resource = std::make_shared<const FrequencyTable>(FrequencyTable::load(path));
  } else if (kind == "freq-lemma") {
    source.resource = std::make_shared<const FrequencyTable>(FrequencyTable::load(path, LookupUnit::Lemma));
  } else if (kind == "freq-char") {
    source.resource = std::make_shared<const FrequencyTable>(FrequencyTable::load(path, LookupUnit::Character));
  } else if (kind == "level") {
    source.resource = std::make_shared<const LevelTable>(LevelTable::load(path));
  } else if (kind == "familiarity") {
    source.resource = std::make_shared<const FamiliarityTable>(FamiliarityTable::load(path));
  } else if (kind == "external") {
    source.resource = std::make_shared<const ExternalFeature>(ExternalFeature::load(path, name));
  } else {
    throw UsageError(fmt::format("unknown resource kind '{}' in '{}'", kind, spec));
  }
  return source;
}

namespace {

// --- freq -------------------------------------------------------------------------

struct FreqArgs {
  std::string corpus;
  std::string unit;
  std::vector<std::string> words;
};

FrequencyTable load_corpus(const FreqArgs& a) {
  std::optional<LookupUnit> unit;
  if (!a.unit.empty()) unit = parse_lookup_unit(a.unit);
  return FrequencyTable::load(a.corpus, unit);
}

Output freq_build(const FreqArgs& a) {
  const auto t = load_corpus(a);
  Output o;
  o.tsv = fmt::format("entries\t{}\ntokens\t{}\ntypes\t{}\nunit\t{}\n", t.size(), t.token_total(), t.type_total(),
                      to_string(t.unit()));
  o.data = {{"entries", t.size()}, {"tokens", t.token_total()}, {"types", t.type_total()}, {"unit", to_string(t.unit())}};
  return o;
}

Output freq_lookup(const FreqArgs& a) {
  const auto t = load_corpus(a);
  Output o;
  o.tsv = "word\tcount\tlog10_freq\n";
  o.data = json::array();
  for (const auto& w : a.words) {
    const double f = smoothed_log_freq(t, w);
    o.tsv += fmt::format("{}\t{}\t{}\n", w, t.count(w), text::format_double(f));
    o.data.push_back({{"word", w}, {"count", t.count(w)}, {"log10_freq", f}});
  }
  return o;
}

// --- describe ---------------------------------------------------------------------

struct DescribeArgs {
  std::string instances;
};

Output describe_cmd(const DescribeArgs& a) {
  const auto rows = describe(load_instances(a.instances));
  std::set<Split> splits;
  for (const auto& r : rows) {
    for (const auto& [s, _] : r.percent) splits.insert(s);
  }
  Output o;
  o.tsv = "section\tcategory";
  for (const auto s : splits) o.tsv += fmt::format("\t{}", to_string(s));
  o.tsv += "\n";
  o.data = json::array();
  for (const auto& r : rows) {
    o.tsv += r.section + "\t" + r.category;
    json j{{"section", r.section}, {"category", r.category}};
    for (const auto s : splits) {
      o.tsv += "\t" + text::format_fixed(r.percent.at(s), 1) + "%";
      j["percent"][std::string(to_string(s))] = r.percent.at(s);
      j["count"][std::string(to_string(s))] = r.count.at(s);
    }
    o.tsv += "\n";
    o.data.push_back(std::move(j));
  }
  return o;
}

// --- agreement ---------------------------------------------------------------------

struct AgreementArgs {
  std::vector<std::string> groups;
  std::vector<std::string> unions;
  bool all_unions = false;
  std::string instances;
  std::string split;
};

Output agreement_cmd(const AgreementArgs& a, const Globals& g) {
  std::vector<NamedMatrix> groups;
  std::vector<std::string> ids;
  if (!a.instances.empty()) ids = ids_of(filter_split(load_instances(a.instances), a.split));
  for (const auto& spec : a.groups) {
    const auto [name, path] = split_assignment(spec, "group");
    if (std::any_of(groups.begin(), groups.end(), [&](const auto& x) { return x.name == name; })) {
      throw UsageError(fmt::format("group '{}' given twice", name));
    }
    auto m = load_ratings(path, g.strict_grid);
    if (ids.empty()) ids = m.instance_ids();
    if (a.instances.empty()) {
      const std::set<std::string> want(ids.begin(), ids.end());
      const std::set<std::string> have(m.instance_ids().begin(), m.instance_ids().end());
      if (want != have) throw InputError(fmt::format("group '{}' rates a different set of instances", name));
    }
    groups.push_back({name, m.select_instances(ids)});
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& grp : groups) rows.push_back({grp.name});
  if (a.all_unions) {
    const auto k = groups.size();
    std::vector<std::vector<std::string>> combos;
    for (std::uint64_t mask = 1; mask < (1ULL << k); ++mask) {
      if (std::popcount(mask) < 2) continue;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask & (1ULL << i)) names.push_back(groups[i].name);
      }
      combos.push_back(std::move(names));
    }
    std::stable_sort(combos.begin(), combos.end(), [](const auto& x, const auto& y) { return x.size() < y.size(); });
    rows.insert(rows.end(), combos.begin(), combos.end());
  }
  for (const auto& u : a.unions) {
    auto names = text::split(u, '+');
    if (names.size() < 2) throw UsageError(fmt::format("union '{}' must name at least two groups", u));
    rows.push_back(std::move(names));
  }

  Output o;
  o.tsv = "groups\tannotators\talpha\tmean_pcc\n";
  o.data = json::array();
  for (const auto& names : rows) {
    std::vector<NamedMatrix> members;
    for (const auto& n : names) {
      const auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& x) { return x.name == n; });
      if (it == groups.end()) throw UsageError(fmt::format("unknown group '{}'", n));
      members.push_back(*it);
    }
    const auto m = members.size() == 1 ? members.front().matrix : union_matrices(members);
    const double alpha = stats::krippendorff_alpha_interval(m);
    const double pcc = stats::mean_pairwise_pcc(m);
    const auto label = text::join(names, "+");
    o.tsv += fmt::format("{}\t{}\t{}\t{}\n", label, m.annotator_count(), fixed(alpha), fixed(pcc));
    o.data.push_back({{"groups", names}, {"annotators", m.annotator_count()}, {"alpha", alpha}, {"mean_pcc", pcc}});
  }
  return o;
}

// --- correlate ---------------------------------------------------------------------

struct CorrelateArgs {
  std::string instances;
  std::string ratings;
  std::string split = "test";
  std::vector<std::string> resources;
  std::vector<std::string> steiger;
};

Output correlate_cmd(const CorrelateArgs& a, const Globals& g) {
  const auto instances = filter_split(load_instances(a.instances), a.split);
  const auto ratings = load_aligned(a.ratings, ids_of(instances), g.strict_grid, false);
  const auto complexity = group_mean(ratings);
  std::vector<FeatureSource> sources;
  for (const auto& r : a.resources) sources.push_back(load_resource(r));
  if (sources.empty()) throw UsageError("correlate needs at least one --resource");
  const auto rows = stats::correlation_table(instances, complexity, sources);

  Output o;
  o.tsv = "resource\tpcc\tpotential_pcc\tcovered\ttotal\n";
  o.data = {{"rows", json::array()}};
  for (const auto& r : rows) {
    o.tsv += fmt::format("{}\t{}\t{}\t{}\t{}\n", r.name, fixed(r.pcc), fixed(r.potential_pcc), r.covered, r.total);
    o.data["rows"].push_back(
        {{"resource", r.name}, {"pcc", r.pcc}, {"potential_pcc", r.potential_pcc}, {"covered", r.covered}, {"total", r.total}});
  }

  if (!a.steiger.empty()) {
    const auto y = stats::align(complexity, instances);
    o.tsv += "\n# steiger\tresource_j\tresource_k\tr_j\tr_k\tr_jk\tn\tz\tp\n";
    o.data["steiger"] = json::array();
    for (const auto& pair : a.steiger) {
      const auto names = text::split(pair, ',');
      if (names.size() != 2) throw UsageError(fmt::format("--steiger '{}' must name two resources", pair));
      const auto find = [&](const std::string& n) -> const FeatureSource& {
        const auto it = std::find_if(sources.begin(), sources.end(), [&](const auto& s) { return s.name == n; });
        if (it == sources.end()) throw UsageError(fmt::format("--steiger names unknown resource '{}'", n));
        return *it;
      };
      const auto x1 = resource_values(find(names[0]), instances);
      const auto x2 = resource_values(find(names[1]), instances);
      const double r1 = stats::pearson(y, x1);
      const double r2 = stats::pearson(y, x2);
      const double r12 = stats::pearson(x1, x2);
      const auto res = stats::steiger_test(r1, r2, r12, static_cast<int>(instances.size()));
      o.tsv += fmt::format("steiger\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", names[0], names[1], fixed(r1), fixed(r2),
                           fixed(r12), res.n, fixed(res.z_statistic), text::format_pvalue(res.p_value));
      o.data["steiger"].push_back({{"resource_j", names[0]}, {"resource_k", names[1]}, {"r_j", r1}, {"r_k", r2},
                                   {"r_jk", r12}, {"n", res.n}, {"z", res.z_statistic}, {"p_value", res.p_value}});
    }
  }
  return o;
}

// --- origin-gap ----------------------------------------------------------------------

struct OriginGapArgs {
  std::string instances;
  std::string split = "trial";
  std::string base;
  std::vector<std::string> others;
  std::string freq_resource;
  std::string origins = "Japanese,Chinese";
  std::uint64_t exact_limit = 10'000'000;
  std::uint64_t mc_samples = 1'000'000;
};

Output origin_gap_cmd(const OriginGapArgs& a, const Globals& g) {
  const auto instances = filter_split(load_instances(a.instances), a.split);
  const auto ids = ids_of(instances);
  const auto [base_name, base_path] = split_assignment(a.base, "--base");
  const auto base = group_mean(load_aligned(base_path, ids, g.strict_grid, false));
  std::vector<stats::NamedView> others;
  for (const auto& spec : a.others) {
    const auto [name, path] = split_assignment(spec, "--other");
    others.push_back({name, group_mean(load_aligned(path, ids, g.strict_grid, false))});
  }
  std::vector<double> freq;
  if (!a.freq_resource.empty()) freq = resource_values(load_resource(a.freq_resource), instances);
  const auto origin_names = text::split(a.origins, ',');
  if (origin_names.size() != 2) throw UsageError("--origins must name two origins");
  const stats::PermutationOptions opts{a.exact_limit, a.mc_samples, g.seed};
  const auto table = stats::origin_gap_analysis(instances, freq, base, others,
                                                {parse_origin(origin_names[0]), parse_origin(origin_names[1])}, opts);

  Output o;
  o.tsv = "origin\twords";
  for (const auto& c : table.columns) o.tsv += "\t" + (c == "base" ? base_name : c);
  o.tsv += "\n";
  json groups = json::array();
  for (const auto* grp : {&table.groups.first, &table.groups.second}) {
    o.tsv += fmt::format("{}\t{}", to_string(grp->origin), grp->words);
    json cols = json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& s = grp->columns[c];
      const bool diff = table.columns[c].starts_with("diff:");
      o.tsv += fmt::format("\t{} ({})", diff ? signed_fixed(s.mean, 3) : fixed(s.mean, 3), fixed(s.std, 3));
      cols[table.columns[c]] = {{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
    }
    o.tsv += "\n";
    groups.push_back({{"origin", to_string(grp->origin)}, {"words", grp->words}, {"columns", cols}});
  }
  o.tsv += "p-value\t";
  json pvals = json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& p = table.p_values[c];
    o.tsv += "\t" + text::format_pvalue(p.p_value);
    pvals[table.columns[c]] = {{"p_value", p.p_value},
                               {"observed_diff", p.observed_diff},
                               {"mode", p.mode == stats::PermutationResult::Mode::Exact ? "exact" : "monte_carlo"},
                               {"relabelings", p.relabelings}};
  }
  o.tsv += "\n";
  o.data = {{"base", base_name}, {"columns", table.columns}, {"groups", groups}, {"p_values", pvals}};
  return o;
}

// --- experiment ------------------------------------------------------------------------

struct ExperimentArgs {
  std::string instances;
  std::string ratings;
  std::string task = "all";
  std::vector<std::string> features;
  std::vector<std::string> resources;
  double threshold = kDefaultCwiThreshold;
  double ridge_l2 = 1.0;
  double logistic_l2 = 1.0;
  bool no_class_weights = false;
  std::string group_labels = "majority";
};

Output experiment_cmd(const ExperimentArgs& a, const Globals& g) {
  const auto ds = load_dataset(a.instances, a.ratings, g.strict_grid);
  const auto trial = ds.split(Split::Trial);
  const auto test = ds.split(Split::Test);

  std::map<std::string, FeatureSource> loaded;
  for (const auto& spec : a.resources) {
    auto s = load_resource(spec);
    const auto name = s.name;
    if (!loaded.emplace(name, std::move(s)).second) throw UsageError(fmt::format("resource '{}' given twice", name));
  }
  eval::ExperimentConfig config;
  const auto feature_names = a.features.empty() ? std::vector<std::string>{} : a.features;
  if (feature_names.empty()) throw UsageError("experiment needs --features");
  for (const auto& f : feature_names) {
    const auto it = loaded.find(f);
    if (it == loaded.end()) throw UsageError(fmt::format("feature '{}' has no --resource", f));
    config.features.push_back(it->second);
  }
  config.threshold = a.threshold;
  config.ridge_l2 = a.ridge_l2;
  config.logistic.l2_strength = a.logistic_l2;
  config.logistic.weighting = a.no_class_weights ? models::ClassWeighting::None : models::ClassWeighting::Balanced;
  config.group_labels = eval::parse_group_labels(a.group_labels);

  std::vector<eval::Task> tasks;
  if (a.task == "all") tasks = {eval::Task::LCP, eval::Task::LCP_CWI, eval::Task::CWI};
  else tasks = {eval::parse_task(a.task)};

  std::vector<eval::ExperimentReport> reports;
  for (const auto t : tasks) {
    config.task = t;
    auto r = eval::run_all_settings(config, trial, test);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  Output o;
  o.data = {{"reports", json::array()}};
  for (const auto& r : reports) o.data["reports"].push_back(eval::to_json(r));
  const auto tables = eval::report_tables(reports);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) o.tsv += "\n";
    o.tsv += eval::render_tsv(tables[i]);
  }
  for (const auto& r : reports) {
    for (const auto& e : r.excluded) {
      o.tsv += fmt::format("# excluded {} {}-{}: {}\n", eval::to_string(r.task), eval::to_string(r.train_source),
                           eval::to_string(r.test_source), e);
    }
  }
  return o;
}

// --- report ---------------------------------------------------------------------------

struct ReportArgs {
  std::string instances;
  std::string split = "trial";
  std::vector<std::string> groups;
  std::vector<std::string> diff;
  std::string freq_resource;
  std::string plot_dir;
  int bins = 10;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << content;
}

Output report_cmd(const ReportArgs& a, const Globals& g) {
  if (a.diff.empty() && a.plot_dir.empty()) throw UsageError("report needs --diff or --plot-dir");
  const auto all = load_instances(a.instances);
  const auto instances = filter_split(all, a.split);
  std::map<std::string, std::string> group_paths;
  std::vector<std::string> group_order;
  for (const auto& spec : a.groups) {
    const auto [name, path] = split_assignment(spec, "group");
    if (!group_paths.emplace(name, path).second) throw UsageError(fmt::format("group '{}' given twice", name));
    group_order.push_back(name);
  }
  std::vector<double> freq;
  if (!a.freq_resource.empty()) freq = resource_values(load_resource(a.freq_resource), instances);
  const auto view_of = [&](const std::string& name) {
    const auto it = group_paths.find(name);
    if (it == group_paths.end()) throw UsageError(fmt::format("unknown group '{}'", name));
    return group_mean(load_aligned(it->second, ids_of(instances), g.strict_grid, false));
  };

  Output o;
  o.data = json::object();
  if (!a.diff.empty()) {
    const auto rows = eval::difference_table(instances, freq, view_of(a.diff[0]), view_of(a.diff[1]));
    o.tsv = fmt::format("target\torigin\tlog10_freq\t{}\t{}\tdifference\n", a.diff[0], a.diff[1]);
    json arr = json::array();
    for (const auto& r : rows) {
      o.tsv += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", r.target, to_string(r.origin),
                           r.log_freq ? fixed(*r.log_freq, 3) : std::string("NA"), fixed(r.base, 3), fixed(r.other, 3),
                           signed_fixed(r.difference, 3));
      json j{{"id", r.id}, {"target", r.target}, {"origin", to_string(r.origin)}, {a.diff[0], r.base},
             {a.diff[1], r.other}, {"difference", r.difference}};
      j["log10_freq"] = r.log_freq ? json(*r.log_freq) : json(nullptr);
      arr.push_back(std::move(j));
    }
    o.data["diff"] = std::move(arr);
  }

  if (!a.plot_dir.empty()) {
    std::vector<stats::NamedView> views;
    for (const auto& name : group_order) views.push_back({name, view_of(name)});
    // Histograms cover every split the selected instances contain.
    const auto pd = eval::plot_data(instances, freq, views, a.bins);
    std::filesystem::create_directories(a.plot_dir);
    const std::filesystem::path dir(a.plot_dir);
    std::string hist = "view\tsplit\tlower\tupper\tcount\n";
    for (const auto& h : pd.histogram) {
      hist += fmt::format("{}\t{}\t{}\t{}\t{}\n", h.view, to_string(h.split), text::format_double(h.lower),
                          text::format_double(h.upper), h.count);
    }
    write_file(dir / "histogram.tsv", hist);
    if (!freq.empty()) {
      std::string scatter = "view\tid\ttarget\torigin\tlog10_freq\tcomplexity\n";
      for (const auto& s : pd.scatter) {
        scatter += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", s.view, s.id, s.target, to_string(s.origin),
                               text::format_double(s.log_freq), text::format_double(s.complexity));
      }
      write_file(dir / "scatter.tsv", scatter);
      std::string fits = "view\tslope\tintercept\tn\n";
      for (const auto& f : pd.fits) {
        fits += fmt::format("{}\t{}\t{}\t{}\n", f.view, text::format_double(f.slope), text::format_double(f.intercept), f.n);
      }
      write_file(dir / "fits.tsv", fits);
      std::string bands = "view\tx\tfit\tlower\tupper\n";
      for (const auto& b : pd.bands) {
        bands += fmt::format("{}\t{}\t{}\t{}\t{}\n", b.view, text::format_double(b.x), text::format_double(b.fit),
                             text::format_double(b.lower), text::format_double(b.upper));
      }
      write_file(dir / "bands.tsv", bands);
    }
    o.data["plot_dir"] = a.plot_dir;
    if (a.diff.empty()) o.tsv = fmt::format("plot data written to {}\n", a.plot_dir);
  }
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexical complexity analysis toolkit", "lexcomp"};
  app.set_config("--config", "", "Read options from a TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("--out", g.out_path, "Write results to this file instead of standard output");
  app.add_option("--seed", g.seed, "Seed for Monte-Carlo permutation tests");
  app.add_flag("--strict-grid", g.strict_grid, "Require ratings on the 0/0.25/0.5/0.75/1 grid");

  std::function<Output()> action;

  // freq
  FreqArgs freq;
  auto* freq_cmd = app.add_subcommand("freq", "Corpus frequency tables");
  freq_cmd->require_subcommand(1);
  auto* freq_build_cmd = freq_cmd->add_subcommand("build", "Print table statistics");
  auto* freq_lookup_cmd = freq_cmd->add_subcommand("lookup", "Print smoothed log10 frequencies");
  for (auto* c : {freq_build_cmd, freq_lookup_cmd}) {
    c->add_option("--corpus", freq.corpus, "word<TAB>count file")->required()->check(CLI::ExistingFile);
    c->add_option("--unit", freq.unit, "word_surface, lemma or character (default: file directive)");
  }
  freq_lookup_cmd->add_option("words", freq.words, "Words to look up")->required();
  freq_build_cmd->callback([&] { action = [&] { return freq_build(freq); }; });
  freq_lookup_cmd->callback([&] { action = [&] { return freq_lookup(freq); }; });

  // describe
  DescribeArgs desc;
  auto* describe_sub = app.add_subcommand("describe", "Origin and part-of-speech composition per split");
  describe_sub->add_option("--instances", desc.instances)->required()->check(CLI::ExistingFile);
  describe_sub->callback([&] { action = [&] { return describe_cmd(desc); }; });

  // agreement
  AgreementArgs agr;
  auto* agreement_sub = app.add_subcommand("agreement", "Krippendorff alpha and mean pairwise PCC per group and union");
  agreement_sub->add_option("--group", agr.groups, "NAME=RATINGS_PATH (repeatable)")->required();
  agreement_sub->add_option("--union", agr.unions, "NAME+NAME[+...] (repeatable)");
  agreement_sub->add_flag("--all-unions", agr.all_unions, "Add every union of two or more groups");
  agreement_sub->add_option("--instances", agr.instances, "Instances file used to order and filter instances")
      ->check(CLI::ExistingFile);
  agreement_sub->add_option("--split", agr.split, "trial, test or all (with --instances)");
  agreement_sub->callback([&] { action = [&] { return agreement_cmd(agr, g); }; });

  // correlate
  CorrelateArgs cor;
  auto* correlate_sub = app.add_subcommand("correlate", "PCC and potential PCC of resources with complexity");
  correlate_sub->add_option("--instances", cor.instances)->required()->check(CLI::ExistingFile);
  correlate_sub->add_option("--ratings", cor.ratings)->required()->check(CLI::ExistingFile);
  correlate_sub->add_option("--split", cor.split, "trial, test or all")->capture_default_str();
  correlate_sub->add_option("--resource", cor.resources, "NAME=KIND:PATH (repeatable)")->required();
  correlate_sub->add_option("--steiger", cor.steiger, "NAME,NAME: compare two resources' correlations (repeatable)");
  correlate_sub->callback([&] { action = [&] { return correlate_cmd(cor, g); }; });

  // origin-gap
  OriginGapArgs gap;
  auto* gap_sub = app.add_subcommand("origin-gap", "Complexity differences by word origin with permutation tests");
  gap_sub->add_option("--instances", gap.instances)->required()->check(CLI::ExistingFile);
  gap_sub->add_option("--split", gap.split, "trial, test or all")->capture_default_str();
  gap_sub->add_option("--base", gap.base, "NAME=RATINGS_PATH of the reference group")->required();
  gap_sub->add_option("--other", gap.others, "NAME=RATINGS_PATH compared to the base (repeatable)");
  gap_sub->add_option("--freq-resource", gap.freq_resource, "NAME=KIND:PATH for the log-frequency column");
  gap_sub->add_option("--origins", gap.origins, "Two origins to compare")->capture_default_str();
  gap_sub->add_option("--exact-limit", gap.exact_limit, "Largest partition count enumerated exactly")
      ->capture_default_str();
  gap_sub->add_option("--mc-samples", gap.mc_samples, "Monte-Carlo samples beyond the exact limit")
      ->capture_default_str();
  gap_sub->callback([&] { action = [&] { return origin_gap_cmd(gap, g); }; });

  // experiment
  ExperimentArgs exp;
  auto* exp_sub = app.add_subcommand("experiment", "Train on trial, evaluate on test in all four settings");
  exp_sub->add_option("--instances", exp.instances)->required()->check(CLI::ExistingFile);
  exp_sub->add_option("--ratings", exp.ratings)->required()->check(CLI::ExistingFile);
  exp_sub->add_option("--task", exp.task, "lcp, cwi, lcp-cwi or all")->capture_default_str();
  exp_sub->add_option("--features", exp.features, "Feature names, in column order")->delimiter(',')->required();
  exp_sub->add_option("--resource", exp.resources, "NAME=KIND:PATH (repeatable)")->required();
  exp_sub->add_option("--threshold", exp.threshold, "CWI threshold")->capture_default_str();
  exp_sub->add_option("--ridge-l2", exp.ridge_l2, "L2 strength of the LCP regressor")->capture_default_str();
  exp_sub->add_option("--logistic-l2", exp.logistic_l2, "L2 strength of the CWI classifier (0 disables)")
      ->capture_default_str();
  exp_sub->add_flag("--no-class-weights", exp.no_class_weights, "Fit the classifier without balanced class weights");
  exp_sub->add_option("--group-labels", exp.group_labels, "Group CWI labels: majority or mean")->capture_default_str();
  exp_sub->callback([&] { action = [&] { return experiment_cmd(exp, g); }; });

  // report
  ReportArgs rep;
  auto* rep_sub = app.add_subcommand("report", "Per-word difference tables and plot data");
  rep_sub->add_option("--instances", rep.instances)->required()->check(CLI::ExistingFile);
  rep_sub->add_option("--split", rep.split, "trial, test or all")->capture_default_str();
  rep_sub->add_option("--group", rep.groups, "NAME=RATINGS_PATH (repeatable)")->required();
  rep_sub->add_option("--diff", rep.diff, "BASE OTHER: per-word difference sorted ascending")->expected(2);
  rep_sub->add_option("--freq-resource", rep.freq_resource, "NAME=KIND:PATH for the log-frequency column");
  rep_sub->add_option("--plot-dir", rep.plot_dir, "Directory for histogram/scatter/fit TSVs");
  rep_sub->add_option("--bins", rep.bins, "Histogram bins")->capture_default_str();
  rep_sub->callback([&] { action = [&] { return report_cmd(rep, g); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto result = action();
    const auto text_out = g.format == "json" ? result.data.dump(2) + "\n" : result.tsv;
    if (g.out_path.empty()) {
      out << text_out;
    } else {
      write_file(g.out_path, text_out);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace lexcomp::cli
