#include "lexcomp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "lexcomp/error.hpp"

namespace lexcomp::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  // Shifted by the first value: exact for constant input.
  const double shift = values.front();
  double d = 0.0;
  for (const double v : values) d += v - shift;
  s.mean = shift + d / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ComputationError("pearson: vectors differ in length");
  if (x.size() < 2) throw ComputationError("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ComputationError("pearson: correlation undefined for a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double krippendorff_alpha_interval(const RatingMatrix& matrix) {
  // Sum over ordered pairs i != j of (v_i - v_j)^2 equals 2 m SS for m values
  // with centered sum of squares SS.
  double observed = 0.0;
  double pooled_sum = 0.0;
  std::size_t n = 0;
  std::vector<double> pooled;
  std::vector<double> unit;
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    unit.clear();
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      if (const auto v = matrix.at(a, i)) unit.push_back(*v);
    }
    if (unit.size() < 2) continue;
    const double m = static_cast<double>(unit.size());
    const double mean = std::accumulate(unit.begin(), unit.end(), 0.0) / m;
    double ss = 0.0;
    for (const double v : unit) ss += (v - mean) * (v - mean);
    observed += 2.0 * m * ss / (m - 1.0);
    pooled.insert(pooled.end(), unit.begin(), unit.end());
    pooled_sum += std::accumulate(unit.begin(), unit.end(), 0.0);
    n += unit.size();
  }
  if (n < 2) throw ComputationError("krippendorff alpha: no unit has two or more ratings");
  const double nn = static_cast<double>(n);
  const double pooled_mean = pooled_sum / nn;
  double pooled_ss = 0.0;
  for (const double v : pooled) pooled_ss += (v - pooled_mean) * (v - pooled_mean);
  const double d_o = observed / nn;
  const double d_e = 2.0 * pooled_ss / (nn - 1.0);
  if (d_e == 0.0) throw ComputationError("krippendorff alpha: all pairable ratings are identical");
  return 1.0 - d_o / d_e;
}

double mean_pairwise_pcc(const RatingMatrix& matrix) {
  const auto k = matrix.annotator_count();
  if (k < 2) throw ComputationError("mean pairwise PCC needs at least two annotators");
  double total = 0.0;
  std::size_t pairs = 0;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      x.clear();
      y.clear();
      for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
        const auto va = matrix.at(a, i);
        const auto vb = matrix.at(b, i);
        if (va && vb) {
          x.push_back(*va);
          y.push_back(*vb);
        }
      }
      try {
        total += pearson(x, y);
      } catch (const ComputationError& e) {
        throw ComputationError(fmt::format("annotators '{}' and '{}': {}", matrix.annotator_ids()[a],
                                           matrix.annotator_ids()[b], e.what()));
      }
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

// --- permutation test --------------------------------------------------------

namespace {

__extension__ using u128 = unsigned __int128;

/// C(n, k), or limit + 1 when it exceeds `limit`.
std::uint64_t binomial_capped(std::size_t n, std::size_t k, std::uint64_t limit) {
  k = std::min(k, n - k);
  u128 c = 1;
  for (std::size_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > limit) return limit + 1;
  }
  return static_cast<std::uint64_t>(c);
}

/// Uniform integer in [0, bound) without modulo bias.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const auto r = rng();
    const u128 m = static_cast<u128>(r) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

struct Enumerator {
  const std::vector<double>& pool;
  std::size_t k;
  double total;
  double cutoff;
  std::uint64_t extreme = 0;

  [[nodiscard]] double gap(double subset_sum) const {
    const double rest = static_cast<double>(pool.size() - k);
    return std::abs(subset_sum / static_cast<double>(k) - (total - subset_sum) / rest);
  }

  void run(std::size_t start, std::size_t remaining, double sum) {
    if (remaining == 0) {
      extreme += gap(sum) >= cutoff ? 1 : 0;
      return;
    }
    const std::size_t last = pool.size() - remaining;
    for (std::size_t i = start; i <= last; ++i) run(i + 1, remaining - 1, sum + pool[i]);
  }
};

}  // namespace

PermutationResult permutation_test(std::span<const double> a, std::span<const double> b,
                                   const PermutationOptions& options) {
  if (a.empty() || b.empty()) throw ComputationError("permutation test: both groups must be nonempty");

  // Canonical form: sorted pool, enumerate subsets of the smaller group size.
  // Swapping a and b therefore gives bit-identical results.
  std::vector<double> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  std::sort(pool.begin(), pool.end());
  const std::size_t k = std::min(a.size(), b.size());
  const double total = std::accumulate(pool.begin(), pool.end(), 0.0);

  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double mean_a = std::accumulate(sa.begin(), sa.end(), 0.0) / static_cast<double>(sa.size());
  const double mean_b = std::accumulate(sb.begin(), sb.end(), 0.0) / static_cast<double>(sb.size());

  double scale = 1.0;
  for (const double v : pool) scale = std::max(scale, std::abs(v));
  const double cutoff = std::abs(mean_a - mean_b) - 1e-10 * scale;

  PermutationResult result;
  result.observed_diff = mean_a - mean_b;

  Enumerator e{pool, k, total, cutoff};
  const auto partitions = binomial_capped(pool.size(), k, options.exact_limit);
  if (partitions <= options.exact_limit) {
    e.run(0, k, 0.0);
    result.mode = PermutationResult::Mode::Exact;
    result.relabelings = partitions;
    result.p_value = static_cast<double>(e.extreme) / static_cast<double>(partitions);
    return result;
  }

  std::mt19937_64 rng(options.seed);
  std::uint64_t extreme = 1;  // the observed labeling
  for (std::uint64_t s = 0; s < options.mc_samples; ++s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + bounded(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
      sum += pool[i];
    }
    extreme += e.gap(sum) >= cutoff ? 1 : 0;
  }
  result.mode = PermutationResult::Mode::MonteCarlo;
  result.relabelings = options.mc_samples + 1;
  result.seed = options.seed;
  result.p_value = static_cast<double>(extreme) / static_cast<double>(options.mc_samples + 1);
  return result;
}

// --- Steiger ------------------------------------------------------------------

SteigerResult steiger_test(double r_jk, double r_jh, double r_kh, int n) {
  for (const double r : {r_jk, r_jh, r_kh}) {
    if (!(std::abs(r) < 1.0)) throw ComputationError(fmt::format("steiger test: correlation {} not in (-1, 1)", r));
  }
  if (n < 4) throw ComputationError("steiger test: need n >= 4");
  SteigerResult result;
  result.n = n;
  if (r_jk == r_jh) return result;

  const double r_bar = 0.5 * (r_jk + r_jh);
  const double r2 = r_bar * r_bar;
  // Asymptotic covariance of the two Fisher-z values, with r_jk and r_jh
  // replaced by their mean.
  const double psi = r_kh * (1.0 - 2.0 * r2) - 0.5 * r2 * (1.0 - 2.0 * r2 - r_kh * r_kh);
  const double s = psi / ((1.0 - r2) * (1.0 - r2));
  if (!(s < 1.0)) throw ComputationError("steiger test: degenerate correlation structure");
  result.z_statistic = (std::atanh(r_jk) - std::atanh(r_jh)) * std::sqrt(n - 3.0) / std::sqrt(2.0 - 2.0 * s);
  const double p = std::erfc(std::abs(result.z_statistic) / std::sqrt(2.0));
  result.p_value = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
  return result;
}

// --- table-level analyses -------------------------------------------------------

std::vector<double> align(const ComplexityView& view, std::span<const Instance> instances) {
  std::unordered_map<std::string_view, double> by_id;
  for (std::size_t i = 0; i < view.instance_ids.size(); ++i) by_id.emplace(view.instance_ids[i], view.targets[i]);
  std::vector<double> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const auto it = by_id.find(inst.id);
    if (it == by_id.end()) {
      throw InputError(fmt::format("view {} has no value for instance '{}'", view.provenance.describe(), inst.id));
    }
    out.push_back(it->second);
  }
  return out;
}

OriginGapTable origin_gap_analysis(std::span<const Instance> instances, std::span<const double> log_freq,
                                   const ComplexityView& base, std::span<const NamedView> others,
                                   std::pair<Origin, Origin> origins, const PermutationOptions& options) {
  if (!log_freq.empty() && log_freq.size() != instances.size()) {
    throw InputError("origin gap: log-frequency values do not match the instance list");
  }
  std::vector<Instance> first;
  std::vector<Instance> second;
  std::vector<double> freq_first;
  std::vector<double> freq_second;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (inst.origin == origins.first) {
      first.push_back(inst);
      if (!log_freq.empty()) freq_first.push_back(log_freq[i]);
    } else if (inst.origin == origins.second) {
      second.push_back(inst);
      if (!log_freq.empty()) freq_second.push_back(log_freq[i]);
    }
  }
  if (first.empty() || second.empty()) {
    throw ComputationError(fmt::format("origin gap: no {} words", first.empty() ? to_string(origins.first)
                                                                                 : to_string(origins.second)));
  }

  OriginGapTable table;
  table.groups.first = {origins.first, first.size(), {}};
  table.groups.second = {origins.second, second.size(), {}};
  const auto add_column = [&](std::string name, const std::vector<double>& x, const std::vector<double>& y) {
    table.columns.push_back(std::move(name));
    table.groups.first.columns.push_back(summarize(x));
    table.groups.second.columns.push_back(summarize(y));
    table.p_values.push_back(permutation_test(x, y, options));
  };

  if (!log_freq.empty()) add_column("log10_freq", freq_first, freq_second);
  const auto base_first = align(base, first);
  const auto base_second = align(base, second);
  add_column("base", base_first, base_second);
  for (const auto& other : others) {
    auto d_first = align(other.view, first);
    auto d_second = align(other.view, second);
    for (std::size_t i = 0; i < d_first.size(); ++i) d_first[i] -= base_first[i];
    for (std::size_t i = 0; i < d_second.size(); ++i) d_second[i] -= base_second[i];
    add_column("diff:" + other.name, d_first, d_second);
  }
  return table;
}

std::vector<CorrelationRow> correlation_table(std::span<const Instance> instances, const ComplexityView& complexity,
                                              std::span<const FeatureSource> sources) {
  const auto y = align(complexity, instances);
  std::vector<CorrelationRow> rows;
  for (const auto& source : sources) {
    std::vector<double> x;
    x.reserve(instances.size());
    for (const auto& inst : instances) x.push_back(feature_value(source, inst));
    const auto mask = coverage_mask(source, instances);
    std::vector<double> xc;
    std::vector<double> yc;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      xc.push_back(x[i]);
      yc.push_back(y[i]);
    }
    if (xc.size() < 2) {
      throw ComputationError(fmt::format("resource '{}' covers {} instances; potential PCC needs 2", source.name,
                                         xc.size()));
    }
    CorrelationRow row;
    row.name = source.name;
    try {
      row.pcc = pearson(x, y);
      row.potential_pcc = pearson(xc, yc);
    } catch (const ComputationError& e) {
      throw ComputationError(fmt::format("resource '{}': {}", source.name, e.what()));
    }
    row.covered = xc.size();
    row.total = x.size();
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& l, const auto& r) { return std::abs(l.pcc) > std::abs(r.pcc); });
  return rows;
}

}  // namespace lexcomp::stats
