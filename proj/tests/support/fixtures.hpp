#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexcomp/dataset.hpp"
#include "lexcomp/lexfeatures.hpp"
#include "oracles.hpp"

namespace fixture {

inline lexcomp::RatingMatrix matrix(const oracle::Grid& grid) {
  std::vector<std::string> annotators;
  std::vector<std::string> units;
  std::vector<std::optional<double>> values;
  for (std::size_t a = 0; a < grid.size(); ++a) annotators.push_back("a" + std::to_string(a));
  for (std::size_t u = 0; u < grid.front().size(); ++u) units.push_back("u" + std::to_string(u));
  for (const auto& row : grid) values.insert(values.end(), row.begin(), row.end());
  return {annotators, units, values};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("lexcomp-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// A seeded synthetic corpus: instances with one or two tokens, a frequency
/// table for them, and grid ratings driven by log-frequency plus
/// per-annotator bias and noise.
struct Synthetic {
  lexcomp::Dataset dataset;
  std::shared_ptr<const lexcomp::FrequencyTable> table;
  std::map<std::string, std::int64_t> counts;
};

inline Synthetic synthetic(std::uint64_t seed, std::size_t annotators, std::size_t instances, std::size_t trial) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(0, 20000);
  std::normal_distribution<double> noise(0.0, 0.12);
  std::uniform_int_distribution<int> coin(0, 3);

  std::unordered_map<std::string, std::int64_t> counts;
  std::vector<lexcomp::Instance> list;
  for (std::size_t i = 0; i < instances; ++i) {
    lexcomp::Instance inst;
    inst.id = "w" + std::to_string(i);
    const std::string t1 = "tok" + std::to_string(i);
    const std::string t2 = "suf" + std::to_string(i % 5);
    inst.tokens = coin(rng) == 0 ? std::vector<std::string>{t1, t2} : std::vector<std::string>{t1};
    inst.lemmas = inst.tokens;
    inst.target = t1;
    const int c = count_dist(rng) / (1 + static_cast<int>(i % 7) * 40);
    if (c > 0) counts[t1] = c;
    counts[t2] = 5000;
    inst.origin = static_cast<lexcomp::Origin>(i % 4);
    inst.pos = i % 3 == 0 ? "Verb" : "Noun";
    inst.split = i < trial ? lexcomp::Split::Trial : lexcomp::Split::Test;
    list.push_back(std::move(inst));
  }
  auto table = std::make_shared<const lexcomp::FrequencyTable>(counts);

  std::vector<std::string> annotator_ids;
  std::vector<double> bias;
  for (std::size_t a = 0; a < annotators; ++a) {
    annotator_ids.push_back("ann" + std::to_string(a < 10 ? 0 : 1) + std::to_string(a));
    bias.push_back(noise(rng));
  }
  std::vector<std::string> ids;
  for (const auto& inst : list) ids.push_back(inst.id);
  std::vector<std::optional<double>> values;
  for (std::size_t a = 0; a < annotators; ++a) {
    for (const auto& inst : list) {
      const double f = lexcomp::sequence_log_freq(*table, inst.tokens);
      const double latent = std::clamp(-0.22 * (f + 2.0) + bias[a] + noise(rng), 0.0, 1.0);
      values.emplace_back(std::round(latent * 4.0) / 4.0);
    }
  }
  return {{std::move(list), lexcomp::RatingMatrix(annotator_ids, ids, values, true)},
          table,
          {counts.begin(), counts.end()}};
}

/// Writes the synthetic corpus as instances, ratings and a frequency list.
struct SyntheticFiles {
  std::filesystem::path instances;
  std::filesystem::path ratings;
  std::filesystem::path freq;
};

inline SyntheticFiles write_synthetic(const Synthetic& s, const TempDir& dir) {
  SyntheticFiles f{dir.path() / "instances.tsv", dir.path() / "ratings.tsv", dir.path() / "freq.tsv"};
  lexcomp::save_instances(s.dataset.instances, f.instances);
  lexcomp::save_ratings(s.dataset.ratings, f.ratings);
  std::ofstream out(f.freq, std::ios::binary);
  for (const auto& [w, c] : s.counts) out << w << '\t' << c << '\n';
  return f;
}

}  // namespace fixture
