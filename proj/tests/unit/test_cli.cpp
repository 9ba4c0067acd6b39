#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "../support/fixtures.hpp"
#include "lexcomp/cli.hpp"
#include "lexcomp/dataset.hpp"
#include "lexcomp/text.hpp"

using namespace lexcomp;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> r;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) r.push_back(l);
  return r;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> r;
  for (auto f : text::split(line, '\t')) r.emplace_back(f);
  return r;
}

// Three rating groups over one synthetic instance list.
struct Corpus {
  fixture::TempDir dir{"cli"};
  fixture::SyntheticFiles files;
  std::vector<std::string> groups;
  std::filesystem::path external;

  Corpus() {
    const auto s = fixture::synthetic(11, 4, 40, 20);
    files = fixture::write_synthetic(s, dir);
    for (int g = 0; g < 3; ++g) {
      const auto other = fixture::synthetic(100 + g, 3 + g, 40, 20);
      const auto p = dir.path() / ("g" + std::to_string(g) + ".tsv");
      save_ratings(other.dataset.ratings, p);
      groups.push_back("g" + std::to_string(g) + "=" + p.string());
    }
    std::string ext;
    for (const auto& inst : s.dataset.instances) {
      ext += inst.id + "\t" + std::to_string(static_cast<double>(inst.target.size()) / 10.0) + "\n";
    }
    external = dir.write("ext.tsv", ext);
  }
};

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"correlate", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"freq", "build", "--corpus", "/no/such/file"}).code == cli::kExitUsage);

  fixture::TempDir dir("cli-exit");
  const auto bad = dir.write("bad.tsv", "a\tnot-a-number\n");
  const auto r = run({"freq", "build", "--corpus", bad.string()});
  CHECK(r.code == cli::kExitComputation);
  CHECK_FALSE(r.err.empty());
  CHECK(r.out.empty());
}

TEST_CASE("freq build and lookup") {
  fixture::TempDir dir("cli-freq");
  const auto corpus = dir.write("c.tsv", "#tokens=990\n#types=10\na\t9\nb\t3\nc\t1\n");
  const auto b = run({"freq", "build", "--corpus", corpus.string()});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("entries\t3\n") != std::string::npos);
  CHECK(b.out.find("tokens\t990\n") != std::string::npos);
  CHECK(b.out.find("types\t10\n") != std::string::npos);

  const auto l = run({"freq", "lookup", "--corpus", corpus.string(), "a", "zzz"});
  REQUIRE(l.code == 0);
  const auto ls = lines(l.out);
  REQUIRE(ls.size() == 3);
  CHECK(cells(ls[1])[0] == "a");
  CHECK(cells(ls[1])[1] == "9");
  CHECK(std::stod(cells(ls[1])[2]) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(cells(ls[2])[1] == "0");
  CHECK(std::stod(cells(ls[2])[2]) == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("agreement rows") {
  Corpus c;
  const auto one = run({"agreement", "--group", c.groups[0]});
  REQUIRE(one.code == 0);
  CHECK(lines(one.out).size() == 2);

  const auto all = run({"agreement", "--group", c.groups[0], "--group", c.groups[1], "--group", c.groups[2],
                        "--all-unions"});
  REQUIRE(all.code == 0);
  const auto ls = lines(all.out);
  REQUIRE(ls.size() == 8);
  CHECK(cells(ls[0])[0] == "groups");
  std::size_t prev = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto size = text::split(cells(ls[i])[0], '+').size();
    CHECK(size >= prev);
    prev = size;
  }
  CHECK(cells(ls.back())[1] == "12");

  CHECK(run({"agreement", "--group", c.groups[0], "--union", "g0+nope"}).code == cli::kExitUsage);
}

TEST_CASE("correlate with full coverage") {
  Corpus c;
  const auto r = run({"correlate", "--instances", c.files.instances.string(), "--ratings", c.files.ratings.string(),
                      "--split", "all", "--resource", "len=external:" + c.external.string(), "--resource",
                      "tube=freq:" + c.files.freq.string(), "--steiger", "len,tube"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 3);
  std::vector<std::string> len;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (cells(ls[i])[0] == "len") len = cells(ls[i]);
  }
  REQUIRE(len.size() == 5);
  CHECK(len[1] == len[2]);
  CHECK(len[3] == len[4]);
  CHECK(r.out.find("steiger\tlen\ttube") != std::string::npos);
}

TEST_CASE("report difference table") {
  const auto rows = text::read_tsv(std::filesystem::path(LEXCOMP_TEST_DATA) / "trial_word_means.tsv");
  fixture::TempDir dir("cli-report");
  std::vector<Instance> list;
  std::vector<std::string> ids;
  std::vector<std::optional<double>> original;
  std::vector<std::optional<double>> chinese;
  std::string freq;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    Instance inst;
    inst.id = "t" + std::to_string(r);
    inst.target = f[0];
    inst.tokens = {f[0]};
    inst.lemmas = {f[0]};
    inst.origin = parse_origin(f[1]);
    inst.pos = "Noun";
    inst.split = Split::Trial;
    ids.push_back(inst.id);
    original.emplace_back(text::parse_double(f[3], "original"));
    chinese.emplace_back(text::parse_double(f[4], "chinese"));
    freq += inst.id + "\t" + std::string(f[2]) + "\n";
    list.push_back(std::move(inst));
  }
  const auto inst_path = dir.path() / "inst.tsv";
  save_instances(list, inst_path);
  const auto a = dir.path() / "a.tsv";
  const auto b = dir.path() / "b.tsv";
  save_ratings(RatingMatrix({"x"}, ids, original, false), a);
  save_ratings(RatingMatrix({"y"}, ids, chinese, false), b);

  const auto freq_path = dir.write("freq.tsv", freq);
  const auto plots = dir.path() / "plots";
  const auto r = run({"report", "--instances", inst_path.string(), "--group", "orig=" + a.string(), "--group",
                      "zh=" + b.string(), "--diff", "orig", "zh", "--freq-resource",
                      "lf=external:" + freq_path.string(), "--plot-dir", plots.string()});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 31);
  double prev = -1e9;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const double d = std::stod(cells(ls[i]).back());
    CHECK(d >= prev);
    prev = d;
  }
  for (const auto* name : {"histogram.tsv", "scatter.tsv", "fits.tsv", "bands.tsv"}) {
    CHECK(std::filesystem::exists(plots / name));
  }
  const auto bare = dir.path() / "bare";
  const auto h = run({"report", "--instances", inst_path.string(), "--group", "orig=" + a.string(), "--plot-dir",
                      bare.string()});
  CHECK(h.code == 0);
  CHECK(std::filesystem::exists(bare / "histogram.tsv"));
  CHECK_FALSE(std::filesystem::exists(bare / "scatter.tsv"));
  CHECK(run({"report", "--instances", inst_path.string(), "--group", "orig=" + a.string()}).code ==
        cli::kExitUsage);
}

TEST_CASE("origin gap and describe") {
  Corpus c;
  const auto d = run({"describe", "--instances", c.files.instances.string()});
  CHECK(d.code == 0);
  CHECK_FALSE(d.out.empty());

  const auto r = run({"origin-gap", "--instances", c.files.instances.string(), "--split", "all", "--base",
                      "base=" + c.files.ratings.string(), "--other", c.groups[0], "--origins", "Japanese,Chinese"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[3].starts_with("p-value"));
}

TEST_CASE("experiment tables and global flags") {
  Corpus c;
  const std::vector<std::string> args{"experiment",  "--instances", c.files.instances.string(),
                                      "--ratings",   c.files.ratings.string(), "--features",
                                      "tube,len",    "--resource",  "tube=freq:" + c.files.freq.string(),
                                      "--resource",  "len=external:" + c.external.string()};
  const auto r = run(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("LCP") != std::string::npos);
  CHECK(r.out.find("CWI") != std::string::npos);
  CHECK(run(args).out == r.out);

  auto json_args = args;
  json_args.insert(json_args.begin(), {"--format", "json"});
  const auto j = run(json_args);
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["reports"].size() == 12);

  fixture::TempDir dir("cli-flags");
  const auto out = dir.path() / "result.json";
  auto file_args = json_args;
  file_args.insert(file_args.begin(), {"--out", out.string()});
  const auto f = run(file_args);
  REQUIRE(f.code == 0);
  CHECK(f.out.empty());
  CHECK(fixture::slurp(out) == j.out);

  const auto cfg = dir.write("cfg.toml", "format = \"json\"\n");
  const auto from_cfg = run({"--config", cfg.string(), "freq", "build", "--corpus", c.files.freq.string()});
  REQUIRE(from_cfg.code == 0);
  CHECK(nlohmann::json::parse(from_cfg.out).is_object());
  const auto flag_wins =
      run({"--config", cfg.string(), "--format", "tsv", "freq", "build", "--corpus", c.files.freq.string()});
  REQUIRE(flag_wins.code == 0);
  CHECK(flag_wins.out.starts_with("entries\t"));

  CHECK(run({"experiment", "--instances", c.files.instances.string(), "--ratings", c.files.ratings.string(),
             "--features", "missing", "--resource", "len=external:" + c.external.string()})
            .code == cli::kExitUsage);
}
