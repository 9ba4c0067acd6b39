#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lexcomp/cli.hpp"
#include "lexcomp/dataset.hpp"
#include "lexcomp/error.hpp"
#include "lexcomp/eval.hpp"
#include "lexcomp/lexfeatures.hpp"
#include "lexcomp/models.hpp"
#include "lexcomp/stats.hpp"

namespace py = pybind11;
using namespace lexcomp;

namespace {

std::vector<std::optional<double>> flatten(const std::vector<std::vector<std::optional<double>>>& rows,
                                           std::size_t width) {
  std::vector<std::optional<double>> out;
  for (const auto& r : rows) {
    if (r.size() != width) throw InputError("every rating row needs one value per instance");
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::vector<std::vector<std::optional<double>>> to_rows(const RatingMatrix& m) {
  std::vector<std::vector<std::optional<double>>> rows;
  for (std::size_t a = 0; a < m.annotator_count(); ++a) {
    const auto r = m.row(a);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_lexcomp, m) {
  m.doc() = "Lexical complexity analysis core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ComputationError>(m, "ComputationError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());

  py::class_<Instance>(m, "Instance")
      .def_readonly("id", &Instance::id)
      .def_readonly("target", &Instance::target)
      .def_readonly("tokens", &Instance::tokens)
      .def_readonly("lemmas", &Instance::lemmas)
      .def_property_readonly("origin", [](const Instance& i) { return std::string(to_string(i.origin)); })
      .def_readonly("pos", &Instance::pos)
      .def_property_readonly("split", [](const Instance& i) { return std::string(to_string(i.split)); });

  py::class_<RatingMatrix>(m, "RatingMatrix")
      .def(py::init([](std::vector<std::string> annotators, std::vector<std::string> instances,
                       const std::vector<std::vector<std::optional<double>>>& rows, bool strict_grid) {
             const auto width = instances.size();
             return RatingMatrix(std::move(annotators), std::move(instances), flatten(rows, width), strict_grid);
           }),
           py::arg("annotator_ids"), py::arg("instance_ids"), py::arg("rows"), py::arg("strict_grid") = false)
      .def_property_readonly("annotator_ids", &RatingMatrix::annotator_ids)
      .def_property_readonly("instance_ids", &RatingMatrix::instance_ids)
      .def("rows", &to_rows)
      .def("select_instances", [](const RatingMatrix& r, const std::vector<std::string>& ids) {
        return r.select_instances(ids);
      })
      .def("select_annotators", [](const RatingMatrix& r, const std::vector<std::string>& ids) {
        return r.select_annotators(ids);
      })
      .def("__len__", &RatingMatrix::annotator_count);

  m.def("load_instances", &load_instances, py::arg("path"));
  m.def("load_ratings", &load_ratings, py::arg("path"), py::arg("strict_grid") = false);
  m.def(
      "group_mean",
      [](const RatingMatrix& r) {
        auto v = group_mean(r);
        return std::make_pair(v.instance_ids, v.targets);
      },
      "(instance_ids, mean ratings)");
  m.def(
      "group_majority",
      [](const RatingMatrix& r, double threshold) {
        auto v = group_majority(r, threshold);
        return std::make_pair(v.instance_ids, v.targets);
      },
      py::arg("matrix"), py::arg("threshold") = kDefaultCwiThreshold);
  m.def("cwi_label", &cwi_label, py::arg("value"), py::arg("threshold") = kDefaultCwiThreshold);
  m.def("union_matrices", [](const std::vector<std::pair<std::string, RatingMatrix>>& groups) {
    std::vector<NamedMatrix> named;
    for (const auto& [name, matrix] : groups) named.push_back({name, matrix});
    return union_matrices(named);
  });

  py::class_<FrequencyTable>(m, "FrequencyTable")
      .def(py::init([](std::unordered_map<std::string, std::int64_t> counts, std::optional<std::int64_t> tokens,
                       std::optional<std::int64_t> types) {
             return FrequencyTable(std::move(counts), LookupUnit::WordSurface, tokens, types);
           }),
           py::arg("counts"), py::arg("token_total") = py::none(), py::arg("type_total") = py::none())
      .def_static("load", [](const std::filesystem::path& p) { return FrequencyTable::load(p); })
      .def("count", &FrequencyTable::count)
      .def_property_readonly("token_total", &FrequencyTable::token_total)
      .def_property_readonly("type_total", &FrequencyTable::type_total)
      .def("__len__", &FrequencyTable::size);
  m.def("smoothed_log_freq", &smoothed_log_freq, py::arg("table"), py::arg("item"));
  m.def(
      "sequence_log_freq",
      [](const FrequencyTable& t, const std::vector<std::string>& items) { return sequence_log_freq(t, items); },
      py::arg("table"), py::arg("items"));

  m.def("normal_cdf", &stats::normal_cdf);
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return stats::pearson(x, y); });
  m.def("krippendorff_alpha_interval", &stats::krippendorff_alpha_interval);
  m.def("mean_pairwise_pcc", &stats::mean_pairwise_pcc);

  py::class_<stats::PermutationResult>(m, "PermutationResult")
      .def_readonly("observed_diff", &stats::PermutationResult::observed_diff)
      .def_readonly("p_value", &stats::PermutationResult::p_value)
      .def_readonly("relabelings", &stats::PermutationResult::relabelings)
      .def_property_readonly("exact", [](const stats::PermutationResult& r) {
        return r.mode == stats::PermutationResult::Mode::Exact;
      });
  m.def(
      "permutation_test",
      [](const std::vector<double>& a, const std::vector<double>& b, std::uint64_t exact_limit,
         std::uint64_t mc_samples, std::uint64_t seed) {
        return stats::permutation_test(a, b, {exact_limit, mc_samples, seed});
      },
      py::arg("a"), py::arg("b"), py::arg("exact_limit") = 10'000'000, py::arg("mc_samples") = 1'000'000,
      py::arg("seed") = 0);

  py::class_<stats::SteigerResult>(m, "SteigerResult")
      .def_readonly("z_statistic", &stats::SteigerResult::z_statistic)
      .def_readonly("p_value", &stats::SteigerResult::p_value)
      .def_readonly("n", &stats::SteigerResult::n);
  m.def("steiger_test", &stats::steiger_test, py::arg("r_jk"), py::arg("r_jh"), py::arg("r_kh"), py::arg("n"));

  py::class_<models::RidgeModel>(m, "RidgeModel")
      .def_readonly("weights", &models::RidgeModel::weights)
      .def_readonly("intercept", &models::RidgeModel::intercept)
      .def_readonly("l2_strength", &models::RidgeModel::l2_strength);
  m.def(
      "ridge_fit",
      [](const models::Features& x, const std::vector<double>& y, double l2) { return models::ridge_fit(x, y, l2); },
      py::arg("x"), py::arg("y"), py::arg("l2_strength") = 1.0);
  m.def("ridge_predict", &models::ridge_predict);

  py::class_<models::LogisticModel>(m, "LogisticModel")
      .def_readonly("weights", &models::LogisticModel::weights)
      .def_readonly("intercept", &models::LogisticModel::intercept)
      .def_readonly("class_weights", &models::LogisticModel::class_weights)
      .def_readonly("iterations", &models::LogisticModel::iterations);
  m.def(
      "logistic_fit",
      [](const models::Features& x, const std::vector<bool>& labels, double l2, bool balanced) {
        models::LogisticOptions o;
        o.l2_strength = l2;
        o.weighting = balanced ? models::ClassWeighting::Balanced : models::ClassWeighting::None;
        return models::logistic_fit(x, labels, o);
      },
      py::arg("x"), py::arg("labels"), py::arg("l2_strength") = 1.0, py::arg("balanced") = true);
  m.def("logistic_probability", &models::logistic_probability);
  m.def("logistic_predict", &models::logistic_predict, py::arg("model"), py::arg("x"),
        py::arg("decision_threshold") = 0.5);

  m.def("r_squared",
        [](const std::vector<double>& gold, const std::vector<double>& pred) { return eval::r_squared(gold, pred); });
  m.def("macro_f1", &eval::macro_f1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return std::make_tuple(code, out.str(), err.str());
      },
      "Runs the command-line tool; returns (exit_code, stdout, stderr).");
}
