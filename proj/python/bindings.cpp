#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regopt/bench.hpp"

namespace py = pybind11;
using namespace regopt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeMismatch("expected a 2-D array");
  const auto* p = a.data();
  return Matrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                std::vector<double>(p, p + a.size()));
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

// Stateful single-matrix optimizer for use from Python training loops.
class PyOptimizer {
 public:
  PyOptimizer(const std::string& config_json) {
    auto j = nlohmann::json::parse(config_json);
    nlohmann::json wrapper = {{"problem", {{"name", "quadratic"}}}, {"optimizer", j}};
    cfg_ = ExperimentConfig::from_json(wrapper).optimizer;
  }

  Array step(const Array& w, const Array& grad, double lr_scale) {
    const Matrix wm = to_matrix(w);
    if (!state_) state_ = OptState::zeros_like(wm);
    return to_array(optimizer_step(cfg_, wm, to_matrix(grad), *state_, lr_scale));
  }

  void reset() { state_.reset(); }

 private:
  OptimizerConfig cfg_;
  std::optional<OptState> state_;
};

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Row/column-scaled momentum optimizers and their verification harness.";

  // Translators run newest-first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigInvalid>(m, "ConfigInvalid", PyExc_ValueError);
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("normal", [](const Array& a, const std::string& p, const std::string& policy) {
        return to_array(normal(to_matrix(a), parse_norm_order(p), parse_axis_policy(policy)));
      },
      py::arg("m"), py::arg("p") = "2", py::arg("policy") = "shape",
      "Single-pass row or column normalization.");
  m.def("racs_iterate", [](const Array& a, const std::string& p, std::size_t t) {
        return to_array(racs_iterate(to_matrix(a), parse_norm_order(p), t));
      },
      py::arg("m"), py::arg("p") = "2", py::arg("t") = 1);
  m.def("rms", [](const Array& a) { return rms(to_matrix(a)); });
  m.def("rms_closed_form", &rms_closed_form, py::arg("rows"), py::arg("cols"));
  m.def("singular_values", [](const Array& a) { return singular_values(to_matrix(a)); });

  py::class_<PyOptimizer>(m, "Optimizer")
      .def(py::init<const std::string&>(), py::arg("config_json"),
           "Optimizer from the JSON 'optimizer' object used by run configs.")
      .def("step", &PyOptimizer::step, py::arg("w"), py::arg("grad"), py::arg("lr_scale") = 1.0)
      .def("reset", &PyOptimizer::reset);

  m.def("run", [](const std::string& config_json) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(ExperimentConfig::from_json(nlohmann::json::parse(config_json)));
        }
        py::dict out;
        const RunRecord& rec = r.record;
        out["status"] = r.status;
        out["f"] = rec.f;
        out["grad_fro"] = rec.grad_fro;
        out["g_k"] = rec.g;
        out["h_k"] = rec.h;
        out["update_rms"] = rec.update_rms;
        out["lr"] = rec.lr;
        return out;
      },
      py::arg("config_json"), "Runs an experiment in memory; returns the per-iteration columns.");

  m.def("verify", [](const std::string& theorem, std::uint64_t seed) {
        std::optional<TheoremId> only;
        if (theorem != "all") only = parse_theorem_id(theorem);
        nlohmann::json arr = nlohmann::json::array();
        std::vector<TheoremReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_verification(only, seed);
        }
        for (const auto& r : reports) arr.push_back(r.to_json());
        return json_to_py(arr);
      },
      py::arg("theorem") = "all", py::arg("seed") = 0);

  m.attr("CSV_HEADER") = kCsvHeader;
}
