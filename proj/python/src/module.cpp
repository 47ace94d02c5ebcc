#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmtlab/ensemble.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/reference.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/runner.hpp"
#include "rmtlab/spacing.hpp"

namespace py = pybind11;
using namespace rmt;

namespace {

// Python dict -> flat key-value config. Lists become comma-separated values.
KeyValues to_keyvalues(const py::dict& d) {
  KeyValues kv;
  for (const auto& [k, v] : d) {
    std::string text;
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      for (const auto& item : v) {
        if (!text.empty()) text += ", ";
        text += py::str(item).cast<std::string>();
      }
    } else if (py::isinstance<py::bool_>(v)) {
      text = v.cast<bool>() ? "true" : "false";
    } else {
      text = py::str(v).cast<std::string>();
    }
    kv.set(py::str(k).cast<std::string>(), text);
  }
  return kv;
}

py::dict manifest_dict(const RunManifest& m) {
  py::dict files;
  for (const auto& f : m.files) files[py::str(f.name)] = f.sha256;
  py::dict out;
  out["kind"] = m.kind;
  out["config_hash"] = m.config_hash;
  out["status"] = m.status;
  out["reused"] = m.reused;
  out["wall_seconds"] = m.wall_seconds;
  out["files"] = files;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random-matrix spectral statistics";
  m.attr("__version__") = code_version();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);

  m.def("sample_matrix", [](const py::dict& ensemble, std::uint64_t seed) -> py::object {
        const auto h = sample_matrix(make_spec_from_config(to_keyvalues(ensemble)), seed);
        if (h.is_complex()) return py::cast(Eigen::MatrixXcd(h.complex));
        return py::cast(Eigen::MatrixXd(h.real));
      }, py::arg("ensemble"), py::arg("seed"));
  m.def("eigenvalues", [](const py::dict& ensemble, std::uint64_t seed) {
        return eigendecompose(sample_matrix(make_spec_from_config(to_keyvalues(ensemble)), seed), false).eigenvalues;
      }, py::arg("ensemble"), py::arg("seed"));
  m.def("gaussian_tridiagonal_eigenvalues", [](int n, int beta, std::uint64_t seed) {
        return tridiagonal_eigenvalues(sample_gaussian_tridiagonal(n, symmetry_from_beta(beta), seed));
      }, py::arg("n"), py::arg("beta"), py::arg("seed"));

  m.def("density_semicircle", py::vectorize(density_semicircle));
  m.def("counting_semicircle", py::vectorize(counting_semicircle));
  m.def("stieltjes_semicircle", &stieltjes_semicircle, py::arg("z"));
  m.def("stieltjes_empirical", [](const std::vector<double>& ev, cplx z) {
        return stieltjes_empirical(SpectralData::from_eigenvalues(ev), z);
      }, py::arg("eigenvalues"), py::arg("z"));
  m.def("classical_locations", &classical_locations, py::arg("n"));

  m.def("sine_kernel", py::vectorize(sine_kernel));
  m.def("sine_gap_probability", &sine_gap_probability, py::arg("alpha"), py::arg("order") = 48);
  m.def("gap_density", py::vectorize(gap_density));
  m.def("gap_cdf", py::vectorize(gap_cdf_reference));
  m.def("wigner_surmise", py::vectorize(wigner_surmise), py::arg("s"), py::arg("beta"));
  m.def("tracy_widom_cdf", &tracy_widom_cdf, py::arg("s"), py::arg("beta") = 2, py::arg("order") = 80);
  m.def("airy_kernel", &airy_kernel, py::arg("x"), py::arg("y"));
  m.def("catalan_moment", &catalan_moment, py::arg("k"));

  m.def("unfold_gaps", [](const std::vector<std::vector<double>>& spectra, double energy, double window) {
        std::vector<SpectralData> s;
        for (const auto& ev : spectra) s.push_back(SpectralData::from_eigenvalues(ev));
        return unfold_gaps(s, energy, window).gaps;
      }, py::arg("spectra"), py::arg("energy") = 0.0, py::arg("window") = -1.0);

  m.def("run_experiment", [](const std::string& kind, const py::dict& config, const std::string& out, int workers,
                             bool plot_data) {
        auto kv = to_keyvalues(config);
        kv.set("out", out);
        kv.set("workers", std::to_string(workers));
        auto c = ExperimentConfig::from_keyvalues(parse_experiment_kind(kind), kv);
        c.plot_data = plot_data;
        RunManifest man;
        {
          py::gil_scoped_release release;
          man = run_experiment(c);
        }
        return manifest_dict(man);
      }, py::arg("kind"), py::arg("config"), py::arg("out"), py::arg("workers") = 1, py::arg("plot_data") = false);
  m.def("verify_manifest", [](const std::string& dir) { return verify_manifest(dir); }, py::arg("out_dir"));
}
