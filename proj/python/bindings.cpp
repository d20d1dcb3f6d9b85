#include "nekwave/cli_io.hpp"
#include "nekwave/continuation.hpp"
#include "nekwave/errors.hpp"
#include "nekwave/linear_analysis.hpp"
#include "nekwave/operators.hpp"
#include "nekwave/series.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace nekwave;

namespace {

WaveProblem make_problem(const std::string& name, std::size_t modes, double mu, std::optional<double> depth,
                         double wavelength) {
  if (name == "nekrasov") {
    if (depth) return WaveProblem::nekrasov(modes, mu, Kernel::finite_depth(*depth, wavelength, modes));
    return WaveProblem::nekrasov(modes, mu);
  }
  if (name == "krasovskii") return WaveProblem::krasovskii(modes, mu);
  throw PreconditionViolated("unknown problem '" + name + "'");
}

py::dict point_dict(const BranchPoint& p) {
  py::dict d;
  d["mu"] = p.mu;
  d["coefficients"] = Eigen::VectorXd(p.phi.coeffs());
  d["amplitude"] = p.amplitude;
  d["residual"] = p.residual;
  d["min_denominator"] = p.diagnostics.min_denominator;
  d["max_slope"] = p.diagnostics.max_slope;
  d["positivity_defect"] = p.diagnostics.positivity_defect;
  d["newton_iters"] = p.diagnostics.newton_iters;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nekwave, m) {
  m.doc() = "Spectral solvers for periodic gravity wave integral equations.";

  auto base = py::register_exception<Error>(m, "NekwaveError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("version", &artifact_version);

  m.def(
      "characteristic_values",
      [](std::size_t count, std::size_t modes, std::optional<double> depth, double wavelength) {
        const WaveProblem p = make_problem("nekrasov", modes, 3.0, depth, wavelength);
        std::vector<double> out;
        for (const auto& cv : char_values(linearize(p).B, count)) out.push_back(cv.mu);
        return out;
      },
      py::arg("count") = 4, py::arg("modes") = 64, py::arg("depth") = py::none(), py::arg("wavelength") = 1.0);

  m.def(
      "apply_operator",
      [](const std::string& problem, const Eigen::VectorXd& coeffs, double mu) {
        const WaveProblem p = make_problem(problem, static_cast<std::size_t>(coeffs.size()), mu, std::nullopt, 1.0);
        return Eigen::VectorXd(apply_operator(p, SineSeries(coeffs)).coeffs());
      },
      py::arg("problem"), py::arg("coefficients"), py::arg("mu"));

  m.def(
      "series",
      [](const std::string& problem, std::size_t modes, int order, int mode) {
        const SeriesBranch br = nekrasov_nazarov_series(make_problem(problem, modes, 0.0, std::nullopt, 1.0), mode, order);
        py::dict d;
        d["mu_star"] = br.mu_star;
        d["exponent"] = br.exponent;
        d["sigma"] = br.sigma;
        d["constants"] = br.constants;
        std::vector<Eigen::VectorXd> terms;
        for (const auto& t : br.terms) terms.push_back(t.coeffs());
        d["terms"] = terms;
        return d;
      },
      py::arg("problem") = "nekrasov", py::arg("modes") = 64, py::arg("order") = 5, py::arg("mode") = 1);

  m.def(
      "continue_branch",
      [](const std::string& problem, std::size_t modes, int steps, double ds) {
        ContinuationOptions opt;
        opt.max_steps = steps;
        opt.ds = ds;
        const Branch br = continue_branch(make_problem(problem, modes, 0.0, std::nullopt, 1.0), 1, opt);
        py::dict d;
        d["termination"] = to_string(br.termination);
        d["halvings"] = br.halvings;
        d["mu_interval"] = std::make_pair(br.mu_min, br.mu_max);
        py::list pts;
        for (const auto& p : br.points) pts.append(point_dict(p));
        d["points"] = pts;
        return d;
      },
      py::arg("problem") = "nekrasov", py::arg("modes") = 32, py::arg("steps") = 50, py::arg("ds") = 0.02);

  // Config and result documents cross the boundary as JSON text.
  m.def("_run", [](const std::string& command, const std::string& config) {
    const RunConfig c = parse_config(nlohmann::json::parse(config));
    validate(c);
    return run_command(command, c).to_json().dump();
  });
}
