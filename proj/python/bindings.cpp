#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "wsvie/cli.hpp"
#include "wsvie/expr.hpp"
#include "wsvie/monte_carlo.hpp"
#include "wsvie/operational_matrices.hpp"
#include "wsvie/problems.hpp"
#include "wsvie/svie_solver.hpp"
#include "wsvie/walsh_basis.hpp"

namespace py = pybind11;
using namespace wsvie;

namespace {

template <class T>
py::array_t<T> to_numpy(const Matrix<T>& a) {
  py::array_t<T> out({a.rows(), a.cols()});
  auto view = out.template mutable_unchecked<2>();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) view(i, j) = a(i, j);
  return out;
}

py::array_t<double> to_numpy(const RealVector& v) { return py::array_t<double>(v.size(), v.data()); }

SVIEProblem lookup(const std::string& name, bool twelfth_prefactor) {
  return registry_lookup(name, RegistryOptions{twelfth_prefactor});
}

BrownianPath make_path(std::size_t m, double horizon, std::uint64_t seed, std::uint64_t stream,
                       std::size_t refine, bool zero_noise) {
  return sample_path({seed, stream}, m, refine, horizon, zero_noise ? Noise::zero : Noise::brownian);
}

py::dict stats_dict(const TrialStatistics& s) {
  py::dict d;
  d["problem"] = s.problem;
  d["m"] = s.m;
  d["n"] = s.n;
  d["mean_error"] = s.mean_error;
  d["std_error"] = s.std_error;
  d["ci_lower"] = s.ci_lower;
  d["ci_upper"] = s.ci_upper;
  d["seed"] = s.seed.seed;
  return d;
}

TrialConfig trial_config(unsigned k, std::size_t n, std::uint64_t seed, std::size_t refine,
                         bool zero_noise, unsigned workers) {
  TrialConfig cfg;
  cfg.level = k;
  cfg.trials = n;
  cfg.base = {seed, 0};
  cfg.refine = refine;
  cfg.noise = zero_noise ? Noise::zero : Noise::brownian;
  cfg.workers = workers;
  return cfg;
}

} // namespace

PYBIND11_MODULE(_wsvie, mod) {
  mod.doc() = "Walsh operational-matrix solver for linear stochastic Volterra integral equations";

  auto error = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(mod, "DomainError", error.ptr());
  py::register_exception<CapacityError>(mod, "CapacityError", error.ptr());
  py::register_exception<DimensionError>(mod, "DimensionError", error.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", error.ptr());
  py::register_exception<EvaluationError>(mod, "EvaluationError", error.ptr());
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", error.ptr());
  py::register_exception<SingularSystemError>(mod, "SingularSystemError", error.ptr());
  auto syntax = py::register_exception<expr::SyntaxError>(mod, "SyntaxError", error.ptr());
  py::register_exception<expr::UnknownIdentifierError>(mod, "UnknownIdentifierError", syntax.ptr());
  py::register_exception<expr::EvalError>(mod, "ExprEvalError", error.ptr());

  mod.def("rademacher", &rademacher, py::arg("i"), py::arg("t"));
  mod.def("walsh_eval", &walsh_eval, py::arg("n"), py::arg("t"));
  mod.def("build_transform", [](unsigned k) { return to_numpy(build_transform(k)); }, py::arg("k"));

  py::class_<WalshBasis>(mod, "WalshBasis")
      .def(py::init<unsigned, double>(), py::arg("k"), py::arg("horizon") = 1.0)
      .def_property_readonly("level", &WalshBasis::level)
      .def_property_readonly("size", &WalshBasis::size)
      .def_property_readonly("horizon", &WalshBasis::horizon)
      .def_property_readonly("width", &WalshBasis::width)
      .def("midpoint", &WalshBasis::midpoint)
      .def("cell_of", &WalshBasis::cell_of)
      .def("transform", [](const WalshBasis& b) { return to_numpy(b.transform()); })
      .def("__repr__", [](const WalshBasis& b) {
        return "WalshBasis(k=" + std::to_string(b.level()) + ", horizon=" + std::to_string(b.horizon()) + ")";
      });

  mod.def("build_P", [](unsigned k, double horizon) { return to_numpy(build_P(WalshBasis(k, horizon))); },
          py::arg("k"), py::arg("horizon") = 1.0);
  mod.def(
      "build_PS",
      [](unsigned k, double horizon, std::uint64_t seed, std::size_t refine, bool zero_noise) {
        const WalshBasis basis(k, horizon);
        return to_numpy(build_PS(basis, make_path(basis.size(), horizon, seed, 0, refine, zero_noise)));
      },
      py::arg("k"), py::arg("horizon") = 1.0, py::arg("seed") = 1, py::arg("refine") = 16,
      py::arg("zero_noise") = false);
  mod.def(
      "to_walsh_domain",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& m, double horizon) {
        if (m.ndim() != 2 || m.shape(0) != m.shape(1)) throw DimensionError("expected a square matrix");
        const auto n = static_cast<std::size_t>(m.shape(0));
        unsigned k = 0;
        while ((std::size_t{1} << k) < n) ++k;
        if ((std::size_t{1} << k) != n) throw DimensionError("matrix size must be a power of two");
        RealMatrix a(n, n);
        auto view = m.unchecked<2>();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) a(i, j) = view(i, j);
        return to_numpy(to_walsh_domain(a, WalshBasis(k, horizon)));
      },
      py::arg("matrix"), py::arg("horizon") = 1.0);

  mod.def("registry_names", &registry_names);

  mod.def(
      "solve",
      [](const std::string& problem, unsigned k, std::uint64_t seed, std::size_t refine, bool zero_noise,
         bool twelfth_prefactor) {
        const SVIEProblem p = lookup(problem, twelfth_prefactor);
        const WalshBasis basis(k, p.horizon);
        const BrownianPath path = make_path(basis.size(), p.horizon, seed, 0, refine, zero_noise);
        const SolveResult r = solve(p, basis, path, {seed, 0});
        py::dict out;
        std::vector<double> t(basis.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = basis.midpoint(i);
        out["t"] = to_numpy(t);
        out["x"] = to_numpy(r.cell_values.values);
        out["walsh_coeffs"] = to_numpy(r.walsh_coeffs);
        out["residual"] = r.residual;
        if (p.has_exact()) {
          std::vector<double> exact(t.size());
          for (std::size_t i = 0; i < t.size(); ++i) exact[i] = p.exact(t[i], &path);
          out["exact"] = to_numpy(exact);
        } else {
          out["exact"] = py::none();
        }
        return out;
      },
      py::arg("problem"), py::arg("k"), py::arg("seed") = 1, py::arg("refine") = 16,
      py::arg("zero_noise") = false, py::arg("twelfth_prefactor") = false);

  mod.def(
      "run_trials",
      [](const std::string& problem, unsigned k, std::size_t n, std::uint64_t seed, std::size_t refine,
         bool zero_noise, unsigned workers, bool twelfth_prefactor) {
        const SVIEProblem p = lookup(problem, twelfth_prefactor);
        TrialStatistics s;
        {
          py::gil_scoped_release release;
          s = run_trials(p, trial_config(k, n, seed, refine, zero_noise, workers));
        }
        return stats_dict(s);
      },
      py::arg("problem"), py::arg("k") = 3, py::arg("n") = 50, py::arg("seed") = 1, py::arg("refine") = 16,
      py::arg("zero_noise") = false, py::arg("workers") = 1, py::arg("twelfth_prefactor") = false);

  mod.def(
      "summarize",
      [](const std::vector<double>& errors) { return stats_dict(summarize(errors)); }, py::arg("errors"));

  mod.def(
      "convergence_sweep",
      [](const std::string& problem, const std::vector<unsigned>& levels, std::size_t n, std::uint64_t seed,
         std::size_t refine, bool zero_noise, unsigned workers, bool shared_paths) {
        const SVIEProblem p = lookup(problem, false);
        if (levels.empty()) throw ConfigError("levels must not be empty");
        std::vector<SweepLevel> sweep;
        {
          py::gil_scoped_release release;
          sweep = convergence_sweep(p, levels, trial_config(levels.front(), n, seed, refine, zero_noise, workers),
                                    shared_paths ? LevelCoupling::shared_paths : LevelCoupling::independent_streams);
        }
        py::list out;
        for (const auto& l : sweep) {
          py::dict d;
          d["level"] = l.level;
          d["m"] = l.m;
          d["n"] = l.trials;
          d["stats"] = l.stats ? py::object(stats_dict(*l.stats)) : py::object(py::none());
          py::list probes;
          for (const auto& pr : l.probes) probes.append(py::make_tuple(pr.t, pr.mean_value));
          d["probes"] = probes;
          out.append(d);
        }
        return out;
      },
      py::arg("problem"), py::arg("levels"), py::arg("n") = 50, py::arg("seed") = 1, py::arg("refine") = 16,
      py::arg("zero_noise") = false, py::arg("workers") = 1, py::arg("shared_paths") = true);

  py::class_<expr::Expr>(mod, "Expr")
      .def_property_readonly("source", &expr::Expr::source)
      .def("to_string", &expr::Expr::to_string)
      .def("uses", [](const expr::Expr& e) {
        const expr::Usage u = e.usage();
        py::dict d;
        d["t"] = u.t;
        d["s"] = u.s;
        d["brownian"] = u.brownian;
        return d;
      })
      .def(
          "evaluate",
          [](const expr::Expr& e, double t, std::optional<double> s) { return e.evaluate({t, s, nullptr}); },
          py::arg("t"), py::arg("s") = py::none())
      .def("__repr__", [](const expr::Expr& e) { return "Expr(" + e.to_string() + ")"; });

  mod.def("parse", &expr::parse, py::arg("source"));
  mod.def(
      "error_offset",
      [](const std::string& source) -> std::optional<std::size_t> {
        try {
          expr::parse(source);
        } catch (const expr::SyntaxError& e) {
          return e.offset();
        }
        return std::nullopt;
      },
      py::arg("source"), "Offset of the first syntax error, or None if the source parses.");

  mod.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"svie"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the svie command line; returns (exit_code, stdout, stderr).");
}
