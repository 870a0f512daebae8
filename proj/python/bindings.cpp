#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kpzlab/besov.hpp"
#include "kpzlab/cli.hpp"
#include "kpzlab/constants.hpp"
#include "kpzlab/dynamics.hpp"
#include "kpzlab/experiments.hpp"

namespace py = pybind11;
using namespace kpzlab;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

GridSpec grid_of(py::ssize_t n) { return GridSpec(static_cast<int>(n)); }

LatticeField lattice_from(const ComplexArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  std::vector<cplx> v(a.data(), a.data() + a.size());
  return LatticeField(grid_of(a.size()), std::move(v));
}

SpectralField spectral_from(const ComplexArray& a, bool real) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  std::vector<cplx> v(a.data(), a.data() + a.size());
  return SpectralField(grid_of(a.size()), std::move(v), real);
}

ComplexArray to_array(std::span<const cplx> v) {
  ComplexArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

RealArray real_array(const std::vector<double>& v) {
  RealArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Mollifier mollifier_named(const std::string& name) { return Mollifier::by_name(name); }

py::dict stat_dict(const StatReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["level"] = r.level;
  d["passed"] = r.passed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lattice KPZ / stochastic Burgers toolkit";
  m.attr("__version__") = KPZLAB_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

  py::class_<Scheme>(m, "Scheme")
      .def_readonly("name", &Scheme::name)
      .def_property_readonly("pi", [](const Scheme& s) {
        std::vector<std::pair<int, double>> v;
        for (const auto& a : s.pi) v.emplace_back(a.offset, a.weight);
        return v;
      })
      .def_property_readonly("nu", [](const Scheme& s) {
        std::vector<std::pair<int, double>> v;
        for (const auto& a : s.nu) v.emplace_back(a.offset, a.weight);
        return v;
      })
      .def_property_readonly("mu", [](const Scheme& s) {
        std::vector<std::tuple<int, int, double>> v;
        for (const auto& a : s.mu) v.emplace_back(a.y, a.z, a.weight);
        return v;
      })
      .def("__repr__", [](const Scheme& s) { return "<Scheme " + s.name + ">"; });

  m.def("standard", &preset_standard);
  m.def("sasamoto_spohn", &preset_sasamoto_spohn, py::arg("kappa") = 1.0, py::arg("lam") = 0.5);
  m.def("centered", &preset_centered, py::arg("order"));
  m.def("validate", [](const Scheme& s) {
    const ValidationReport r = validate(s);
    py::dict checks;
    for (const auto& c : r.checks) checks[py::str(c.name)] = c.passed;
    return checks;
  });
  m.def("conservation_residual", [](const Scheme& s, const RealArray& phi) {
    const std::span<const double> v(phi.data(), static_cast<std::size_t>(phi.size()));
    return conservation_residual(s, LatticeField::from_real(grid_of(phi.size()), v));
  });

  m.def("dft_forward", [](const ComplexArray& u) { return to_array(dft_forward(lattice_from(u)).coeff()); },
        "Coefficients for modes -(N-1)/2 ... (N-1)/2.");
  m.def("dft_inverse", [](const ComplexArray& c) { return to_array(dft_inverse(spectral_from(c, false)).values()); });
  m.def("fold_mode", [](long long k, int n) { return fold_mode(k, GridSpec(n)); });

  m.def("correction_constant", [](const Scheme& s, double tol) { return correction_constant(s, {tol, 1 << 20}); },
        py::arg("scheme"), py::arg("abs_tol") = 1e-10);
  m.def("renormalization_constant", [](const std::string& mollifier, int n) {
    const RenormConstant r = renormalization_constant(mollifier_named(mollifier), GridSpec(n));
    return py::dict(py::arg("continuum") = r.continuum, py::arg("lattice_sum") = r.lattice_sum);
  });
  m.def("discrete_zero_chaos", &discrete_zero_chaos, py::arg("scheme"), py::arg("n"), py::arg("t") = 1.0);
  m.def("vertex_l1", [](int k, int k_trunc) { return vertex_l1_norm(k, {k_trunc, 0.0}).value; }, py::arg("k"),
        py::arg("k_trunc") = 256);
  m.def(
      "kpz_cancellation",
      [](const std::string& mollifier, int k_trunc, double tol) {
        const Cancellation c = kpz_cancellation(mollifier_named(mollifier), k_trunc, {tol, 1 << 22});
        return py::dict(py::arg("symmetric_zero") = c.symmetric_zero, py::arg("scale") = c.scale,
                        py::arg("regularized_limit") = c.regularized_limit,
                        py::arg("regularized_limit_refined") = c.regularized_limit_refined);
      },
      py::arg("mollifier") = "indicator", py::arg("k_trunc") = 64, py::arg("tol") = 1e-7);

  m.def(
      "simulate",
      [](const RealArray& initial, const Scheme& scheme, const std::string& equation, double dt, double t_end,
         std::uint64_t seed, std::uint64_t stream, double renorm_constant, double noise_amplitude, bool nonlinear,
         int snapshot_stride) {
        SimConfig cfg;
        cfg.grid = grid_of(initial.size());
        cfg.scheme = scheme;
        cfg.equation = equation_from_string(equation);
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.seed = seed;
        cfg.stream = stream;
        cfg.renorm_constant = renorm_constant;
        cfg.noise_amplitude = noise_amplitude;
        cfg.nonlinear = nonlinear;
        cfg.snapshot_stride = snapshot_stride;
        const std::span<const double> v(initial.data(), static_cast<std::size_t>(initial.size()));
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run(cfg, dft_forward(LatticeField::from_real(cfg.grid, v)));
        }
        const auto n = static_cast<py::ssize_t>(cfg.grid.size());
        RealArray states({static_cast<py::ssize_t>(tr.states.size()), n});
        auto w = states.mutable_unchecked<2>();
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
          const std::vector<double> x = dft_inverse(tr.states[i]).real_part();
          for (py::ssize_t l = 0; l < n; ++l) w(static_cast<py::ssize_t>(i), l) = x[static_cast<std::size_t>(l)];
        }
        py::object blown = tr.blown_up_at ? py::object(py::float_(*tr.blown_up_at)) : py::none();
        return py::dict(py::arg("times") = real_array(tr.times), py::arg("states") = states,
                        py::arg("blown_up_at") = blown);
      },
      py::arg("initial"), py::arg("scheme"), py::arg("equation") = "burgers", py::arg("dt") = 1e-4,
      py::arg("t_end") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0, py::arg("renorm_constant") = 0.0,
      py::arg("noise_amplitude") = 1.0, py::arg("nonlinear") = true, py::arg("snapshot_stride") = 0);

  m.def(
      "besov_profile",
      [](const RealArray& values, double p) {
        const std::span<const double> v(values.data(), static_cast<std::size_t>(values.size()));
        return real_array(besov_profile(dft_forward(LatticeField::from_real(grid_of(values.size()), v)), p).block_norms);
      },
      py::arg("values"), py::arg("p") = INFINITY, "Block norms for j = -1 ... j_max.");
  m.def(
      "estimate_regularity",
      [](const std::vector<RealArray>& ensemble, double p, int j_lo, int j_hi) {
        std::vector<SpectralField> fields;
        for (const auto& a : ensemble) {
          const std::span<const double> v(a.data(), static_cast<std::size_t>(a.size()));
          fields.push_back(dft_forward(LatticeField::from_real(grid_of(a.size()), v)));
        }
        const RegularityFit f = estimate_regularity(fields, p, j_lo, j_hi);
        return py::dict(py::arg("alpha_hat") = f.alpha_hat, py::arg("r_squared") = f.r_squared,
                        py::arg("j_lo") = f.j_lo, py::arg("j_hi") = f.j_hi);
      },
      py::arg("ensemble"), py::arg("p") = INFINITY, py::arg("j_lo") = -2, py::arg("j_hi") = -2);

  m.def(
      "invariance",
      [](int n, const Scheme& scheme, int replicas, double t_end, double dt, std::uint64_t seed) {
        InvarianceConfig cfg;
        cfg.n = n;
        cfg.scheme = scheme;
        cfg.replicas = replicas;
        cfg.t_end = t_end;
        cfg.dt = dt;
        cfg.seed = seed;
        InvarianceReport r;
        {
          py::gil_scoped_release release;
          r = invariance_experiment(cfg);
        }
        py::list tests;
        for (const auto& t : r.tests) tests.append(stat_dict(t));
        return py::dict(py::arg("tests") = tests, py::arg("passed") = r.passed(),
                        py::arg("conservative") = r.conservative, py::arg("warning") = r.warning);
      },
      py::arg("n") = 63, py::arg("scheme") = preset_sasamoto_spohn(), py::arg("replicas") = 256,
      py::arg("t_end") = 1.0, py::arg("dt") = 1e-4, py::arg("seed") = 0);

  m.def(
      "feynman_kac",
      [](double t_end, int n_paths, std::uint64_t seed) {
        FeynmanKacConfig cfg;
        cfg.t_end = t_end;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        FeynmanKacReport r;
        {
          py::gil_scoped_release release;
          r = feynman_kac_experiment(cfg);
        }
        return py::dict(py::arg("estimate") = r.estimate.mean, py::arg("std_err") = r.estimate.std_err,
                        py::arg("reference") = r.reference, py::arg("z_score") = r.z_score,
                        py::arg("matches") = r.matches, py::arg("jensen_holds") = r.jensen.holds);
      },
      py::arg("t_end") = 0.25, py::arg("n_paths") = 10000, py::arg("seed") = 0);

  m.def(
      "cole_hopf",
      [](std::vector<double> dts, int replicas, double t_end, std::uint64_t seed) {
        ColeHopfConfig cfg;
        cfg.dts = std::move(dts);
        cfg.replicas = replicas;
        cfg.t_end = t_end;
        cfg.seed = seed;
        ColeHopfReport r;
        {
          py::gil_scoped_release release;
          r = cole_hopf_check(cfg);
        }
        return py::dict(py::arg("sup_errors") = r.sup_errors, py::arg("dt_order") = r.dt_order,
                        py::arg("renorm_constant") = r.renorm_constant);
      },
      py::arg("dts") = std::vector<double>{4e-5, 2e-5, 1e-5}, py::arg("replicas") = 8, py::arg("t_end") = 0.1,
      py::arg("seed") = 0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli_main(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
