#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cvtest/bootstrap.hpp"
#include "cvtest/errors.hpp"
#include "cvtest/generators.hpp"
#include "cvtest/harness.hpp"
#include "cvtest/smoothing.hpp"

namespace py = pybind11;

namespace {

cvtest::BootstrapConfig make_boot(std::size_t B, double v,
                                  std::vector<double> alphas,
                                  std::uint64_t seed, bool recv) {
  cvtest::BootstrapConfig cfg;
  cfg.replicates_B = B;
  cfg.smoothing_v = v;
  cfg.alphas = std::move(alphas);
  cfg.seed = seed;
  cfg.reselect_bandwidths = recv;
  return cfg;
}

cvtest::SmoothingConfig make_smoothing(const std::string& kernel,
                                       std::optional<double> h_mean,
                                       std::optional<double> h_var,
                                       std::optional<double> g, bool weighted,
                                       std::optional<double> grid_hi_mean = {},
                                       std::optional<double> grid_hi_var = {},
                                       std::optional<double> var_floor = {}) {
  cvtest::SmoothingConfig sm;
  sm.kernel = cvtest::Kernel::parse(kernel);
  sm.h_mean = h_mean;
  sm.h_var = h_var;
  sm.g = g;
  sm.doubly_weighted = weighted;
  if (grid_hi_mean) sm.grid_hi_frac_mean = *grid_hi_mean;
  if (grid_hi_var) sm.grid_hi_frac_var = *grid_hi_var;
  if (var_floor) sm.variance_floor_frac = *var_floor;
  return sm;
}

py::dict outcome_to_dict(const cvtest::TestOutcome& o) {
  py::dict d;
  d["t_n"] = o.t_observed;
  d["c2_hat"] = o.c2_hat;
  d["p_value"] = o.p_value;
  py::dict rej;
  for (const auto& [alpha, reject] : o.rejections)
    rej[py::float_(alpha)] = reject;
  d["rejections"] = rej;
  d["t_star"] = o.t_star;
  py::dict bw;
  bw["h_mean"] = o.bandwidths_used.h_mean;
  bw["h_var"] = o.bandwidths_used.h_var;
  bw["g"] = o.bandwidths_used.g;
  d["bandwidths"] = bw;
  d["weighted"] = o.weighted;
  return d;
}

cvtest::ModelSpec make_spec(const std::string& model, double c, double theta0,
                            double theta1, std::size_t n, std::size_t burn_in) {
  cvtest::ModelSpec spec;
  spec.id = cvtest::parse_model(model);
  spec.c = c;
  spec.theta0 = theta0;
  spec.theta1 = theta1;
  spec.n = n;
  spec.burn_in = burn_in;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Nonparametric test for proportionality between a regression mean and "
      "standard deviation";

  // Translators run newest-first, so the base class goes first and the
  // derived InputError keeps its more specific ValueError mapping.
  py::register_exception<cvtest::Error>(m, "CvtestError", PyExc_RuntimeError);
  py::register_exception<cvtest::InputError>(m, "InputError",
                                             PyExc_ValueError);

  m.def(
      "run_test",
      [](std::vector<double> x, std::vector<double> y, std::size_t B, double v,
         std::vector<double> alphas, std::uint64_t seed, bool recv,
         const std::string& kernel, std::optional<double> h_mean,
         std::optional<double> h_var, std::optional<double> g, bool weighted,
         std::optional<double> grid_hi_mean, std::optional<double> grid_hi_var,
         std::optional<double> var_floor) {
        cvtest::Sample sample{std::move(x), std::move(y)};
        const auto outcome = cvtest::bootstrap_test(
            sample, make_boot(B, v, std::move(alphas), seed, recv),
            make_smoothing(kernel, h_mean, h_var, g, weighted, grid_hi_mean,
                           grid_hi_var, var_floor));
        return outcome_to_dict(outcome);
      },
      py::arg("x"), py::arg("y"), py::arg("B") = 100, py::arg("v") = 0.1,
      py::arg("alphas") = std::vector<double>{0.025, 0.05, 0.10, 0.20},
      py::arg("seed") = 1, py::arg("recv") = false,
      py::arg("kernel") = "epanechnikov", py::arg("h_mean") = std::nullopt,
      py::arg("h_var") = std::nullopt, py::arg("g") = std::nullopt,
      py::arg("weighted") = false, py::arg("grid_hi_mean") = std::nullopt,
      py::arg("grid_hi_var") = std::nullopt, py::arg("var_floor") = std::nullopt,
      "Bootstrap-calibrated test of a constant ratio between the conditional "
      "mean and standard deviation. Returns a dict with t_n, c2_hat, p_value, "
      "rejections, t_star and the bandwidths used.");

  m.def(
      "generate",
      [](const std::string& model, double c, double theta0, double theta1,
         std::size_t n, std::size_t burn_in, std::uint64_t seed) {
        const auto spec = make_spec(model, c, theta0, theta1, n, burn_in);
        cvtest::rng::Stream stream(seed);
        const auto gen = cvtest::generate(spec, stream);
        py::dict d;
        d["x"] = gen.sample.x;
        d["y"] = gen.sample.y;
        d["innovations"] = gen.innovations;
        if (gen.series) d["series"] = gen.series->raw;
        return d;
      },
      py::arg("model"), py::arg("c") = 1.0, py::arg("theta0") = 1.0,
      py::arg("theta1") = 0.5, py::arg("n") = 100, py::arg("burn_in") = 200,
      py::arg("seed") = 1,
      "Draw one dataset from a named simulation model. Returns x, y, the "
      "standard-normal innovations and (for recursion models) the raw series.");

  m.def(
      "fit",
      [](std::vector<double> x, std::vector<double> y,
         std::optional<double> h_mean, std::optional<double> h_var,
         const std::string& kernel) {
        cvtest::Sample sample{std::move(x), std::move(y)};
        sample.validate();
        const cvtest::Kernel k = cvtest::Kernel::parse(kernel);
        const auto grid = cvtest::default_bandwidth_grid(sample.x);
        cvtest::Bandwidths bw;
        bw.h_mean =
            h_mean ? *h_mean : cvtest::cv_bandwidth(sample, sample.y, k, grid);
        std::vector<double> m_hat = cvtest::local_linear_fit(
            sample.x, sample.y, sample.x, bw.h_mean, k);
        std::vector<double> sq(sample.size());
        for (std::size_t i = 0; i < sq.size(); ++i) {
          const double r = sample.y[i] - m_hat[i];
          sq[i] = r * r;
        }
        bw.h_var = h_var ? *h_var : cvtest::cv_bandwidth(sample, sq, k, grid);
        bw.g = 1.0;  // unused by fit_smoother; must merely be positive
        const auto fit = cvtest::fit_smoother(sample, bw, k);
        py::dict d;
        d["m_hat"] = fit.m_hat;
        d["sigma2_hat"] = fit.sigma2_hat;
        d["residuals"] = fit.residuals;
        d["h_mean"] = bw.h_mean;
        d["h_var"] = bw.h_var;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("h_mean") = std::nullopt,
      py::arg("h_var") = std::nullopt, py::arg("kernel") = "epanechnikov",
      "Local linear fits of the conditional mean and variance (bandwidths "
      "cross-validated unless given). Returns m_hat, sigma2_hat, residuals "
      "and the bandwidths.");

  m.def(
      "simulate",
      [](const std::string& model, double c, double theta0, double theta1,
         std::size_t n, std::size_t burn_in, std::size_t runs, std::size_t B,
         double v, std::vector<double> alphas, std::uint64_t seed,
         unsigned jobs, bool weighted) {
        cvtest::McPlan plan;
        plan.cells.push_back(make_spec(model, c, theta0, theta1, n, burn_in));
        plan.runs = runs;
        plan.boot = make_boot(B, v, std::move(alphas), seed, false);
        plan.smoothing = make_smoothing("epanechnikov", std::nullopt,
                                        std::nullopt, std::nullopt, weighted);
        plan.master_seed = seed;
        plan.jobs = jobs;
        const cvtest::McReport report = cvtest::run_plan(plan);
        const cvtest::CellResult& cell = report.cells.at(0);
        py::dict d;
        d["model"] = cvtest::model_name(cell.model.id);
        d["runs"] = cell.runs;
        d["failures"] = cell.failures;
        d["alphas"] = cell.alphas;
        d["frequencies"] = cell.frequencies;
        d["std_errors"] = cell.std_errors;
        d["mean_c2_hat"] = cell.mean_c2_hat;
        return d;
      },
      py::arg("model"), py::arg("c") = 1.0, py::arg("theta0") = 1.0,
      py::arg("theta1") = 0.5, py::arg("n") = 100, py::arg("burn_in") = 200,
      py::arg("runs") = 100, py::arg("B") = 100, py::arg("v") = 0.1,
      py::arg("alphas") = std::vector<double>{0.025, 0.05, 0.10, 0.20},
      py::arg("seed") = 1, py::arg("jobs") = 0, py::arg("weighted") = false,
      "Monte Carlo rejection frequencies of the test for one model cell.");
}
