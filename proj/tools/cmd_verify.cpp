#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "inlm/elliptic.hpp"
#include "inlm/identities.hpp"
#include "inlm/nn.hpp"
#include "inlm/rng.hpp"
#include "inlm/solver.hpp"
#include "inlm/trace_io.hpp"

namespace cli {
namespace {

struct VerifyOptions {
  std::vector<std::string> suites;
  std::vector<std::string> problems;
};

struct CheckResult {
  std::string suite;
  std::string problem;
  std::string detail;
  bool pass = false;
};

using CheckFn = std::function<CheckResult()>;

bool wanted(const std::vector<std::string>& filter, const std::string& tag) {
  if (filter.empty()) return true;
  for (const auto& f : filter) {
    if (f == tag) return true;
  }
  return false;
}

inlm::SolverConfig scalar_cfg(double lambda, double alpha) {
  inlm::SolverConfig cfg;
  cfg.lambda.constant = lambda;
  cfg.alpha.constant = alpha;
  cfg.cg.mode = inlm::CgMode::ToTolerance;
  cfg.cg.rel_tol = 1e-14;
  cfg.cg.max_iters = 100;
  return cfg;
}

CheckResult check_adjoint_pde(int n) {
  const auto phantom = inlm::make_phantom(n, 1e-12);
  const inlm::EllipticModel model(
      inlm::EllipticProblem::make(n, phantom.g_grid, 1e-13));
  const double worst = inlm::check_adjoint(model, phantom.c_true, 100, 42);
  return {"adjoint", "pde",
          "n=" + std::to_string(n) + " worst=" + inlm::format_number(worst),
          worst <= 1e-10};
}

CheckResult check_adjoint_nn() {
  const auto ds = inlm::synth_dataset(200, 0, 14, 0.0, 5);
  const inlm::NnModel model(ds.prob);
  inlm::Rng rng(6);
  const auto p = rng.uniform_vector(model.domain_dim(), -1.0, 1.0);
  const double worst = inlm::check_adjoint(model, p, 100, 42);
  return {"adjoint", "nn", "worst=" + inlm::format_number(worst),
          worst <= 1e-10};
}

CheckResult check_fd_pde() {
  const int n = 8;
  const auto phantom = inlm::make_phantom(n, 1e-12);
  const auto prob = inlm::EllipticProblem::make(n, phantom.g_grid, 1e-14);
  const inlm::EllipticModel model(prob);
  inlm::Rng rng(4);
  auto h = rng.normal_vector(model.domain_dim());
  h = inlm::scaled(1.0 / inlm::norm(h), h);
  const auto u = model.apply(phantom.c_true);
  const auto jh = inlm::pde_jacobian_apply(prob, phantom.c_true, u, h);
  const double t = 1e-6;
  const auto fd = inlm::scaled(
      1.0 / t,
      inlm::sub(model.apply(inlm::axpy(phantom.c_true, t, h)), u));
  const double rel = inlm::norm(inlm::sub(jh, fd)) / inlm::norm(jh);
  return {"fd", "pde", "rel=" + inlm::format_number(rel), rel <= 1e-5};
}

CheckResult check_fd_nn() {
  // piecewise-linear network: finite differences are exact while no preact
  // crosses a knee; small parameters keep everything in the inner segment
  const auto ds = inlm::synth_dataset(50, 0, 6, 0.0, 12);
  const inlm::NnModel model(ds.prob);
  inlm::Rng rng(13);
  const auto p = rng.uniform_vector(model.domain_dim(), -0.5, 0.5);
  const auto h = rng.normal_vector(model.domain_dim());
  const auto f0 = model.apply(p);
  const auto jh = model.jacobian_apply(p, h);
  const double t = 1e-3;
  const auto fd =
      inlm::scaled(1.0 / t, inlm::sub(model.apply(inlm::axpy(p, t, h)), f0));
  const double rel = inlm::norm(inlm::sub(jh, fd)) /
                     (inlm::norm(jh) + 1e-300);
  return {"fd", "nn", "rel=" + inlm::format_number(rel), rel <= 1e-9};
}

CheckResult check_cg() {
  inlm::Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 4 + static_cast<std::size_t>(trial) % 13;
    std::vector<double> m(dim * dim);
    for (auto& v : m) v = rng.normal();
    const inlm::LinearModel model(dim, dim, m);
    const auto r = rng.normal_vector(dim);
    const double lambda = 0.5;
    inlm::CgConfig cfg;
    cfg.mode = inlm::CgMode::ToTolerance;
    cfg.rel_tol = 1e-12;
    cfg.max_iters = 500;
    const inlm::Vector x(dim, 0.0);
    const auto [s, rep] = inlm::cg_normal_solve(model, x, r, lambda, cfg);
    const auto atr = model.adjoint_apply(x, r);
    // true normal residual (A^T A + lambda I) s - A^T r, recomputed
    const auto lhs = inlm::axpy(
        model.adjoint_apply(x, model.jacobian_apply(x, s)), lambda, s);
    const double rel = inlm::norm(inlm::sub(lhs, atr)) / inlm::norm(atr);
    worst = std::max(worst, rel);
  }
  return {"cg", "linear", "worst_rel=" + inlm::format_number(worst),
          worst <= 1e-8};
}

CheckResult check_lemma_scalar() {
  const inlm::LinearModel model = inlm::LinearModel::scalar(2.0);
  bool all = true;
  double worst = 0.0;
  std::string worst_name;
  for (double alpha : {0.0, 0.3, 0.9}) {
    auto cfg = scalar_cfg(1.0, alpha);
    cfg.max_outer_iters = 50;
    cfg.exact_zero_tol = 0.0;
    cfg.q = 0.19;
    const auto [final, trace] = inlm::run_exact(model, {2.0}, {0.0}, cfg);
    const auto report = inlm::verify_iteration_identities(model, trace, {2.0},
                                                          cfg, {{1.0}});
    for (const auto& c : report.checks) {
      if (!c.pass) all = false;
      if (c.max_violation > worst) {
        worst = c.max_violation;
        worst_name = c.name;
      }
    }
  }
  return {"lemma", "scalar",
          "worst=" + inlm::format_number(worst) +
              (worst_name.empty() ? "" : " (" + worst_name + ")"),
          all};
}

CheckResult check_monotonicity_scalar() {
  const inlm::LinearModel model = inlm::LinearModel::scalar(2.0);
  auto cfg = scalar_cfg(4.5, 0.1);
  cfg.delta = 0.05;
  cfg.tau = 6.0;
  cfg.q = 0.19;
  cfg.max_outer_iters = 10000;
  const auto [final, trace] = inlm::run_noisy(model, {2.05}, {0.0}, cfg);
  if (!trace.k_star) return {"monotonicity", "scalar", "no k*", false};
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < *trace.k_star; ++k) {
    const double dw = std::abs(trace.w_hist[k][0] - 1.0);
    const double dx = std::abs(trace.x_hist[k + 1][0] - 1.0);
    if (dx > dw * (1.0 + 1e-12)) {
      ok = false;
      worst = std::max(worst, dx - dw);
    }
  }
  return {"monotonicity", "scalar",
          ok ? "k*=" + std::to_string(*trace.k_star)
             : "violation=" + inlm::format_number(worst),
          ok};
}

CheckResult check_wtcc() {
  const inlm::SatLin act;
  const double worst = inlm::check_scalar_wtcc(act, 1000000, 17);
  return {"wtcc", "nn", "worst=" + inlm::format_number(worst),
          worst <= 0.5 + 1e-12};
}

CheckResult check_kstar() {
  const inlm::LinearModel model = inlm::LinearModel::scalar(2.0);
  const double q = 0.5, rho = 2.5;
  bool all = true;
  int max_kstar = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const double delta = 0.01 + 0.005 * static_cast<double>(i);
    const double lambda = 4.1 + 0.7 * static_cast<double>(i);
    auto cfg = scalar_cfg(lambda, 0.0);
    cfg.alpha.mode = inlm::AlphaMode::Theory;
    cfg.alpha.rho = rho;
    cfg.alpha.alpha_cap = 0.9;
    cfg.delta = delta;
    cfg.tau = 3.0;
    cfg.q = q;
    cfg.C = 2.0;
    cfg.max_outer_iters = 1000000;
    const auto [final, trace] = inlm::run_noisy(model, {2.0 + delta}, {0.0},
                                                cfg);
    if (!trace.k_star) {
      all = false;
      continue;
    }
    const double bound = inlm::kstar_bound(lambda, q, cfg.tau, delta, 0.0,
                                           rho, cfg.alpha.theta.series_sum);
    if (static_cast<double>(*trace.k_star) > bound) all = false;
    max_kstar = std::max(max_kstar, *trace.k_star);
  }
  return {"kstar", "scalar", "max_k*=" + std::to_string(max_kstar), all};
}

void run_verify(const VerifyOptions& opt) {
  struct Entry {
    const char* suite;
    const char* problem;
    CheckFn fn;
  };
  const std::vector<Entry> checks = {
      {"adjoint", "pde", [] { return check_adjoint_pde(4); }},
      {"adjoint", "pde", [] { return check_adjoint_pde(8); }},
      {"adjoint", "pde", [] { return check_adjoint_pde(16); }},
      {"adjoint", "nn", check_adjoint_nn},
      {"fd", "pde", check_fd_pde},
      {"fd", "nn", check_fd_nn},
      {"cg", "linear", check_cg},
      {"lemma", "scalar", check_lemma_scalar},
      {"monotonicity", "scalar", check_monotonicity_scalar},
      {"wtcc", "nn", check_wtcc},
      {"kstar", "scalar", check_kstar},
  };

  int failures = 0, ran = 0;
  for (const auto& entry : checks) {
    if (!wanted(opt.suites, entry.suite) ||
        !wanted(opt.problems, entry.problem)) {
      continue;
    }
    const CheckResult r = entry.fn();
    ++ran;
    if (!r.pass) ++failures;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << std::left
              << std::setw(14) << r.suite << std::setw(8) << r.problem
              << r.detail << "\n";
  }
  if (ran == 0) throw CLI::ValidationError("verify", "no matching checks");
  if (failures > 0) {
    throw SuiteFailure("verification failed: " + std::to_string(failures) +
                       " of " + std::to_string(ran) + " checks");
  }
  std::cout << "all " << ran << " checks passed\n";
}

}  // namespace

void register_verify(CLI::App& app) {
  auto opt = std::make_shared<VerifyOptions>();
  CLI::App* cmd = app.add_subcommand(
      "verify", "Run the solver property and identity suites");
  cmd->add_option("--suite", opt->suites,
                  "filter: adjoint, fd, cg, lemma, monotonicity, wtcc, kstar");
  cmd->add_option("--problem", opt->problems, "filter: scalar, linear, pde, nn");
  cmd->callback([opt] { run_verify(*opt); });
}

}  // namespace cli
