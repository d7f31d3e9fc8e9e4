// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "inlm/elliptic.hpp"
#include "inlm/identities.hpp"
#include "inlm/model.hpp"
#include "inlm/nn.hpp"
#include "inlm/rng.hpp"
#include "inlm/solver.hpp"
#include "inlm/trace_io.hpp"

using namespace inlm;

namespace {

SolverConfig scalar_exact_cfg(double lambda, double alpha) {
  SolverConfig cfg;
  cfg.lambda.constant = lambda;
  cfg.alpha.constant = alpha;
  cfg.cg.mode = CgMode::ToTolerance;
  cfg.cg.rel_tol = 1e-14;
  cfg.cg.max_iters = 100;
  return cfg;
}

SolverConfig pde_cfg(double lambda, double alpha, int iters) {
  SolverConfig cfg;
  cfg.lambda.constant = lambda;
  cfg.alpha.constant = alpha;
  cfg.cg.mode = CgMode::Truncated;
  cfg.cg.max_iters = 2;
  cfg.max_outer_iters = iters;
  return cfg;
}

// ---- criterion 1: LM degeneration ------------------------------------------

bool lm_degeneration_on(const ForwardModel& model, const Vector& y,
                        const Vector& x0, SolverConfig cfg, std::string& why) {
  cfg.alpha.constant = 0.0;
  cfg.exact_zero_tol = 0.0;
  const auto [final, trace] = run_exact(model, y, x0, cfg);
  for (std::size_t k = 0; k < trace.w_hist.size(); ++k) {
    if (trace.w_hist[k] != trace.x_hist[k]) {
      why = "w_k != x_k at k=" + std::to_string(k);
      return false;
    }
  }
  return true;
}

bool crit_lm_degeneration(std::string& why) {
  {
    auto cfg = scalar_exact_cfg(1.0, 0.0);
    cfg.max_outer_iters = 30;
    if (!lm_degeneration_on(LinearModel::scalar(2.0), {2.0}, {0.0}, cfg, why)) {
      why = "scalar: " + why;
      return false;
    }
  }
  {
    const int n = 8;
    const auto phantom = make_phantom(n);
    const EllipticModel model(EllipticProblem::make(n, phantom.g_grid));
    auto cfg = pde_cfg(2.0, 0.0, 10);
    if (!lm_degeneration_on(model, phantom.u_true,
                            Vector(model.domain_dim(), 0.0), cfg, why)) {
      why = "pde: " + why;
      return false;
    }
  }
  {
    const auto ds = synth_dataset(200, 0, 14, 0.0, 3);
    const NnModel model(ds.prob);
    SolverConfig cfg;
    cfg.cg.max_iters = 3;
    cfg.max_outer_iters = 5;
    if (!lm_degeneration_on(model, ds.prob.targets,
                            Vector(model.domain_dim(), 0.0), cfg, why)) {
      why = "nn: " + why;
      return false;
    }
  }
  return true;
}

// ---- criterion 2: adjoint identity -----------------------------------------

bool crit_adjoint(std::string& why) {
  for (int n : {4, 8, 16}) {
    const auto phantom = make_phantom(n, 1e-12);
    const EllipticModel model(
        EllipticProblem::make(n, phantom.g_grid, 1e-13));
    const double worst = check_adjoint(model, phantom.c_true, 100, 42);
    if (worst > 1e-10) {
      why = "pde n=" + std::to_string(n) + ": " + format_number(worst);
      return false;
    }
  }
  const auto ds = synth_dataset(300, 0, 14, 0.0, 5);
  const NnModel model(ds.prob);
  Rng rng(6);
  const auto p = rng.uniform_vector(model.domain_dim(), -1.0, 1.0);
  const double worst = check_adjoint(model, p, 100, 42);
  if (worst > 1e-10) {
    why = "nn: " + format_number(worst);
    return false;
  }
  return true;
}

// ---- criterion 3: jacobian finite differences ------------------------------

bool crit_fd(std::string& why) {
  {
    const int n = 8;
    const auto phantom = make_phantom(n, 1e-12);
    const auto prob = EllipticProblem::make(n, phantom.g_grid, 1e-14);
    const EllipticModel model(prob);
    Rng rng(4);
    auto h = rng.normal_vector(model.domain_dim());
    h = scaled(1.0 / norm(h), h);
    const auto u = model.apply(phantom.c_true);
    const auto jh = pde_jacobian_apply(prob, phantom.c_true, u, h);
    const double t = 1e-6;
    const auto fd =
        scaled(1.0 / t, sub(model.apply(axpy(phantom.c_true, t, h)), u));
    const double rel = norm(sub(jh, fd)) / norm(jh);
    if (rel > 1e-5) {
      why = "pde rel=" + format_number(rel);
      return false;
    }
  }
  {
    const auto ds = synth_dataset(50, 0, 6, 0.0, 12);
    const NnModel model(ds.prob);
    Rng rng(13);
    const auto p = rng.uniform_vector(model.domain_dim(), -0.5, 0.5);
    const auto h = rng.normal_vector(model.domain_dim());
    const auto f0 = model.apply(p);
    const auto jh = model.jacobian_apply(p, h);
    const double t = 1e-3;
    const auto fd = scaled(1.0 / t, sub(model.apply(axpy(p, t, h)), f0));
    const double rel = norm(sub(jh, fd)) / (norm(jh) + 1e-300);
    if (rel > 1e-9) {
      why = "nn rel=" + format_number(rel);
      return false;
    }
  }
  return true;
}

// ---- criterion 4: CG against a dense direct solve --------------------------

bool crit_cg_oracle(std::string& why) {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 4 + static_cast<std::size_t>(trial) % 13;
    std::vector<double> m(dim * dim);
    for (auto& v : m) v = rng.normal();
    const LinearModel model(dim, dim, m);
    const auto r = rng.normal_vector(dim);
    const double lambda = 0.5;
    CgConfig cfg;
    cfg.mode = CgMode::ToTolerance;
    cfg.rel_tol = 1e-12;
    cfg.max_iters = 1000;
    const Vector x(dim, 0.0);
    const auto [s, rep] = cg_normal_solve(model, x, r, lambda, cfg);
    Eigen::MatrixXd A(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) A(i, j) = m[i * dim + j];
    }
    Eigen::MatrixXd G = A.transpose() * A +
                        lambda * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd rhs =
        A.transpose() * Eigen::Map<const Eigen::VectorXd>(r.data(), dim);
    Eigen::VectorXd want = G.ldlt().solve(rhs);
    double diff = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      diff += (s[j] - want(j)) * (s[j] - want(j));
      ref += want(j) * want(j);
    }
    const double rel = std::sqrt(diff) / std::sqrt(ref);
    if (rel > 1e-8) {
      why = "trial " + std::to_string(trial) + " rel=" + format_number(rel);
      return false;
    }
  }
  return true;
}

// ---- criterion 5: per-iteration identity suite -----------------------------

bool crit_lemma(std::string& why) {
  const LinearModel model = LinearModel::scalar(2.0);
  for (double alpha : {0.0, 0.3, 0.9}) {
    auto cfg = scalar_exact_cfg(1.0, alpha);
    cfg.max_outer_iters = 50;
    cfg.exact_zero_tol = 0.0;
    cfg.q = 0.19;  // lambda = 1 admits any q < lambda/(lambda + C^2), C = 2
    const auto [final, trace] = run_exact(model, {2.0}, {0.0}, cfg);
    const auto report =
        verify_iteration_identities(model, trace, {2.0}, cfg, {{1.0}});
    if (!report.gain_checked) {
      why = "gain not checked";
      return false;
    }
    for (const auto& c : report.checks) {
      if (!c.pass) {
        why = c.name + " alpha=" + format_number(alpha) +
              " viol=" + format_number(c.max_violation) +
              " k=" + std::to_string(c.worst_k);
        return false;
      }
    }
  }
  return true;
}

// ---- criterion 6: discrepancy stop at k* = 2 -------------------------------

bool crit_discrepancy(std::string& why) {
  const LinearModel model = LinearModel::scalar(2.0);
  auto cfg = scalar_exact_cfg(1.0, 0.0);
  cfg.delta = 0.1;
  cfg.tau = 1.0;
  cfg.max_outer_iters = 50;
  const auto [final, trace] = run_noisy(model, {2.1}, {0.0}, cfg);
  if (!trace.k_star || *trace.k_star != 2) {
    why = "k*=" +
          (trace.k_star ? std::to_string(*trace.k_star) : std::string("none"));
    return false;
  }
  const double res = trace.records.back().residual_norm;
  if (std::abs(res - 0.084) > 1e-12 || res > 0.1) {
    why = "residual=" + format_number(res);
    return false;
  }
  return true;
}

// ---- criterion 7: stopping-index bound -------------------------------------

bool crit_kstar_bound(std::string& why) {
  const LinearModel model = LinearModel::scalar(2.0);
  const double q = 0.5, rho = 2.5, eta = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double delta = 0.01 + 0.005 * i;
    const double lambda = 4.1 + 0.7 * i;  // all > q C^2/(1-q) = 4 with C = 2
    auto cfg = scalar_exact_cfg(lambda, 0.0);
    cfg.alpha.mode = AlphaMode::Theory;
    cfg.alpha.rho = rho;
    cfg.alpha.alpha_cap = 0.9;
    cfg.delta = delta;
    cfg.tau = 3.0;  // > (eta+1)/(q-eta) = 2
    cfg.eta = eta;
    cfg.q = q;
    cfg.C = 2.0;
    cfg.max_outer_iters = 1000000;
    const auto [final, trace] = run_noisy(model, {2.0 + delta}, {0.0}, cfg);
    if (!trace.k_star) {
      why = "no k* for delta=" + format_number(delta);
      return false;
    }
    const double bound = kstar_bound(lambda, q, cfg.tau, delta, eta, rho,
                                     cfg.alpha.theta.series_sum);
    if (static_cast<double>(*trace.k_star) > bound) {
      why = "k*=" + std::to_string(*trace.k_star) +
            " > bound=" + format_number(bound);
      return false;
    }
  }
  return true;
}

// ---- criteria 8/9: PDE reproduction runs -----------------------------------

struct PdeRun {
  RunTrace full;             // fixed-iteration trace with distances
  std::optional<int> k_star;  // Morozov stop on a separate run
};

PdeRun pde_run(const EllipticModel& model, const Phantom& phantom,
               const Vector& y, double delta, double lambda, double alpha,
               int iters) {
  PdeRun out;
  auto cfg = pde_cfg(lambda, alpha, iters);
  cfg.exact_zero_tol = 0.0;
  const auto [fx, trace] =
      run_exact(model, y, Vector(model.domain_dim(), 0.0), cfg,
                &phantom.c_true);
  out.full = trace;
  if (delta > 0.0) {
    auto ncfg = pde_cfg(lambda, alpha, iters);
    ncfg.delta = delta;
    ncfg.tau = 1.0;
    const auto [nx, ntrace] =
        run_noisy(model, y, Vector(model.domain_dim(), 0.0), ncfg,
                  &phantom.c_true);
    out.k_star = ntrace.k_star;
  }
  return out;
}

std::size_t argmin_distance(const RunTrace& trace) {
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    if (trace.records[k].distance && *trace.records[k].distance < best_d) {
      best_d = *trace.records[k].distance;
      best = k;
    }
  }
  return best;
}

bool crit_semiconvergence(std::string& why) {
  const int n = 32, iters = 200;
  const auto phantom = make_phantom(n);
  const EllipticModel model(EllipticProblem::make(n, phantom.g_grid));
  const auto [y, delta] = add_relative_noise(phantom.u_true, 0.01, 7);

  // damping small enough that the semi-convergence turn falls inside the
  // 200-iteration window at this grid size
  const double lambda = 0.02;
  const auto run0 = pde_run(model, phantom, y, delta, lambda, 0.0, iters);
  const auto run6 = pde_run(model, phantom, y, delta, lambda, 0.6, iters);

  for (const auto* run : {&run0, &run6}) {
    const std::size_t kmin = argmin_distance(run->full);
    const auto& recs = run->full.records;
    if (kmin == 0 || kmin + 1 >= recs.size()) {
      why = "distance minimum not interior (k=" + std::to_string(kmin) + ")";
      return false;
    }
    if (*recs.back().distance <= *recs[kmin].distance) {
      why = "distance does not increase after its minimum";
      return false;
    }
  }
  if (argmin_distance(run6.full) > argmin_distance(run0.full)) {
    why = "alpha=0.6 minimum at k=" +
          std::to_string(argmin_distance(run6.full)) + " later than alpha=0 (" +
          std::to_string(argmin_distance(run0.full)) + ")";
    return false;
  }
  if (!run0.k_star || !run6.k_star) {
    why = "Morozov stop did not trigger";
    return false;
  }
  return true;
}

bool crit_noiseless_speed(std::string& why) {
  const int n = 32, iters = 100;
  const auto phantom = make_phantom(n);
  const EllipticModel model(EllipticProblem::make(n, phantom.g_grid));
  const auto run0 =
      pde_run(model, phantom, phantom.u_true, 0.0, 2.0, 0.0, iters);
  const auto run6 =
      pde_run(model, phantom, phantom.u_true, 0.0, 2.0, 0.6, iters);
  const double r0 = run0.full.records.back().residual_norm;
  const double r6 = run6.full.records.back().residual_norm;
  if (r6 > r0) {
    why = "residual alpha=0.6 (" + format_number(r6) + ") > alpha=0 (" +
          format_number(r0) + ")";
    return false;
  }
  return true;
}

// ---- criterion 10: naive division ------------------------------------------

bool crit_naive_division(std::string& why) {
  const int n = 16;
  const double tol = 1e-13;
  const auto phantom = make_phantom(n, tol);
  const auto c = naive_reconstruction(n, phantom.u_true, phantom.g_grid);
  const double rel = norm(sub(c, phantom.c_true)) / norm(phantom.c_true);
  // the division amplifies the forward-solve error by at most
  // ||L|| / min|u| <= (4/h^2 + max c) / min u; allow 10x that
  const double h = 1.0 / (n + 1);
  double cmax = 0.0, umin = 1e300;
  for (double v : phantom.c_true) cmax = std::max(cmax, v);
  for (double v : phantom.u_true) umin = std::min(umin, v);
  const double amp = (4.0 / (h * h) + cmax) * norm(phantom.u_true) /
                     (umin * norm(phantom.c_true));
  if (rel > 10.0 * tol * amp) {
    why = "noiseless rel=" + format_number(rel) +
          " limit=" + format_number(10.0 * tol * amp);
    return false;
  }
  const auto [u_noisy, delta] = add_relative_noise(phantom.u_true, 0.01, 77);
  const auto c_noisy = naive_reconstruction(n, u_noisy, phantom.g_grid);
  const double rel_noisy =
      norm(sub(c_noisy, phantom.c_true)) / norm(phantom.c_true);
  if (rel_noisy <= 1.0) {
    why = "noisy rel=" + format_number(rel_noisy) + " did not exceed 1";
    return false;
  }
  return true;
}

// ---- criterion 11: wTCC constant -------------------------------------------

bool crit_wtcc(std::string& why) {
  const SatLin act;
  const double worst = check_scalar_wtcc(act, 1000000, 17);
  if (worst > 0.5 + 1e-12) {
    why = "worst=" + format_number(worst);
    return false;
  }
  return true;
}

// ---- criterion 12: NN desk-scale training ----------------------------------

RunTrace nn_train(const NnProblem& prob, double alpha, int epochs,
                  double lambda) {
  const NnModel model(prob);
  const Vector y(prob.targets.begin(),
                 prob.targets.begin() + static_cast<long>(prob.n_train));
  SolverConfig cfg;
  cfg.alpha.constant = alpha;
  cfg.lambda.constant = lambda;
  cfg.cg.mode = CgMode::Truncated;
  cfg.cg.max_iters = 3;
  cfg.max_outer_iters = epochs;
  cfg.exact_zero_tol = 0.0;
  return run_exact(model, y, Vector(model.domain_dim(), 0.0), cfg).second;
}

bool crit_nn_training(std::string& why) {
  const double lambda = 1.0;
  const auto ds = synth_dataset(10000, 1000, 14, 0.01, 3);
  const auto t05 = nn_train(ds.prob, 0.05, 10, lambda);
  const auto t00 = nn_train(ds.prob, 0.0, 10, lambda);
  const double perf = performance(ds.prob, t05.final_x);
  if (perf < 0.90) {
    why = "performance=" + format_number(perf);
    return false;
  }
  const double rel05 =
      t05.records[6].residual_norm / t05.records[0].residual_norm;
  const double rel00 =
      t00.records[6].residual_norm / t00.records[0].residual_norm;
  if (rel05 > rel00) {
    why = "epoch-6 rel residual alpha=0.05 (" + format_number(rel05) +
          ") above alpha=0 (" + format_number(rel00) + ")";
    return false;
  }
  return true;
}

// ---- criterion 13: determinism ---------------------------------------------

std::string pde_trace_bytes() {
  const int n = 16;
  const auto phantom = make_phantom(n);
  const EllipticModel model(EllipticProblem::make(n, phantom.g_grid));
  const auto [y, delta] = add_relative_noise(phantom.u_true, 0.01, 7);
  auto cfg = pde_cfg(2.0, 0.6, 50);
  cfg.delta = delta;
  cfg.tau = 1.0;
  const auto [fx, trace] =
      run_noisy(model, y, Vector(model.domain_dim(), 0.0), cfg,
                &phantom.c_true);
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

std::string nn_trace_bytes() {
  const auto ds = synth_dataset(2000, 200, 14, 0.01, 3);
  const auto trace = nn_train(ds.prob, 0.05, 10, 1.0);
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

bool crit_determinism(std::string& why) {
  if (pde_trace_bytes() != pde_trace_bytes()) {
    why = "pde trace bytes differ between identical runs";
    return false;
  }
  if (nn_trace_bytes() != nn_trace_bytes()) {
    why = "nn trace bytes differ between identical runs";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "lm-degeneration", crit_lm_degeneration},
      {2, "adjoint-identity", crit_adjoint},
      {3, "jacobian-fd", crit_fd},
      {4, "cg-oracle", crit_cg_oracle},
      {5, "iteration-identities", crit_lemma},
      {6, "discrepancy-stop", crit_discrepancy},
      {7, "kstar-bound", crit_kstar_bound},
      {8, "semi-convergence", crit_semiconvergence},
      {9, "noiseless-speed", crit_noiseless_speed},
      {10, "naive-division", crit_naive_division},
      {11, "wtcc-constant", crit_wtcc},
      {12, "nn-training", crit_nn_training},
      {13, "determinism", crit_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string why;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.fn(why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s  %2d %-22s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id,
                c.name, secs, why.empty() ? "" : " — ", why.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
