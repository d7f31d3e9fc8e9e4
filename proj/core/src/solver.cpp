#include "inlm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace inlm {

double LambdaSchedule::at(int k) const {
  double v;
  if (!sequence.empty()) {
    const auto idx = std::min<std::size_t>(k, sequence.size() - 1);
    v = sequence[idx];
  } else {
    v = constant;
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("lambda_k must be positive and finite");
  }
  if (lambda_max && v > *lambda_max) {
    throw std::invalid_argument("lambda_k exceeds configured lambda_max");
  }
  return v;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Discrepancy: return "discrepancy";
    case StopReason::ExactFit: return "exact_fit";
    case StopReason::MaxIters: return "max_iters";
  }
  return "unknown";
}

Vector extrapolate(const Vector& x_cur, const Vector& x_prev, double alpha_k) {
  if (alpha_k == 0.0) return x_cur;  // LM degeneration must be bit-exact
  return axpy(x_cur, alpha_k, sub(x_cur, x_prev));
}

double inertial_weight(const Vector& x_cur, const Vector& x_prev,
                       const Vector& x0, int k, const AlphaSchedule& sched,
                       bool* ball_exit) {
  if (k < 1) throw std::invalid_argument("inertial_weight: k must be >= 1");
  if (sched.mode == AlphaMode::Constant) {
    return std::max(0.0, std::min(sched.constant, sched.alpha_cap));
  }
  const double d = norm(sub(x_cur, x_prev));
  if (d == 0.0) return 0.0;
  const double margin = sched.rho - norm(sub(x_cur, x0));
  if (margin < 0.0) {
    // The theory excludes this under its assumptions; a wrong user-supplied
    // rho can still trigger it. Degrade to the plain LM step and flag it.
    if (ball_exit) *ball_exit = true;
    return 0.0;
  }
  const double theta_k = sched.theta.term(k);
  const double a = std::min({theta_k / (d * d),
                             std::min(theta_k, margin) / d,
                             sched.alpha_cap});
  return std::max(0.0, a);
}

namespace {

IterRecord step_record(const IterateState& state, double lambda_k,
                       double residual_norm, const Vector* truth) {
  IterRecord rec;
  rec.k = state.k;
  rec.alpha_k = state.alpha_k;
  rec.lambda_k = lambda_k;
  rec.residual_norm = residual_norm;
  if (truth) rec.distance = norm(sub(state.x_cur, *truth));
  return rec;
}

// Step [2.1]-[2.3]: solve at w_k, advance, choose alpha_{k+1}, extrapolate.
std::pair<IterateState, IterRecord> advance(const ForwardModel& model,
                                            const IterateState& state,
                                            const Vector& residual_vec,
                                            double residual_norm,
                                            const Vector& x0,
                                            const SolverConfig& cfg,
                                            const Vector* truth) {
  const double lambda_k = cfg.lambda.at(state.k);
  IterRecord rec = step_record(state, lambda_k, residual_norm, truth);

  auto [s, report] = cg_normal_solve(model, state.w, residual_vec, lambda_k, cfg.cg);
  rec.step_norm = norm(s);
  rec.cg = report;

  Vector x_next = add(state.w, s);
  require_finite(x_next, "inLM iterate");

  bool ball_exit = false;
  double alpha_next =
      inertial_weight(x_next, state.x_cur, x0, state.k + 1, cfg.alpha, &ball_exit);
  if (cfg.alpha.monotone && state.k >= 1) {
    alpha_next = std::min(alpha_next, state.alpha_k);
  }
  rec.ball_exit = ball_exit;

  IterateState next;
  next.k = state.k + 1;
  next.x_prev = state.x_cur;
  next.x_cur = x_next;
  next.w = extrapolate(x_next, state.x_cur, alpha_next);
  next.alpha_k = alpha_next;
  return {std::move(next), std::move(rec)};
}

std::pair<Vector, RunTrace> run_loop(const ForwardModel& model, const Vector& y,
                                     const Vector& x0, const SolverConfig& cfg,
                                     const Vector* truth, bool noisy) {
  require_dim(x0, model.domain_dim(), "run x0");
  require_dim(y, model.range_dim(), "run y");

  RunTrace trace;
  if (noisy && cfg.eta > 0.0 && cfg.q) {
    const double tau_min = (cfg.eta + 1.0) / (*cfg.q - cfg.eta);
    if (!(cfg.tau > tau_min)) {
      trace.warnings.push_back(
          "tau does not satisfy tau > (eta+1)/(q-eta); stopping-index theory "
          "does not apply");
    }
  }
  if (cfg.q && cfg.C) {
    const double lb = *cfg.q * (*cfg.C) * (*cfg.C) / (1.0 - *cfg.q);
    if (!(cfg.lambda.at(0) > lb)) {
      trace.warnings.push_back("lambda_0 violates (A4): lambda_k > q C^2 / (1-q)");
    }
  }

  const double threshold =
      noisy ? cfg.tau * cfg.delta : cfg.exact_zero_tol * norm(y);

  IterateState state = IterateState::initial(x0);
  if (cfg.keep_iterates) trace.x_hist.push_back(state.x_cur);

  while (true) {
    const Vector fw = model.apply(state.w);
    const Vector residual_vec = sub(y, fw);
    const double rnorm = norm(residual_vec);
    if (cfg.keep_iterates) trace.w_hist.push_back(state.w);

    if (rnorm <= threshold) {
      // Step [2.4]/[2.5]: s_k = 0, x_{k+1} = w_k.
      IterRecord rec = step_record(state, cfg.lambda.at(state.k), rnorm, truth);
      trace.records.push_back(rec);
      trace.stop_reason = noisy ? StopReason::Discrepancy : StopReason::ExactFit;
      if (noisy) trace.k_star = state.k;
      trace.final_x = state.w;
      if (cfg.keep_iterates) trace.x_hist.push_back(state.w);
      return {trace.final_x, std::move(trace)};
    }
    if (state.k >= cfg.max_outer_iters) {
      IterRecord rec = step_record(state, cfg.lambda.at(state.k), rnorm, truth);
      trace.records.push_back(rec);
      trace.stop_reason = StopReason::MaxIters;
      trace.final_x = state.x_cur;
      return {trace.final_x, std::move(trace)};
    }

    auto [next, rec] = advance(model, state, residual_vec, rnorm, x0, cfg, truth);
    trace.records.push_back(std::move(rec));
    if (cfg.keep_iterates) trace.x_hist.push_back(next.x_cur);
    state = std::move(next);
  }
}

}  // namespace

std::pair<IterateState, IterRecord> inlm_step(const ForwardModel& model,
                                              const IterateState& state,
                                              const Vector& y,
                                              const Vector& x0,
                                              const SolverConfig& cfg) {
  const Vector residual_vec = sub(y, model.apply(state.w));
  return advance(model, state, residual_vec, norm(residual_vec), x0, cfg,
                 nullptr);
}

std::pair<Vector, RunTrace> run_exact(const ForwardModel& model,
                                      const Vector& y, const Vector& x0,
                                      const SolverConfig& cfg,
                                      const Vector* truth) {
  return run_loop(model, y, x0, cfg, truth, /*noisy=*/false);
}

std::pair<Vector, RunTrace> run_noisy(const ForwardModel& model,
                                      const Vector& y_delta, const Vector& x0,
                                      const SolverConfig& cfg,
                                      const Vector* truth) {
  if (cfg.delta < 0.0) throw std::invalid_argument("run_noisy: delta < 0");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("run_noisy: tau <= 0");
  return run_loop(model, y_delta, x0, cfg, truth, /*noisy=*/true);
}

double kstar_bound(double lambda_max, double q, double tau, double delta,
                   double eta, double rho, double theta_sum) {
  if (!(delta > 0.0)) throw std::invalid_argument("kstar_bound: delta <= 0");
  const double gap = (q - eta) * tau - (eta + 1.0);
  if (!(gap > 0.0)) {
    throw std::invalid_argument(
        "kstar_bound: (q-eta)*tau - (eta+1) must be positive (tau too small)");
  }
  const double denom = 2.0 * q * tau * delta * delta * gap;
  return lambda_max / denom * (rho * rho + 2.0 * theta_sum);
}

}  // namespace inlm
