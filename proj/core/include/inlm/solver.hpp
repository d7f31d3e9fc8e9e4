#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "inlm/cg.hpp"
#include "inlm/model.hpp"
#include "inlm/vec.hpp"

namespace inlm {

/// Nonnegative series theta_k (k >= 1) with convergent sum. Default 1/k^2.
struct ThetaSchedule {
  std::function<double(int)> term = [](int k) {
    return 1.0 / (static_cast<double>(k) * k);
  };
  double series_sum = std::numbers::pi * std::numbers::pi / 6.0;

  static ThetaSchedule inverse_square() { return {}; }
};

enum class AlphaMode { Constant, Theory };

struct AlphaSchedule {
  AlphaMode mode = AlphaMode::Constant;
  double constant = 0.0;
  // Hard cap on produced weights. Theory requires cap < 1; the default of 1.0
  // admits the paper's constant-alpha sweeps up to alpha = 1.
  double alpha_cap = 1.0;
  ThetaSchedule theta;
  double rho = 1.0;       // trust-ball radius around x0 (theory mode)
  bool monotone = false;  // opt-in (A6) clamp alpha_k <= alpha_{k-1}
};

struct LambdaSchedule {
  double constant = 1.0;
  std::vector<double> sequence;  // if nonempty, overrides constant; last value repeats
  std::optional<double> lambda_max;

  double at(int k) const;
};

struct SolverConfig {
  AlphaSchedule alpha;
  LambdaSchedule lambda;
  double tau = 1.0;    // discrepancy factor
  double delta = 0.0;  // noise level
  CgConfig cg;
  int max_outer_iters = 100;
  // Numerical stand-in for the exact-fit test ||F(w_k) - y|| > 0; resolved as
  // exact_zero_tol * ||y|| at run start.
  double exact_zero_tol = 1e-13;
  double eta = 0.0;              // wTCC constant, for reporting/validation
  std::optional<double> q;       // (A4) constant
  std::optional<double> C;       // bound on ||F'||
  bool keep_iterates = true;     // store x_k / w_k history in the trace
};

struct IterateState {
  int k = 0;
  Vector x_prev;  // x_{k-1}
  Vector x_cur;   // x_k
  Vector w;       // w_k
  double alpha_k = 0.0;

  static IterateState initial(const Vector& x0) {
    return {0, x0, x0, x0, 0.0};
  }
};

enum class StopReason { Discrepancy, ExactFit, MaxIters };

struct IterRecord {
  int k = 0;
  double alpha_k = 0.0;
  double lambda_k = 0.0;
  double residual_norm = 0.0;  // ||F(w_k) - y||
  double step_norm = 0.0;      // ||s_k||
  std::optional<double> distance;  // ||x_k - x_truth|| when truth is known
  CgReport cg;
  bool ball_exit = false;  // theory-mode rho exceeded at this k
};

struct RunTrace {
  std::vector<IterRecord> records;
  std::optional<int> k_star;
  StopReason stop_reason = StopReason::MaxIters;
  Vector final_x;
  std::vector<Vector> x_hist;  // x_0, x_1, ...
  std::vector<Vector> w_hist;  // w_0, w_1, ...
  std::vector<std::string> warnings;
};

const char* to_string(StopReason r);

/// w = x_cur + alpha_k * (x_cur - x_prev). Bit-exact identity for alpha_k = 0.
Vector extrapolate(const Vector& x_cur, const Vector& x_prev, double alpha_k);

/// Inertial weight alpha_k for k >= 1. In theory mode this is the three-way
/// minimum min{ theta_k/d^2, min{theta_k, rho - ||x_cur - x0||}/d, cap } with
/// d = ||x_cur - x_prev||, and 0 when d = 0. A negative ball margin yields 0
/// and sets *ball_exit. Constant mode returns the configured value regardless
/// of the iterates.
double inertial_weight(const Vector& x_cur, const Vector& x_prev,
                       const Vector& x0, int k, const AlphaSchedule& sched,
                       bool* ball_exit = nullptr);

/// One inLM iteration: residual at w_k, regularized normal-equation solve,
/// x_{k+1} = w_k + s_k, then the next extrapolation point.
std::pair<IterateState, IterRecord> inlm_step(const ForwardModel& model,
                                              const IterateState& state,
                                              const Vector& y,
                                              const Vector& x0,
                                              const SolverConfig& cfg);

/// Exact-data iteration: runs while ||F(w_k) - y|| > exact_zero_tol * ||y||.
std::pair<Vector, RunTrace> run_exact(const ForwardModel& model,
                                      const Vector& y, const Vector& x0,
                                      const SolverConfig& cfg,
                                      const Vector* truth = nullptr);

/// Noisy-data iteration with the discrepancy stopping rule
/// ||F(w_k) - y_delta|| <= tau * delta.
std::pair<Vector, RunTrace> run_noisy(const ForwardModel& model,
                                      const Vector& y_delta, const Vector& x0,
                                      const SolverConfig& cfg,
                                      const Vector* truth = nullptr);

/// Upper bound on the stopping index:
///   k* <= lambda_max * (2 q tau delta^2 [(q-eta)tau - (eta+1)])^-1
///         * [rho^2 + 2 sum_k theta_k].
/// Throws if (q-eta)tau - (eta+1) <= 0 or delta <= 0.
double kstar_bound(double lambda_max, double q, double tau, double delta,
                   double eta, double rho, double theta_sum);

}  // namespace inlm
