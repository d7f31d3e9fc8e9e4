#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inlm/model.hpp"
#include "inlm/vec.hpp"

namespace inlm {

/// Saturated linear activation: identity on (-c, c), outer slope a in (0,1).
/// Odd, continuous, surjective; wTCC constant (1-a)/a.
struct SatLin {
  double a = 2.0 / 3.0;
  double c = 8.0;

  double wtcc_constant() const { return (1.0 - a) / a; }
};

double sigma(const SatLin& act, double t);

/// Right derivative of sigma: a for t >= c, 1 for -c <= t < c, a for t < -c.
double sigma_rderiv(const SatLin& act, double t);

/// Max of |sigma(t') - sigma(t) - s(t)(t'-t)| / |sigma(t') - sigma(t)| over
/// random pairs; bounded by (1-a)/a.
double check_scalar_wtcc(const SatLin& act, int trials, std::uint64_t seed);

/// Shallow-network regression problem: predict scalar targets from inputs by
/// NN(z; W, b) = sigma(W z + b). Parameters flatten to input_dim weights
/// followed by the bias.
struct NnProblem {
  std::vector<Vector> samples;  // all samples, train slice first
  Vector targets;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  SatLin act;
  double scale_factor = 1.0;  // max train-input norm used for scaling

  std::size_t input_dim() const { return samples.empty() ? 0 : samples[0].size(); }
  std::size_t param_dim() const { return input_dim() + 1; }
};

/// Network output for one sample at parameter vector p = (W, b).
double nn_predict(const NnProblem& prob, const Vector& p, const Vector& z);

/// [sigma(W z_i + b)]_i over the training slice.
Vector nn_forward(const NnProblem& prob, const Vector& p);

/// Generalized Jacobian action: component i = s(W z_i + b)(W_h z_i + b_h).
Vector nn_jacobian_apply(const NnProblem& prob, const Vector& p,
                         const Vector& hdir);

/// Transpose action: (sum_i s_i r_i z_i, sum_i s_i r_i), strict sequential sum.
Vector nn_adjoint_apply(const NnProblem& prob, const Vector& p,
                        const Vector& r);

/// 1 - mean over the test slice of |NN(z_i) - y_i| / |y_i|.
/// Throws when a test target has |y_i| < 1e-12.
double performance(const NnProblem& prob, const Vector& p);

struct SynthDataset {
  NnProblem prob;
  Vector true_params;
  double delta = 0.0;  // exact train-target perturbation norm
};

/// Synthetic stand-in for the sensor data: ground-truth parameters uniform in
/// (-1,1), inputs uniform in the unit ball, max-norm scaling from the train
/// slice, seeded perturbations of exact relative size noise_pct per slice.
SynthDataset synth_dataset(std::size_t n_train, std::size_t n_test,
                           std::size_t input_dim, double noise_pct,
                           std::uint64_t seed, const SatLin& act = {});

struct CsvOptions {
  int target_column = 0;
  std::vector<int> excluded_columns;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool scale_test_with_train_factor = true;
  SatLin act;
};

/// Numeric CSV ingestion ('.' decimal, optional header row). Inputs and
/// targets are scaled by the max train-input norm.
NnProblem load_csv_dataset(const std::string& path, const CsvOptions& opts);

/// ForwardModel over the training slice with parameter space R^(input_dim+1).
class NnModel : public ForwardModel {
 public:
  explicit NnModel(NnProblem prob) : prob_(std::move(prob)) {}

  std::size_t domain_dim() const override { return prob_.param_dim(); }
  std::size_t range_dim() const override { return prob_.n_train; }
  Vector apply(const Vector& p) const override { return nn_forward(prob_, p); }
  Vector jacobian_apply(const Vector& p, const Vector& h) const override {
    return nn_jacobian_apply(prob_, p, h);
  }
  Vector adjoint_apply(const Vector& p, const Vector& r) const override {
    return nn_adjoint_apply(prob_, p, r);
  }

  const NnProblem& problem() const { return prob_; }

 private:
  NnProblem prob_;
};

}  // namespace inlm
