#include "inlm/nn.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "inlm/rng.hpp"

namespace inlm {

double sigma(const SatLin& act, double t) {
  if (t >= act.c) return act.c + act.a * (t - act.c);
  if (t <= -act.c) return -act.c + act.a * (t + act.c);
  return t;
}

double sigma_rderiv(const SatLin& act, double t) {
  if (t >= act.c || t < -act.c) return act.a;
  return 1.0;
}

double check_scalar_wtcc(const SatLin& act, int trials, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double t = rng.uniform(-4.0 * act.c, 4.0 * act.c);
    const double tp = rng.uniform(-4.0 * act.c, 4.0 * act.c);
    const double ds = sigma(act, tp) - sigma(act, t);
    if (ds == 0.0) continue;
    const double lin_err = std::abs(ds - sigma_rderiv(act, t) * (tp - t));
    worst = std::max(worst, lin_err / std::abs(ds));
  }
  return worst;
}

static double preactivation(const NnProblem& prob, const Vector& p,
                            const Vector& z) {
  double s = p[prob.input_dim()];  // bias
  for (std::size_t j = 0; j < prob.input_dim(); ++j) s += p[j] * z[j];
  return s;
}

double nn_predict(const NnProblem& prob, const Vector& p, const Vector& z) {
  require_dim(p, prob.param_dim(), "nn_predict params");
  return sigma(prob.act, preactivation(prob, p, z));
}

Vector nn_forward(const NnProblem& prob, const Vector& p) {
  require_dim(p, prob.param_dim(), "nn_forward params");
  Vector out(prob.n_train);
  for (std::size_t i = 0; i < prob.n_train; ++i) {
    out[i] = sigma(prob.act, preactivation(prob, p, prob.samples[i]));
  }
  return out;
}

Vector nn_jacobian_apply(const NnProblem& prob, const Vector& p,
                         const Vector& hdir) {
  require_dim(p, prob.param_dim(), "nn_jacobian_apply params");
  require_dim(hdir, prob.param_dim(), "nn_jacobian_apply hdir");
  Vector out(prob.n_train);
  for (std::size_t i = 0; i < prob.n_train; ++i) {
    const Vector& z = prob.samples[i];
    const double s = sigma_rderiv(prob.act, preactivation(prob, p, z));
    double dh = hdir[prob.input_dim()];
    for (std::size_t j = 0; j < prob.input_dim(); ++j) dh += hdir[j] * z[j];
    out[i] = s * dh;
  }
  return out;
}

Vector nn_adjoint_apply(const NnProblem& prob, const Vector& p,
                        const Vector& r) {
  require_dim(p, prob.param_dim(), "nn_adjoint_apply params");
  require_dim(r, prob.n_train, "nn_adjoint_apply r");
  Vector out(prob.param_dim(), 0.0);
  for (std::size_t i = 0; i < prob.n_train; ++i) {
    const Vector& z = prob.samples[i];
    const double sr = sigma_rderiv(prob.act, preactivation(prob, p, z)) * r[i];
    for (std::size_t j = 0; j < prob.input_dim(); ++j) out[j] += sr * z[j];
    out[prob.input_dim()] += sr;
  }
  return out;
}

double performance(const NnProblem& prob, const Vector& p) {
  if (prob.n_test == 0) throw std::invalid_argument("performance: empty test set");
  double misfit = 0.0;
  for (std::size_t i = prob.n_train; i < prob.n_train + prob.n_test; ++i) {
    const double y = prob.targets[i];
    if (std::abs(y) < 1e-12) {
      throw std::runtime_error("performance: test target too close to zero at " +
                               std::to_string(i));
    }
    misfit += std::abs(nn_predict(prob, p, prob.samples[i]) - y) / std::abs(y);
  }
  return 1.0 - misfit / static_cast<double>(prob.n_test);
}

// Exact-norm spherical perturbation of a target slice.
static double perturb_slice(Vector& targets, std::size_t begin, std::size_t end,
                            double pct, Rng& rng) {
  double ynorm2 = 0.0;
  for (std::size_t i = begin; i < end; ++i) ynorm2 += targets[i] * targets[i];
  const double delta = pct * std::sqrt(ynorm2);
  if (delta == 0.0) return 0.0;
  Vector e(end - begin);
  double en = 0.0;
  do {
    for (auto& v : e) v = rng.normal();
    en = norm(e);
  } while (en == 0.0);
  for (std::size_t i = begin; i < end; ++i) {
    targets[i] += delta / en * e[i - begin];
  }
  return delta;
}

SynthDataset synth_dataset(std::size_t n_train, std::size_t n_test,
                           std::size_t input_dim, double noise_pct,
                           std::uint64_t seed, const SatLin& act) {
  if (n_train == 0 || input_dim == 0) {
    throw std::invalid_argument("synth_dataset: empty dimensions");
  }
  Rng rng(seed);
  SynthDataset ds;
  NnProblem& prob = ds.prob;
  prob.act = act;
  prob.n_train = n_train;
  prob.n_test = n_test;

  ds.true_params = rng.uniform_vector(input_dim + 1, -1.0, 1.0);

  const std::size_t total = n_train + n_test;
  prob.samples.reserve(total);
  double max_train_norm = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    Vector z = rng.normal_vector(input_dim);
    const double zn = norm(z);
    const double radius =
        std::pow(rng.uniform(), 1.0 / static_cast<double>(input_dim));
    const double f = (zn > 0.0) ? radius / zn : 0.0;
    for (auto& v : z) v *= f;
    if (i < n_train) max_train_norm = std::max(max_train_norm, norm(z));
    prob.samples.push_back(std::move(z));
  }
  prob.scale_factor = max_train_norm;
  for (auto& z : prob.samples) {
    for (auto& v : z) v /= max_train_norm;
  }

  prob.targets.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    prob.targets[i] = nn_predict(prob, ds.true_params, prob.samples[i]);
  }
  ds.delta = perturb_slice(prob.targets, 0, n_train, noise_pct, rng);
  if (n_test > 0) perturb_slice(prob.targets, n_train, total, noise_pct, rng);
  return ds;
}

NnProblem load_csv_dataset(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + path);

  const auto excluded = [&](int col) {
    for (int e : opts.excluded_columns) {
      if (e == col) return true;
    }
    return false;
  };

  NnProblem prob;
  prob.act = opts.act;
  std::string line;
  std::size_t row = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector z;
    double target = 0.0;
    bool have_target = false;
    bool parse_failed = false;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        parse_failed = true;
      }
      if (!parse_failed && pos != cell.size()) {
        // allow trailing whitespace / CR
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) parse_failed = true;
      }
      if (parse_failed) break;
      if (col == opts.target_column) {
        target = v;
        have_target = true;
      } else if (!excluded(col)) {
        z.push_back(v);
      }
      ++col;
    }
    if (parse_failed) {
      if (!header_checked) {  // optional header row
        header_checked = true;
        continue;
      }
      throw std::runtime_error("load_csv_dataset: malformed row " +
                               std::to_string(row));
    }
    header_checked = true;
    if (!have_target) {
      throw std::runtime_error("load_csv_dataset: missing target column in row " +
                               std::to_string(row));
    }
    if (!prob.samples.empty() && z.size() != prob.samples[0].size()) {
      throw std::runtime_error("load_csv_dataset: inconsistent width in row " +
                               std::to_string(row));
    }
    prob.samples.push_back(std::move(z));
    prob.targets.push_back(target);
  }

  const std::size_t total = prob.samples.size();
  prob.n_train = (opts.n_train > 0) ? opts.n_train : total;
  prob.n_test = opts.n_test;
  if (prob.n_train + prob.n_test > total) {
    throw std::runtime_error("load_csv_dataset: split exceeds row count");
  }

  double train_factor = 0.0;
  for (std::size_t i = 0; i < prob.n_train; ++i) {
    train_factor = std::max(train_factor, norm(prob.samples[i]));
  }
  if (train_factor == 0.0) train_factor = 1.0;
  prob.scale_factor = train_factor;

  double test_factor = train_factor;
  if (!opts.scale_test_with_train_factor) {
    test_factor = 0.0;
    for (std::size_t i = prob.n_train; i < prob.n_train + prob.n_test; ++i) {
      test_factor = std::max(test_factor, norm(prob.samples[i]));
    }
    if (test_factor == 0.0) test_factor = 1.0;
  }
  for (std::size_t i = 0; i < prob.n_train + prob.n_test; ++i) {
    const double f = (i < prob.n_train) ? train_factor : test_factor;
    for (auto& v : prob.samples[i]) v /= f;
    prob.targets[i] /= f;
  }
  return prob;
}

}  // namespace inlm
