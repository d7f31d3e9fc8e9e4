#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "common.hpp"
#include "inlm/nn.hpp"
#include "inlm/solver.hpp"
#include "inlm/trace_io.hpp"

namespace cli {
namespace {

struct NnOptions {
  bool synthetic = false;
  std::string csv_path;
  int target_col = 0;
  std::vector<int> exclude_cols;
  bool scale_test_own = false;
  std::size_t n_train = 10000;
  std::size_t n_test = 1000;
  std::size_t input_dim = 14;
  double noise = 0.01;
  double alpha = 0.05;
  std::vector<double> alpha_sweep;
  int epochs = 10;
  int cg_iters = 3;
  double lambda = 1.0;
  std::uint64_t seed = 3;
  int workers = 1;
  std::string out = "out";
  std::string config_path;
};

struct RunResult {
  nlohmann::json summary;
};

RunResult run_one(const NnOptions& opt, const inlm::NnProblem& prob,
                  double alpha) {
  using namespace inlm;
  const NnModel model(prob);
  const Vector y(prob.targets.begin(),
                 prob.targets.begin() + static_cast<long>(prob.n_train));

  SolverConfig cfg;
  cfg.alpha.mode = AlphaMode::Constant;
  cfg.alpha.constant = alpha;
  cfg.lambda.constant = opt.lambda;
  cfg.cg.mode = CgMode::Truncated;
  cfg.cg.max_iters = opt.cg_iters;
  cfg.max_outer_iters = opt.epochs;
  // fixed epoch budget: the discrepancy rule is not applied here
  cfg.exact_zero_tol = 0.0;

  const Vector p0(model.domain_dim(), 0.0);
  WallTimer timer;
  const auto [final_p, trace] = run_exact(model, y, p0, cfg);
  const double wall = timer.seconds();

  const std::string tag = "nn_alpha_" + format_number(alpha);
  write_trace_csv_file(opt.out + "/" + tag + "_trace.csv", trace);

  // residual evolution normalized by the initial residual
  std::vector<double> epochs_axis, rel_res;
  const double r0 = trace.records.front().residual_norm;
  for (const auto& rec : trace.records) {
    epochs_axis.push_back(rec.k);
    rel_res.push_back(r0 > 0.0 ? rec.residual_norm / r0 : 0.0);
  }
  write_series_csv_file(opt.out + "/" + tag + "_residual.csv",
                        "epoch,rel_residual", epochs_axis, rel_res);

  RunResult res;
  res.summary = {
      {"alpha", alpha},
      {"epochs", trace.records.size() - 1},
      {"stop_reason", to_string(trace.stop_reason)},
      {"final_rel_residual", rel_res.back()},
      {"wall_time_s", wall},
      {"trace_file", tag + "_trace.csv"},
  };

  if (prob.n_test > 0) {
    std::vector<double> idx, err;
    for (std::size_t i = 0; i < prob.n_test; ++i) {
      const auto& z = prob.samples[prob.n_train + i];
      const double yt = prob.targets[prob.n_train + i];
      idx.push_back(static_cast<double>(i));
      err.push_back(std::abs(nn_predict(prob, final_p, z) - yt) /
                    std::abs(yt));
    }
    write_series_csv_file(opt.out + "/" + tag + "_test_errors.csv",
                          "index,rel_error", idx, err);
    res.summary["performance"] = performance(prob, final_p);
    res.summary["test_errors_file"] = tag + "_test_errors.csv";
  }
  return res;
}

void run_nn(const CLI::App& cmd, NnOptions& opt) {
  if (!opt.config_path.empty()) apply_json_config(cmd, opt.config_path);
  opt.out = resolve_output_dir(opt.out, cmd.count("--out") > 0);
  if (!opt.synthetic && opt.csv_path.empty()) {
    throw CLI::ValidationError("nn", "need either --synthetic or --csv");
  }
  ensure_dir(opt.out);

  inlm::NnProblem prob;
  double delta = 0.0;
  if (!opt.csv_path.empty()) {
    inlm::CsvOptions copts;
    copts.target_column = opt.target_col;
    copts.excluded_columns = opt.exclude_cols;
    copts.n_train = opt.n_train;
    copts.n_test = opt.n_test;
    copts.scale_test_with_train_factor = !opt.scale_test_own;
    prob = inlm::load_csv_dataset(opt.csv_path, copts);
  } else {
    auto ds = inlm::synth_dataset(opt.n_train, opt.n_test, opt.input_dim,
                                  opt.noise, opt.seed);
    prob = std::move(ds.prob);
    delta = ds.delta;
  }

  std::vector<double> alphas =
      opt.alpha_sweep.empty() ? std::vector<double>{opt.alpha} : opt.alpha_sweep;

  std::vector<RunResult> results(alphas.size());
  const int workers = std::max(1, opt.workers);
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= alphas.size()) return;
        i = next++;
      }
      results[i] = run_one(opt, prob, alphas[i]);
    }
  };
  if (workers == 1 || alphas.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<std::size_t>(workers, alphas.size()); ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) t.join();
  }

  nlohmann::json config = {
      {"problem", "nn"},
      {"source", opt.csv_path.empty() ? "synthetic" : opt.csv_path},
      {"n_train", opt.n_train},   {"n_test", opt.n_test},
      {"input_dim", prob.input_dim()},
      {"noise", opt.noise},       {"alphas", alphas},
      {"epochs", opt.epochs},     {"cg_iters", opt.cg_iters},
      {"lambda", opt.lambda},     {"seed", opt.seed},
  };
  nlohmann::json summary = {
      {"command", "nn"},
      {"config", config},
      {"config_hash", inlm::fnv1a_hex(config.dump())},
      {"delta", delta},
      {"scale_factor", prob.scale_factor},
      {"runs", nlohmann::json::array()},
  };
  for (const auto& r : results) summary["runs"].push_back(r.summary);
  write_json_file(opt.out + "/nn_summary.json", summary);
  std::cout << "wrote " << opt.out << "/nn_summary.json (" << results.size()
            << " run" << (results.size() == 1 ? "" : "s") << ")\n";
}

}  // namespace

void register_nn(CLI::App& app) {
  auto opt = std::make_shared<NnOptions>();
  CLI::App* cmd = app.add_subcommand(
      "nn", "Shallow-network regression training");
  cmd->add_flag("--synthetic", opt->synthetic, "use the synthetic dataset");
  cmd->add_option("--csv", opt->csv_path, "numeric CSV dataset path");
  cmd->add_option("--target-col", opt->target_col, "CSV target column");
  cmd->add_option("--exclude-cols", opt->exclude_cols,
                  "CSV columns to drop")
      ->delimiter(',');
  cmd->add_flag("--scale-test-own", opt->scale_test_own,
                "scale the test slice by its own max norm");
  cmd->add_option("--train", opt->n_train, "training samples");
  cmd->add_option("--test", opt->n_test, "test samples");
  cmd->add_option("--input-dim", opt->input_dim, "synthetic input dimension");
  cmd->add_option("--noise", opt->noise, "relative target noise (synthetic)");
  cmd->add_option("--alpha", opt->alpha, "constant inertial weight");
  cmd->add_option("--alpha-sweep", opt->alpha_sweep,
                  "comma-separated list of constant weights")
      ->delimiter(',');
  cmd->add_option("--epochs", opt->epochs, "training epochs");
  cmd->add_option("--cg-iters", opt->cg_iters, "truncated CG steps");
  cmd->add_option("--lambda", opt->lambda, "damping weight");
  cmd->add_option("--seed", opt->seed, "dataset seed");
  cmd->add_option("--workers", opt->workers, "parallel sweep slots");
  cmd->add_option("--out", opt->out,
                  "output directory (INLM_OUTPUT_DIR overrides the default)");
  cmd->add_option("--config", opt->config_path,
                  "JSON config file; flags override its values");
  cmd->callback([cmd, opt] { run_nn(*cmd, *opt); });
}

}  // namespace cli
