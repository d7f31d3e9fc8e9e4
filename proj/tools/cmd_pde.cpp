#include <algorithm>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "common.hpp"
#include "inlm/elliptic.hpp"
#include "inlm/solver.hpp"
#include "inlm/trace_io.hpp"

namespace cli {
namespace {

struct PdeOptions {
  int n = 32;
  double noise = 0.0;
  double alpha = 0.0;
  std::vector<double> alpha_sweep;
  bool theory_alpha = false;
  double rho = 1.0;
  double tau = 1.0;
  double lambda = 2.0;
  int cg_iters = 2;
  int iters = 200;
  std::uint64_t seed = 7;
  int workers = 1;
  std::string out = "out";
  std::string config_path;
};

struct RunResult {
  double alpha = 0.0;
  nlohmann::json summary;
};

RunResult run_one(const PdeOptions& opt, const inlm::Phantom& phantom,
                  const inlm::Vector& y, double delta, double alpha) {
  using namespace inlm;
  const EllipticModel model(EllipticProblem::make(opt.n, phantom.g_grid));

  SolverConfig cfg;
  if (opt.theory_alpha) {
    cfg.alpha.mode = AlphaMode::Theory;
    cfg.alpha.rho = opt.rho;
  } else {
    cfg.alpha.mode = AlphaMode::Constant;
    cfg.alpha.constant = alpha;
  }
  cfg.lambda.constant = opt.lambda;
  cfg.tau = opt.tau;
  cfg.delta = delta;
  cfg.cg.mode = CgMode::Truncated;
  cfg.cg.max_iters = opt.cg_iters;
  cfg.max_outer_iters = opt.iters;

  const Vector c0(model.domain_dim(), 0.0);
  WallTimer timer;
  const auto [final_c, trace] =
      delta > 0.0 ? run_noisy(model, y, c0, cfg, &phantom.c_true)
                  : run_exact(model, y, c0, cfg, &phantom.c_true);
  const double wall = timer.seconds();

  const std::string tag = "pde_alpha_" + format_number(alpha);
  write_trace_csv_file(opt.out + "/" + tag + "_trace.csv", trace);
  write_grid_csv_file(opt.out + "/" + tag + "_final.csv", opt.n, final_c);

  // reconstruction of minimal distance to the phantom along the iteration
  std::size_t best_k = 0;
  double best_dist = -1.0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& d = trace.records[k].distance;
    if (d && (best_dist < 0.0 || *d < best_dist)) {
      best_dist = *d;
      best_k = k;
    }
  }
  if (best_dist >= 0.0 && best_k < trace.x_hist.size()) {
    write_grid_csv_file(opt.out + "/" + tag + "_best.csv", opt.n,
                        trace.x_hist[best_k]);
  }

  RunResult res;
  res.alpha = alpha;
  res.summary = {
      {"alpha", alpha},
      {"k_star", trace.k_star ? nlohmann::json(*trace.k_star)
                              : nlohmann::json(nullptr)},
      {"stop_reason", to_string(trace.stop_reason)},
      {"iterations", trace.records.size() - 1},
      {"final_residual", trace.records.back().residual_norm},
      {"final_distance", trace.records.back().distance
                             ? nlohmann::json(*trace.records.back().distance)
                             : nlohmann::json(nullptr)},
      {"best_distance_k", best_k},
      {"best_distance", best_dist},
      {"wall_time_s", wall},
      {"trace_file", tag + "_trace.csv"},
  };
  if (!trace.warnings.empty()) res.summary["warnings"] = trace.warnings;
  return res;
}

void run_pde(const CLI::App& cmd, PdeOptions& opt) {
  if (!opt.config_path.empty()) apply_json_config(cmd, opt.config_path);
  opt.out = resolve_output_dir(opt.out, cmd.count("--out") > 0);
  if (opt.n < 4) throw CLI::ValidationError("--n", "grid size must be >= 4");
  ensure_dir(opt.out);

  const auto phantom = inlm::make_phantom(opt.n);
  inlm::Vector y = phantom.u_true;
  double delta = 0.0;
  if (opt.noise > 0.0) {
    std::tie(y, delta) = inlm::add_relative_noise(phantom.u_true, opt.noise,
                                                  opt.seed);
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
      results[i] = run_one(opt, phantom, y, delta, alphas[i]);
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
      {"problem", "pde"},       {"n", opt.n},
      {"noise", opt.noise},     {"alphas", alphas},
      {"theory_alpha", opt.theory_alpha},
      {"rho", opt.rho},         {"tau", opt.tau},
      {"lambda", opt.lambda},   {"cg_iters", opt.cg_iters},
      {"iters", opt.iters},     {"seed", opt.seed},
  };
  nlohmann::json summary = {
      {"command", "pde"},
      {"config", config},
      {"config_hash", inlm::fnv1a_hex(config.dump())},
      {"delta", delta},
      {"runs", nlohmann::json::array()},
  };
  for (const auto& r : results) summary["runs"].push_back(r.summary);
  write_json_file(opt.out + "/pde_summary.json", summary);
  std::cout << "wrote " << opt.out << "/pde_summary.json (" << results.size()
            << " run" << (results.size() == 1 ? "" : "s") << ")\n";
}

}  // namespace

void register_pde(CLI::App& app) {
  auto opt = std::make_shared<PdeOptions>();
  CLI::App* cmd = app.add_subcommand(
      "pde", "Coefficient identification on the unit square");
  cmd->add_option("--n", opt->n, "interior grid size per dimension");
  cmd->add_option("--noise", opt->noise, "relative data noise (e.g. 0.01)");
  cmd->add_option("--alpha", opt->alpha, "constant inertial weight");
  cmd->add_option("--alpha-sweep", opt->alpha_sweep,
                  "comma-separated list of constant weights")
      ->delimiter(',');
  cmd->add_flag("--theory-alpha", opt->theory_alpha,
                "use the theory-driven weight schedule");
  cmd->add_option("--rho", opt->rho, "trust-ball radius (theory schedule)");
  cmd->add_option("--tau", opt->tau, "discrepancy factor");
  cmd->add_option("--lambda", opt->lambda, "damping weight");
  cmd->add_option("--cg-iters", opt->cg_iters, "truncated CG steps");
  cmd->add_option("--iters", opt->iters, "outer iteration cap");
  cmd->add_option("--seed", opt->seed, "noise seed");
  cmd->add_option("--workers", opt->workers, "parallel sweep slots");
  cmd->add_option("--out", opt->out,
                  "output directory (INLM_OUTPUT_DIR overrides the default)");
  cmd->add_option("--config", opt->config_path,
                  "JSON config file; flags override its values");
  cmd->callback([cmd, opt] { run_pde(*cmd, *opt); });
}

}  // namespace cli
