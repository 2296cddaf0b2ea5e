// covsel: sparse inverse covariance selection with known zero pattern.

#include <string>

#include "CLI11.hpp"
#include "covsel/commands.hpp"

namespace {

void add_common_flags(CLI::App* app, covsel::RunConfig& cfg, std::string& family) {
  auto& g = cfg.gsics;
  app->add_option("--method", cfg.method, "aspg, ans or both")->check(CLI::IsMember({"aspg", "ans", "both"}));
  app->add_option("--eps-o", g.eps_o, "objective tolerance (duality gap)");
  app->add_option("--eps-c", g.eps_c, "tolerance on |X_ij| over omega");
  app->add_option("--r-rho", g.r_rho, "penalty escalation ratio on omega");
  app->add_option("--rho0", g.rho0_omega, "initial penalty on omega");
  app->add_option("--r-beta", g.r_beta, "ASPG beta escalation ratio");
  app->add_option("--beta0", g.beta0, "initial spectral upper bound");
  app->add_option("--max-outer", g.max_outer, "maximum penalty escalations");
  app->add_option_function<long>(
      "--max-iter",
      [&g](long v) {
        g.spg.max_iter = v;
        g.ans.max_iter = v;
      },
      "inner iteration cap per stage");
  app->add_option("--rho-off", cfg.rho_off, "penalty weight off omega (diagonal included)");
  app->add_option("--n", cfg.gen.n, "dimension");
  app->add_option("--density", cfg.gen.density, "off-diagonal density of the ground truth");
  app->add_option("--seed", cfg.gen.seed, "random seed");
  app->add_option("--tau", cfg.gen.tau, "noise scale");
  app->add_option("--bandwidth", cfg.gen.omega_bandwidth, "omega keeps zeros with |i-j| >= bandwidth");
  app->add_option("--family", family, "density or spike")->check(CLI::IsMember({"density", "spike"}));
  app->add_flag("--trace", cfg.trace, "record per-iteration traces in result.json");
  app->add_option("--out", cfg.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse inverse covariance selection with partially known conditional independence"};
  app.require_subcommand(1);

  covsel::RunConfig cfg;
  std::string family = "density";

  auto* gen = app.add_subcommand("generate", "write a random instance (sigma.mtx, omega.pairs, truth.mtx, meta.json)");
  auto* solve = app.add_subcommand("solve", "solve the instance in --in, write result.json and xstar.mtx");
  auto* bench = app.add_subcommand("benchmark", "compare ASPG and ANS on generated instances, write benchmark.csv");
  auto* recover = app.add_subcommand("recover", "sparsity-recovery experiment, write pattern bitmaps");
  for (auto* sub : {gen, solve, bench, recover}) add_common_flags(sub, cfg, family);

  solve->add_option("--in", cfg.in_dir, "directory holding sigma.mtx and omega.pairs")->required();
  bench->add_option("--sizes", cfg.sizes, "dimensions")->delimiter(',');
  bench->add_option("--densities", cfg.densities, "densities")->delimiter(',');
  bench->add_option("--threads", cfg.threads, "worker count (default COVSEL_THREADS or all cores)");

  // Recovery experiment defaults; explicit flags still win since parsing happens afterwards.
  recover->preparse_callback([&](std::size_t) {
    cfg.gen.n = 30;
    cfg.gen.omega_bandwidth = 5;
    cfg.rho_off = 0.1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit cleanly; real usage errors share the input-error code.
    const int code = app.exit(e);
    return code == 0 ? covsel::kExitOk : covsel::kExitInput;
  }
  cfg.gen.family = family == "spike" ? covsel::Family::spike : covsel::Family::density;

  return covsel::run_command([&] {
    if (*gen) return covsel::cmd_generate(cfg);
    if (*solve) return covsel::cmd_solve(cfg);
    if (*bench) return covsel::cmd_benchmark(cfg);
    return covsel::cmd_recover(cfg);
  });
}
