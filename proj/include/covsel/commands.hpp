#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "covsel/gsics.hpp"
#include "covsel/instgen.hpp"
#include "covsel/io.hpp"

namespace covsel {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSolver = 3;

inline constexpr double kPatternThreshold = 1e-4;

/// Everything the command line can set. Defaults reproduce the reference experiment settings.
struct RunConfig {
  std::string method = "aspg";  // aspg | ans | both
  GsicsParams gsics;
  GenConfig gen;
  double rho_off = 0.5;
  bool trace = false;
  fs::path in_dir = ".";
  fs::path out_dir = ".";
  std::vector<Index> sizes{100, 200};
  std::vector<double> densities{0.1, 0.5, 0.9};
  int threads = 0;  // 0: COVSEL_THREADS or hardware concurrency

  std::vector<Method> methods() const {
    if (method == "aspg") return {Method::aspg};
    if (method == "ans") return {Method::ans};
    if (method == "both") return {Method::aspg, Method::ans};
    throw InvalidInput("unknown method '" + method + "' (expected aspg, ans or both)");
  }
};

/// Instance with rho_off everywhere; the omega entries are overwritten by the penalty loop.
inline Instance make_instance(const SymMatrix& sigma, const PairSet& omega, double rho_off) {
  if (!(rho_off >= 0.0)) throw InvalidInput("rho-off must be non-negative");
  Instance inst{sigma, SymMatrix::constant(sigma.size(), rho_off), omega};
  inst.check();
  return inst;
}

struct SolveOutcome {
  Method method = Method::aspg;
  EstimationResult result;
  bool converged = false;
  double seconds = 0.0;
};

/// Runs the penalty loop, turning a PenaltyDivergence into a non-converged outcome.
inline SolveOutcome run_gsics(const Instance& inst, GsicsParams p, Method m, bool trace) {
  p.method = m;
  p.spg.trace = trace;
  p.ans.trace = trace;
  SolveOutcome out;
  out.method = m;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out.result = gsics_solve(inst, p);
    out.converged = out.result.converged;
  } catch (const PenaltyDivergence& e) {
    out.result = e.best();
    out.converged = false;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline json trace_to_json(const std::vector<TraceRecord>& trace) {
  json arr = json::array();
  for (const auto& r : trace)
    arr.push_back({{"iteration", r.iteration}, {"g", r.g}, {"gap", r.gap}, {"lam_max", r.lam_max}, {"beta", r.beta},
                   {"step", r.step}, {"g_ref", r.g_ref}, {"dir_deriv", r.dir_deriv}});
  return arr;
}

/// Deterministic summary of one estimation (no wall-clock data).
inline json outcome_to_json(const Instance& inst, const SolveOutcome& o, bool with_trace) {
  const EstimationResult& r = o.result;
  json stages = json::array();
  for (std::size_t k = 0; k < r.stages.size(); ++k) {
    const auto& st = r.stages[k];
    const auto& rep = r.inner_reports[k];
    json s = {{"rho_omega", st.rho_omega},
              {"alpha", st.bounds.alpha},
              {"beta_rho", st.bounds.beta},
              {"beta_start", st.beta_start},
              {"beta_final", rep.beta_final},
              {"iterations", rep.iterations},
              {"fevals", rep.fevals},
              {"gap", rep.gap},
              {"converged", rep.converged},
              {"violation", st.violation},
              {"betas", rep.betas}};
    if (with_trace) s["trace"] = trace_to_json(rep.trace);
    stages.push_back(std::move(s));
  }
  const SolveReport& last = r.inner_reports.back();
  return {{"method", to_string(o.method)},
          {"converged", o.converged},
          {"objective", f_constrained(inst, r.x_star)},
          {"penalized_objective", last.eval.f},
          {"gap", last.gap},
          {"t_star", r.t_star},
          {"outer_stages", r.outer_iters},
          {"final_rho_omega", r.final_rho_omega},
          {"total_iterations", r.total_iterations()},
          {"total_fevals", r.total_fevals()},
          {"violation_before_zeroing", r.stages.back().violation},
          {"stages", stages}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline int cmd_generate(const RunConfig& cfg) {
  const GeneratedInstance g = generate(cfg.gen);
  fs::create_directories(cfg.out_dir);
  const json meta = {{"n", cfg.gen.n},
                     {"density", cfg.gen.density},
                     {"tau", cfg.gen.tau},
                     {"vartheta", cfg.gen.vartheta_gen},
                     {"seed", cfg.gen.seed},
                     {"family", cfg.gen.family == Family::density ? "density" : "spike"},
                     {"bandwidth", cfg.gen.omega_bandwidth},
                     {"omega_ordered_pairs", g.omega.size()},
                     {"omega_unordered_pairs", g.omega.size() / 2}};
  write_file(cfg.out_dir / "sigma.mtx", matrix_to_string(g.sigma));
  write_file(cfg.out_dir / "omega.pairs", pairs_to_string(g.sigma.size(), g.omega));
  write_file(cfg.out_dir / "truth.mtx", matrix_to_string(g.a));
  write_file(cfg.out_dir / "meta.json", dump(meta));
  return kExitOk;
}

/// Reads in_dir/sigma.mtx and in_dir/omega.pairs (and in_dir/rho.mtx if present,
/// overriding rho_off). Writes result.json, xstar.mtx (xstar_ans.mtx as well for
/// --method both) and timing.json.
inline int cmd_solve(const RunConfig& cfg) {
  const auto methods = cfg.methods();
  const SymMatrix sigma = load_matrix(cfg.in_dir / "sigma.mtx");
  const PairsFile omega = load_pairs(cfg.in_dir / "omega.pairs");
  if (omega.n != sigma.size()) throw InvalidInput("omega.pairs dimension does not match sigma.mtx");
  Instance inst = make_instance(sigma, omega.pairs, cfg.rho_off);
  if (fs::exists(cfg.in_dir / "rho.mtx")) {
    inst.rho = load_matrix(cfg.in_dir / "rho.mtx");
    inst.check();
  }

  std::vector<SolveOutcome> outcomes;
  for (Method m : methods) outcomes.push_back(run_gsics(inst, cfg.gsics, m, cfg.trace));

  json reports = json::array();
  json timing = json::array();
  bool all_ok = true;
  for (const auto& o : outcomes) {
    reports.push_back(outcome_to_json(inst, o, cfg.trace));
    timing.push_back({{"method", to_string(o.method)}, {"seconds", o.seconds}});
    all_ok = all_ok && o.converged;
  }
  const json result = {{"n", inst.size()},
                       {"omega_ordered_pairs", inst.omega.size()},
                       {"eps_o", cfg.gsics.eps_o},
                       {"eps_c", cfg.gsics.eps_c},
                       {"converged", all_ok},
                       {"reports", reports}};

  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "result.json", dump(result));
  write_file(cfg.out_dir / "xstar.mtx", matrix_to_string(outcomes.front().result.x_star));
  if (outcomes.size() > 1) write_file(cfg.out_dir / "xstar_ans.mtx", matrix_to_string(outcomes.back().result.x_star));
  write_file(cfg.out_dir / "timing.json", dump(json{{"wall_seconds", timing}}));
  return all_ok ? kExitOk : kExitSolver;
}

struct BenchmarkRow {
  Index n = 0;
  std::size_t omega_size = 0;
  long iters_ans = 0;
  long iters_aspg = 0;
  long nf_ans = 0;
  long nf_aspg = 0;
  double time_ans_s = 0.0;
  double time_aspg_s = 0.0;
  // Not part of the CSV.
  double density = 0.0;
  std::uint64_t seed = 0;
  bool converged_ans = false;
  bool converged_aspg = false;
  long max_stage_iters_ans = 0;
  long max_stage_iters_aspg = 0;
  double objective_ans = 0.0;
  double objective_aspg = 0.0;
};

inline int worker_count(int requested, std::size_t jobs) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("COVSEL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min<int>(n, static_cast<int>(std::max<std::size_t>(1, jobs))));
}

inline long max_stage_iterations(const EstimationResult& r) {
  long m = 0;
  for (const auto& rep : r.inner_reports) m = std::max(m, rep.iterations);
  return m;
}

/// Solves one generated density-family instance with both methods.
inline BenchmarkRow benchmark_instance(const RunConfig& cfg, Index n, double density, std::uint64_t seed) {
  GenConfig gc = cfg.gen;
  gc.n = n;
  gc.density = density;
  gc.seed = seed;
  gc.family = Family::density;
  const GeneratedInstance g = generate(gc);
  const Instance inst = make_instance(g.sigma, g.omega, cfg.rho_off);

  BenchmarkRow row;
  row.n = n;
  row.density = density;
  row.seed = seed;
  row.omega_size = g.omega.size();
  const SolveOutcome ans = run_gsics(inst, cfg.gsics, Method::ans, false);
  const SolveOutcome aspg = run_gsics(inst, cfg.gsics, Method::aspg, false);
  row.iters_ans = ans.result.total_iterations();
  row.iters_aspg = aspg.result.total_iterations();
  row.nf_ans = ans.result.total_fevals();
  row.nf_aspg = aspg.result.total_fevals();
  row.time_ans_s = ans.seconds;
  row.time_aspg_s = aspg.seconds;
  row.converged_ans = ans.converged;
  row.converged_aspg = aspg.converged;
  row.max_stage_iters_ans = max_stage_iterations(ans.result);
  row.max_stage_iters_aspg = max_stage_iterations(aspg.result);
  row.objective_ans = f_constrained(inst, ans.result.x_star);
  row.objective_aspg = f_constrained(inst, aspg.result.x_star);
  return row;
}

/// One row per (n, density) in order; row k uses seed + k. Workers pull rows from
/// a shared counter and results are written in row order afterwards.
inline std::vector<BenchmarkRow> run_benchmark(const RunConfig& cfg) {
  struct Job {
    Index n;
    double density;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Index n : cfg.sizes)
    for (double d : cfg.densities) jobs.push_back({n, d, cfg.gen.seed + jobs.size()});

  std::vector<BenchmarkRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        rows[k] = benchmark_instance(cfg, jobs[k].n, jobs[k].density, jobs[k].seed);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = worker_count(cfg.threads, jobs.size());
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "n,omega_size,iters_ans,iters_aspg,nf_ans,nf_aspg,time_ans_s,time_aspg_s\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.omega_size << ',' << r.iters_ans << ',' << r.iters_aspg << ',' << r.nf_ans << ','
       << r.nf_aspg << ',' << format_double(r.time_ans_s) << ',' << format_double(r.time_aspg_s) << '\n';
  return os.str();
}

inline int cmd_benchmark(const RunConfig& cfg) {
  if (cfg.sizes.empty() || cfg.densities.empty()) throw InvalidInput("benchmark needs at least one size and density");
  const auto rows = run_benchmark(cfg);
  json details = json::array();
  bool ok = true;
  for (const auto& r : rows) {
    details.push_back({{"n", r.n},
                       {"density", r.density},
                       {"seed", r.seed},
                       {"omega_size", r.omega_size},
                       {"converged_ans", r.converged_ans},
                       {"converged_aspg", r.converged_aspg},
                       {"max_stage_iterations_ans", r.max_stage_iters_ans},
                       {"max_stage_iterations_aspg", r.max_stage_iters_aspg},
                       {"objective_ans", r.objective_ans},
                       {"objective_aspg", r.objective_aspg}});
    ok = ok && r.converged_ans && r.converged_aspg;
  }
  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "benchmark.csv", benchmark_csv(rows));
  write_file(cfg.out_dir / "benchmark.json", dump(details));
  std::cout << benchmark_csv(rows);
  return ok ? kExitOk : kExitSolver;
}

struct RecoveryMetrics {
  double true_positive_rate = 0.0;   // off-diagonal support of A found in X
  double false_positive_rate = 0.0;  // off-diagonal zeros of A reported nonzero in X
  double estimate_density = 0.0;     // off-diagonal density of X
  double noisy_density = 0.0;        // off-diagonal density of B^{-1}
  double max_abs_on_omega = 0.0;
  std::size_t true_edges = 0;        // ordered off-diagonal nonzeros of A
};

inline RecoveryMetrics recovery_metrics(const SymMatrix& a, const SymMatrix& x, const SymMatrix& b_inv,
                                        const PairSet& omega, double threshold = kPatternThreshold) {
  RecoveryMetrics m;
  std::size_t tp = 0, fp = 0, zeros = 0, x_nz = 0, b_nz = 0, off = 0;
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < a.size(); ++j) {
      if (i == j) continue;
      ++off;
      const bool x_on = std::abs(x(i, j)) > threshold;
      x_nz += x_on;
      b_nz += std::abs(b_inv(i, j)) > threshold;
      if (a(i, j) != 0.0) {
        ++m.true_edges;
        tp += x_on;
      } else {
        ++zeros;
        fp += x_on;
      }
    }
  const auto ratio = [](std::size_t num, std::size_t den) { return den ? double(num) / double(den) : 0.0; };
  m.true_positive_rate = ratio(tp, m.true_edges);
  m.false_positive_rate = ratio(fp, zeros);
  m.estimate_density = ratio(x_nz, off);
  m.noisy_density = ratio(b_nz, off);
  m.max_abs_on_omega = max_abs_on_set(x, omega);
  return m;
}

struct RecoveryRun {
  GeneratedInstance gen;
  SolveOutcome outcome;
  SymMatrix b_inv;
  RecoveryMetrics metrics;
};

/// Spike-family instance solved with the chosen method and compared against the truth.
inline RecoveryRun run_recovery(const RunConfig& cfg, Method m) {
  GenConfig gc = cfg.gen;
  gc.family = Family::spike;
  RecoveryRun run;
  run.gen = generate(gc);
  const Instance inst = make_instance(run.gen.sigma, run.gen.omega, cfg.rho_off);
  run.outcome = run_gsics(inst, cfg.gsics, m, false);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(run.gen.b.dense());
  if (!lu.isInvertible()) throw NumericalFailure("recover: B is singular");
  run.b_inv = SymMatrix::symmetrize(lu.inverse());
  run.metrics = recovery_metrics(run.gen.a, run.outcome.result.x_star, run.b_inv, run.gen.omega);
  return run;
}

inline int cmd_recover(const RunConfig& cfg) {
  const RecoveryRun run = run_recovery(cfg, cfg.methods().front());
  const RecoveryMetrics& m = run.metrics;
  fs::create_directories(cfg.out_dir);
  auto pbm = [](const SymMatrix& s) {
    std::ostringstream os;
    write_pbm(os, s, kPatternThreshold);
    return os.str();
  };
  write_file(cfg.out_dir / "truth.pbm", pbm(run.gen.a));
  write_file(cfg.out_dir / "xstar.pbm", pbm(run.outcome.result.x_star));
  write_file(cfg.out_dir / "binv.pbm", pbm(run.b_inv));
  const json metrics = {{"n", run.gen.a.size()},
                        {"seed", cfg.gen.seed},
                        {"method", to_string(run.outcome.method)},
                        {"converged", run.outcome.converged},
                        {"threshold", kPatternThreshold},
                        {"true_edges", m.true_edges},
                        {"true_positive_rate", m.true_positive_rate},
                        {"false_positive_rate", m.false_positive_rate},
                        {"estimate_density", m.estimate_density},
                        {"noisy_inverse_density", m.noisy_density},
                        {"max_abs_on_omega", m.max_abs_on_omega},
                        {"outer_stages", run.outcome.result.outer_iters}};
  write_file(cfg.out_dir / "recovery.json", dump(metrics));
  return run.outcome.converged ? kExitOk : kExitSolver;
}

/// Maps library errors onto exit codes: input and I/O problems give 2, solver failures 3.
template <typename Fn>
int run_command(Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace covsel
