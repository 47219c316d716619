// Command-line driver: build (full|reduced), steady, export, analyze,
// simulate, and sweep over a range of process counts. Every phase prints
// its wall-clock time; output files are byte-reproducible for a fixed
// configuration and seed.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slmc/analyze.hpp"
#include "slmc/bscc.hpp"
#include "slmc/explore.hpp"
#include "slmc/full_model.hpp"
#include "slmc/montecarlo.hpp"
#include "slmc/mrmc_io.hpp"
#include "slmc/phase_type.hpp"
#include "slmc/reduced_model.hpp"
#include "slmc/runconfig.hpp"
#include "slmc/stationary.hpp"

using namespace slmc;

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel g_log = LogLevel::Info;

void init_log_level() {
  const char* env = std::getenv("SLMC_LOG");
  if (!env) return;
  std::string v(env);
  if (v == "quiet") g_log = LogLevel::Quiet;
  else if (v == "debug") g_log = LogLevel::Debug;
  else if (v == "info") g_log = LogLevel::Info;
  else std::fprintf(stderr, "warning: unknown SLMC_LOG value '%s'\n", v.c_str());
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct BuildResult {
  SparseDTMC<double> dtmc;
  ExploreStats stats;
};

BuildResult build_model(const RunConfig& cfg, std::uint32_t n, bool quiet = false) {
  ExploreOptions opt;
  opt.threads = cfg.effective_threads();
  opt.labels = standard_labels();
  if (g_log == LogLevel::Debug) {
    opt.progress = [](std::uint64_t states, std::uint64_t transitions) {
      std::fprintf(stderr, "  ... %llu states, %llu transitions\n",
                   (unsigned long long)states, (unsigned long long)transitions);
    };
  }
  ExploreStats stats;
  SparseDTMC<double> dtmc;
  if (cfg.model == RunConfig::ModelKind::Full) {
    FullModel<double> model(cfg.params(n));
    dtmc = explore(model, opt, &stats);
  } else {
    ReducedModel<double> model(cfg.params(n), cfg.initial_mode());
    dtmc = explore(model, opt, &stats);
  }
  if (g_log >= LogLevel::Info && !quiet) {
    std::printf("[build] model=%s n=%u states=%u transitions=%llu levels=%u time=%.2fs\n",
                cfg.model == RunConfig::ModelKind::Full ? "full" : "reduced", n,
                dtmc.num_states(), (unsigned long long)stats.transitions, stats.levels,
                stats.seconds);
  }
  return {std::move(dtmc), stats};
}

struct SteadyPhase {
  SteadyStateResult<double> steady;
  double seconds = 0;
};

SteadyPhase solve_steady(const RunConfig& cfg, const SparseDTMC<double>& dtmc,
                         bool quiet = false) {
  Timer t;
  auto dec = bscc_decompose(dtmc);
  StationaryOptions opt;
  opt.eps = cfg.eps;
  opt.max_iter = cfg.max_iter;
  auto res = stationary(dtmc, std::move(dec), opt);
  double secs = t.seconds();
  if (!res.converged) {
    throw std::runtime_error("steady-state solver did not converge within " +
                             std::to_string(cfg.max_iter) + " sweeps (residual " +
                             format_double(to_double(res.residual)) + ")");
  }
  if (g_log >= LogLevel::Info && !quiet) {
    std::printf("[steady] bsccs=%zu transient=%zu residual=%s sweeps=%llu time=%.2fs\n",
                res.decomposition.bsccs.size(), res.decomposition.transient_states.size(),
                format_double(to_double(res.residual)).c_str(),
                (unsigned long long)res.iterations, secs);
  }
  return {std::move(res), secs};
}

void print_report(std::uint32_t n, const PropertyReport<double>& report) {
  std::printf("n=%u\n", n);
  std::printf("  p1_spinning        %s\n", format_double(report.p1_spinning).c_str());
  std::printf("  any_spinning       %s\n", format_double(report.any_spinning).c_str());
  std::printf("  p_acquire_no_wait  %s\n", format_double(report.p_acquire_no_wait).c_str());
  std::printf("  expected_wait      %s ticks\n", format_double(report.expected_wait).c_str());
  std::printf("  wait_quantile_95   %u ticks\n", report.wait_quantile_95);
  std::printf("  ncrit_histogram    ");
  for (const auto& [k, v] : report.ncrit_histogram) {
    if (v >= 1e-4) std::printf("%u:%.4f ", k, v);
  }
  std::printf("\n  distance_spectrum  ");
  for (const auto& [k, v] : report.distance_spectrum) {
    if (v >= 1e-4) std::printf("%u:%.4f ", k, v);
  }
  std::printf("\n");
}

int cmd_build(const RunConfig& cfg) {
  build_model(cfg, cfg.single_n());
  return 0;
}

int cmd_steady(const RunConfig& cfg) {
  auto built = build_model(cfg, cfg.single_n());
  auto phase = solve_steady(cfg, built.dtmc);
  if (!cfg.steady_out.empty()) {
    std::ofstream out(cfg.steady_out);
    if (!out) throw std::runtime_error("cannot open for writing: " + cfg.steady_out);
    write_steady(out, phase.steady.pi);
    if (g_log >= LogLevel::Info) {
      std::printf("[steady] vector written to %s\n", cfg.steady_out.c_str());
    }
  }
  return 0;
}

int cmd_export(const RunConfig& cfg) {
  if (cfg.mrmc_base.empty()) throw std::invalid_argument("--mrmc-out is required for export");
  auto built = build_model(cfg, cfg.single_n());
  Timer t;
  export_mrmc(built.dtmc, cfg.mrmc_base);
  if (g_log >= LogLevel::Info) {
    std::printf("[export] wrote %s.tra %s.lab time=%.2fs\n", cfg.mrmc_base.c_str(),
                cfg.mrmc_base.c_str(), t.seconds());
  }
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  std::uint32_t n = cfg.single_n();
  auto built = build_model(cfg, n);
  std::vector<double> pi;
  if (!cfg.steady_in.empty()) {
    pi = import_steady(cfg.steady_in, built.dtmc.num_states());
    if (g_log >= LogLevel::Info) {
      std::printf("[steady] imported %s\n", cfg.steady_in.c_str());
    }
  } else {
    auto phase = solve_steady(cfg, built.dtmc);
    pi = std::move(phase.steady.pi);
  }
  Timer t;
  auto report = analyze(built.dtmc, pi);
  if (g_log >= LogLevel::Info) std::printf("[properties] time=%.2fs\n", t.seconds());
  print_report(n, report);
  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + cfg.csv_path);
    write_csv_report(out, n, report);
    if (g_log >= LogLevel::Info) std::printf("[csv] wrote %s\n", cfg.csv_path.c_str());
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  SimConfig sim;
  sim.params = cfg.params(cfg.single_n());
  sim.ticks = cfg.ticks;
  sim.warmup = cfg.warmup;
  sim.seed = cfg.seed;
  Timer t;
  auto res = simulate(sim);
  if (g_log >= LogLevel::Info) {
    std::printf("[simulate] n=%u ticks=%llu seed=%llu time=%.2fs\n", sim.params.n,
                (unsigned long long)sim.ticks, (unsigned long long)sim.seed, t.seconds());
  }
  auto line = [](const char* name, const SimEstimate& e) {
    std::printf("  %-18s %s (se %s)\n", name, format_double(e.value).c_str(),
                format_double(e.stderr).c_str());
  };
  line("p1_spinning", res.p1_spinning);
  line("any_spinning", res.any_spinning);
  line("p_acquire_no_wait", res.p_acquire_no_wait);
  line("expected_wait", res.expected_wait);
  std::printf("  %-18s %u ticks (%llu completed waits)\n", "wait_quantile_95",
              res.pooled_wait_quantile_95, (unsigned long long)res.completed_waits);
  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + cfg.csv_path);
    out << "n,property,key,value\n";
    const std::uint32_t n = sim.params.n;
    for (const auto& [k, e] : res.ncrit_histogram) {
      out << n << ",ncrit_histogram," << k << ',' << format_double(e.value) << "\n";
      out << n << ",ncrit_histogram_stderr," << k << ',' << format_double(e.stderr) << "\n";
    }
    auto scalar = [&](const char* name, const SimEstimate& e) {
      out << n << ',' << name << ",," << format_double(e.value) << "\n";
      out << n << ',' << name << "_stderr,," << format_double(e.stderr) << "\n";
    };
    scalar("p1_spinning", res.p1_spinning);
    scalar("any_spinning", res.any_spinning);
    for (const auto& [k, e] : res.distance_spectrum) {
      out << n << ",distance_spectrum," << k << ',' << format_double(e.value) << "\n";
      out << n << ",distance_spectrum_stderr," << k << ',' << format_double(e.stderr) << "\n";
    }
    scalar("p_acquire_no_wait", res.p_acquire_no_wait);
    scalar("expected_wait", res.expected_wait);
    out << n << ",wait_quantile_95,," << res.pooled_wait_quantile_95 << "\n";
    if (g_log >= LogLevel::Info) std::printf("[csv] wrote %s\n", cfg.csv_path.c_str());
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  auto [lo, hi] = cfg.n_range();
  std::vector<std::pair<std::uint32_t, PropertyReport<double>>> reports;
  for (std::uint32_t n = lo; n <= hi; ++n) {
    auto built = build_model(cfg, n, true);
    auto phase = solve_steady(cfg, built.dtmc, true);
    Timer t;
    auto report = analyze(built.dtmc, phase.steady.pi);
    double prop_secs = t.seconds();
    if (g_log >= LogLevel::Info) {
      std::printf(
          "[sweep] n=%u states=%u build=%.2fs steady=%.2fs properties=%.2fs any_spinning=%s\n", n,
          built.dtmc.num_states(), built.stats.seconds, phase.seconds, prop_secs,
          format_double(report.any_spinning).c_str());
    }
    reports.emplace_back(n, std::move(report));
  }
  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + cfg.csv_path);
    write_csv_reports(out, reports);
    if (g_log >= LogLevel::Info) std::printf("[csv] wrote %s\n", cfg.csv_path.c_str());
  }
  return 0;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  std::map<std::string, RunConfig::ModelKind> model_map{
      {"full", RunConfig::ModelKind::Full}, {"reduced", RunConfig::ModelKind::Reduced}};
  cmd->add_option("--model", cfg.model, "model variant: full or reduced")
      ->transform(CLI::CheckedTransformer(model_map, CLI::ignore_case));
  cmd->add_option("--n", cfg.n_text, "process count (or range like 2..20 for sweep)");
  cmd->add_option("--nu", cfg.nu_text, "non-critical duration distribution, value:prob[,...]");
  cmd->add_option("--gamma0", cfg.gamma0_text, "critical duration after immediate acquisition");
  cmd->add_option("--gamma1", cfg.gamma1_text, "critical duration after spinning");
  cmd->add_option("--initial-mode", cfg.initial_mode_text,
                  "reduced-model initial weights: multinomial or uniform-compositions");
  cmd->add_option("--eps", cfg.eps, "steady-state residual tolerance");
  cmd->add_option("--max-iter", cfg.max_iter, "steady-state sweep limit");
  cmd->add_option("--threads", cfg.threads, "exploration workers (0 = hardware)");
  cmd->add_option("--csv", cfg.csv_path, "write results as CSV to this path");
  cmd->fallthrough(true);
}

}  // namespace

int main(int argc, char** argv) {
  init_log_level();
  CLI::App app{"cache-aware test-and-test-and-set spinlock analysis via explicit-state DTMCs"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value file; subcommand options go under a [subcommand] section");

  RunConfig cfg;
  auto* build = app.add_subcommand("build", "explore the reachable state space");
  auto* steady = app.add_subcommand("steady", "build and solve steady-state probabilities");
  auto* exp = app.add_subcommand("export", "build and write MRMC .tra/.lab files");
  auto* analyze = app.add_subcommand("analyze", "build, solve and report long-run properties");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimates of the same properties");
  auto* sweep = app.add_subcommand("sweep", "analyze a range of process counts");
  for (auto* cmd : {build, steady, exp, analyze, simulate, sweep}) {
    add_common_options(cmd, cfg);
  }
  steady->add_option("--steady-out", cfg.steady_out, "write the steady vector (state prob lines)");
  exp->add_option("--mrmc-out", cfg.mrmc_base, "output base path for .tra/.lab");
  analyze->add_option("--steady-in", cfg.steady_in,
                      "import an externally computed steady vector instead of solving");
  simulate->add_option("--seed", cfg.seed, "simulation seed");
  simulate->add_option("--ticks", cfg.ticks, "total simulated ticks");
  simulate->add_option("--warmup", cfg.warmup, "discarded warmup ticks (default 10%)");

  CLI11_PARSE(app, argc, argv);

  const char* phase = "setup";
  try {
    if (build->parsed()) { phase = "build"; return cmd_build(cfg); }
    if (steady->parsed()) { phase = "steady"; return cmd_steady(cfg); }
    if (exp->parsed()) { phase = "export"; return cmd_export(cfg); }
    if (analyze->parsed()) { phase = "analyze"; return cmd_analyze(cfg); }
    if (simulate->parsed()) { phase = "simulate"; return cmd_simulate(cfg); }
    if (sweep->parsed()) { phase = "sweep"; return cmd_sweep(cfg); }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[%s]: %s\n", phase, e.what());
    return 1;
  }
  return 0;
}
