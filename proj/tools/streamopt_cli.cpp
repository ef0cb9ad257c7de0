// Command-line harness: run replicated streaming-optimization experiments,
// validate configs, and summarize per-sample curvature-update cost.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "streamopt/streamopt.hpp"

namespace {

// Pulls `p = <value>` out of a run's metadata sidecar, if present.
std::optional<double> sidecar_inclusion_probability(const std::string& meta_path) {
  std::ifstream in(meta_path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("p = ", 0) == 0) {
      try {
        return std::stod(line.substr(4));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

int cmd_run(const std::string& config_path, const std::string& out_override, int threads,
            std::optional<std::uint64_t> seed_override) {
  streamopt::ExperimentConfig cfg = streamopt::load_config(config_path);
  if (!out_override.empty()) cfg.out = out_override;
  if (seed_override.has_value()) cfg.seed = *seed_override;

  const streamopt::ExperimentResult result = streamopt::run_experiment_detailed(cfg, threads);
  streamopt::write_csv(result.records, cfg.out);
  streamopt::write_metadata(cfg, result, cfg.out);

  std::cout << "series " << streamopt::series_name(cfg) << ": " << cfg.runs << " run(s), "
            << result.total_blocks << " blocks, " << result.final_samples
            << " samples per run\n";
  if (!result.diverged_runs.empty()) {
    std::cout << "diverged runs (" << result.diverged_runs.size() << "):";
    for (int r : result.diverged_runs) std::cout << ' ' << r;
    std::cout << " (excluded from aggregates)\n";
  }
  std::cout << "wrote " << cfg.out << " and " << cfg.out << ".meta\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const streamopt::ExperimentConfig cfg = streamopt::load_config(config_path);
  streamopt::validate_experiment(cfg);
  std::cout << "ok: " << config_path << "\n" << streamopt::resolved_config_text(cfg);
  return 0;
}

int cmd_report_cost(const std::string& csv_path, std::optional<double> p_flag) {
  // The run's sidecar records the resolved inclusion probability; an unset p
  // only matters if a curvature series needs band-checking.
  std::optional<double> p = p_flag;
  if (!p.has_value()) p = sidecar_inclusion_probability(csv_path + ".meta");
  const auto records = streamopt::read_csv(csv_path);
  const streamopt::CostReport report = streamopt::report_cost(records, p);
  for (const auto& e : report.entries) {
    std::printf("%s run %d: %ld updates over %ld samples (%.6g per sample)", e.method.c_str(),
                e.run_id, e.updates, e.n_seen, e.per_sample);
    if (e.band_checked) {
      std::printf(" band [%.6g, %.6g] %s", e.band_lo, e.band_hi, e.in_band ? "PASS" : "FAIL");
    }
    std::printf("\n");
  }
  if (!report.all_in_band) {
    std::printf("cost band check FAILED\n");
    return 1;
  }
  return 0;
}

int cmd_dump_stream(const std::string& config_path, const std::string& out_path, int run_id,
                    long samples) {
  const streamopt::ExperimentConfig cfg = streamopt::load_config(config_path);
  const long n = samples > 0 ? samples : cfg.samples;
  streamopt::dump_stream(cfg, run_id, n, out_path);
  std::cout << "wrote " << n << " samples to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming stochastic optimization harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment and write the error-curve CSV");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_path, "output CSV path (overrides config)");
  run->add_option("--threads", threads, "worker threads across runs")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_given = true; });

  std::string v_config;
  CLI::App* validate = app.add_subcommand("validate", "check a config against all constraints");
  validate->add_option("--config", v_config, "experiment config file")->required();

  std::string cost_csv;
  double p_flag = -1.0;
  CLI::App* cost = app.add_subcommand("report-cost", "summarize rank-one update cost from a CSV");
  cost->add_option("--in", cost_csv, "input CSV produced by run")->required();
  cost->add_option("--p", p_flag, "inclusion probability for the band check (default: sidecar)");

  std::string d_config;
  std::string d_out;
  int d_run = 0;
  long d_samples = 0;
  CLI::App* dump = app.add_subcommand("dump-stream", "dump a run's raw sample stream as CSV");
  dump->add_option("--config", d_config, "experiment config file")->required();
  dump->add_option("--out", d_out, "output path")->required();
  dump->add_option("--run", d_run, "run id whose stream to reproduce");
  dump->add_option("--samples", d_samples, "sample count (default: config N)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, out_path, threads,
                     seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (validate->parsed()) return cmd_validate(v_config);
    if (cost->parsed())
      return cmd_report_cost(cost_csv,
                             p_flag >= 0.0 ? std::optional<double>(p_flag) : std::nullopt);
    if (dump->parsed()) return cmd_dump_stream(d_config, d_out, d_run, d_samples);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
