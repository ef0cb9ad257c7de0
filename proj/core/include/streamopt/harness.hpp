#pragma once

#include <optional>
#include <string>
#include <vector>

#include "streamopt/config.hpp"
#include "streamopt/datagen.hpp"

namespace streamopt {

// One checkpoint row of one run. run_id is 0-based; aggregate rows carry
// run_id = -1 with the method name suffixed ":mean" / ":std". wall_ns is the
// run's cumulative in-step wall time (0 unless timing was enabled, keeping
// default output byte-deterministic). rank_one_updates is cumulative.
struct RunRecord {
  std::string method;
  int run_id = 0;
  long t = 0;
  long n_seen = 0;
  double sq_error = 0.0;
  long long wall_ns = 0;
  long rank_one_updates = 0;
};

// Block indices at which runs record rows: a log-spaced grid of `count`
// target sample sizes over [n_1, N_T], mapped to the first block reaching
// each target, deduplicated; always contains the final block T (the first
// block at which the cumulative sample count reaches `samples`).
std::vector<long> checkpoint_blocks(const BatchSchedule& batch, long samples, int count);

struct ExperimentResult {
  std::vector<RunRecord> records;       // per-run + aggregate rows, sorted
  std::vector<Vector> final_estimates;  // per run; empty vector for diverged runs
  std::vector<int> diverged_runs;       // run ids that raised NonFiniteIterate
  long total_blocks = 0;
  long final_samples = 0;               // N_T
};

// Runs cfg.runs independent paths on one shared data-generating model (drawn
// from the experiment's model substream) and aggregates the completed ones.
// Every run has its own data / subsampling / initialization substreams keyed
// by (seed, id, method, run), so results are independent of `threads`.
// Diverged runs keep the rows recorded before the failure but are excluded
// from aggregates.
ExperimentResult run_experiment_detailed(const ExperimentConfig& cfg, int threads = 1);
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int threads = 1);

// The experiment's data-generating pieces; exposed so verification code can
// reconstruct the analytic curvature of the sampled distribution.
CovarianceModel experiment_model(const ExperimentConfig& cfg);
GroundTruth experiment_truth(const ExperimentConfig& cfg);

// CSV with header `method,run_id,t,n_seen,sq_error,wall_ns,rank_one_updates`,
// rows sorted by (method, run_id, t), doubles written with 17 significant
// digits so parse-back is exact. Throws IoError on unwritable/unreadable
// paths or malformed content.
void write_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_csv(const std::string& path);

// Sidecar written next to the CSV (path + ".meta"): resolved config, library
// version, block/sample totals and diverged-run report. Deterministic.
void write_metadata(const ExperimentConfig& cfg, const ExperimentResult& result,
                    const std::string& csv_path);

// Per-run cost summary from final checkpoint rows. For subsampled-curvature
// series the total update count is checked against the binomial band
// 2 p N +- 3 sqrt(4 N p (1-p)); p = 1 collapses the band to equality.
struct CostEntry {
  std::string method;
  int run_id = 0;
  long n_seen = 0;
  long updates = 0;
  double per_sample = 0.0;
  bool band_checked = false;
  bool in_band = true;
  double band_lo = 0.0;
  double band_hi = 0.0;
};

struct CostReport {
  std::vector<CostEntry> entries;
  bool all_in_band = true;
};

CostReport report_cost(const std::vector<RunRecord>& records, std::optional<double> p);

// Sample-stream dump for cross-language replay: one line per sample, the d
// feature values then the label, comma-separated, 17 significant digits.
// Reproduces run `run_id`'s stream exactly.
void dump_stream(const ExperimentConfig& cfg, int run_id, long samples, const std::string& path);

}  // namespace streamopt
