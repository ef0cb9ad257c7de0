#pragma once

#include <cstdint>
#include <string>

#include "streamopt/optimizers.hpp"

namespace streamopt {

// One experiment: a single (problem, method) pair replicated over independent
// runs on a shared data-generating model. Parsed from flat `key = value`
// text; '#' starts a comment; unknown keys are errors.
struct ExperimentConfig {
  std::string id;  // optional label folded into every RNG key
  ProblemKind problem = ProblemKind::kLeastSquares;
  Method method = Method::kSgd;
  bool averaged = false;  // defaulted per method (wassn: on) unless given
  int dim = 0;            // required: d
  long samples = 0;       // required: N, total sample budget per run
  int runs = 1;
  std::uint64_t seed = 0;
  int checkpoints = 50;   // log-spaced recording grid size
  double noise_sd = 1.0;
  double r = 1.0;         // initialization radius
  bool timing = false;    // off keeps output byte-deterministic (wall_ns = 0)
  std::string out = "out.csv";

  BatchSchedule batch;    // batch.n defaults to d
  StepSchedule step;      // mode implied by method
  double w = 2.0;
  double w_prime = 2.0;
  double p = 1.0;
  double c_iota = 1.0;
  double iota = 0.0;      // 0 means "default for the method"
  bool regularize = true;

  double adagrad_g0 = 1.0;
  ClampParams clamp;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);  // IoError if unreadable

// Full static validation (schedule constraints, method/step compatibility,
// curvature parameter ranges, field sanity); throws InvalidSchedule or
// ConfigError naming the violated constraint.
void validate_experiment(const ExperimentConfig& cfg);

// The per-run optimizer configuration implied by the experiment.
OptimizerConfig optimizer_config(const ExperimentConfig& cfg);

// Series name used in run records for this experiment's rows.
std::string series_name(const ExperimentConfig& cfg);

// Canonical sorted `key = value` dump of every resolved field; written to the
// metadata sidecar and stable across invocations.
std::string resolved_config_text(const ExperimentConfig& cfg);

}  // namespace streamopt
