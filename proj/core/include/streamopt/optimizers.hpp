#pragma once

#include <optional>
#include <string>

#include "streamopt/averaging.hpp"
#include "streamopt/curvature.hpp"
#include "streamopt/linalg.hpp"
#include "streamopt/problems.hpp"
#include "streamopt/rng.hpp"
#include "streamopt/schedules.hpp"

namespace streamopt {

// kSgd          identity direction scaling
// kAdagrad      clamped diagonal scaling from accumulated squared gradients
// kNewtonDirect full-information inverse-curvature scaling (inclusion p = 1)
// kSsn          subsampled inverse-curvature scaling (Bernoulli inclusion)
// kWassn        subsampled inverse-curvature scaling with a power-law step
//               and a weighted-average readout
enum class Method { kSgd, kAdagrad, kNewtonDirect, kSsn, kWassn };

Method method_from_name(const std::string& name);
std::string method_base_name(Method m);
// Series name as reported in run records: base name, "_avg" appended when an
// optional average readout is on, "wassn_raw" when wassn's readout is off.
std::string method_series_name(Method m, bool averaged);

struct OptimizerConfig {
  Method method = Method::kSgd;
  ProblemKind problem = ProblemKind::kLeastSquares;
  int dim = 1;
  StepSchedule step;
  BatchSchedule batch;
  bool averaged = false;  // maintain and report the weighted average
  double w = 2.0;         // averaging log-weight exponent
  CurvatureOptions curvature;
  ClampParams clamp;
  double adagrad_g0 = 1.0;
};

// One optimization path over a sample stream, fed block by block. Blocks are
// indexed from 1; block b is processed with the pre-step iterate theta_{b-1}:
// the average absorbs theta_{b-1} with weight ln(b)^w (times n_b for
// increasing batches), the step moves along the scaled mean gradient with
// step size gamma_b, and for the Newton family the block's curvature pairs
// are ingested after the move. Per-block work is O(n d) plus O(d^2) for the
// direction solve plus O(d^2) per accepted curvature sample.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, Vector theta0);

  // `rng` drives curvature subsampling only; SGD and the diagonal method do
  // not consume from it. Throws NonFiniteIterate if the new iterate has a
  // non-finite entry.
  void step(std::span<const Sample> batch, RngStream& rng);

  const OptimizerConfig& config() const { return cfg_; }
  const Vector& iterate() const { return theta_; }

  // Reported estimate: the weighted average once it has absorbed positive
  // weight, the raw iterate before that (and always, when averaging is off).
  const Vector& estimate() const;

  long t() const { return t_; }  // blocks processed
  long samples_seen() const { return samples_seen_; }
  long rank_one_updates() const { return curv_ ? curv_->rank_one_updates() : 0; }

  const InverseCurvatureState* curvature() const { return curv_ ? &*curv_ : nullptr; }
  const Averager* averager() const { return averager_ ? &*averager_ : nullptr; }

  // Diagonal-scaling introspection (empty unless method == kAdagrad).
  const Vector& diagonal_scales() const { return scale_; }
  long clamp_violations() const { return clamp_violations_; }

 private:
  void validate_config() const;

  OptimizerConfig cfg_;
  Vector theta_;
  long t_ = 0;
  long samples_seen_ = 0;

  std::optional<Averager> averager_;
  std::optional<InverseCurvatureState> curv_;

  // adagrad state
  Vector grad_sq_acc_;
  Vector scale_;
  long clamp_violations_ = 0;

  // reusable per-block buffers
  Vector grad_;
  Vector dir_;
  std::vector<double> grad_scales_;
  std::vector<double> alphas_;
};

}  // namespace streamopt
