#include "streamopt/optimizers.hpp"

#include <cmath>

#include "streamopt/errors.hpp"

namespace streamopt {

Method method_from_name(const std::string& name) {
  if (name == "sgd") return Method::kSgd;
  if (name == "adagrad") return Method::kAdagrad;
  if (name == "newton_direct") return Method::kNewtonDirect;
  if (name == "ssn") return Method::kSsn;
  if (name == "wassn") return Method::kWassn;
  throw ConfigError("unknown method: " + name);
}

std::string method_base_name(Method m) {
  switch (m) {
    case Method::kSgd: return "sgd";
    case Method::kAdagrad: return "adagrad";
    case Method::kNewtonDirect: return "newton_direct";
    case Method::kSsn: return "ssn";
    case Method::kWassn: return "wassn";
  }
  return "unknown";
}

std::string method_series_name(Method m, bool averaged) {
  if (m == Method::kWassn) return averaged ? "wassn" : "wassn_raw";
  return averaged ? method_base_name(m) + "_avg" : method_base_name(m);
}

namespace {

bool is_newton_family(Method m) {
  return m == Method::kNewtonDirect || m == Method::kSsn || m == Method::kWassn;
}

// Admissible regularizer decay range; outside it the scaled curvature
// estimate loses either its eigenvalue floor or its convergence rate.
double iota_upper_bound(const OptimizerConfig& cfg) {
  const double rho = cfg.batch.mode == BatchMode::kIncreasing ? cfg.batch.rho : 0.0;
  if (cfg.method == Method::kWassn) {
    const double eff = cfg.step.gamma - cfg.step.beta * rho;
    return std::min(eff, 2.0 * eff - 1.0 + rho) / (2.0 * (1.0 + rho));
  }
  return (1.0 - rho) / (2.0 * (1.0 + rho));
}

}  // namespace

Optimizer::Optimizer(const OptimizerConfig& cfg, Vector theta0) : cfg_(cfg), theta_(std::move(theta0)) {
  if (static_cast<int>(theta_.size()) != cfg_.dim)
    throw DimensionMismatch("Optimizer: theta0 size does not match dim");
  if (!all_finite(theta_)) throw NonFiniteIterate("Optimizer: theta0 has non-finite entries");
  validate_config();

  if (cfg_.averaged) averager_.emplace(cfg_.dim);
  if (is_newton_family(cfg_.method)) curv_.emplace(cfg_.dim, cfg_.curvature);
  if (cfg_.method == Method::kAdagrad) {
    grad_sq_acc_.assign(cfg_.dim, cfg_.adagrad_g0);
    scale_.assign(cfg_.dim, 0.0);
  }
  grad_.assign(cfg_.dim, 0.0);
  dir_.assign(cfg_.dim, 0.0);
}

void Optimizer::validate_config() const {
  validate(cfg_.step, cfg_.batch,
           cfg_.method == Method::kAdagrad ? std::optional<ClampParams>(cfg_.clamp) : std::nullopt);
  if (!(cfg_.w >= 0.0)) throw InvalidSchedule("averaging exponent w must be >= 0");

  switch (cfg_.method) {
    case Method::kSgd:
    case Method::kAdagrad:
      if (cfg_.step.mode != StepMode::kPowerLaw)
        throw InvalidSchedule(method_base_name(cfg_.method) + " requires a power-law step schedule");
      break;
    case Method::kNewtonDirect:
      if (cfg_.curvature.p != 1.0)
        throw InvalidSchedule("newton_direct requires inclusion probability p = 1");
      [[fallthrough]];
    case Method::kSsn:
      if (cfg_.step.mode != StepMode::kSampleProportion)
        throw InvalidSchedule(method_base_name(cfg_.method) +
                              " requires the sample-proportion step schedule");
      break;
    case Method::kWassn:
      if (cfg_.step.mode != StepMode::kPowerLaw)
        throw InvalidSchedule("wassn requires a power-law step schedule");
      break;
  }

  if (is_newton_family(cfg_.method)) {
    const double hi = iota_upper_bound(cfg_);
    if (!(cfg_.curvature.iota > 0.0 && cfg_.curvature.iota < hi)) {
      throw InvalidSchedule("curvature regularizer exponent iota must lie in (0, " +
                            std::to_string(hi) + ") for this configuration");
    }
  }

  if (cfg_.method == Method::kAdagrad && !(cfg_.adagrad_g0 >= 0.0))
    throw InvalidSchedule("adagrad accumulator seed must be >= 0");
}

const Vector& Optimizer::estimate() const {
  if (averager_ && averager_->cum_weight() > 0.0) return averager_->average();
  return theta_;
}

void Optimizer::step(std::span<const Sample> batch, RngStream& rng) {
  const long n_b = static_cast<long>(batch.size());
  if (n_b < 1) throw DimensionMismatch("Optimizer::step: batch must be nonempty");
  const long b = t_ + 1;
  const long cum_after = samples_seen_ + n_b;

  // Factored evaluation of the whole block at the pre-step iterate.
  grad_scales_.resize(batch.size());
  alphas_.resize(batch.size());
  std::fill(grad_.begin(), grad_.end(), 0.0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const PointEval pe = point_eval(cfg_.problem, theta_, batch[j]);
    grad_scales_[j] = pe.grad_scale;
    alphas_[j] = pe.alpha;
    const double gs = pe.grad_scale;
    const Vector& x = batch[j].x;
    for (int i = 0; i < cfg_.dim; ++i) grad_[i] += gs * x[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n_b);
  for (double& g : grad_) g *= inv_n;

  // The average absorbs the pre-step iterate theta_{b-1} with weight
  // ln(b)^w, scaled by the block size under increasing batches.
  if (averager_) {
    double weight = log_weight(t_, cfg_.w);
    if (cfg_.batch.mode == BatchMode::kIncreasing) weight *= static_cast<double>(n_b);
    averager_->update(theta_, weight);
  }

  const double gamma = step_size(cfg_.step, b, n_b, cum_after);

  switch (cfg_.method) {
    case Method::kSgd: {
      for (int i = 0; i < cfg_.dim; ++i) theta_[i] -= gamma * grad_[i];
      break;
    }
    case Method::kAdagrad: {
      for (std::size_t j = 0; j < batch.size(); ++j) {
        const double gs = grad_scales_[j];
        const Vector& x = batch[j].x;
        for (int i = 0; i < cfg_.dim; ++i) {
          const double g = gs * x[i];
          grad_sq_acc_[i] += g * g;
        }
      }
      const double n_total = static_cast<double>(cum_after);
      for (int i = 0; i < cfg_.dim; ++i) {
        // (acc/N)^(-1/2); an empty coordinate yields +inf and lands on the
        // upper clamp bound.
        const double raw = std::sqrt(n_total / grad_sq_acc_[i]);
        const double s = clamp_scale(cfg_.clamp, b, raw);
        const double hi = cfg_.clamp.c_hi * std::pow(static_cast<double>(b), cfg_.clamp.e_hi);
        const double lo = cfg_.clamp.c_lo * std::pow(static_cast<double>(b), cfg_.clamp.e_lo);
        if (!(s >= lo && s <= hi)) ++clamp_violations_;
        scale_[i] = s;
        theta_[i] -= gamma * s * grad_[i];
      }
      break;
    }
    case Method::kNewtonDirect:
    case Method::kSsn:
    case Method::kWassn: {
      curv_->apply_scaling(grad_, dir_);
      for (int i = 0; i < cfg_.dim; ++i) theta_[i] -= gamma * dir_[i];
      // Step-then-ingest: the block's curvature pairs, evaluated at the
      // pre-step iterate, enter the state only after the move.
      for (std::size_t j = 0; j < batch.size(); ++j)
        curv_->ingest(alphas_[j], batch[j].x, b, rng);
      break;
    }
  }

  if (!all_finite(theta_))
    throw NonFiniteIterate("Optimizer::step: iterate diverged at block " + std::to_string(b));

  t_ = b;
  samples_seen_ = cum_after;
}

}  // namespace streamopt
