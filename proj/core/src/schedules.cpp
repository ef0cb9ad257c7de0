#include "streamopt/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "streamopt/errors.hpp"

namespace streamopt {

BatchSchedule BatchSchedule::constant(long n) {
  BatchSchedule s;
  s.mode = BatchMode::kConstant;
  s.n = n;
  return s;
}

BatchSchedule BatchSchedule::increasing(long c_rho, double rho) {
  BatchSchedule s;
  s.mode = BatchMode::kIncreasing;
  s.c_rho = c_rho;
  s.rho = rho;
  return s;
}

long batch_size(const BatchSchedule& s, long t) {
  if (t < 1) throw InvalidSchedule("batch_size: block index must be >= 1");
  if (s.mode == BatchMode::kConstant) return s.n;
  const double raw = static_cast<double>(s.c_rho) * std::pow(static_cast<double>(t), s.rho);
  return std::max<long>(1, static_cast<long>(std::floor(raw)));
}

StepSchedule StepSchedule::power_law(double c_gamma, double gamma, double beta, double t0) {
  StepSchedule s;
  s.mode = StepMode::kPowerLaw;
  s.c_gamma = c_gamma;
  s.gamma = gamma;
  s.beta = beta;
  s.t0 = t0;
  return s;
}

StepSchedule StepSchedule::sample_proportion() {
  StepSchedule s;
  s.mode = StepMode::kSampleProportion;
  return s;
}

double step_size(const StepSchedule& s, long t, long n_t, long cum_n_t) {
  if (t < 1) throw InvalidSchedule("step_size: block index must be >= 1");
  if (s.mode == StepMode::kSampleProportion) {
    if (cum_n_t <= 0) throw InvalidSchedule("step_size: cumulative sample count must be positive");
    return static_cast<double>(n_t) / static_cast<double>(cum_n_t);
  }
  return s.c_gamma * std::pow(static_cast<double>(n_t), s.beta) *
         std::pow(static_cast<double>(t) + s.t0, -s.gamma);
}

double log_weight(long t, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(std::log(static_cast<double>(t) + 1.0), exponent);
}

double clamp_scale(const ClampParams& c, long t, double raw) {
  const double hi = c.c_hi * std::pow(static_cast<double>(t), c.e_hi);
  const double lo = c.c_lo * std::pow(static_cast<double>(t), c.e_lo);
  return std::max(lo, std::min(hi, raw));
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidSchedule(what); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

void validate(const StepSchedule& step, const BatchSchedule& batch,
              const std::optional<ClampParams>& clamp) {
  double rho = 0.0;
  if (batch.mode == BatchMode::kConstant) {
    if (batch.n < 1) fail("batch: constant size must be >= 1, got " + std::to_string(batch.n));
  } else {
    if (batch.c_rho < 1)
      fail("batch: increasing coefficient must be >= 1, got " + std::to_string(batch.c_rho));
    if (!(batch.rho >= 0.0 && batch.rho < 1.0))
      fail("batch: increasing exponent must lie in [0, 1), got " + fmt(batch.rho));
    rho = batch.rho;
  }

  if (step.mode == StepMode::kSampleProportion) {
    if (clamp.has_value())
      fail("clamp: diagonal clamp band requires a power-law step schedule");
    return;  // no free parameters
  }

  if (!(step.c_gamma > 0.0)) fail("step: c_gamma must be positive, got " + fmt(step.c_gamma));
  if (!(step.t0 >= 0.0)) fail("step: t0 must be nonnegative, got " + fmt(step.t0));
  if (batch.mode == BatchMode::kConstant && step.beta != 0.0)
    fail("step: beta must be 0 with constant batches, got " + fmt(step.beta));

  const double eff = step.gamma - step.beta * rho;  // decay exponent per block
  if (!(eff > 0.5 && eff < 1.0))
    fail("step: gamma - beta*rho must lie in (1/2, 1), got " + fmt(eff));
  const double lower = (rho * (2.0 * step.beta - 1.0) + 1.0) / 2.0;
  if (!(step.gamma > lower))
    fail("step: gamma must exceed (rho*(2*beta - 1) + 1)/2 = " + fmt(lower) + ", got " +
         fmt(step.gamma));

  if (clamp.has_value()) {
    const ClampParams& c = *clamp;
    if (!(c.c_hi > 0.0 && c.c_lo > 0.0)) fail("clamp: band coefficients must be positive");
    if (!(c.e_hi > 0.0 && c.e_hi < eff - 0.5))
      fail("clamp: upper exponent must lie in (0, gamma - beta*rho - 1/2), got " + fmt(c.e_hi));
    if (!(c.e_lo > eff - 1.0 && c.e_lo < 0.0))
      fail("clamp: lower exponent must lie in (gamma - beta*rho - 1, 0), got " + fmt(c.e_lo));
    if (!(2.0 * c.e_hi - eff - c.e_lo < 0.0))
      fail("clamp: 2*e_hi - (gamma - beta*rho) - e_lo must be negative, got " +
           fmt(2.0 * c.e_hi - eff - c.e_lo));
  }
}

}  // namespace streamopt
