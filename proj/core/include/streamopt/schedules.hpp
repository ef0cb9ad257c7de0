#pragma once

#include <cstdint>
#include <optional>

namespace streamopt {

// Mini-batch size sequence n_t, t >= 1.
enum class BatchMode { kConstant, kIncreasing };

struct BatchSchedule {
  BatchMode mode = BatchMode::kConstant;
  long n = 1;         // constant size
  long c_rho = 1;     // increasing: floor(c_rho * t^rho)
  double rho = 0.0;   // increasing exponent, in [0, 1)

  static BatchSchedule constant(long n);
  static BatchSchedule increasing(long c_rho, double rho);
};

long batch_size(const BatchSchedule& s, long t);

// Step size sequence gamma_t, t >= 1. PowerLaw: c_gamma * n_t^beta * (t + t0)^-gamma.
// SampleProportion: n_t / N_t (the Newton-family step; 1/t for constant batches).
enum class StepMode { kPowerLaw, kSampleProportion };

struct StepSchedule {
  StepMode mode = StepMode::kPowerLaw;
  double c_gamma = 1.0;
  double gamma = 0.75;
  double beta = 0.0;
  double t0 = 0.0;

  static StepSchedule power_law(double c_gamma, double gamma, double beta = 0.0, double t0 = 0.0);
  static StepSchedule sample_proportion();
};

// n_t and cumulative N_t are those of block t (N_t includes block t).
double step_size(const StepSchedule& s, long t, long n_t, long cum_n_t);

// ln(t+1)^exponent; returns 1 when exponent == 0 (including t == 0).
double log_weight(long t, double exponent);

// Elementwise clamp band parameters for the adaptive diagonal scaling:
// scale_k(t) = max(c_lo * t^e_lo, min(c_hi * t^e_hi, raw_k)), with e_hi > 0 > e_lo.
struct ClampParams {
  double c_hi = 1.0;
  double e_hi = 0.2;
  double c_lo = 1.0;
  double e_lo = -0.2;
};

double clamp_scale(const ClampParams& c, long t, double raw);

// Validates the joint step/batch (and optional clamp) configuration; throws
// InvalidSchedule naming the violated constraint. The admissible region for
// the power-law family shrinks with increasing batches: gamma - beta*rho must
// stay in (1/2, 1) and gamma > (rho*(2*beta - 1) + 1)/2. Clamp exponents must
// satisfy e_hi in (0, gamma - beta*rho - 1/2), e_lo in (gamma - beta*rho - 1, 0)
// and 2*e_hi - (gamma - beta*rho) - e_lo < 0.
void validate(const StepSchedule& step, const BatchSchedule& batch,
              const std::optional<ClampParams>& clamp = std::nullopt);

}  // namespace streamopt
