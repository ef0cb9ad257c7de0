#include <doctest.h>

#include <cmath>

#include "streamopt/errors.hpp"
#include "streamopt/schedules.hpp"

using namespace streamopt;

TEST_CASE("batch sizes: constant and increasing") {
  CHECK(batch_size(BatchSchedule::constant(100), 7) == 100);
  // floor(2 * 4^0.5) = 4
  CHECK(batch_size(BatchSchedule::increasing(2, 0.5), 4) == 4);
  CHECK(batch_size(BatchSchedule::increasing(2, 0.5), 1) == 2);
  CHECK_THROWS_AS(batch_size(BatchSchedule::constant(10), 0), InvalidSchedule);

  SUBCASE("increasing sizes are nondecreasing and at least 1") {
    const BatchSchedule s = BatchSchedule::increasing(3, 0.4);
    long prev = 0;
    for (long t = 1; t <= 1000; ++t) {
      const long n = batch_size(s, t);
      CHECK(n >= 1);
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("step sizes: power law and sample proportion") {
  const StepSchedule pl = StepSchedule::power_law(1.0, 0.75);
  CHECK(step_size(pl, 1, 100, 100) == doctest::Approx(1.0).epsilon(1e-15));

  // proportion step: block 9 of constant batches n gives n / (9n) = 1/9
  const StepSchedule sp = StepSchedule::sample_proportion();
  CHECK(step_size(sp, 9, 5, 45) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  // batch-size-dependent power law
  const StepSchedule plb = StepSchedule::power_law(1.0, 0.75, 0.25);
  const double expected = std::pow(8.0, 0.25) * std::pow(16.0, -0.75);
  CHECK(step_size(plb, 16, 8, 0 /*unused*/ + 128) == doctest::Approx(expected).epsilon(1e-15));

  CHECK_THROWS_AS(step_size(pl, 0, 1, 1), InvalidSchedule);
}

TEST_CASE("log weights") {
  CHECK(log_weight(0, 2.0) == 0.0);
  CHECK(log_weight(0, 0.0) == 1.0);
  CHECK(log_weight(1, 2.0) == doctest::Approx(std::pow(std::log(2.0), 2.0)).epsilon(1e-15));
  CHECK(log_weight(5, 1.0) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
}

TEST_CASE("clamp scale: band behavior") {
  const ClampParams c;  // 1 * t^0.2 upper, 1 * t^-0.2 lower
  const long t = 32;
  const double hi = std::pow(32.0, 0.2);
  const double lo = std::pow(32.0, -0.2);
  CHECK(clamp_scale(c, t, 1.0) == doctest::Approx(1.0));          // inside the band
  CHECK(clamp_scale(c, t, 100.0) == doctest::Approx(hi));         // clipped above
  CHECK(clamp_scale(c, t, 1e-6) == doctest::Approx(lo));          // clipped below
  CHECK(clamp_scale(c, 1, 123.0) == doctest::Approx(1.0));        // t = 1: both bounds are 1
}

TEST_CASE("validate: admissible configurations pass") {
  CHECK_NOTHROW(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::constant(100)));
  // diagonal-scaling clamp band: 2*0.2 - 0.75 + 0.2 = -0.15 < 0
  CHECK_NOTHROW(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::constant(100),
                         ClampParams{1.0, 0.2, 1.0, -0.2}));
  // increasing batches: gamma - beta*rho = 0.75 - 0.25*0.5 = 0.625 in (1/2, 1)
  CHECK_NOTHROW(validate(StepSchedule::power_law(1.0, 0.75, 0.25),
                         BatchSchedule::increasing(2, 0.5)));
  CHECK_NOTHROW(validate(StepSchedule::sample_proportion(), BatchSchedule::constant(1)));
}

TEST_CASE("validate: violations raise InvalidSchedule") {
  // gamma out of (1/2, 1)
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.4), BatchSchedule::constant(10)),
                  InvalidSchedule);
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 1.0), BatchSchedule::constant(10)),
                  InvalidSchedule);
  // effective exponent gamma - beta*rho = 0.75 - 1*0.5 = 0.25
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75, 1.0),
                           BatchSchedule::increasing(1, 0.5)),
                  InvalidSchedule);
  // beta must be 0 with constant batches
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75, 0.25), BatchSchedule::constant(10)),
                  InvalidSchedule);
  // batch constraints
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::constant(0)),
                  InvalidSchedule);
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::increasing(0, 0.5)),
                  InvalidSchedule);
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::increasing(2, 1.0)),
                  InvalidSchedule);
  // clamp band violations
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::constant(10),
                           ClampParams{1.0, 0.3, 1.0, -0.2}),
                  InvalidSchedule);  // e_hi >= gamma - 1/2
  CHECK_THROWS_AS(validate(StepSchedule::power_law(1.0, 0.75), BatchSchedule::constant(10),
                           ClampParams{1.0, 0.2, 1.0, -0.3}),
                  InvalidSchedule);  // e_lo <= gamma - 1
  // clamp with the proportion step is rejected outright
  CHECK_THROWS_AS(validate(StepSchedule::sample_proportion(), BatchSchedule::constant(10),
                           ClampParams{}),
                  InvalidSchedule);
}
