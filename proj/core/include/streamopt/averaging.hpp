#pragma once

#include <cstdint>

#include "streamopt/linalg.hpp"

namespace streamopt {

// Online weighted running average: after updates with (x_i, w_i) the average
// equals sum(w_i x_i) / sum(w_i), maintained by the stable recursion
// avg += (w / cum_w) * (x - avg). While the cumulative weight is still zero
// the average tracks the latest iterate as a placeholder, so readers always
// see a well-defined vector.
class Averager {
 public:
  explicit Averager(int dim) : average_(dim, 0.0) {}

  // weight must be >= 0; DimensionMismatch if iterate has the wrong length.
  void update(std::span<const double> iterate, double weight);

  const Vector& average() const { return average_; }
  double cum_weight() const { return cum_weight_; }
  long steps_seen() const { return steps_seen_; }

 private:
  Vector average_;
  double cum_weight_ = 0.0;
  long steps_seen_ = 0;
};

}  // namespace streamopt
