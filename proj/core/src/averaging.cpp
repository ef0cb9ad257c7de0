#include "streamopt/averaging.hpp"

#include <cassert>

#include "streamopt/errors.hpp"

namespace streamopt {

void Averager::update(std::span<const double> iterate, double weight) {
  if (iterate.size() != average_.size())
    throw DimensionMismatch("Averager::update: iterate size mismatch");
  assert(weight >= 0.0);
  ++steps_seen_;
  if (weight == 0.0) {
    if (cum_weight_ == 0.0) {
      for (std::size_t i = 0; i < average_.size(); ++i) average_[i] = iterate[i];
    }
    return;  // positive history: zero-weight update leaves the average unchanged
  }
  cum_weight_ += weight;
  const double coef = weight / cum_weight_;
  for (std::size_t i = 0; i < average_.size(); ++i)
    average_[i] += coef * (iterate[i] - average_[i]);
}

}  // namespace streamopt
