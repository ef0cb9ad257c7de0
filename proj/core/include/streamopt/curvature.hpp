#pragma once

#include <cstdint>

#include "streamopt/linalg.hpp"
#include "streamopt/rng.hpp"

namespace streamopt {

struct CurvatureOptions {
  double p = 1.0;          // Bernoulli inclusion probability, in (0, 1]
  double c_iota = 1.0;     // regularizer coefficient scale
  double iota = 0.25;      // regularizer decay exponent
  double w_prime = 0.0;    // log-weight exponent applied to ingested samples
  bool regularize = true;  // false reproduces the plain unregularized recursion
};

// Maintains the inverse of the weighted, regularized curvature sum
//
//   H_t = H_0 + sum over accepted samples of
//         ln(b+1)^w' * (iota_val * e_k e_k^T  +  alpha * phi phi^T)
//
// where b is the block index of the sample, iota_val = c_iota * m^-iota with
// m = 1 + number of accepted samples so far (including the current one), and
// e_k cycles through the canonical basis in acceptance order. Each accepted
// sample also adds ln(b+1)^w' to the weighted count N, which starts at 1 to
// account for H_0. Every accepted sample costs two rank-one inverse updates,
// i.e. O(d^2); nothing here is ever O(d^3).
//
// The scaling matrix the optimizers need is N * inverse(), since the
// normalized curvature estimate is H_t / N.
class InverseCurvatureState {
 public:
  InverseCurvatureState(int dim, const CurvatureOptions& opt);
  // Custom initial curvature H_0, given by its inverse.
  InverseCurvatureState(SymMatrix h0_inverse, const CurvatureOptions& opt);

  // Offers one sample's curvature pair (alpha, phi) observed in block
  // `block_index` (>= 1). Draws one uniform from `rng` to decide inclusion;
  // the draw is consumed even when p == 1. Returns true if the sample was
  // accepted.
  bool ingest(double alpha, std::span<const double> phi, long block_index, RngStream& rng);

  int dim() const { return inv_.dim(); }
  const SymMatrix& inverse() const { return inv_; }
  double weighted_count() const { return weighted_count_; }
  long accepted_samples() const { return accepted_; }
  long offered_samples() const { return offered_; }
  long rank_one_updates() const { return rank_one_updates_; }
  const CurvatureOptions& options() const { return opt_; }

  // scale = N * inv applied to v: the step direction before the step size.
  void apply_scaling(std::span<const double> v, std::span<double> out) const;

 private:
  SymMatrix inv_;
  CurvatureOptions opt_;
  double weighted_count_ = 1.0;
  long accepted_ = 0;
  long offered_ = 0;
  long rank_one_updates_ = 0;
  Vector basis_;  // reusable canonical direction buffer
  Vector work_;   // workspace for rank-one updates
};

}  // namespace streamopt
