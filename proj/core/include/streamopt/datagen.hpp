#pragma once

#include <vector>

#include "streamopt/linalg.hpp"
#include "streamopt/problems.hpp"
#include "streamopt/rng.hpp"

namespace streamopt {

// Haar-distributed random orthogonal matrix: orthonormalization of an iid
// Gaussian matrix with the triangular factor's diagonal kept positive.
// Guarantees ||M^T M - I||_max <= 1e-10, redrawing on a numerically
// rank-deficient draw.
Matrix random_orthogonal(int d, RngStream& rng);

// Feature model x = M diag(s) z with z iid standard Gaussian, s_i = i/d for
// i = 1..d. The second moment E[x x^T] = M diag(s^2) M^T is known in closed
// form, with eigenvalue spread (s_max/s_min)^2 = d^2.
class CovarianceModel {
 public:
  CovarianceModel(int d, RngStream& rng);
  CovarianceModel(Matrix rotation, Vector scales);

  int dim() const { return static_cast<int>(scales_.size()); }
  const Matrix& rotation() const { return rotation_; }
  const Vector& scales() const { return scales_; }

  Vector sample_x(RngStream& rng) const;
  void sample_x_into(RngStream& rng, std::span<double> out, std::span<double> zbuf) const;

  SymMatrix second_moment() const;  // analytic E[x x^T]

 private:
  Matrix rotation_;
  Vector scales_;
};

struct GroundTruth {
  ProblemKind problem = ProblemKind::kLeastSquares;
  Vector theta_star;
  double noise_sd = 1.0;  // least-squares residual noise; ignored for logistic
};

// Least squares: d evenly spaced values from -d/2 to d/2 (0 when d == 1).
Vector ls_theta_star(int d);
// Logistic: all ones.
Vector logit_theta_star(int d);

// Draws y given x: x.theta* + noise_sd * N(0,1) for least squares (one
// gaussian consumed even when noise_sd == 0), Bernoulli(sigmoid(x.theta*))
// in {0, 1} for logistic (one uniform consumed).
double sample_label(const GroundTruth& truth, std::span<const double> x, RngStream& rng);

Sample draw_sample(const CovarianceModel& model, const GroundTruth& truth, RngStream& rng);
void draw_batch(const CovarianceModel& model, const GroundTruth& truth, long n, RngStream& rng,
                std::vector<Sample>& out);

// theta0 = theta* elementwise-scaled by (1 + r U), with U uniform on the unit
// sphere (d gaussians consumed, then normalized). r = 0 returns theta* while
// still consuming the draws.
Vector sample_init(std::span<const double> theta_star, double r, RngStream& rng);

}  // namespace streamopt
