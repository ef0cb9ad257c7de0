#pragma once

// Independent reference implementations used only by tests: dense
// accumulate-and-invert mirrors of the incremental optimizer paths, finite
// differences, and small statistics helpers.

#include <cmath>
#include <span>
#include <vector>

#include "streamopt/streamopt.hpp"

namespace streamopt::testing {

// Central-difference gradient of the per-sample loss.
inline Vector fd_gradient(ProblemKind p, const Vector& theta, const Sample& s, double h) {
  Vector g(theta.size(), 0.0);
  Vector probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = eval(p, probe, s).loss;
    probe[i] = theta[i] - h;
    const double down = eval(p, probe, s).loss;
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Central-difference Hessian from analytic gradients, symmetrized.
inline SymMatrix fd_hessian(ProblemKind p, const Vector& theta, const Sample& s, double h) {
  const int d = static_cast<int>(theta.size());
  std::vector<Vector> cols(d);
  Vector probe = theta;
  for (int i = 0; i < d; ++i) {
    probe[i] = theta[i] + h;
    const Vector up = eval(p, probe, s).grad;
    probe[i] = theta[i] - h;
    const Vector down = eval(p, probe, s).grad;
    probe[i] = theta[i];
    cols[i].resize(d);
    for (int j = 0; j < d; ++j) cols[i][j] = (up[j] - down[j]) / (2.0 * h);
  }
  SymMatrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.set(i, j, 0.5 * (cols[i][j] + cols[j][i]));
  return out;
}

inline SymMatrix outer_hessian(double alpha, std::span<const double> phi) {
  SymMatrix out(static_cast<int>(phi.size()));
  out.add_outer(phi, alpha);
  return out;
}

// Dense mirror of the full-information curvature-scaled recursion: explicit
// weighted curvature accumulation and a fresh dense inversion every block.
// Inclusion is unconditional, so it matches the incremental path at p = 1.
class DenseNewtonReference {
 public:
  DenseNewtonReference(Vector theta0, ProblemKind problem, StepSchedule step,
                       CurvatureOptions opt)
      : theta_(std::move(theta0)),
        problem_(problem),
        step_(step),
        opt_(opt),
        h_(SymMatrix::identity(static_cast<int>(theta_.size()))) {}

  void step_block(std::span<const Sample> batch) {
    const int d = static_cast<int>(theta_.size());
    const long b = t_ + 1;
    const long n_b = static_cast<long>(batch.size());

    Vector grad(d, 0.0);
    std::vector<double> alphas(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const EvalResult ev = eval(problem_, theta_, batch[j]);
      alphas[j] = ev.alpha;
      for (int i = 0; i < d; ++i) grad[i] += ev.grad[i];
    }
    for (double& g : grad) g /= static_cast<double>(n_b);

    const double gamma = step_size(step_, b, n_b, samples_seen_ + n_b);
    const SymMatrix hinv = dense_inverse(h_);
    const Vector dir = hinv.apply(grad);
    for (int i = 0; i < d; ++i) theta_[i] -= gamma * weighted_count_ * dir[i];

    const double lw = log_weight(b, opt_.w_prime);
    for (std::size_t j = 0; j < batch.size(); ++j) {
      ++accepted_;
      if (opt_.regularize) {
        const double iota_val =
            opt_.c_iota * std::pow(static_cast<double>(1 + accepted_), -opt_.iota);
        const int k = static_cast<int>((accepted_ - 1) % d);
        h_.add(k, k, lw * iota_val);
      }
      h_.add_outer(batch[j].x, lw * alphas[j]);
      weighted_count_ += lw;
    }

    t_ = b;
    samples_seen_ += n_b;
  }

  const Vector& theta() const { return theta_; }
  const SymMatrix& curvature() const { return h_; }
  double weighted_count() const { return weighted_count_; }

 private:
  Vector theta_;
  ProblemKind problem_;
  StepSchedule step_;
  CurvatureOptions opt_;
  SymMatrix h_;
  double weighted_count_ = 1.0;
  long accepted_ = 0;
  long t_ = 0;
  long samples_seen_ = 0;
};

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline Vector random_vector(int d, RngStream& rng, double scale = 1.0) {
  Vector v(d, 0.0);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

}  // namespace streamopt::testing
