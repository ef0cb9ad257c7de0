#include "streamopt/datagen.hpp"

#include <cmath>

#include "streamopt/errors.hpp"

namespace streamopt {

namespace {

// Modified Gram-Schmidt with a second orthogonalization pass. Returns false
// if a column's residual norm collapses (probability ~0 for Gaussian draws).
bool orthonormalize(Matrix& m) {
  const int d = m.dim();
  for (int j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        double proj = 0.0;
        for (int i = 0; i < d; ++i) proj += m(i, k) * m(i, j);
        for (int i = 0; i < d; ++i) m(i, j) -= proj * m(i, k);
      }
    }
    double norm = 0.0;
    for (int i = 0; i < d; ++i) norm += m(i, j) * m(i, j);
    norm = std::sqrt(norm);
    if (!(norm > 1e-8)) return false;
    for (int i = 0; i < d; ++i) m(i, j) /= norm;
  }
  return true;
}

double orthogonality_defect(const Matrix& m) {
  const int d = m.dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += m(i, a) * m(i, b);
      if (a == b) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

}  // namespace

Matrix random_orthogonal(int d, RngStream& rng) {
  if (d < 1) throw DimensionMismatch("random_orthogonal: dimension must be >= 1");
  for (int attempt = 0; attempt < 16; ++attempt) {
    Matrix m(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = rng.gaussian();
    if (!orthonormalize(m)) continue;
    // Column residual norms are positive by construction, which fixes the
    // sign convention that makes the factor Haar-distributed.
    if (orthogonality_defect(m) <= 1e-10) return m;
  }
  throw SingularMatrix("random_orthogonal: repeated rank-deficient draws");
}

CovarianceModel::CovarianceModel(int d, RngStream& rng) : rotation_(random_orthogonal(d, rng)) {
  scales_.resize(d);
  for (int i = 0; i < d; ++i) scales_[i] = static_cast<double>(i + 1) / static_cast<double>(d);
}

CovarianceModel::CovarianceModel(Matrix rotation, Vector scales)
    : rotation_(std::move(rotation)), scales_(std::move(scales)) {
  if (rotation_.dim() != static_cast<int>(scales_.size()))
    throw DimensionMismatch("CovarianceModel: rotation/scales size mismatch");
}

Vector CovarianceModel::sample_x(RngStream& rng) const {
  Vector out(dim(), 0.0);
  Vector z(dim(), 0.0);
  sample_x_into(rng, out, z);
  return out;
}

void CovarianceModel::sample_x_into(RngStream& rng, std::span<double> out,
                                    std::span<double> zbuf) const {
  const int d = dim();
  if (static_cast<int>(out.size()) != d || static_cast<int>(zbuf.size()) != d)
    throw DimensionMismatch("sample_x_into: size mismatch");
  for (int i = 0; i < d; ++i) zbuf[i] = scales_[i] * rng.gaussian();
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += rotation_(i, j) * zbuf[j];
    out[i] = s;
  }
}

SymMatrix CovarianceModel::second_moment() const {
  const int d = dim();
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += rotation_(i, k) * scales_[k] * scales_[k] * rotation_(j, k);
      out.set(i, j, s);
    }
  }
  return out;
}

Vector ls_theta_star(int d) {
  Vector out(d, 0.0);
  if (d == 1) return out;
  const double half = static_cast<double>(d) / 2.0;
  for (int i = 0; i < d; ++i)
    out[i] = -half + static_cast<double>(i) * (2.0 * half) / static_cast<double>(d - 1);
  return out;
}

Vector logit_theta_star(int d) { return Vector(d, 1.0); }

double sample_label(const GroundTruth& truth, std::span<const double> x, RngStream& rng) {
  const double mean = dot(x, truth.theta_star);
  if (truth.problem == ProblemKind::kLeastSquares) {
    const double eps = rng.gaussian();  // consumed even when noise_sd == 0
    return mean + truth.noise_sd * eps;
  }
  return rng.bernoulli(sigmoid(mean)) ? 1.0 : 0.0;
}

Sample draw_sample(const CovarianceModel& model, const GroundTruth& truth, RngStream& rng) {
  Sample s;
  s.x = model.sample_x(rng);
  s.y = sample_label(truth, s.x, rng);
  return s;
}

void draw_batch(const CovarianceModel& model, const GroundTruth& truth, long n, RngStream& rng,
                std::vector<Sample>& out) {
  out.resize(static_cast<std::size_t>(n));
  Vector zbuf(model.dim(), 0.0);
  for (auto& s : out) {
    s.x.resize(model.dim());
    model.sample_x_into(rng, s.x, zbuf);
    s.y = sample_label(truth, s.x, rng);
  }
}

Vector sample_init(std::span<const double> theta_star, double r, RngStream& rng) {
  const std::size_t d = theta_star.size();
  Vector u(d, 0.0);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      u[i] = rng.gaussian();
      norm += u[i] * u[i];
    }
    norm = std::sqrt(norm);
  } while (!(norm > 0.0));
  Vector out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) out[i] = theta_star[i] * (1.0 + r * u[i] / norm);
  return out;
}

}  // namespace streamopt
