#include "streamopt/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "streamopt/errors.hpp"

namespace streamopt {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

void SymMatrix::add_outer(std::span<const double> v, double c) {
  if (static_cast<int>(v.size()) != dim_) throw DimensionMismatch("add_outer: size mismatch");
  for (int i = 0; i < dim_; ++i) {
    const double ci = c * v[i];
    double* row = data_.data() + idx(i, 0);
    for (int j = 0; j < dim_; ++j) row[j] += ci * v[j];
  }
}

Vector SymMatrix::apply(std::span<const double> v) const {
  Vector out(dim_, 0.0);
  apply_into(v, out);
  return out;
}

void SymMatrix::apply_into(std::span<const double> v, std::span<double> out) const {
  if (static_cast<int>(v.size()) != dim_ || static_cast<int>(out.size()) != dim_)
    throw DimensionMismatch("SymMatrix::apply: size mismatch");
  for (int i = 0; i < dim_; ++i) {
    const double* row = data_.data() + idx(i, 0);
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += row[j] * v[j];
    out[i] = s;
  }
}

double SymMatrix::quad_form(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) throw DimensionMismatch("quad_form: size mismatch");
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double* row = data_.data() + idx(i, 0);
    double ri = 0.0;
    for (int j = 0; j < dim_; ++j) ri += row[j] * v[j];
    s += v[i] * ri;
  }
  return s;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool SymMatrix::all_finite() const { return streamopt::all_finite(data_); }

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) throw DimensionMismatch("Matrix::apply: size mismatch");
  Vector out(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = data_.data() + static_cast<std::size_t>(i) * dim_;
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

Vector Matrix::transpose_apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw DimensionMismatch("Matrix::transpose_apply: size mismatch");
  Vector out(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = data_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j < dim_; ++j) out[j] += row[j] * v[i];
  }
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

void rank_one_inverse_update(SymMatrix& inv, std::span<const double> v, double c,
                             std::span<double> work) {
  const int d = inv.dim();
  if (static_cast<int>(v.size()) != d || static_cast<int>(work.size()) != d)
    throw DimensionMismatch("rank_one_inverse_update: size mismatch");
  if (c == 0.0) return;

  inv.apply_into(v, work);  // work = inv v
  double vt_inv_v = 0.0;
  for (int i = 0; i < d; ++i) vt_inv_v += v[i] * work[i];
  const double denom = 1.0 + c * vt_inv_v;
  if (!(denom > kDenomTol))
    throw DegenerateUpdate("rank_one_inverse_update: 1 + c v^T inv v below tolerance");
  const double f = c / denom;

  std::span<double> m = inv.mutable_data();
  for (int i = 0; i < d; ++i) {
    const double fi = f * work[i];
    for (int j = i; j < d; ++j) {
      const double t = fi * work[j];
      m[static_cast<std::size_t>(i) * d + j] -= t;
      if (i != j) m[static_cast<std::size_t>(j) * d + i] -= t;
    }
  }
}

void rank_one_inverse_update(SymMatrix& inv, std::span<const double> v, double c) {
  Vector work(inv.dim(), 0.0);
  rank_one_inverse_update(inv, v, c, work);
}

SymMatrix dense_inverse(const SymMatrix& m) {
  const int d = m.dim();
  // Augmented Gauss-Jordan [A | I] -> [I | A^-1] with partial pivoting.
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  std::vector<double> r(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(i) * d + j] = m(i, j);
    r[static_cast<std::size_t>(i) * d + i] = 1.0;
  }
  auto row = [&](std::vector<double>& mat, int i) { return mat.data() + static_cast<std::size_t>(i) * d; };

  for (int col = 0; col < d; ++col) {
    int piv = col;
    double best = std::abs(row(a, col)[col]);
    for (int i = col + 1; i < d; ++i) {
      const double cand = std::abs(row(a, i)[col]);
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (!(best > kDenomTol)) throw SingularMatrix("dense_inverse: pivot below tolerance");
    if (piv != col) {
      for (int j = 0; j < d; ++j) std::swap(row(a, piv)[j], row(a, col)[j]);
      for (int j = 0; j < d; ++j) std::swap(row(r, piv)[j], row(r, col)[j]);
    }
    const double inv_piv = 1.0 / row(a, col)[col];
    for (int j = 0; j < d; ++j) row(a, col)[j] *= inv_piv;
    for (int j = 0; j < d; ++j) row(r, col)[j] *= inv_piv;
    for (int i = 0; i < d; ++i) {
      if (i == col) continue;
      const double f = row(a, i)[col];
      if (f == 0.0) continue;
      for (int j = 0; j < d; ++j) row(a, i)[j] -= f * row(a, col)[j];
      for (int j = 0; j < d; ++j) row(r, i)[j] -= f * row(r, col)[j];
    }
  }

  // Input is symmetric, so the exact inverse is too; average out the
  // elimination round-off.
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double v = 0.5 * (r[static_cast<std::size_t>(i) * d + j] +
                              r[static_cast<std::size_t>(j) * d + i]);
      out.set(i, j, v);
    }
  }
  return out;
}

Matrix product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("product: dim mismatch");
  const int d = a.dim();
  Matrix out(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix product(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("product: dim mismatch");
  const int d = a.dim();
  Matrix out(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff: dim mismatch");
  return max_abs_diff(a.data(), b.data());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double rel_frobenius_diff(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("rel_frobenius_diff: dim mismatch");
  double num = 0.0;
  std::span<const double> da = a.data();
  std::span<const double> db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double t = da[i] - db[i];
    num += t * t;
  }
  const double den = std::max(b.frobenius_norm(), 1e-300);
  return std::sqrt(num) / den;
}

}  // namespace streamopt
