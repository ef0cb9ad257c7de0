#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace streamopt {

using Vector = std::vector<double>;

// Pivots and rank-one denominators at or below this magnitude are treated as
// numerically singular / degenerate.
inline constexpr double kDenomTol = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

// Dense symmetric d x d matrix, row-major full storage. Mutating entry access
// is through set()/add() which write both triangles, so instances stay exactly
// symmetric by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  static SymMatrix identity(int dim);

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  void set(int i, int j, double value) {
    data_[idx(i, j)] = value;
    data_[idx(j, i)] = value;
  }

  void add(int i, int j, double value) {
    data_[idx(i, j)] += value;
    if (i != j) data_[idx(j, i)] = data_[idx(i, j)];
  }

  // M += c * v v^T
  void add_outer(std::span<const double> v, double c);

  // M v
  Vector apply(std::span<const double> v) const;
  void apply_into(std::span<const double> v, std::span<double> out) const;

  // v^T M v
  double quad_form(std::span<const double> v) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * dim_ + j; }

  int dim_ = 0;
  std::vector<double> data_;
};

// Plain dense square matrix (row-major), used for non-symmetric operands such
// as orthogonal rotations and matrix products in checks.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  static Matrix identity(int dim);

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim_ + j]; }

  Vector apply(std::span<const double> v) const;            // M v
  Vector transpose_apply(std::span<const double> v) const;  // M^T v
  double max_abs() const;

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// In-place Sherman-Morrison update of a maintained inverse: given inv = H^-1,
// rewrites inv to (H + c v v^T)^-1 = inv - [c / (1 + c v^T inv v)] (inv v)(inv v)^T.
// The subtracted term is symmetric, and both triangles are written from the
// same product, so the result equals its own symmetrization exactly.
// Throws DegenerateUpdate when 1 + c v^T inv v <= kDenomTol, leaving inv
// untouched. c = 0 is a no-op. `work` must have length inv.dim().
void rank_one_inverse_update(SymMatrix& inv, std::span<const double> v, double c,
                             std::span<double> work);
void rank_one_inverse_update(SymMatrix& inv, std::span<const double> v, double c);

// Gauss-Jordan inversion with partial pivoting; the independent dense route
// used to cross-check the incremental inverse. Throws SingularMatrix when a
// pivot magnitude falls to kDenomTol or below. The result of inverting a
// symmetric input is re-symmetrized before returning.
SymMatrix dense_inverse(const SymMatrix& m);

// Dense products for verification code (results are not symmetric in general).
Matrix product(const SymMatrix& a, const SymMatrix& b);
Matrix product(const Matrix& a, const Matrix& b);

// max_ij |a_ij - b_ij|; DimensionMismatch if shapes differ.
double max_abs_diff(const SymMatrix& a, const SymMatrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// ||a - b||_F / max(||b||_F, tiny)
double rel_frobenius_diff(const SymMatrix& a, const SymMatrix& b);

}  // namespace streamopt
