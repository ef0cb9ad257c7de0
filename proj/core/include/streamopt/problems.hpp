#pragma once

#include <string>

#include "streamopt/linalg.hpp"

namespace streamopt {

enum class ProblemKind { kLeastSquares, kLogistic };

std::string problem_name(ProblemKind p);
ProblemKind problem_from_name(const std::string& name);

struct Sample {
  Vector x;
  double y = 0.0;
};

// Per-sample evaluation in factored form: the gradient is grad_scale * x and
// the per-sample Hessian is alpha * x x^T, which is all the optimizers need
// and avoids materializing vectors in hot loops.
struct PointEval {
  double loss = 0.0;
  double grad_scale = 0.0;
  double alpha = 0.0;
};

// Least squares: loss = 0.5 (y - x.theta)^2, grad = -(y - x.theta) x, alpha = 1.
PointEval ls_point_eval(std::span<const double> theta, const Sample& s);

// Logistic with labels in {0, 1}: loss = softplus(x.theta) - y * x.theta,
// grad = (sigmoid(x.theta) - y) x, alpha = sigmoid * (1 - sigmoid) <= 1/4.
// Throws InvalidLabel for labels outside {0, 1}.
PointEval logit_point_eval(std::span<const double> theta, const Sample& s);

PointEval point_eval(ProblemKind p, std::span<const double> theta, const Sample& s);

// Materialized form used by verification code and external callers.
struct EvalResult {
  double loss = 0.0;
  Vector grad;
  double alpha = 0.0;  // Hessian factor: alpha * phi phi^T
  Vector phi;
};

EvalResult ls_eval(std::span<const double> theta, const Sample& s);
EvalResult logit_eval(std::span<const double> theta, const Sample& s);
EvalResult eval(ProblemKind p, std::span<const double> theta, const Sample& s);

// Overflow-safe helpers shared with tests.
double softplus(double u);  // max(u, 0) + log1p(exp(-|u|))
double sigmoid(double u);

}  // namespace streamopt
