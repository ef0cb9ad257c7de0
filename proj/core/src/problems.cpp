#include "streamopt/problems.hpp"

#include <cmath>

#include "streamopt/errors.hpp"

namespace streamopt {

std::string problem_name(ProblemKind p) {
  return p == ProblemKind::kLeastSquares ? "ls" : "logit";
}

ProblemKind problem_from_name(const std::string& name) {
  if (name == "ls") return ProblemKind::kLeastSquares;
  if (name == "logit") return ProblemKind::kLogistic;
  throw ConfigError("unknown problem: " + name);
}

double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

double sigmoid(double u) {
  if (u >= 0.0) {
    return 1.0 / (1.0 + std::exp(-u));
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

PointEval ls_point_eval(std::span<const double> theta, const Sample& s) {
  if (theta.size() != s.x.size()) throw DimensionMismatch("ls_point_eval: size mismatch");
  const double resid = s.y - dot(s.x, theta);
  PointEval out;
  out.loss = 0.5 * resid * resid;
  out.grad_scale = -resid;
  out.alpha = 1.0;
  return out;
}

PointEval logit_point_eval(std::span<const double> theta, const Sample& s) {
  if (theta.size() != s.x.size()) throw DimensionMismatch("logit_point_eval: size mismatch");
  if (s.y != 0.0 && s.y != 1.0)
    throw InvalidLabel("logit_point_eval: label must be 0 or 1");
  const double u = dot(s.x, theta);
  const double sig = sigmoid(u);
  PointEval out;
  out.loss = softplus(u) - s.y * u;
  out.grad_scale = sig - s.y;
  out.alpha = sig * (1.0 - sig);
  return out;
}

PointEval point_eval(ProblemKind p, std::span<const double> theta, const Sample& s) {
  return p == ProblemKind::kLeastSquares ? ls_point_eval(theta, s) : logit_point_eval(theta, s);
}

namespace {

EvalResult materialize(const PointEval& pe, const Sample& s) {
  EvalResult out;
  out.loss = pe.loss;
  out.alpha = pe.alpha;
  out.grad.resize(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) out.grad[i] = pe.grad_scale * s.x[i];
  out.phi = s.x;
  return out;
}

}  // namespace

EvalResult ls_eval(std::span<const double> theta, const Sample& s) {
  return materialize(ls_point_eval(theta, s), s);
}

EvalResult logit_eval(std::span<const double> theta, const Sample& s) {
  return materialize(logit_point_eval(theta, s), s);
}

EvalResult eval(ProblemKind p, std::span<const double> theta, const Sample& s) {
  return materialize(point_eval(p, theta, s), s);
}

}  // namespace streamopt
