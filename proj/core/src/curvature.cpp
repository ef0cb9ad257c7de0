#include "streamopt/curvature.hpp"

#include <cmath>

#include "streamopt/errors.hpp"
#include "streamopt/schedules.hpp"

namespace streamopt {

namespace {

void check_options(const CurvatureOptions& opt) {
  if (!(opt.p > 0.0 && opt.p <= 1.0))
    throw InvalidSchedule("curvature: inclusion probability must lie in (0, 1]");
  if (!(opt.c_iota > 0.0)) throw InvalidSchedule("curvature: c_iota must be positive");
  if (!(opt.iota > 0.0)) throw InvalidSchedule("curvature: iota must be positive");
  if (!(opt.w_prime >= 0.0)) throw InvalidSchedule("curvature: w_prime must be >= 0");
}

}  // namespace

InverseCurvatureState::InverseCurvatureState(int dim, const CurvatureOptions& opt)
    : InverseCurvatureState(SymMatrix::identity(dim), opt) {}

InverseCurvatureState::InverseCurvatureState(SymMatrix h0_inverse, const CurvatureOptions& opt)
    : inv_(std::move(h0_inverse)),
      opt_(opt),
      basis_(inv_.dim(), 0.0),
      work_(inv_.dim(), 0.0) {
  check_options(opt_);
}

bool InverseCurvatureState::ingest(double alpha, std::span<const double> phi, long block_index,
                                   RngStream& rng) {
  if (static_cast<int>(phi.size()) != inv_.dim())
    throw DimensionMismatch("InverseCurvatureState::ingest: phi size mismatch");
  if (block_index < 1)
    throw InvalidSchedule("InverseCurvatureState::ingest: block index must be >= 1");
  if (!(alpha >= 0.0))
    throw DegenerateUpdate("InverseCurvatureState::ingest: alpha must be >= 0");

  ++offered_;
  if (!rng.bernoulli(opt_.p)) return false;

  ++accepted_;
  const double lw = log_weight(block_index, opt_.w_prime);

  if (opt_.regularize) {
    const long counter = 1 + accepted_;
    const double iota_val = opt_.c_iota * std::pow(static_cast<double>(counter), -opt_.iota);
    const int k = static_cast<int>((accepted_ - 1) % inv_.dim());
    basis_[k] = 1.0;
    const double coef = lw * iota_val;
    if (coef != 0.0) {
      rank_one_inverse_update(inv_, basis_, coef, work_);
      ++rank_one_updates_;
    }
    basis_[k] = 0.0;
  }

  const double data_coef = lw * alpha;
  if (data_coef != 0.0) {
    rank_one_inverse_update(inv_, phi, data_coef, work_);
    ++rank_one_updates_;
  }

  weighted_count_ += lw;
  return true;
}

void InverseCurvatureState::apply_scaling(std::span<const double> v, std::span<double> out) const {
  inv_.apply_into(v, out);
  for (double& x : out) x *= weighted_count_;
}

}  // namespace streamopt
