#include <doctest.h>

#include <cmath>

#include "streamopt/datagen.hpp"
#include "streamopt/errors.hpp"
#include "streamopt/optimizers.hpp"
#include "support/oracles.hpp"

using namespace streamopt;
using streamopt::testing::DenseNewtonReference;
using streamopt::testing::random_vector;

namespace {

OptimizerConfig base_config(Method m, int dim, ProblemKind problem = ProblemKind::kLeastSquares) {
  OptimizerConfig cfg;
  cfg.method = m;
  cfg.problem = problem;
  cfg.dim = dim;
  cfg.batch = BatchSchedule::constant(dim);
  switch (m) {
    case Method::kSsn:
    case Method::kNewtonDirect:
      cfg.step = StepSchedule::sample_proportion();
      cfg.curvature.iota = 0.25;
      break;
    default:
      cfg.step = StepSchedule::power_law(1.0, 0.75);
      cfg.curvature.iota = 0.1;
      break;
  }
  cfg.curvature.w_prime = 2.0;
  return cfg;
}

std::vector<std::vector<Sample>> generate_blocks(const CovarianceModel& model,
                                                 const GroundTruth& truth, long blocks, long n,
                                                 std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<std::vector<Sample>> out(blocks);
  for (auto& b : out) draw_batch(model, truth, n, rng, b);
  return out;
}

}  // namespace

TEST_CASE("sgd: three scripted single-sample blocks match scalar arithmetic") {
  OptimizerConfig cfg = base_config(Method::kSgd, 2);
  cfg.batch = BatchSchedule::constant(1);
  Optimizer opt(cfg, Vector{0.0, 0.0});
  RngStream rng(0);

  const Sample s1{{1.0, 0.0}, 1.0};
  opt.step(std::vector<Sample>{s1}, rng);
  // grad = -(1 - 0) e1, gamma_1 = 1
  CHECK(opt.iterate()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(opt.iterate()[1] == 0.0);

  const Sample s2{{0.0, 1.0}, 2.0};
  opt.step(std::vector<Sample>{s2}, rng);
  const double g2 = std::pow(2.0, -0.75);
  CHECK(opt.iterate()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(opt.iterate()[1] == doctest::Approx(2.0 * g2).epsilon(1e-15));

  const Sample s3{{1.0, 1.0}, 0.0};
  const double pred = opt.iterate()[0] + opt.iterate()[1];
  opt.step(std::vector<Sample>{s3}, rng);
  const double g3 = std::pow(3.0, -0.75);
  CHECK(opt.iterate()[0] == doctest::Approx(1.0 - g3 * pred).epsilon(1e-14));
  CHECK(opt.iterate()[1] == doctest::Approx(2.0 * g2 - g3 * pred).epsilon(1e-14));
}

TEST_CASE("adagrad: scripted blocks match the clamped diagonal arithmetic") {
  OptimizerConfig cfg = base_config(Method::kAdagrad, 2);
  cfg.batch = BatchSchedule::constant(2);
  Optimizer opt(cfg, Vector{0.0, 0.0});
  RngStream rng(0);

  // Block 1: both clamp bounds equal 1 at t = 1, so the scale is forced to 1.
  const std::vector<Sample> b1 = {{{1.0, 0.0}, 1.0}, {{0.0, 2.0}, 2.0}};
  opt.step(b1, rng);
  // per-sample grads (-1, 0), (0, -4); mean (-1/2, -2); acc = (1,1) + (1,16)
  CHECK(opt.iterate()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(opt.iterate()[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(opt.diagonal_scales()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(opt.diagonal_scales()[1] == doctest::Approx(1.0).epsilon(1e-15));

  // Block 2: raw scales fall below the lower clamp bound 2^-0.2 and bind.
  const std::vector<Sample> b2 = {{{1.0, 1.0}, 0.0}, {{1.0, 0.0}, 0.5}};
  const double pred = opt.iterate()[0] + opt.iterate()[1];  // 2.5
  opt.step(b2, rng);
  const double acc0 = 2.0 + pred * pred;   // 8.25
  const double acc1 = 17.0 + pred * pred;  // 23.25
  const double lo = std::pow(2.0, -0.2);
  const double raw0 = std::sqrt(4.0 / acc0);
  const double raw1 = std::sqrt(4.0 / acc1);
  CHECK(raw0 < lo);
  CHECK(raw1 < lo);
  CHECK(opt.diagonal_scales()[0] == doctest::Approx(lo).epsilon(1e-15));
  CHECK(opt.diagonal_scales()[1] == doctest::Approx(lo).epsilon(1e-15));
  const double g2 = std::pow(2.0, -0.75);
  const double mean0 = pred / 2.0;
  const double mean1 = pred / 2.0;
  CHECK(opt.iterate()[0] == doctest::Approx(0.5 - g2 * lo * mean0).epsilon(1e-14));
  CHECK(opt.iterate()[1] == doctest::Approx(2.0 - g2 * lo * mean1).epsilon(1e-14));
  CHECK(opt.clamp_violations() == 0);
}

TEST_CASE("curvature-scaled step: first scalar block lands on the label") {
  for (Method m : {Method::kNewtonDirect, Method::kSsn}) {
    OptimizerConfig cfg = base_config(m, 1);
    cfg.batch = BatchSchedule::constant(1);
    Optimizer opt(cfg, Vector{0.0});
    RngStream rng(0);
    opt.step(std::vector<Sample>{{{1.0}, 1.0}}, rng);
    // grad = -1, scaling = weighted_count * inv = 1, gamma_1 = 1
    CHECK(opt.iterate()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(opt.rank_one_updates() == 2);
  }
}

TEST_CASE("full-inclusion curvature path matches the dense reinversion reference") {
  const int d = 3;
  RngStream model_rng(12);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};
  const auto blocks = generate_blocks(model, truth, 50, d, 77);

  OptimizerConfig cfg = base_config(Method::kSsn, d);
  Optimizer opt(cfg, Vector(d, 0.0));
  DenseNewtonReference ref(Vector(d, 0.0), ProblemKind::kLeastSquares, cfg.step, cfg.curvature);
  RngStream z_rng(99);

  for (const auto& block : blocks) {
    opt.step(block, z_rng);
    ref.step_block(block);
    CHECK(max_abs_diff(opt.iterate(), ref.theta()) <= 1e-6);
  }
  CHECK(opt.rank_one_updates() == 2 * 50 * d);
}

TEST_CASE("subsampled path with p = 1 reproduces the full-inclusion method exactly") {
  const int d = 4;
  RngStream model_rng(5);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};
  const auto blocks = generate_blocks(model, truth, 30, d, 6);

  OptimizerConfig ssn_cfg = base_config(Method::kSsn, d);
  OptimizerConfig direct_cfg = base_config(Method::kNewtonDirect, d);
  Optimizer ssn(ssn_cfg, Vector(d, 1.0));
  Optimizer direct(direct_cfg, Vector(d, 1.0));
  RngStream rng_a(123);
  RngStream rng_b(123);
  for (const auto& block : blocks) {
    ssn.step(block, rng_a);
    direct.step(block, rng_b);
    CHECK(max_abs_diff(ssn.iterate(), direct.iterate()) == 0.0);
  }
}

TEST_CASE("subsampled run matches a hand-maintained dense state with replayed inclusion draws") {
  const int d = 2;
  RngStream model_rng(31);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};
  const auto blocks = generate_blocks(model, truth, 200, 1, 32);

  OptimizerConfig cfg = base_config(Method::kSsn, d);
  cfg.batch = BatchSchedule::constant(1);
  cfg.curvature.p = 0.5;
  Optimizer opt(cfg, Vector{2.0, -2.0});
  RngStream z_rng(500);
  RngStream shadow(500);  // replays the optimizer's inclusion draws

  Vector theta = {2.0, -2.0};
  SymMatrix h = SymMatrix::identity(d);
  double nz = 1.0;
  long accepted = 0;
  long samples = 0;

  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const long b = static_cast<long>(bi) + 1;
    opt.step(blocks[bi], z_rng);

    const Sample& s = blocks[bi][0];
    const double resid = s.y - dot(s.x, theta);
    const double gamma = 1.0 / static_cast<double>(b);
    const SymMatrix hinv = dense_inverse(h);
    const Vector dir = hinv.apply(Vector{-resid * s.x[0], -resid * s.x[1]});
    theta[0] -= gamma * nz * dir[0];
    theta[1] -= gamma * nz * dir[1];
    if (shadow.uniform() < cfg.curvature.p) {
      ++accepted;
      const double lw = log_weight(b, cfg.curvature.w_prime);
      const double iota_val = std::pow(static_cast<double>(1 + accepted), -cfg.curvature.iota);
      const int k = static_cast<int>((accepted - 1) % d);
      h.add(k, k, lw * iota_val);
      h.add_outer(s.x, lw * 1.0);
      nz += lw;
    }
    samples += 1;

    CHECK(max_abs_diff(opt.iterate(), theta) <= 1e-8);
  }
  CHECK(opt.curvature()->accepted_samples() == accepted);
}

TEST_CASE("weighted-average readout: scripted scalar run over five blocks") {
  OptimizerConfig cfg = base_config(Method::kWassn, 1);
  cfg.batch = BatchSchedule::constant(1);
  cfg.averaged = true;
  cfg.w = 2.0;
  Optimizer opt(cfg, Vector{0.0});
  RngStream rng(0);

  const double ys[5] = {2.0, 0.0, 1.0, 3.0, -1.0};
  double theta = 0.0;
  double h = 1.0;
  double nz = 1.0;
  long accepted = 0;
  double avg_num = 0.0;
  double avg_den = 0.0;

  for (long b = 1; b <= 5; ++b) {
    const Sample s{{1.0}, ys[b - 1]};
    opt.step(std::vector<Sample>{s}, rng);

    const double weight = log_weight(b - 1, cfg.w);  // pre-step iterate's weight
    avg_num += weight * theta;
    avg_den += weight;
    const double grad = -(s.y - theta);
    const double gamma = std::pow(static_cast<double>(b), -0.75);
    theta -= gamma * nz * grad / h;
    ++accepted;
    const double lw = log_weight(b, cfg.curvature.w_prime);
    h += lw * (std::pow(static_cast<double>(1 + accepted), -cfg.curvature.iota) + 1.0);
    nz += lw;

    CHECK(opt.iterate()[0] == doctest::Approx(theta).epsilon(1e-13));
    const double expected_estimate = avg_den > 0.0 ? avg_num / avg_den : theta;
    CHECK(opt.estimate()[0] == doctest::Approx(expected_estimate).epsilon(1e-13));
  }
  CHECK(opt.averager()->cum_weight() == doctest::Approx(avg_den).epsilon(1e-14));
}

TEST_CASE("average readout equals the direct weighted sum of pre-step iterates") {
  const int d = 3;
  RngStream model_rng(41);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};
  const auto blocks = generate_blocks(model, truth, 100, d, 42);

  OptimizerConfig cfg = base_config(Method::kSsn, d);
  cfg.averaged = true;
  cfg.w = 2.0;
  OptimizerConfig raw_cfg = cfg;
  raw_cfg.averaged = false;

  Optimizer averaged(cfg, Vector(d, 0.5));
  Optimizer raw(raw_cfg, Vector(d, 0.5));
  RngStream rng_a(7);
  RngStream rng_b(7);

  Vector num(d, 0.0);
  double den = 0.0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const double weight = log_weight(static_cast<long>(bi), cfg.w);
    for (int i = 0; i < d; ++i) num[i] += weight * raw.iterate()[i];
    den += weight;
    averaged.step(blocks[bi], rng_a);
    raw.step(blocks[bi], rng_b);
    CHECK(max_abs_diff(averaged.iterate(), raw.iterate()) == 0.0);  // readout never alters the path
  }
  for (int i = 0; i < d; ++i)
    CHECK(averaged.estimate()[i] == doctest::Approx(num[i] / den).epsilon(1e-12));
}

TEST_CASE("estimate equals the raw iterate until the average absorbs positive weight") {
  OptimizerConfig cfg = base_config(Method::kWassn, 2);
  cfg.batch = BatchSchedule::constant(1);
  cfg.averaged = true;
  Optimizer opt(cfg, Vector{1.0, 1.0});
  RngStream rng(0);
  opt.step(std::vector<Sample>{{{1.0, 0.0}, 3.0}}, rng);  // block 1: weight ln(1)^2 = 0
  CHECK(opt.averager()->cum_weight() == 0.0);
  CHECK(max_abs_diff(opt.estimate(), opt.iterate()) == 0.0);
  const Vector theta1 = opt.iterate();
  opt.step(std::vector<Sample>{{{0.0, 1.0}, 3.0}}, rng);  // block 2: weight ln(2)^2 > 0
  CHECK(opt.averager()->cum_weight() > 0.0);
  CHECK(max_abs_diff(opt.estimate(), theta1) == 0.0);  // average == theta_1
}

TEST_CASE("a zero-gradient block leaves the iterate unchanged for every method") {
  const Vector theta0 = {1.0, -1.0};
  // y = x . theta0 makes every least-squares residual vanish
  const std::vector<Sample> block = {{{2.0, 1.0}, 1.0}, {{-1.0, 3.0}, -4.0}};
  for (Method m : {Method::kSgd, Method::kAdagrad, Method::kNewtonDirect, Method::kSsn,
                   Method::kWassn}) {
    OptimizerConfig cfg = base_config(m, 2);
    cfg.batch = BatchSchedule::constant(2);
    Optimizer opt(cfg, theta0);
    RngStream rng(0);
    opt.step(block, rng);
    CHECK(max_abs_diff(opt.iterate(), theta0) == 0.0);
  }
}

TEST_CASE("every method drives the noiseless d = 2 objective to the generator") {
  const int d = 2;
  RngStream model_rng(2718);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 0.0};
  const long blocks_n = 5000;  // 10^4 samples in blocks of 2
  const auto blocks = generate_blocks(model, truth, blocks_n, d, 2719);
  RngStream init_rng(2720);
  const Vector theta0 = sample_init(truth.theta_star, 1.0, init_rng);

  const auto final_error = [&](OptimizerConfig cfg, const auto& data) {
    Optimizer opt(cfg, theta0);
    RngStream z(55);
    for (const auto& block : data) opt.step(block, z);
    Vector delta(d, 0.0);
    for (int i = 0; i < d; ++i) delta[i] = opt.estimate()[i] - truth.theta_star[i];
    return std::sqrt(squared_norm(delta));
  };

  // The sample-proportion family steps with gamma_t = 1/t and so contracts
  // noiseless error only polynomially; it gets a longer horizon.
  const auto long_blocks = generate_blocks(model, truth, 20000, d, 2719);

  CHECK(final_error(base_config(Method::kSgd, d), blocks) < 1e-3);
  CHECK(final_error(base_config(Method::kAdagrad, d), blocks) < 1e-3);
  CHECK(final_error(base_config(Method::kNewtonDirect, d), long_blocks) < 1e-3);
  {
    OptimizerConfig cfg = base_config(Method::kSsn, d);
    cfg.curvature.p = 0.5;
    CHECK(final_error(cfg, long_blocks) < 1e-3);
  }
  {
    OptimizerConfig cfg = base_config(Method::kWassn, d);
    cfg.averaged = true;
    CHECK(final_error(cfg, blocks) < 1e-3);
  }
}

TEST_CASE("maintained inverse times the dense curvature stays within 1e-6 of identity") {
  const int d = 6;
  RngStream model_rng(61);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};
  const auto blocks = generate_blocks(model, truth, 300, 2, 62);

  OptimizerConfig cfg = base_config(Method::kSsn, d);
  cfg.batch = BatchSchedule::constant(2);
  cfg.curvature.p = 0.5;
  Optimizer opt(cfg, Vector(d, 0.0));
  RngStream z_rng(63);
  RngStream shadow(63);

  SymMatrix h = SymMatrix::identity(d);
  long accepted = 0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const long b = static_cast<long>(bi) + 1;
    opt.step(blocks[bi], z_rng);
    for (const Sample& s : blocks[bi]) {
      if (shadow.uniform() < cfg.curvature.p) {
        ++accepted;
        const double lw = log_weight(b, cfg.curvature.w_prime);
        const double iota_val = std::pow(static_cast<double>(1 + accepted), -cfg.curvature.iota);
        const int k = static_cast<int>((accepted - 1) % d);
        h.add(k, k, lw * iota_val);
        h.add_outer(s.x, lw);
      }
    }
    if (b % 50 == 0) {
      const Matrix prod = product(opt.curvature()->inverse(), h);
      double worst = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          worst = std::max(worst, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
      CHECK(worst <= 1e-6);
    }
  }
  CHECK(opt.curvature()->accepted_samples() == accepted);
}

TEST_CASE("subsampling at p = 1/d keeps the per-sample update cost at most 4/d") {
  const int d = 20;
  RngStream model_rng(81);
  const CovarianceModel model(d, model_rng);
  GroundTruth truth{ProblemKind::kLeastSquares, ls_theta_star(d), 1.0};

  OptimizerConfig cfg = base_config(Method::kSsn, d);
  cfg.curvature.p = 1.0 / d;
  Optimizer opt(cfg, Vector(d, 0.0));
  RngStream data_rng(82);
  RngStream z_rng(83);
  std::vector<Sample> batch;
  const long total = 10000L * d;
  for (long seen = 0; seen < total; seen += d) {
    draw_batch(model, truth, d, data_rng, batch);
    opt.step(batch, z_rng);
  }
  const double per_sample =
      static_cast<double>(opt.rank_one_updates()) / static_cast<double>(opt.samples_seen());
  CHECK(per_sample <= 4.0 / d);
}

TEST_CASE("diverging iterates raise NonFiniteIterate") {
  OptimizerConfig cfg = base_config(Method::kSgd, 2);
  cfg.step = StepSchedule::power_law(1e10, 0.75);
  cfg.batch = BatchSchedule::constant(1);
  Optimizer opt(cfg, Vector{1.0, 1.0});
  RngStream rng(0);
  const std::vector<Sample> block = {{{1.0, 1.0}, 0.0}};
  bool thrown = false;
  for (int b = 0; b < 400 && !thrown; ++b) {
    try {
      opt.step(block, rng);
    } catch (const NonFiniteIterate&) {
      thrown = true;
    }
  }
  CHECK(thrown);
}

TEST_CASE("construction-time validation") {
  CHECK_THROWS_AS(Optimizer(base_config(Method::kSgd, 2), Vector{0.0}), DimensionMismatch);
  {
    OptimizerConfig cfg = base_config(Method::kSgd, 2);
    cfg.step.gamma = 0.4;
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    OptimizerConfig cfg = base_config(Method::kNewtonDirect, 2);
    cfg.curvature.p = 0.5;  // full-information method cannot subsample
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    OptimizerConfig cfg = base_config(Method::kWassn, 2);
    cfg.step = StepSchedule::sample_proportion();
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    OptimizerConfig cfg = base_config(Method::kSsn, 2);
    cfg.step = StepSchedule::power_law(1.0, 0.75);
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    // regularizer decay out of range: wassn with gamma = 0.75 admits (0, 0.25)
    OptimizerConfig cfg = base_config(Method::kWassn, 2);
    cfg.curvature.iota = 0.3;
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    OptimizerConfig cfg = base_config(Method::kAdagrad, 2);
    cfg.clamp.e_hi = 0.4;  // above gamma - 1/2
    CHECK_THROWS_AS(Optimizer(cfg, Vector{0.0, 0.0}), InvalidSchedule);
  }
  {
    const double nan = std::nan("");
    CHECK_THROWS_AS(Optimizer(base_config(Method::kSgd, 2), Vector{nan, 0.0}), NonFiniteIterate);
  }
}
