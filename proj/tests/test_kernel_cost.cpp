#include <catch2/catch_amalgamated.hpp>

#include <lcmpc/kernel_cost.hpp>

#include <cmath>
#include <random>

using Catch::Approx;
using namespace lcmpc;

namespace {

LimitCycleParams scenario_params() {
  return LimitCycleParams(0.01, -0.01, 2.0 * M_PI * 50.0, 2e-4);
}

// Stacked map trajectory of Hp blocks starting one step after x0.
VecX stacked_trajectory(const Vec2& x0, const LimitCycleParams& p, int hp) {
  VecX x(2 * hp);
  Vec2 cur = x0;
  for (int j = 0; j < hp; ++j) {
    cur = ns_map_step(cur, p);
    x.segment<2>(2 * j) = cur;
  }
  return x;
}

VecX random_stacked(std::mt19937_64& rng, int hp, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  VecX x(2 * hp);
  for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
  return x;
}

}  // namespace

TEST_CASE("kernel residual hand-evaluated points", "[kernel_cost]") {
  const LimitCycleParams p = scenario_params();

  CHECK(kernel_residual(Vec2::Zero(), Vec2::Zero(), p).norm() == 0.0);

  // Exact cycle step: zero residual.
  const Vec2 x(1.0, 0.0);
  const Vec2 xn = ns_map_step(x, p);
  CHECK(kernel_residual(xn, x, p).norm() < 1e-15);

  // x=(1,0), x_next=0: residual is -(1+mu+alpha) R (1,0) = (-cos, -sin) phi
  // for mu = -alpha = 0.01 (recomputed to full precision).
  const double phi = 0.0628319;
  const LimitCycleParams q(0.01, -0.01, phi / 2e-4, 2e-4);
  const Vec2 e = kernel_residual(Vec2::Zero(), Vec2(1.0, 0.0), q);
  CHECK(e.x() == Approx(-std::cos(phi)).margin(1e-15));
  CHECK(e.y() == Approx(-std::sin(phi)).margin(1e-15));
}

TEST_CASE("cost matrices match the displayed block structure", "[kernel_cost]") {
  const LimitCycleParams p = scenario_params();
  const int hp = 4;
  const KernelCostMatrices m = build_cost_matrices(p, hp);
  const Mat2 r = p.rot;
  const double g = 1.0 + p.mu;
  const Mat2 eye = Mat2::Identity();

  REQUIRE(m.hp == hp);
  REQUIRE(m.Q2.rows() == 2 * hp);

  // Q2: (1+mu)^2 I first, (1 + (1+mu)^2) I middle, I last; -(1+mu)R below.
  CHECK(m.Q2.block<2, 2>(0, 0) == (g * g) * eye);
  CHECK(m.Q2.block<2, 2>(2, 2) == (g * g) * eye + eye);
  CHECK(m.Q2.block<2, 2>(4, 4) == (g * g) * eye + eye);
  CHECK(m.Q2.block<2, 2>(6, 6) == eye);
  for (int j = 0; j + 1 < hp; ++j) {
    CHECK(m.Q2.block<2, 2>(2 * (j + 1), 2 * j) == -g * r);
    CHECK(m.Q2.block<2, 2>(2 * j, 2 * (j + 1)) == Mat2(-g * r.transpose()));
  }
  CHECK((m.Q2 - m.Q2.transpose()).norm() == 0.0);

  // L: all-ones diagonal blocks except the last; nothing off-diagonal.
  for (int j = 0; j < hp; ++j) {
    const Mat2 want = (j + 1 < hp) ? Mat2(Mat2::Ones()) : Mat2(Mat2::Zero());
    CHECK(m.L.block<2, 2>(2 * j, 2 * j) == want);
  }
  CHECK(m.L.sum() == 4.0 * (hp - 1));

  // Q4: (1+mu) I diagonal except last block zero; -R on the subdiagonal.
  for (int j = 0; j < hp; ++j) {
    const Mat2 want = (j + 1 < hp) ? Mat2(g * eye) : Mat2(Mat2::Zero());
    CHECK(m.Q4.block<2, 2>(2 * j, 2 * j) == want);
    if (j + 1 < hp) CHECK(m.Q4.block<2, 2>(2 * (j + 1), 2 * j) == Mat2(-r));
  }

  CHECK_THROWS_AS(build_cost_matrices(p, 1), std::invalid_argument);
}

TEST_CASE("degenerate mu=0 structure collapses to the checkerboard", "[kernel_cost]") {
  const double phi = 0.3;
  const KernelCostMatrices m = build_cost_matrices(0.0, phi, 2);
  const Mat2 r = rotation2(phi);
  MatX want = MatX::Zero(4, 4);
  want.block<2, 2>(0, 0) = Mat2::Identity();
  want.block<2, 2>(2, 2) = Mat2::Identity();
  want.block<2, 2>(2, 0) = -r;
  want.block<2, 2>(0, 2) = -r.transpose();
  CHECK((m.Q2 - want).norm() == 0.0);
}

TEST_CASE("direct cost basics", "[kernel_cost]") {
  const LimitCycleParams p = scenario_params();

  const VecX zeros = VecX::Zero(10);
  const CostBreakdown at_zero = cost_direct(zeros, p);
  CHECK(at_zero.total == 0.0);
  CHECK(at_zero.quadratic_term == 0.0);

  // Map-consistent trajectory: zero cost to 1e-20.
  const VecX traj = stacked_trajectory(Vec2(1.0, 0.0), p, 50);
  CHECK(cost_direct(traj, p).total < 1e-20);

  // Wrong amplitude: the shape cost is strictly positive.
  CHECK(cost_direct(VecX(2.0 * traj), p).total > 1e-4);

  CHECK_THROWS_AS(cost_direct(VecX::Zero(3), p), std::invalid_argument);
  CHECK_THROWS_AS(cost_direct(VecX::Zero(2), p), std::invalid_argument);
}

TEST_CASE("breakdown terms sum to the total", "[kernel_cost][property]") {
  const LimitCycleParams p = scenario_params();
  std::mt19937_64 rng(20240821);
  for (int i = 0; i < 200; ++i) {
    const VecX x = random_stacked(rng, 7);
    const CostBreakdown c = cost_direct(x, p);
    const double sum = c.quadratic_term + c.cubic_term + c.quartic_term;
    CHECK(std::abs(c.total - sum) <=
          1e-12 * (1.0 + std::abs(c.quadratic_term) + std::abs(c.cubic_term) +
                   std::abs(c.quartic_term)));
    CHECK(c.total >= 0.0);
  }
}

TEST_CASE("vectorized form matches the direct oracle", "[kernel_cost][property]") {
  const LimitCycleParams p = scenario_params();
  std::mt19937_64 rng(20240822);
  for (int hp : {2, 3, 5, 17}) {
    const KernelCostMatrices m = build_cost_matrices(p, hp);
    for (int i = 0; i < 1000; ++i) {
      const VecX x = random_stacked(rng, hp);
      const CostBreakdown d = cost_direct(x, p);
      const CostBreakdown v = cost_vectorized(x, m, p);
      const double tol = 1e-10 * (1.0 + std::abs(d.total));
      CHECK(std::abs(v.total - d.total) <= tol);
      CHECK(std::abs(v.quadratic_term - d.quadratic_term) <= tol);
      CHECK(std::abs(v.cubic_term - d.cubic_term) <= tol);
      CHECK(std::abs(v.quartic_term - d.quartic_term) <= tol);
    }
  }

  // Full scenario horizon, fewer draws.
  const int hp = 200;
  const KernelCostMatrices m = build_cost_matrices(p, hp);
  for (int i = 0; i < 25; ++i) {
    const VecX x = random_stacked(rng, hp);
    const CostBreakdown d = cost_direct(x, p);
    const CostBreakdown v = cost_vectorized(x, m, p);
    CHECK(std::abs(v.total - d.total) <= 1e-10 * (1.0 + std::abs(d.total)));
  }

  CHECK_THROWS_AS(cost_vectorized(VecX::Zero(8), build_cost_matrices(p, 3), p),
                  std::invalid_argument);
}

TEST_CASE("vectorized cost on exact and scaled trajectories", "[kernel_cost]") {
  const LimitCycleParams p = scenario_params();
  const int hp = 40;
  const KernelCostMatrices m = build_cost_matrices(p, hp);
  const VecX traj = stacked_trajectory(Vec2(1.0, 0.0), p, hp);

  CHECK(std::abs(cost_vectorized(traj, m, p).total) < 1e-12 * hp);
  CHECK(cost_vectorized(VecX(2.0 * traj), m, p).total > 1e-4);
}

TEST_CASE("zero set is exactly the map-consistent trajectories",
          "[kernel_cost][property]") {
  const LimitCycleParams p = scenario_params();
  std::mt19937_64 rng(20240823);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> radius(0.05, 3.0);

  for (int hp : {2, 5, 50, 200}) {
    const double r = radius(rng);
    const double th = angle(rng);
    const Vec2 x0(r * std::cos(th), r * std::sin(th));
    const VecX traj = stacked_trajectory(x0, p, hp);
    CHECK(cost_direct(traj, p).total < 1e-18 * hp);

    // Any single-block nudge of magnitude 1e-3 leaves the zero set.
    std::uniform_int_distribution<int> pick(0, hp - 1);
    for (int trial = 0; trial < 8; ++trial) {
      const int b = pick(rng);
      const double dir = angle(rng);
      VecX bent = traj;
      bent.segment<2>(2 * b) += 1e-3 * Vec2(std::cos(dir), std::sin(dir));
      CHECK(cost_direct(bent, p).total > 1e-10);
    }
  }
}

TEST_CASE("cost is invariant under common rotations", "[kernel_cost][property]") {
  const LimitCycleParams p = scenario_params();
  std::mt19937_64 rng(20240824);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int i = 0; i < 200; ++i) {
    const VecX x = random_stacked(rng, 9);
    const Mat2 q = rotation2(angle(rng));
    VecX rotated(x.size());
    for (int j = 0; j < x.size() / 2; ++j)
      rotated.segment<2>(2 * j) = q * x.segment<2>(2 * j);
    const double a = cost_direct(x, p).total;
    const double b = cost_direct(rotated, p).total;
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("analytic gradient matches central differences", "[kernel_cost][property]") {
  const LimitCycleParams p = scenario_params();
  std::mt19937_64 rng(20240825);
  for (int i = 0; i < 100; ++i) {
    const int hp = 4 + (i % 5);
    const VecX x = random_stacked(rng, hp);
    const VecX ga = cost_gradient(x, p, GradientMode::Analytic);
    const VecX gf = cost_gradient(x, p, GradientMode::FiniteDifference);
    const double scale = std::max(1.0, gf.lpNorm<Eigen::Infinity>());
    CHECK((ga - gf).lpNorm<Eigen::Infinity>() <= 1e-5 * scale);
  }
}

TEST_CASE("gradient vanishes at the cost minima", "[kernel_cost]") {
  const LimitCycleParams p = scenario_params();

  const VecX traj = stacked_trajectory(Vec2(std::cos(1.1), std::sin(1.1)), p, 30);
  CHECK(cost_gradient(traj, p, GradientMode::Analytic).norm() < 1e-8);

  const VecX zeros = VecX::Zero(12);
  CHECK(cost_gradient(zeros, p, GradientMode::Analytic).norm() == 0.0);
  CHECK(cost_gradient(zeros, p, GradientMode::FiniteDifference).norm() < 1e-11);
}
