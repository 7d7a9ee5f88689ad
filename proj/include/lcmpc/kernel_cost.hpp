#pragma once

// Limit-cycle residual kernel and its quartic shape cost over a prediction
// horizon.  For stacked states X = (x_{k+1}, ..., x_{k+Hp}) the cost is the
// accumulated squared kernel residual over consecutive pairs within X,
//
//     J(X) = sum_{j=1}^{Hp-1} || x_{j+1} - (1+mu) R x_j - alpha R x_j (x_j'x_j) ||^2,
//
// equivalently the vectorized quartic form
//
//     J(X) = X'Q2 X + 2a X'(L o (XX'Q4)) X + a^2 X'(L o (XX'(L o (XX')))) X
//
// with o the Hadamard product.  The measured state x_k enters no residual:
// expanding the direct sum reproduces the block structure of Q2/L/Q4 below
// (first Q2 diagonal block (1+mu)^2 I, last block I), and the oracle tests
// pin this indexing.
//
// The direct form is the evaluation path (O(Hp), no cancellation across
// pairs); the vectorized form exists to cross-check the matrices.  J >= 0
// with J = 0 exactly on map-consistent trajectories.

#include "normal_forms.hpp"

#include <stdexcept>

namespace lcmpc {

/// One-pair kernel residual, x_next - (1+mu) R x - alpha R x (x'x).
inline Vec2 kernel_residual(const Vec2& x_next, const Vec2& x,
                            const LimitCycleParams& p) {
  const Vec2 t = p.rot * x;
  return (x_next - (1.0 + p.mu) * t) - (p.alpha * x.squaredNorm()) * t;
}

/// The three degree-sorted terms of the horizon cost and their sum.  The terms
/// satisfy total = quadratic + cubic + quartic as a mathematical identity;
/// `total` is accumulated from the residuals directly, so the equality holds
/// to roundoff.
struct CostBreakdown {
  double quadratic_term = 0.0;
  double cubic_term = 0.0;
  double quartic_term = 0.0;
  double total = 0.0;
};

// ===== Horizon matrices ====================================================

/// Dense Q2 / L / Q4 for a horizon.  Immutable after construction; stored
/// dense (400x400 at Hp=200) since only the vectorized-form oracle reads
/// them; the optimizer path never touches these matrices.
struct KernelCostMatrices {
  MatX Q2;
  MatX L;
  MatX Q4;
  int hp = 0;
};

/// Raw builder; `mu = 0` is allowed here for degenerate structural checks
/// that sit outside the supercritical parameter domain.
inline KernelCostMatrices build_cost_matrices(double mu, double phi, int hp) {
  if (hp < 2) throw std::invalid_argument("build_cost_matrices: Hp must be >= 2");
  const int n = 2 * hp;
  const Mat2 r = rotation2(phi);
  const Mat2 eye = Mat2::Identity();
  const double g = 1.0 + mu;

  KernelCostMatrices m;
  m.hp = hp;
  m.Q2 = MatX::Zero(n, n);
  m.L = MatX::Zero(n, n);
  m.Q4 = MatX::Zero(n, n);

  for (int j = 0; j < hp; ++j) {
    const bool pair_source = j < hp - 1;  // block starts a residual
    const bool pair_target = j > 0;       // block ends a residual

    Mat2 q2_diag = Mat2::Zero();
    if (pair_source) q2_diag += (g * g) * eye;
    if (pair_target) q2_diag += eye;
    m.Q2.block<2, 2>(2 * j, 2 * j) = q2_diag;

    if (pair_source) {
      m.Q2.block<2, 2>(2 * (j + 1), 2 * j) = -g * r;
      m.Q2.block<2, 2>(2 * j, 2 * (j + 1)) = -g * r.transpose();
      m.L.block<2, 2>(2 * j, 2 * j) = Mat2::Ones();
      m.Q4.block<2, 2>(2 * j, 2 * j) = g * eye;
      m.Q4.block<2, 2>(2 * (j + 1), 2 * j) = -r;
    }
  }
  return m;
}

inline KernelCostMatrices build_cost_matrices(const LimitCycleParams& p, int hp) {
  return build_cost_matrices(p.mu, p.phi, hp);
}

// ===== Cost evaluation =====================================================

namespace detail {
inline int checked_horizon(const VecX& x) {
  if (x.size() % 2 != 0 || x.size() < 4)
    throw std::invalid_argument("stacked states must hold Hp >= 2 planar blocks");
  return static_cast<int>(x.size() / 2);
}
}  // namespace detail

/// Direct-sum cost over consecutive pairs of X.  The brute-force oracle form
/// and the optimizer's evaluation path.
inline CostBreakdown cost_direct(const VecX& x, const LimitCycleParams& p) {
  const int hp = detail::checked_horizon(x);
  const double g = 1.0 + p.mu;
  CostBreakdown out;
  for (int j = 0; j + 1 < hp; ++j) {
    const Vec2 xj = x.segment<2>(2 * j);
    const Vec2 xn = x.segment<2>(2 * (j + 1));
    const Vec2 t = p.rot * xj;
    const Vec2 lin = xn - g * t;                          // quadratic-part residual
    const Vec2 cub = -(p.alpha * xj.squaredNorm()) * t;   // cubic-part residual
    out.quadratic_term += lin.squaredNorm();
    out.cubic_term += 2.0 * lin.dot(cub);
    out.quartic_term += cub.squaredNorm();
    out.total += kernel_residual(xn, xj, p).squaredNorm();
  }
  return out;
}

/// Literal vectorized form.  Rank-1 products are associated as X (X'M) so
/// the evaluation is O(Hp^2), but every Hadamard mask and matrix of the
/// displayed formula is materialized as written.
inline CostBreakdown cost_vectorized(const VecX& x, const KernelCostMatrices& m,
                                     const LimitCycleParams& p) {
  const int hp = detail::checked_horizon(x);
  if (m.hp != hp || m.Q2.rows() != x.size())
    throw std::invalid_argument("cost_vectorized: matrix/state dimension mismatch");
  const double a = p.alpha;

  CostBreakdown out;
  out.quadratic_term = x.dot(m.Q2 * x);

  const Eigen::RowVectorXd xt_q4 = x.transpose() * m.Q4;
  const MatX cross = m.L.cwiseProduct(x * xt_q4);  // L o (X X' Q4)
  out.cubic_term = 2.0 * a * x.dot(cross * x);

  const MatX outer = x * x.transpose();
  const MatX masked = m.L.cwiseProduct(outer);               // L o (X X')
  const Eigen::RowVectorXd xt_masked = x.transpose() * masked;
  const MatX quart = m.L.cwiseProduct(x * xt_masked);        // L o (X X' (L o (X X')))
  out.quartic_term = a * a * x.dot(quart * x);

  out.total = out.quadratic_term + out.cubic_term + out.quartic_term;
  return out;
}

// ===== Gradients ===========================================================

enum class GradientMode { FiniteDifference, Analytic };

/// Gradient of the direct-sum cost with respect to X.  Analytic mode chains
/// residual Jacobians:
///   dJ/dx_i = 2 e_{i-1} - 2 ((1+mu) R' + alpha (s_i R' + 2 x_i x_i' R')) e_i
/// with each term present only where the residual exists.  FiniteDifference
/// mode is the central-difference oracle with step max(1e-6, 1e-8 ||X||_inf).
inline VecX cost_gradient(const VecX& x, const LimitCycleParams& p,
                          GradientMode mode) {
  const int hp = detail::checked_horizon(x);
  VecX g = VecX::Zero(x.size());

  if (mode == GradientMode::FiniteDifference) {
    const double h = std::max(1e-6, 1e-8 * x.lpNorm<Eigen::Infinity>());
    VecX probe = x;
    for (int i = 0; i < x.size(); ++i) {
      probe(i) = x(i) + h;
      const double up = cost_direct(probe, p).total;
      probe(i) = x(i) - h;
      const double dn = cost_direct(probe, p).total;
      probe(i) = x(i);
      g(i) = (up - dn) / (2.0 * h);
    }
    return g;
  }

  const double gain = 1.0 + p.mu;
  for (int j = 0; j + 1 < hp; ++j) {
    const Vec2 xj = x.segment<2>(2 * j);
    const Vec2 xn = x.segment<2>(2 * (j + 1));
    const Vec2 e = kernel_residual(xn, xj, p);
    const double s = xj.squaredNorm();
    g.segment<2>(2 * (j + 1)) += 2.0 * e;
    const Vec2 w = p.rot.transpose() * e;
    g.segment<2>(2 * j) +=
        -2.0 * gain * w - 2.0 * p.alpha * (s * w + 2.0 * xj * xj.dot(w));
  }
  return g;
}

}  // namespace lcmpc
