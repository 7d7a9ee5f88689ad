#pragma once

// Planar normal forms for the supercritical Neimark-Sacker bifurcation and
// its continuous-time Hopf counterpart.  The discrete map
//
//     x[k+1] = (1 + mu + alpha * x'x) * R(phi) * x
//
// is the attractor template the predictive controller steers plants onto:
// for mu > 0, alpha < 0 it has an asymptotically stable invariant circle of
// radius sqrt(-mu/alpha) and an unstable fixed point at the origin.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lcmpc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Counterclockwise planar rotation by `phi` radians.
inline Mat2 rotation2(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

// ===== Parameter sets ======================================================

/// Supercritical Hopf normal-form parameters for the planar vector field
///   dx/dt = alpha_c * (mu_c - x'x) * x + omega * J * x,  J = [[0,-1],[1,0]],
/// with intensifier alpha_c > 0, squared cycle radius mu_c > 0, omega > 0.
/// The circle of radius sqrt(mu_c) is the attracting limit cycle.
struct HopfParams {
  double alpha_c;
  double mu_c;
  double omega;

  HopfParams(double alpha_c_, double mu_c_, double omega_)
      : alpha_c(alpha_c_), mu_c(mu_c_), omega(omega_) {
    if (!(alpha_c > 0.0)) throw std::invalid_argument("HopfParams: alpha_c must be > 0");
    if (!(mu_c > 0.0)) throw std::invalid_argument("HopfParams: mu_c must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("HopfParams: omega must be > 0");
  }

  /// Radius of the attracting limit cycle, sqrt(mu_c).
  double cycle_radius() const { return std::sqrt(mu_c); }
};

/// Discrete Neimark-Sacker normal-form parameters.  `phi = omega * tau` is
/// the per-sample rotation angle; the stored rotation matrix is reused by
/// every map and cost evaluation.  Requires mu > 0, alpha < 0, omega > 0,
/// tau > 0 and phi in (0, pi) (below Nyquist for the fundamental).
struct LimitCycleParams {
  double mu;
  double alpha;
  double omega;
  double tau;
  double phi;
  Mat2 rot;

  LimitCycleParams(double mu_, double alpha_, double omega_, double tau_)
      : mu(mu_), alpha(alpha_), omega(omega_), tau(tau_), phi(omega_ * tau_),
        rot(rotation2(omega_ * tau_)) {
    if (!(mu > 0.0)) throw std::invalid_argument("LimitCycleParams: mu must be > 0");
    if (!(alpha < 0.0)) throw std::invalid_argument("LimitCycleParams: alpha must be < 0");
    if (!(omega > 0.0)) throw std::invalid_argument("LimitCycleParams: omega must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("LimitCycleParams: tau must be > 0");
    if (!(phi > 0.0 && phi < M_PI))
      throw std::invalid_argument("LimitCycleParams: omega*tau must lie in (0, pi)");
  }
};

// ===== Continuous-time field ===============================================

/// Hopf normal-form vector field at `x`:
///   (alpha_c mu_c x1 - omega x2 - alpha_c x1 (x1^2+x2^2),
///    omega x1 + alpha_c mu_c x2 - alpha_c x2 (x1^2+x2^2)).
inline Vec2 hopf_vector_field(const Vec2& x, const HopfParams& p) {
  const double radial = p.alpha_c * (p.mu_c - x.squaredNorm());
  return Vec2(radial * x.x() - p.omega * x.y(),
              radial * x.y() + p.omega * x.x());
}

/// Fixed-step RK4 integration of the Hopf field; returns n_steps+1 states
/// including the seed.
inline std::vector<Vec2> integrate_hopf(const Vec2& x0, const HopfParams& p,
                                        double dt, int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_hopf: dt must be > 0");
  if (n_steps < 0) throw std::invalid_argument("integrate_hopf: n_steps must be >= 0");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  Vec2 x = x0;
  out.push_back(x);
  for (int k = 0; k < n_steps; ++k) {
    const Vec2 k1 = hopf_vector_field(x, p);
    const Vec2 k2 = hopf_vector_field(x + 0.5 * dt * k1, p);
    const Vec2 k3 = hopf_vector_field(x + 0.5 * dt * k2, p);
    const Vec2 k4 = hopf_vector_field(x + dt * k3, p);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(x);
  }
  return out;
}

// ===== Discrete map ========================================================

/// One Neimark-Sacker map step, x -> (1 + mu + alpha*x'x) * R(phi) * x.
inline Vec2 ns_map_step(const Vec2& x, const LimitCycleParams& p) {
  const double factor = 1.0 + p.mu + p.alpha * x.squaredNorm();
  return factor * (p.rot * x);
}

/// Signed radial dynamics of the map, r -> r + mu*r + alpha*r^3.
/// The image norm of `ns_map_step` equals |ns_radius_step| of the source
/// norm; the sign flips once the scalar factor goes negative (r > rho0).
inline double ns_radius_step(double r, const LimitCycleParams& p) {
  return r + p.mu * r + p.alpha * r * r * r;
}

/// Radius of the map's invariant circle, sqrt(-mu/alpha).
inline double limit_cycle_radius(const LimitCycleParams& p) {
  return std::sqrt(-p.mu / p.alpha);
}

/// Radii where the scalar factor 1 + mu + alpha*r^2 reaches 0 and -1:
/// seeds with r = rho0 map exactly onto the origin, and r > rho_inf
/// grows without bound.  Always rho < rho0 < rho_inf.
struct CriticalRadii {
  double rho0;
  double rho_inf;
};

inline CriticalRadii critical_radii(const LimitCycleParams& p) {
  return CriticalRadii{std::sqrt(-(1.0 + p.mu) / p.alpha),
                       std::sqrt(-(2.0 + p.mu) / p.alpha)};
}

/// Long-run fate of a seed at radius `r` under repeated map steps.
/// The r = rho0 case is exact equality (a measure-zero set); nearby radii
/// converge to the cycle, as do radii up to rho_inf (they fold inward).
enum class RadiusClassification {
  FixedAtOrigin,          ///< r == 0
  ConvergesToLimitCycle,  ///< 0 < r <= rho_inf, r != rho0
  MapsToOrigin,           ///< r == rho0 (one step onto the unstable fixed point)
  Divergent               ///< r > rho_inf
};

inline RadiusClassification classify_initial_radius(double r, const LimitCycleParams& p) {
  if (!(r >= 0.0)) throw std::invalid_argument("classify_initial_radius: r must be >= 0");
  if (r == 0.0) return RadiusClassification::FixedAtOrigin;
  const CriticalRadii c = critical_radii(p);
  if (r == c.rho0) return RadiusClassification::MapsToOrigin;
  if (r > c.rho_inf) return RadiusClassification::Divergent;
  return RadiusClassification::ConvergesToLimitCycle;
}

// ===== Trajectories ========================================================

/// Map orbit from `x0`.  `states` holds the seed plus up to n_steps images;
/// iteration stops early (overflow = true) when the next state's norm would
/// exceed `overflow_bound`, so divergent seeds yield finite prefixes.
struct MapTrajectory {
  std::vector<Vec2> states;
  bool overflow = false;
};

inline MapTrajectory iterate_trajectory(const Vec2& x0, const LimitCycleParams& p,
                                        int n_steps, double overflow_bound = 1e12) {
  if (n_steps < 1) throw std::invalid_argument("iterate_trajectory: n_steps must be >= 1");
  MapTrajectory traj;
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  Vec2 x = x0;
  traj.states.push_back(x);
  for (int k = 0; k < n_steps; ++k) {
    x = ns_map_step(x, p);
    if (!x.allFinite() || x.norm() > overflow_bound) {
      traj.overflow = true;
      break;
    }
    traj.states.push_back(x);
  }
  return traj;
}

/// Phase-portrait seed fan: 16 equispaced angles at radii
/// {0.1, 0.5*rho, rho, 2*rho} around a cycle of radius `rho`.
inline std::vector<Vec2> portrait_seeds(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("portrait_seeds: rho must be > 0");
  const double radii[] = {0.1, 0.5 * rho, rho, 2.0 * rho};
  std::vector<Vec2> seeds;
  seeds.reserve(64);
  for (double r : radii) {
    for (int i = 0; i < 16; ++i) {
      const double theta = 2.0 * M_PI * i / 16.0;
      seeds.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }
  return seeds;
}

}  // namespace lcmpc
