#pragma once

// Single-phase grid segment used by the harmonic-compensation experiment:
// supply v_s behind R1 feeding an R2-L2 branch into capacitor C2, with a
// harmonic-distorting current source i_d and the compensator current i_c
// injected at the point of common coupling.  State (q_l, i_l), input i_c,
// disturbances (i_d, v_s), outputs (v_c, i_l):
//
//   Ac = [[0, 1], [-1/(C2 L2), -(R1+R2)/L2]]
//   bc = [0, R1/L2]'      Fc = [[0, 0], [R1/L2, 1/L2]]
//   Cc = [[1/C2, 0], [0, 1]]
//
// The module also carries an independent phasor-analysis oracle (per
// harmonic, superposition with the supply shorted / current source opened)
// used to validate simulated spectra, and the scaling transform that maps
// the undisturbed steady state onto the normal-form unit circle.
//
// Supply voltage is interpreted as PEAK amplitude (400 V default): only
// this reading reproduces the scaling amplitudes rho_i ~ 3.49 A and
// rho_v ~ 1.11 V through |Z(omega)| ~ 114.3 ohm.  Phasors use the sine
// convention s(t) = Im(S e^{j n omega t}), and the supply phase reference
// is v_s = vs_amplitude * sin(omega t).

#include "linear_plant.hpp"

#include <complex>
#include <vector>

namespace lcmpc {

struct GridCircuitParams {
  double R1 = 100.0;           ///< ohm
  double R2 = 10.0;            ///< ohm
  double L2 = 0.1;             ///< H
  double C2 = 0.01;            ///< F
  double f = 50.0;             ///< Hz
  double vs_amplitude = 400.0; ///< V peak

  double omega() const { return 2.0 * M_PI * f; }

  void validate() const {
    if (!(R1 > 0.0 && R2 > 0.0 && L2 > 0.0 && C2 > 0.0 && f > 0.0 && vs_amplitude > 0.0))
      throw std::invalid_argument("GridCircuitParams: all parameters must be > 0");
  }
};

/// One sinusoidal term of the distorting current source,
/// a * sin(n * omega t + phase).
struct HarmonicComponent {
  int order = 1;
  double amplitude = 0.0;  ///< A
  double phase = 0.0;      ///< rad

  void validate() const {
    if (order < 1) throw std::invalid_argument("HarmonicComponent: order must be >= 1");
    if (!(amplitude >= 0.0))
      throw std::invalid_argument("HarmonicComponent: amplitude must be >= 0");
  }
};

inline ContinuousStateSpace build_grid_state_space(const GridCircuitParams& p) {
  p.validate();
  MatX ac(2, 2), bc(2, 1), fc(2, 2), cc(2, 2);
  ac << 0.0, 1.0, -1.0 / (p.C2 * p.L2), -(p.R1 + p.R2) / p.L2;
  bc << 0.0, p.R1 / p.L2;
  fc << 0.0, 0.0, p.R1 / p.L2, 1.0 / p.L2;
  cc << 1.0 / p.C2, 0.0, 0.0, 1.0;
  return ContinuousStateSpace(ac, bc, fc, cc);
}

// ===== Phasor oracle =======================================================

enum class PhasorSource { Supply, DisturbanceCurrent };

/// Load-current and capacitor-voltage phasors at harmonic n (sine
/// convention).
struct PhasorPair {
  std::complex<double> i_l;
  std::complex<double> v_c;
};

/// Series branch impedance at harmonic n, R1 + R2 + j n w L2 + 1/(j n w C2).
inline std::complex<double> branch_impedance(const GridCircuitParams& p, int n) {
  const std::complex<double> jw(0.0, n * p.omega());
  return p.R1 + p.R2 + jw * p.L2 + 1.0 / (jw * p.C2);
}

/// Steady-state response to one source phasor by superposition: the supply
/// drives I_l = S / Z_n, the disturbance current divides as
/// I_l = S R1 / Z_n; in both cases V_c = I_l / (j n w C2).
inline PhasorPair steady_state_phasor(const GridCircuitParams& p, int n,
                                      PhasorSource source,
                                      std::complex<double> source_phasor) {
  p.validate();
  if (n < 1) throw std::invalid_argument("steady_state_phasor: n must be >= 1");
  const std::complex<double> z = branch_impedance(p, n);
  PhasorPair out;
  out.i_l = source == PhasorSource::Supply ? source_phasor / z
                                           : source_phasor * p.R1 / z;
  out.v_c = out.i_l / (std::complex<double>(0.0, n * p.omega()) * p.C2);
  return out;
}

/// Supply response at the fundamental with the zero-phase sine reference.
inline PhasorPair supply_fundamental_phasor(const GridCircuitParams& p) {
  return steady_state_phasor(p, 1, PhasorSource::Supply, p.vs_amplitude);
}

// ===== Normal-form scaling =================================================

/// Undisturbed steady-state amplitudes and the state transform
/// M = [[0, rho_v C2], [rho_i, 0]] that maps (q_l, i_l) onto normal-form
/// coordinates x1 = i_l/rho_i, x2 = v_c/rho_v (unit circle in steady state).
struct NormalFormScaling {
  double rho_v = 0.0;  ///< V
  double rho_i = 0.0;  ///< A
  Mat2 M = Mat2::Zero();
};

inline NormalFormScaling compute_normal_form_scaling(const GridCircuitParams& p) {
  const PhasorPair ss = supply_fundamental_phasor(p);
  NormalFormScaling s;
  s.rho_i = std::abs(ss.i_l);
  s.rho_v = std::abs(ss.v_c);
  s.M << 0.0, s.rho_v * p.C2, s.rho_i, 0.0;
  return s;
}

/// Similarity transform by an invertible M: A~ = M^-1 Ac M,
/// [b~ F~] = M^-1 [bc Fc], C~ = Cc M (states x~ = M^-1 x, outputs invariant).
inline ContinuousStateSpace transform_to_normal_form(const ContinuousStateSpace& css,
                                                     const MatX& m) {
  if (m.rows() != css.n || m.cols() != css.n)
    throw std::invalid_argument("transform_to_normal_form: M must be n x n");
  Eigen::FullPivLU<MatX> lu(m);
  if (!lu.isInvertible())
    throw std::invalid_argument("transform_to_normal_form: M is singular");
  const MatX m_inv = lu.inverse();
  return ContinuousStateSpace(m_inv * css.Ac * m, m_inv * css.Bc, m_inv * css.Fc,
                              css.Cc * m);
}

inline ContinuousStateSpace transform_to_normal_form(const ContinuousStateSpace& css,
                                                     const NormalFormScaling& s) {
  return transform_to_normal_form(css, MatX(s.M));
}

// ===== Time-domain signals =================================================

struct DisturbanceSample {
  double i_d = 0.0;  ///< A
  double v_s = 0.0;  ///< V
};

/// Disturbance channels at sample k: i_d sums the harmonic components,
/// v_s is the pure-fundamental supply.
inline DisturbanceSample synthesize_disturbance(
    const std::vector<HarmonicComponent>& components, double vs_amplitude, double f,
    long k, double tau) {
  const double base = 2.0 * M_PI * f * tau * static_cast<double>(k);
  DisturbanceSample out;
  for (const HarmonicComponent& c : components) {
    c.validate();
    out.i_d += c.amplitude * std::sin(c.order * base + c.phase);
  }
  out.v_s = vs_amplitude * std::sin(base);
  return out;
}

/// Physical state (q_l, i_l) of the undisturbed circuit at t = 0 (supply
/// phase zero): the t=0 sample of the fundamental phasor solution.
inline Vec2 undisturbed_steady_state(const GridCircuitParams& p) {
  const PhasorPair ss = supply_fundamental_phasor(p);
  return Vec2(p.C2 * ss.v_c.imag(), ss.i_l.imag());
}

}  // namespace lcmpc
