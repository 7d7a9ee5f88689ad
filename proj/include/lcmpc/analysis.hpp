#pragma once

// Spectral analysis for harmonic-quality claims.  Windows are coherent
// (an exact integer number of fundamental periods), so a plain single-bin
// DFT needs no window function and has no leakage: the amplitude of
// harmonic order n over N samples spanning q periods is
//
//     a_n = (2/N) |sum_k s_k e^(-j 2 pi n q k / N)|.
//
// Phases are reported in the sine convention (theta such that the
// component is a_n sin(n w t + theta), i.e. bin argument + pi/2).

#include <complex>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcmpc {

struct HarmonicSpectrum {
  double fundamental_freq = 0.0;  ///< Hz
  int periods = 0;                ///< q, fundamental periods in the window
  int window_start = 0;           ///< first sample index (bookkeeping)
  int window_len = 0;             ///< N
  double rms = 0.0;               ///< root mean square of the window
  std::vector<double> amplitude;  ///< index = order, [0] unused (0)
  std::vector<double> phase;      ///< sine-convention, wrapped to (-pi, pi]
  std::vector<std::complex<double>> bin;  ///< raw DFT values per order

  int max_order() const { return static_cast<int>(amplitude.size()) - 1; }
};

namespace detail {
inline double wrap_phase(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}
}  // namespace detail

/// Coherent spectrum of `window` up to `max_order` fundamental harmonics.
/// Rejects windows not spanning a whole number of periods and orders at or
/// beyond Nyquist.
inline HarmonicSpectrum harmonic_spectrum(const std::vector<double>& window, double f,
                                          double tau, int max_order,
                                          int window_start = 0) {
  if (!(f > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("harmonic_spectrum: f and tau must be > 0");
  if (max_order < 1)
    throw std::invalid_argument("harmonic_spectrum: max_order must be >= 1");
  if (!(max_order * f < 0.5 / tau))
    throw std::invalid_argument("harmonic_spectrum: max_order reaches Nyquist");
  const int n = static_cast<int>(window.size());
  const double periods = n * f * tau;
  const double q_real = std::round(periods);
  if (n < 1 || q_real < 1.0 || std::abs(periods - q_real) > 1e-9)
    throw std::invalid_argument(
        "harmonic_spectrum: window must span an integer number of periods");
  const int q = static_cast<int>(q_real);

  HarmonicSpectrum s;
  s.fundamental_freq = f;
  s.periods = q;
  s.window_start = window_start;
  s.window_len = n;
  s.amplitude.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  s.phase.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  s.bin.assign(static_cast<std::size_t>(max_order) + 1, {0.0, 0.0});

  double sq = 0.0;
  for (const double v : window) sq += v * v;
  s.rms = std::sqrt(sq / n);

  for (int order = 1; order <= max_order; ++order) {
    const double step = -2.0 * M_PI * order * q / n;
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < n; ++k)
      acc += window[static_cast<std::size_t>(k)] *
             std::complex<double>(std::cos(step * k), std::sin(step * k));
    s.bin[static_cast<std::size_t>(order)] = acc;
    s.amplitude[static_cast<std::size_t>(order)] = 2.0 * std::abs(acc) / n;
    s.phase[static_cast<std::size_t>(order)] =
        detail::wrap_phase(std::arg(acc) + M_PI_2);
  }
  return s;
}

/// THD in percent against the fundamental, over orders 2..max_order
/// (capped at the spectrum's own bandwidth).  Rejects a fundamental that
/// does not rise above the roundoff floor of the window content (a DC or
/// all-zero window has no meaningful THD).
inline double thd(const HarmonicSpectrum& s, int max_order) {
  if (!(s.amplitude.size() > 1) || !(s.amplitude[1] > 1e-9 * s.rms))
    throw std::domain_error("thd: fundamental indistinguishable from zero");
  const int top = std::min(max_order, s.max_order());
  double sum = 0.0;
  for (int order = 2; order <= top; ++order) {
    const double a = s.amplitude[static_cast<std::size_t>(order)];
    sum += a * a;
  }
  return 100.0 * std::sqrt(sum) / s.amplitude[1];
}

inline double thd(const HarmonicSpectrum& s) { return thd(s, s.max_order()); }

struct AmplitudeFrequency {
  double amplitude = 0.0;      ///< fundamental-bin amplitude
  double dominant_freq = 0.0;  ///< Hz of the strongest bin
};

/// Fundamental amplitude and the dominant bin over every harmonic below
/// Nyquist.
inline AmplitudeFrequency amplitude_frequency_check(const std::vector<double>& window,
                                                    double f, double tau) {
  int top = static_cast<int>(std::floor(0.5 / (f * tau)));
  if (top * f >= 0.5 / tau) --top;  // strict Nyquist bound
  const HarmonicSpectrum s = harmonic_spectrum(window, f, tau, top);
  AmplitudeFrequency out;
  out.amplitude = s.amplitude[1];
  int best = 1;
  for (int order = 2; order <= s.max_order(); ++order)
    if (s.amplitude[static_cast<std::size_t>(order)] >
        s.amplitude[static_cast<std::size_t>(best)])
      best = order;
  out.dominant_freq = best * f;
  return out;
}

// ===== Reporting ===========================================================

/// One signal's distortion summary, with an optional pass/fail limit.
struct SignalThd {
  std::string signal;
  HarmonicSpectrum spectrum;
  double thd_percent = 0.0;
  std::optional<double> limit_percent;

  bool pass() const { return !limit_percent || thd_percent <= *limit_percent; }
};

struct ThdReport {
  std::vector<SignalThd> entries;

  bool all_pass() const {
    for (const SignalThd& e : entries)
      if (!e.pass()) return false;
    return true;
  }
};

inline SignalThd analyze_signal(std::string name, const std::vector<double>& window,
                                double f, double tau, int max_order,
                                std::optional<double> limit_percent = std::nullopt,
                                int window_start = 0) {
  SignalThd out;
  out.signal = std::move(name);
  out.spectrum = harmonic_spectrum(window, f, tau, max_order, window_start);
  out.thd_percent = thd(out.spectrum, max_order);
  out.limit_percent = limit_percent;
  return out;
}

}  // namespace lcmpc
