#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "eegaug/errors.hpp"

namespace eegaug {

// Deterministic DSP primitives for the preprocessing recipes and the
// frequency-shift augmentation. All operations are pure functions of their
// inputs and linear in the series; superposition holds to rounding error.

enum class FilterKind { Bandpass, Notch };

struct FilterSpec {
  FilterKind kind{FilterKind::Bandpass};
  double lo_hz{0.0};    // bandpass
  double hi_hz{0.0};    // bandpass
  double f0_hz{0.0};    // notch center
  double quality{30.0}; // notch Q
  int order{4};         // analog prototype order (bandpass)

  static FilterSpec bandpass(double lo, double hi, int order = 4) {
    FilterSpec s;
    s.kind = FilterKind::Bandpass;
    s.lo_hz = lo;
    s.hi_hz = hi;
    s.order = order;
    return s;
  }
  static FilterSpec notch(double f0, double quality = 30.0) {
    FilterSpec s;
    s.kind = FilterKind::Notch;
    s.f0_hz = f0;
    s.quality = quality;
    return s;
  }

  void validate(double fs) const {
    if (kind == FilterKind::Bandpass) {
      if (!(0.0 < lo_hz && lo_hz < hi_hz && hi_hz < fs / 2.0))
        throw ConfigError("bandpass band must satisfy 0 < lo < hi < fs/2");
      if (order < 1) throw ConfigError("filter order must be >= 1");
    } else {
      if (!(0.0 < f0_hz && f0_hz < fs / 2.0))
        throw ConfigError("notch center must lie in (0, fs/2)");
      if (!(quality > 0.0)) throw ConfigError("notch quality must be > 0");
    }
  }
};

// One second-order section, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

namespace detail {

inline constexpr double kPi = std::numbers::pi_v<double>;

// Butterworth band-pass as cascaded biquads: analog low-pass prototype ->
// band transform -> bilinear with prewarped edges. Conjugate pole pairs are
// kept adjacent; every section carries zeros at z = +1 and z = -1, and the
// overall gain is folded into the first section.
inline std::vector<Biquad> design_butter_bandpass(double fs, double lo_hz,
                                                  double hi_hz, int order) {
  using cd = std::complex<double>;
  const double k = 2.0 * fs;  // bilinear constant
  const double wl = k * std::tan(kPi * lo_hz / fs);
  const double wh = k * std::tan(kPi * hi_hz / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  // Left-half-plane prototype poles of the normalized low-pass.
  std::vector<cd> proto(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const double theta = kPi * (2.0 * i + 1.0) / (2.0 * order) + kPi / 2.0;
    proto[static_cast<std::size_t>(i)] = cd(std::cos(theta), std::sin(theta));
  }

  // Band transform: each prototype pole spawns a pole pair.
  std::vector<cd> analog;
  analog.reserve(2 * static_cast<std::size_t>(order));
  for (const cd& p : proto) {
    const cd pb = p * bw;
    const cd disc = std::sqrt(pb * pb - 4.0 * w0sq);
    analog.push_back(0.5 * (pb + disc));
    analog.push_back(0.5 * (pb - disc));
  }

  // Bilinear transform of poles; zeros land on +1 (from s=0) and -1.
  std::vector<cd> digital(analog.size());
  cd pole_prod(1.0, 0.0);
  for (std::size_t i = 0; i < analog.size(); ++i) {
    digital[i] = (k + analog[i]) / (k - analog[i]);
    pole_prod *= (k - analog[i]);
  }
  const double gain = (std::pow(bw, order) * std::pow(k, order) / pole_prod).real();

  std::sort(digital.begin(), digital.end(), [](const cd& a, const cd& b) {
    if (std::abs(a.imag()) != std::abs(b.imag()))
      return std::abs(a.imag()) > std::abs(b.imag());
    return a.imag() > b.imag();
  });

  std::vector<Biquad> sos(static_cast<std::size_t>(order));
  for (int j = 0; j < order; ++j) {
    const cd p1 = digital[static_cast<std::size_t>(2 * j)];
    const cd p2 = digital[static_cast<std::size_t>(2 * j + 1)];
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // zeros at +1 and -1
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    sos[static_cast<std::size_t>(j)] = s;
  }
  sos[0].b0 *= gain;
  sos[0].b1 *= gain;
  sos[0].b2 *= gain;
  return sos;
}

// RBJ-cookbook notch biquad. Unit gain at DC and Nyquist, zero at f0.
inline Biquad design_notch_biquad(double fs, double f0, double quality) {
  const double w0 = 2.0 * kPi * f0 / fs;
  const double alpha = std::sin(w0) / (2.0 * quality);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

// Steady-state initial conditions for a constant input of 1 (transposed
// direct form II), so a constant series passes through with no transient.
inline std::pair<double, double> biquad_step_state(const Biquad& s) {
  const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  const double z1 = dc - s.b0;
  const double z2 = s.b2 - s.a2 * dc;
  return {z1, z2};
}

inline void run_biquad(const Biquad& s, Eigen::VectorXd& x) {
  const auto [zi1, zi2] = biquad_step_state(s);
  double z1 = zi1 * x[0];
  double z2 = zi2 * x[0];
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double xn = x[n];
    const double yn = s.b0 * xn + z1;
    z1 = s.b1 * xn - s.a1 * yn + z2;
    z2 = s.b2 * xn - s.a2 * yn;
    x[n] = yn;
  }
}

}  // namespace detail

// Forward-backward application of a biquad cascade with odd-reflection edge
// padding of 3*(2*n_sections + 1) samples. Output has the input's length
// and zero phase.
inline Eigen::VectorXd filtfilt(const std::vector<Biquad>& sos,
                                const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index pad =
      3 * (2 * static_cast<Eigen::Index>(sos.size()) + 1);
  if (n <= pad)
    throw ConfigError("series too short for zero-phase edge padding: need > " +
                      std::to_string(pad) + " samples, got " + std::to_string(n));

  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i)
    ext[i] = 2.0 * x[0] - x[pad - i];
  ext.segment(pad, n) = x;
  for (Eigen::Index i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  for (const Biquad& s : sos) detail::run_biquad(s, ext);
  ext.reverseInPlace();
  for (const Biquad& s : sos) detail::run_biquad(s, ext);
  ext.reverseInPlace();
  return ext.segment(pad, n);
}

// Zero-phase Butterworth band-pass. Passband gain approximates |H|^2 of the
// single-pass filter.
inline Eigen::VectorXd bandpass_zero_phase(const Eigen::VectorXd& x, double fs,
                                           const FilterSpec& spec) {
  if (spec.kind != FilterKind::Bandpass)
    throw ConfigError("bandpass_zero_phase requires a bandpass spec");
  spec.validate(fs);
  return filtfilt(detail::design_butter_bandpass(fs, spec.lo_hz, spec.hi_hz, spec.order), x);
}

// Zero-phase notch (second-order IIR, default Q = 30).
inline Eigen::VectorXd notch(const Eigen::VectorXd& x, double fs, double f0 = 50.0,
                             double quality = 30.0) {
  FilterSpec spec = FilterSpec::notch(f0, quality);
  spec.validate(fs);
  return filtfilt({detail::design_notch_biquad(fs, f0, quality)}, x);
}

inline Eigen::VectorXd apply_zero_phase(const Eigen::VectorXd& x, double fs,
                                        const FilterSpec& spec) {
  if (spec.kind == FilterKind::Bandpass) return bandpass_zero_phase(x, fs, spec);
  return notch(x, fs, spec.f0_hz, spec.quality);
}

namespace detail {

// Continued-fraction rational approximation of r, tolerance 1e-9 relative.
// The denominator is capped at 1000, which covers every realistic pairing
// of recording rates and rejects irrational ratios instead of chasing them
// with huge polyphase factors.
inline std::pair<std::int64_t, std::int64_t> to_rational(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw ConfigError("resample ratio must be positive and finite");
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    if (a > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > 1000) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - r) < 1e-9 * r)
      return {p1, q1};
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  throw ConfigError("resample ratio is not representable as a small rational");
}

inline double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double half_sq = (x / 2.0) * (x / 2.0);
  for (int k = 1; k < 64; ++k) {
    term *= half_sq / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace detail

// Rational-ratio resampler: polyphase zero-stuffing with a Kaiser-windowed
// (beta = 8.6) sinc low-pass cut at 0.9 * min(fs_in, fs_out)/2. Output
// length is round(len * fs_out / fs_in); the kernel is centered, so there
// is no group delay.
inline Eigen::VectorXd resample(const Eigen::VectorXd& x, double fs_in,
                                double fs_out) {
  if (!(fs_in > 0.0) || !(fs_out > 0.0))
    throw ConfigError("sample rates must be positive");
  if (fs_in == fs_out) return x;
  const auto [up, down] = detail::to_rational(fs_out / fs_in);
  const std::int64_t n_in = x.size();
  const auto n_out = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(n_in) * static_cast<double>(up) /
                   static_cast<double>(down)));

  const double fs_up = fs_in * static_cast<double>(up);
  const double cutoff_hz = 0.9 * std::min(fs_in, fs_out) / 2.0;
  const double fc = cutoff_hz / fs_up;  // cycles per upsampled sample
  const std::int64_t half = 10 * std::max(up, down);
  const double beta = 8.6;
  const double i0_beta = detail::bessel_i0(beta);

  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  for (std::int64_t k = -half; k <= half; ++k) {
    const double t = static_cast<double>(k);
    const double sinc = (k == 0) ? 1.0
                                 : std::sin(2.0 * detail::kPi * fc * t) /
                                       (2.0 * detail::kPi * fc * t);
    const double frac = t / static_cast<double>(half);
    const double win = detail::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - frac * frac))) / i0_beta;
    h[static_cast<std::size_t>(k + half)] = 2.0 * fc * sinc * win * static_cast<double>(up);
  }

  Eigen::VectorXd y(n_out);
  for (Eigen::Index j = 0; j < n_out; ++j) {
    // Upsampled-domain center of output sample j.
    const std::int64_t center = static_cast<std::int64_t>(j) * down + half;
    double acc = 0.0;
    // Only taps hitting non-zero (stuffed) samples contribute:
    // center - k must be divisible by up.
    std::int64_t k = center % up;
    for (; k <= 2 * half; k += up) {
      const std::int64_t m = (center - k) / up;
      if (m < 0 || m >= n_in) continue;
      acc += h[static_cast<std::size_t>(k)] * x[static_cast<Eigen::Index>(m)];
    }
    y[j] = acc;
  }
  return y;
}

// Analytic signal by the FFT construction: negative frequencies zeroed,
// positive doubled. The real part reproduces the input to rounding error.
inline Eigen::VectorXcd analytic_signal(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw ConfigError("analytic_signal needs at least 2 samples");
  std::vector<std::complex<double>> time(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) time[static_cast<std::size_t>(i)] = x[i];
  std::vector<std::complex<double>> freq;
  Eigen::FFT<double> fft;
  fft.fwd(freq, time);
  const Eigen::Index half = n / 2;
  if (n % 2 == 0) {
    for (Eigen::Index i = 1; i < half; ++i) freq[static_cast<std::size_t>(i)] *= 2.0;
    for (Eigen::Index i = half + 1; i < n; ++i) freq[static_cast<std::size_t>(i)] = 0.0;
  } else {
    for (Eigen::Index i = 1; i <= half; ++i) freq[static_cast<std::size_t>(i)] *= 2.0;
    for (Eigen::Index i = half + 1; i < n; ++i) freq[static_cast<std::size_t>(i)] = 0.0;
  }
  fft.inv(time, freq);
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = time[static_cast<std::size_t>(i)];
  return out;
}

// Shifts all spectral content of x by df_hz via the analytic signal:
// Re(analytic(x) * exp(i*2*pi*df*t)).
inline Eigen::VectorXd freq_shift(const Eigen::VectorXd& x, double fs, double df_hz) {
  if (!(std::abs(df_hz) < fs / 2.0))
    throw ConfigError("frequency shift must satisfy |df| < fs/2");
  const Eigen::VectorXcd a = analytic_signal(x);
  Eigen::VectorXd y(x.size());
  const double w = 2.0 * detail::kPi * df_hz / fs;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const std::complex<double> rot(std::cos(w * static_cast<double>(t)),
                                   std::sin(w * static_cast<double>(t)));
    y[t] = (a[t] * rot).real();
  }
  return y;
}

}  // namespace eegaug
