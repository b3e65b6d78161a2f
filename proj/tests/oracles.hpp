#pragma once

// Independent reference implementations used as test oracles. Everything
// here is deliberately naive (O(N^2) DFTs, exhaustive enumeration) and
// shares no code with the library paths it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "eegaug/montage.hpp"
#include "eegaug/rng.hpp"

namespace oracle {

// Single-frequency amplitude via a direct correlation sum (no FFT library
// involved). Exact for integer numbers of cycles.
inline double amplitude_at(const Eigen::VectorXd& x, double fs, double f_hz) {
  const double n = static_cast<double>(x.size());
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double phase = -2.0 * std::numbers::pi * f_hz * static_cast<double>(i) / fs;
    acc += x[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return 2.0 * std::abs(acc) / n;
}

// Full magnitude spectrum by direct DFT; returns bin index of the largest
// magnitude over bins 1..N/2.
inline Eigen::Index dft_peak_bin(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::Index best = 1;
  double best_mag = -1.0;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phase =
          -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(i) /
          static_cast<double>(n);
      acc += x[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    const double mag = std::abs(acc);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  return best;
}

// Lag of the cross-correlation maximum between a and b (positive lag means
// b trails a). Searched over [-max_lag, max_lag].
inline int xcorr_peak_lag(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          int max_lag) {
  int best_lag = 0;
  double best = -1e300;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const Eigen::Index j = i + lag;
      if (j < 0 || j >= b.size()) continue;
      acc += a[i] * b[j];
    }
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

// Random valid montage: unique synthetic names, a random subset paired.
inline eegaug::Montage random_montage(eegaug::Rng& rng, std::size_t min_channels = 2,
                                      std::size_t max_channels = 12) {
  const std::size_t c =
      min_channels + rng.uniform_int(max_channels - min_channels + 1);
  std::vector<eegaug::ChannelId> channels;
  for (std::size_t i = 0; i < c; ++i)
    channels.push_back({"ch" + std::to_string(i), eegaug::ChannelKind::Unipolar});
  std::vector<std::size_t> order(c);
  for (std::size_t i = 0; i < c; ++i) order[i] = i;
  rng.shuffle(order);
  const std::size_t k = rng.uniform_int(c / 2 + 1);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    pairs.emplace_back(channels[order[2 * i]].name, channels[order[2 * i + 1]].name);
  return eegaug::make_montage(channels, pairs);
}

}  // namespace oracle
