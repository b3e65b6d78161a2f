#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "eegaug/errors.hpp"
#include "eegaug/montage.hpp"
#include "eegaug/rng.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// Surrogate EEG generators with planted, controllable structure. The
// central property of the motor-imagery generator is exact mirror
// invariance: reflecting the channels of a class-0 trial yields a sample
// from the class-1 law and vice versa. That invariance is what licenses
// the downstream checks that label-exchanging reflection helps while
// label-keeping reflection hurts.

struct SynthSpec {
  Montage montage;
  Paradigm paradigm{Paradigm::MI_LR};
  int subjects{9};
  int trials_per_class{36};
  double fs{250.0};
  double trial_s{4.0};
  double erd_depth{0.5};          // fractional rhythm attenuation, in [0, 1]
  double noise_sigma{10.0};       // background noise scale, microvolts
  double subject_shift_sigma{0.1};// inter-subject mixing perturbation scale
  std::uint64_t seed{0};

  void validate() const {
    validate_montage(montage);
    if (subjects < 1 || trials_per_class < 1)
      throw ConfigError("synth counts must be >= 1");
    if (!(fs > 0.0) || !(trial_s > 0.0)) throw ConfigError("fs and trial_s must be > 0");
    if (!(erd_depth >= 0.0 && erd_depth <= 1.0))
      throw ConfigError("erd_depth must lie in [0, 1]");
    if (!(noise_sigma > 0.0)) throw ConfigError("noise_sigma must be > 0");
    if (subject_shift_sigma < 0.0)
      throw ConfigError("subject_shift_sigma must be >= 0");
    const double t = trial_s * fs;
    if (std::abs(t - std::round(t)) > 1e-9 || !(t >= 2.0))
      throw ConfigError("trial_s * fs must be an integer >= 2");
  }

  Eigen::Index samples_per_trial() const {
    return static_cast<Eigen::Index>(std::llround(trial_s * fs));
  }
};

namespace detail {

// White + 1/f-shaped noise (power exponent 1), unit variance.
inline Eigen::VectorXd background_noise(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd white(n);
  for (Eigen::Index i = 0; i < n; ++i) white[i] = rng.gaussian();

  std::vector<std::complex<double>> time(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    time[static_cast<std::size_t>(i)] = rng.gaussian();
  }
  std::vector<std::complex<double>> freq;
  Eigen::FFT<double> fft;
  fft.fwd(freq, time);
  freq[0] = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    const Eigen::Index sym = (k <= n / 2) ? k : n - k;
    freq[static_cast<std::size_t>(k)] /= std::sqrt(static_cast<double>(sym));
  }
  fft.inv(time, freq);
  Eigen::VectorXd pink(n);
  for (Eigen::Index i = 0; i < n; ++i) pink[i] = time[static_cast<std::size_t>(i)].real();
  const double sd = std::sqrt(pink.squaredNorm() / static_cast<double>(n));
  if (sd > 0.0) pink /= sd;

  return (white + pink) / std::sqrt(2.0);
}

// Reflection-equivariant random mixing: M = I + sigma * (G + P G P^T)/2
// where P is the reflection permutation, so M commutes with P and the
// mirror invariance of the generative law survives subject perturbation.
inline Eigen::MatrixXd subject_mixing(const Montage& montage, double sigma, Rng& rng) {
  const auto c = static_cast<Eigen::Index>(montage.channel_count());
  if (sigma == 0.0) return Eigen::MatrixXd::Identity(c, c);
  Eigen::MatrixXd g(c, c);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = 0; j < c; ++j) g(i, j) = rng.gaussian() / std::sqrt(c);
  const auto pi = reflection_permutation(montage);
  Eigen::MatrixXd g_reflected(c, c);
  for (Eigen::Index i = 0; i < c; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      g_reflected(i, j) = g(static_cast<Eigen::Index>(pi[static_cast<std::size_t>(i)]),
                            static_cast<Eigen::Index>(pi[static_cast<std::size_t>(j)]));
  return Eigen::MatrixXd::Identity(c, c) + sigma * 0.5 * (g + g_reflected);
}

// Balanced (or imbalanced) label sequence in randomized chronological order.
inline std::vector<int> label_sequence(int n0, int n1, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n0), 0);
  labels.insert(labels.end(), static_cast<std::size_t>(n1), 1);
  rng.shuffle(labels);
  return labels;
}

// Storage-precision quantization so generated sets survive the f32 trial
// container byte-exactly.
inline void quantize_to_storage(Eigen::MatrixXd& samples) {
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    for (Eigen::Index j = 0; j < samples.cols(); ++j)
      samples(i, j) = static_cast<double>(static_cast<float>(samples(i, j)));
}

}  // namespace detail

// Mirror-symmetric left/right-hand motor imagery surrogate. Every paired
// channel carries a 10 Hz rhythm over the background; the hemisphere
// contralateral to the imagined hand attenuates it by erd_depth (event-
// related desynchronization). Class 0 = left hand = attenuation on the
// right-hemisphere channels; class 1 mirrors exactly. Same spec => same
// bytes.
inline TrialSet synth_mi(const SynthSpec& spec) {
  spec.validate();
  if (spec.montage.pair_count() == 0) throw PairlessMontageError();
  if (spec.paradigm != Paradigm::MI_LR)
    throw ConfigError("synth_mi generates left/right-hand MI data");

  const auto c = static_cast<Eigen::Index>(spec.montage.channel_count());
  const Eigen::Index t = spec.samples_per_trial();
  const double rhythm_amp = spec.noise_sigma;  // 0 dB narrowband-to-noise

  TrialSet set;
  set.montage = spec.montage;
  set.paradigm = Paradigm::MI_LR;
  set.class_count = 2;

  for (int s = 0; s < spec.subjects; ++s) {
    Rng subject_rng(Rng::derive({spec.seed, 0x5d, static_cast<std::uint64_t>(s)}));
    const Eigen::MatrixXd mixing =
        detail::subject_mixing(spec.montage, spec.subject_shift_sigma, subject_rng);
    const std::vector<int> labels =
        detail::label_sequence(spec.trials_per_class, spec.trials_per_class, subject_rng);

    for (std::size_t i = 0; i < labels.size(); ++i) {
      Rng rng(Rng::derive({spec.seed, 0x71, static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(i)}));
      Eigen::MatrixXd x(c, t);
      for (Eigen::Index ch = 0; ch < c; ++ch)
        x.row(ch) = spec.noise_sigma * detail::background_noise(t, rng).transpose();

      const int label = labels[i];
      for (std::size_t k = 0; k < spec.montage.pair_count(); ++k) {
        // Contralateral attenuation: left hand (0) suppresses the right
        // hemisphere, right hand (1) the left.
        const double amp_left = rhythm_amp * (label == 1 ? 1.0 - spec.erd_depth : 1.0);
        const double amp_right = rhythm_amp * (label == 0 ? 1.0 - spec.erd_depth : 1.0);
        for (const auto& [idx, amp] :
             {std::pair{spec.montage.left[k], amp_left},
              std::pair{spec.montage.right[k], amp_right}}) {
          const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
          for (Eigen::Index n = 0; n < t; ++n)
            x(static_cast<Eigen::Index>(idx), n) +=
                amp * std::sin(2.0 * std::numbers::pi * 10.0 *
                                   static_cast<double>(n) / spec.fs +
                               phase);
        }
      }

      Trial trial;
      trial.samples = mixing * x;
      detail::quantize_to_storage(trial.samples);
      trial.fs = spec.fs;
      trial.label = label;
      trial.subject = s;
      set.trials.push_back(std::move(trial));
    }
  }
  return set;
}

// Imbalanced binary surrogate with hemispherically symmetric class
// signatures, so label-keeping reflection is sound on it. The minority
// (target) class carries a broad mid-trial deflection on every channel.
// Per subject, round(minority_fraction * 2 * trials_per_class) trials are
// minority class 1.
inline TrialSet synth_imbalanced(const SynthSpec& spec, double minority_fraction) {
  spec.validate();
  if (!(minority_fraction > 0.0 && minority_fraction < 0.5))
    throw ConfigError("minority_fraction must lie in (0, 0.5)");
  if (spec.paradigm == Paradigm::MI_LR)
    throw ConfigError("synth_imbalanced needs a label-keeping paradigm");

  const auto c = static_cast<Eigen::Index>(spec.montage.channel_count());
  const Eigen::Index t = spec.samples_per_trial();
  const int n_total = 2 * spec.trials_per_class;
  const int n_minority =
      std::max(1, static_cast<int>(std::llround(minority_fraction * n_total)));

  // Symmetric target signature: a Gaussian bump centered at a third of the
  // trial, identical on all channels.
  Eigen::VectorXd bump(t);
  const double center = static_cast<double>(t) / 3.0;
  const double width = 0.05 * static_cast<double>(t);
  for (Eigen::Index n = 0; n < t; ++n) {
    const double d = (static_cast<double>(n) - center) / width;
    bump[n] = 2.0 * spec.noise_sigma * std::exp(-0.5 * d * d);
  }

  TrialSet set;
  set.montage = spec.montage;
  set.paradigm = spec.paradigm;
  set.class_count = 2;

  for (int s = 0; s < spec.subjects; ++s) {
    Rng subject_rng(Rng::derive({spec.seed, 0x1b, static_cast<std::uint64_t>(s)}));
    const Eigen::MatrixXd mixing =
        detail::subject_mixing(spec.montage, spec.subject_shift_sigma, subject_rng);
    const std::vector<int> labels =
        detail::label_sequence(n_total - n_minority, n_minority, subject_rng);

    for (std::size_t i = 0; i < labels.size(); ++i) {
      Rng rng(Rng::derive({spec.seed, 0x2c, static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(i)}));
      Eigen::MatrixXd x(c, t);
      for (Eigen::Index ch = 0; ch < c; ++ch)
        x.row(ch) = spec.noise_sigma * detail::background_noise(t, rng).transpose();
      if (labels[i] == 1)
        for (Eigen::Index ch = 0; ch < c; ++ch) x.row(ch) += bump.transpose();

      Trial trial;
      trial.samples = mixing * x;
      detail::quantize_to_storage(trial.samples);
      trial.fs = spec.fs;
      trial.label = labels[i];
      trial.subject = s;
      set.trials.push_back(std::move(trial));
    }
  }
  return set;
}

}  // namespace eegaug
