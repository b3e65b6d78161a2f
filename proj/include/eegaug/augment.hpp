#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "eegaug/errors.hpp"
#include "eegaug/montage.hpp"
#include "eegaug/rng.hpp"
#include "eegaug/signal.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// Data augmentation strategies. Each element augmenter is a pure function
// of (trial, parameters, rng stream); augment_trainset derives one RNG
// stream per (trial index, chain stage, copy), so results do not depend on
// evaluation order.

enum class AugmentKind : std::uint8_t {
  None,
  Noise,  // add uniform noise scaled by std(channel)/c_noise
  Flip,   // per-channel max(X_c) - X_c
  Scale,  // multiply by (1 + c_scale) and (1 - c_scale)
  Freq,   // shift spectrum by +c_freq and -c_freq Hz
  Symm,   // reflect hemispheres, keep label
  Rs,     // random left/right exchange, keep label
  Cr,     // reflect hemispheres, exchange label for left/right-hand MI
};

struct AugmentParams {
  double c_noise{2.0};
  double c_scale{0.05};
  double c_freq{0.2};

  void validate() const {
    if (!(c_noise > 0.0)) throw ConfigError("c_noise must be > 0");
    if (!(c_scale > 0.0 && c_scale < 1.0)) throw ConfigError("c_scale must be in (0, 1)");
    if (!(c_freq > 0.0)) throw ConfigError("c_freq must be > 0");
  }
};

using AugmentChain = std::vector<AugmentKind>;

inline const char* to_string(AugmentKind k) {
  switch (k) {
    case AugmentKind::None: return "none";
    case AugmentKind::Noise: return "noise";
    case AugmentKind::Flip: return "flip";
    case AugmentKind::Scale: return "scale";
    case AugmentKind::Freq: return "freq";
    case AugmentKind::Symm: return "symm";
    case AugmentKind::Rs: return "rs";
    case AugmentKind::Cr: return "cr";
  }
  return "?";
}

// Chains serialize as '+' separated lists, e.g. "cr+freq".
inline AugmentChain parse_augment_chain(const std::string& text) {
  AugmentChain chain;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, '+')) {
    bool known = false;
    for (AugmentKind k : {AugmentKind::None, AugmentKind::Noise, AugmentKind::Flip,
                          AugmentKind::Scale, AugmentKind::Freq, AugmentKind::Symm,
                          AugmentKind::Rs, AugmentKind::Cr})
      if (tok == to_string(k)) {
        chain.push_back(k);
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown augmentation: '" + tok + "'");
  }
  if (chain.empty()) throw ConfigError("empty augmentation chain");
  return chain;
}

inline std::string to_string(const AugmentChain& chain) {
  std::string s;
  for (const AugmentKind k : chain) {
    if (!s.empty()) s += '+';
    s += to_string(k);
  }
  return s;
}

namespace detail {

inline void require_reflectable(const Trial& trial, const Montage& montage) {
  if (montage.pair_count() == 0) throw PairlessMontageError();
  if (trial.channel_count() != static_cast<Eigen::Index>(montage.channel_count()))
    throw DataError("trial channel count does not match montage");
}

inline Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& samples,
                                    const std::vector<std::size_t>& pi) {
  Eigen::MatrixXd out(samples.rows(), samples.cols());
  for (std::size_t c = 0; c < pi.size(); ++c)
    out.row(static_cast<Eigen::Index>(c)) =
        samples.row(static_cast<Eigen::Index>(pi[c]));
  return out;
}

}  // namespace detail

// Channel reflection: exchange symmetric hemisphere channels. For
// left/right-hand MI the label is exchanged too (1 - y); all other
// paradigms keep it. An involution on (samples, label).
inline Trial cr(const Trial& trial, const Montage& montage, Paradigm paradigm) {
  detail::require_reflectable(trial, montage);
  Trial out = trial;
  out.samples = detail::permute_rows(trial.samples, reflection_permutation(montage));
  if (paradigm == Paradigm::MI_LR) {
    if (trial.label != 0 && trial.label != 1)
      throw DataError("left/right-hand MI requires binary labels, got " +
                      std::to_string(trial.label));
    out.label = 1 - trial.label;
  }
  return out;
}

// Same reflection as cr but the label never changes.
inline Trial symm(const Trial& trial, const Montage& montage) {
  detail::require_reflectable(trial, montage);
  Trial out = trial;
  out.samples = detail::permute_rows(trial.samples, reflection_permutation(montage));
  return out;
}

// Random shuffle: swap each left channel with a randomly chosen right
// channel (a uniform bijection L -> R drawn fresh per call). Label kept,
// midline fixed.
inline Trial rs(const Trial& trial, const Montage& montage, Rng& rng) {
  detail::require_reflectable(trial, montage);
  const std::size_t k = montage.pair_count();
  std::vector<std::size_t> sigma(k);
  for (std::size_t i = 0; i < k; ++i) sigma[i] = i;
  rng.shuffle(sigma);
  Trial out = trial;
  for (std::size_t i = 0; i < k; ++i) {
    const auto li = static_cast<Eigen::Index>(montage.left[i]);
    const auto ri = static_cast<Eigen::Index>(montage.right[sigma[i]]);
    out.samples.row(li) = trial.samples.row(ri);
    out.samples.row(ri) = trial.samples.row(li);
  }
  return out;
}

// Additive uniform noise, amplitude std(X_c)/c_noise per channel. Channels
// with zero spread are returned bit-identical.
inline Trial noise(const Trial& trial, double c_noise, Rng& rng) {
  if (!(c_noise > 0.0)) throw ConfigError("c_noise must be > 0");
  Trial out = trial;
  const Eigen::Index t = trial.sample_count();
  for (Eigen::Index c = 0; c < trial.channel_count(); ++c) {
    const Eigen::RowVectorXd& row = trial.samples.row(c);
    const double mean = row.mean();
    const double sd = std::sqrt((row.array() - mean).square().sum() /
                                static_cast<double>(t));
    if (sd == 0.0) continue;
    for (Eigen::Index s = 0; s < t; ++s)
      out.samples(c, s) += rng.uniform(-1.0, 1.0) * sd / c_noise;
  }
  return out;
}

// Amplitude flip: per-channel max(X_c) - X_c.
inline Trial flip(const Trial& trial) {
  Trial out = trial;
  for (Eigen::Index c = 0; c < trial.channel_count(); ++c) {
    const double mx = trial.samples.row(c).maxCoeff();
    out.samples.row(c) = mx - trial.samples.row(c).array();
  }
  return out;
}

// Amplitude scaling by (1 + c) and (1 - c); two trials out.
inline std::pair<Trial, Trial> scale(const Trial& trial, double c_scale) {
  if (!(c_scale > 0.0 && c_scale < 1.0))
    throw ConfigError("c_scale must be in (0, 1)");
  Trial up = trial;
  Trial down = trial;
  up.samples *= (1.0 + c_scale);
  down.samples *= (1.0 - c_scale);
  return {std::move(up), std::move(down)};
}

// Frequency shift by +c_freq and -c_freq Hz on every channel; two trials
// out, same shift sign across channels within each copy.
inline std::pair<Trial, Trial> freq(const Trial& trial, double c_freq) {
  if (!(c_freq > 0.0 && c_freq < trial.fs / 2.0))
    throw ConfigError("c_freq must be in (0, fs/2)");
  Trial up = trial;
  Trial down = trial;
  for (Eigen::Index c = 0; c < trial.channel_count(); ++c) {
    const Eigen::VectorXd row = trial.samples.row(c).transpose();
    up.samples.row(c) = freq_shift(row, trial.fs, c_freq).transpose();
    down.samples.row(c) = freq_shift(row, trial.fs, -c_freq).transpose();
  }
  return {std::move(up), std::move(down)};
}

namespace detail {

inline std::vector<Trial> augmented_copies(const Trial& trial, AugmentKind kind,
                                           const TrialSet& set,
                                           const AugmentParams& params, Rng& rng) {
  const bool reflection_family =
      kind == AugmentKind::Cr || kind == AugmentKind::Symm || kind == AugmentKind::Rs;
  // Motor-imagery tasks without the left/right structure are not reflected;
  // the originals pass through untouched.
  if (reflection_family && set.paradigm == Paradigm::MI_OTHER) return {};
  switch (kind) {
    case AugmentKind::None:
      return {};
    case AugmentKind::Noise:
      return {noise(trial, params.c_noise, rng)};
    case AugmentKind::Flip:
      return {flip(trial)};
    case AugmentKind::Scale: {
      auto [up, down] = scale(trial, params.c_scale);
      return {std::move(up), std::move(down)};
    }
    case AugmentKind::Freq: {
      auto [up, down] = freq(trial, params.c_freq);
      return {std::move(up), std::move(down)};
    }
    case AugmentKind::Symm:
      return {symm(trial, set.montage)};
    case AugmentKind::Rs:
      return {rs(trial, set.montage, rng)};
    case AugmentKind::Cr: {
      if (set.paradigm == Paradigm::MI_LR && set.class_count != 2)
        throw DataError("cr on left/right-hand MI requires class_count == 2");
      return {cr(trial, set.montage, set.paradigm)};
    }
  }
  throw ConfigError("unknown augmentation kind");
}

}  // namespace detail

// Expands a training set along the augmentation chain. Each stage keeps the
// originals and appends the stage's copies, so multiplicities compose:
// m -> 2m for Noise/Flip/Symm/Rs/Cr, m -> 3m for Scale/Freq, and a
// [cr, freq] chain yields 6m. Copies carry a provenance tag and inherit
// the source trial's subject id.
inline TrialSet augment_trainset(const TrialSet& set, const AugmentChain& chain,
                                 const AugmentParams& params = {},
                                 std::uint64_t seed = 0) {
  if (chain.empty()) throw ConfigError("augmentation chain must not be empty");
  params.validate();
  for (const Trial& t : set.trials)
    if (t.test_only)
      throw std::logic_error("augment_trainset received a held-out test trial");

  TrialSet out = set;
  for (std::size_t stage = 0; stage < chain.size(); ++stage) {
    const AugmentKind kind = chain[stage];
    std::vector<Trial> next;
    next.reserve(out.trials.size() * 3);
    for (std::size_t i = 0; i < out.trials.size(); ++i) {
      const Trial& src = out.trials[i];
      next.push_back(src);
      Rng rng(Rng::derive({seed, static_cast<std::uint64_t>(stage),
                           static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(kind)}));
      auto copies = detail::augmented_copies(src, kind, out, params, rng);
      for (Trial& copy : copies) {
        copy.provenance =
            (src.provenance == "orig") ? to_string(kind)
                                       : src.provenance + "+" + to_string(kind);
        next.push_back(std::move(copy));
      }
    }
    out.trials = std::move(next);
  }
  return out;
}

}  // namespace eegaug
