#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eegaug/errors.hpp"
#include "eegaug/montage.hpp"

namespace eegaug {

// BCI paradigm tag. MI_LR means the classes are exactly
// {0 = left hand, 1 = right hand}; reflection-based augmentation flips
// labels only under this tag. MI_OTHER covers motor-imagery tasks without
// the left/right structure (e.g. feet vs left hand).
enum class Paradigm : std::uint8_t {
  MI_LR = 0,
  MI_OTHER = 1,
  SSVEP = 2,
  P300 = 3,
  SEIZURE = 4,
};

inline const char* to_string(Paradigm p) {
  switch (p) {
    case Paradigm::MI_LR: return "mi_lr";
    case Paradigm::MI_OTHER: return "mi_other";
    case Paradigm::SSVEP: return "ssvep";
    case Paradigm::P300: return "p300";
    case Paradigm::SEIZURE: return "seizure";
  }
  return "?";
}

inline Paradigm paradigm_from_string(const std::string& s) {
  for (Paradigm p : {Paradigm::MI_LR, Paradigm::MI_OTHER, Paradigm::SSVEP,
                     Paradigm::P300, Paradigm::SEIZURE})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown paradigm: " + s);
}

// One labeled EEG epoch: channels x time samples in microvolts.
// `provenance` records whether the trial is an original or the output of an
// augmenter chain ("orig", "cr", "cr+freq", ...); it is in-memory metadata,
// not serialized. `test_only` taints held-out evaluation trials; every fit
// path asserts on it so test data can never leak into training.
struct Trial {
  Eigen::MatrixXd samples;  // C x T
  double fs{0.0};
  int label{0};
  int subject{0};
  std::string provenance{"orig"};
  bool test_only{false};

  Eigen::Index channel_count() const { return samples.rows(); }
  Eigen::Index sample_count() const { return samples.cols(); }
};

// Homogeneous trial collection bound to one montage and paradigm. Trials
// are chronological within each subject; the continuous-block split depends
// on that order. Immutable after load; concurrent readers are safe.
struct TrialSet {
  Montage montage;
  Paradigm paradigm{Paradigm::MI_LR};
  int class_count{2};
  std::vector<Trial> trials;
};

inline void validate_trialset(const TrialSet& set) {
  validate_montage(set.montage);
  if (set.class_count < 2) throw DataError("class_count must be >= 2");
  const auto c = static_cast<Eigen::Index>(set.montage.channel_count());
  for (std::size_t i = 0; i < set.trials.size(); ++i) {
    const Trial& t = set.trials[i];
    auto fail = [&](const std::string& msg) {
      throw DataError("trial " + std::to_string(i) + ": " + msg);
    };
    if (t.channel_count() != c) fail("channel count does not match montage");
    if (t.sample_count() < 1) fail("no samples");
    if (!(t.fs > 0.0)) fail("non-positive sample rate");
    if (!set.trials.empty() && t.fs != set.trials[0].fs)
      fail("sample rate differs within set");
    if (t.label < 0 || t.label >= set.class_count) fail("label out of range");
    if (!t.samples.allFinite()) fail("non-finite sample");
  }
}

// Distinct subject ids in first-appearance order.
inline std::vector<int> subject_ids(const TrialSet& set) {
  std::vector<int> ids;
  for (const Trial& t : set.trials)
    if (std::find(ids.begin(), ids.end(), t.subject) == ids.end())
      ids.push_back(t.subject);
  return ids;
}

// Cuts a continuous recording into non-overlapping fixed-length trials.
// The trailing remainder is discarded, never padded. `labels` supplies one
// label per window (extra entries are ignored).
inline std::vector<Trial> segment(const Eigen::MatrixXd& recording, double fs,
                                  double window_s, const std::vector<int>& labels,
                                  int subject = 0) {
  const double w = window_s * fs;
  const double rounded = std::round(w);
  if (!(w > 0.0) || std::abs(w - rounded) > 1e-9)
    throw ConfigError("window length in samples must be a positive integer, got " +
                      std::to_string(w));
  const auto win = static_cast<Eigen::Index>(rounded);
  const Eigen::Index n_windows = recording.cols() / win;
  if (n_windows > 0 && static_cast<std::size_t>(n_windows) > labels.size())
    throw ConfigError("segment: need " + std::to_string(n_windows) +
                      " labels, got " + std::to_string(labels.size()));
  std::vector<Trial> out;
  out.reserve(static_cast<std::size_t>(n_windows));
  for (Eigen::Index i = 0; i < n_windows; ++i) {
    Trial t;
    t.samples = recording.middleCols(i * win, win);
    t.fs = fs;
    t.label = labels[static_cast<std::size_t>(i)];
    t.subject = subject;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace eegaug
