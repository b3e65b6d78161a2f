#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eegaug/align.hpp"
#include "eegaug/augment.hpp"
#include "eegaug/decode.hpp"
#include "eegaug/eegt_io.hpp"
#include "eegaug/errors.hpp"
#include "eegaug/signal.hpp"
#include "eegaug/synth.hpp"
#include "eegaug/trial.hpp"

namespace eegaug {

// Scenario runner reproducing the evaluation protocol: three training-data
// regimes, leave-one-subject-out, augmentation of labeled training data
// only, per-subject Euclidean Alignment with an incrementally updated
// reference on the target's test stream, CSP+LDA scoring, and report
// emission. Held-out trials carry a taint flag that every fit path asserts
// on; the incremental EA update is the single sanctioned test-time
// adaptation and never reads labels.

enum class Scenario { WithinSubject, CrossUnsupervised, CrossSupervised };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::WithinSubject: return "within";
    case Scenario::CrossUnsupervised: return "cross-unsup";
    case Scenario::CrossSupervised: return "cross-sup";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  for (Scenario sc : {Scenario::WithinSubject, Scenario::CrossUnsupervised,
                      Scenario::CrossSupervised})
    if (s == to_string(sc)) return sc;
  throw ConfigError("unknown scenario: " + s);
}

struct PreprocessRecipe {
  std::vector<FilterSpec> filters;
  double resample_hz{0.0};  // 0 = keep the native rate
};

struct ScenarioConfig {
  Scenario scenario{Scenario::WithinSubject};
  std::string data_path;
  int target_subject{-1};  // -1 = every subject as target in turn
  int n_labeled_per_class{0};
  AugmentChain chain{AugmentKind::None};
  AugmentParams params;
  std::uint64_t seed{0};
  int repeats{5};  // five repetitions absorb augmentation randomness
  PreprocessRecipe preprocess;
  int csp_filters{10};

  void validate() const {
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (n_labeled_per_class < 0) throw ConfigError("n_labeled_per_class must be >= 0");
    if (scenario == Scenario::CrossUnsupervised && n_labeled_per_class != 0)
      throw ConfigError(
          "cross-unsupervised transfer uses no labeled target trials; "
          "set n_labeled_per_class to 0");
    if (scenario != Scenario::CrossUnsupervised && n_labeled_per_class < 1)
      throw ConfigError("this scenario needs n_labeled_per_class >= 1");
    if (chain.empty()) throw ConfigError("empty augmentation chain");
    params.validate();
  }
};

// Per-subject columns plus the aggregate pair reported in the tables:
// Avg = mean over subjects of the repeat-averaged metric, Std = standard
// deviation over repeats of the subject-averaged metric.
struct ResultTable {
  std::string method;
  std::vector<int> subjects;
  std::vector<std::vector<double>> per_repeat;  // repeats x subjects
  std::vector<double> per_subject;              // mean over repeats
  double avg{0.0};
  double stddev{0.0};
  int repeats{1};
};

// Chronological continuous-block split: the training block is the shortest
// prefix containing at least n_per_class trials of every class; trials
// inside that prefix beyond a class's quota stay in it (the block is never
// punctured). The remainder is the test stream.
inline std::pair<std::vector<Trial>, std::vector<Trial>> split_continuous_block(
    const std::vector<Trial>& subject_trials, int n_per_class, int class_count) {
  if (n_per_class < 0) throw ConfigError("n_per_class must be >= 0");
  if (class_count < 1) throw ConfigError("class_count must be >= 1");
  std::size_t cut = 0;
  if (n_per_class > 0) {
    std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
    int satisfied = 0;
    bool done = false;
    for (std::size_t i = 0; i < subject_trials.size(); ++i) {
      const int y = subject_trials[i].label;
      if (y < 0 || y >= class_count) throw DataError("label out of range in split");
      if (++counts[static_cast<std::size_t>(y)] == n_per_class) ++satisfied;
      if (satisfied == class_count) {
        cut = i + 1;
        done = true;
        break;
      }
    }
    if (!done)
      throw DataError("subject has fewer than " + std::to_string(n_per_class) +
                      " trials of some class");
  }
  std::vector<Trial> train(subject_trials.begin(),
                           subject_trials.begin() + static_cast<std::ptrdiff_t>(cut));
  std::vector<Trial> test(subject_trials.begin() + static_cast<std::ptrdiff_t>(cut),
                          subject_trials.end());
  return {std::move(train), std::move(test)};
}

// Applies the recipe to every channel of every trial: zero-phase filters in
// order, then rate conversion.
inline TrialSet preprocess(const TrialSet& set, const PreprocessRecipe& recipe) {
  if (recipe.filters.empty() && recipe.resample_hz == 0.0) return set;
  TrialSet out = set;
  for (Trial& t : out.trials) {
    for (const FilterSpec& spec : recipe.filters)
      for (Eigen::Index c = 0; c < t.channel_count(); ++c)
        t.samples.row(c) =
            apply_zero_phase(t.samples.row(c).transpose(), t.fs, spec).transpose();
    if (recipe.resample_hz > 0.0 && recipe.resample_hz != t.fs) {
      const Eigen::VectorXd first =
          resample(t.samples.row(0).transpose(), t.fs, recipe.resample_hz);
      Eigen::MatrixXd resampled(t.channel_count(), first.size());
      resampled.row(0) = first.transpose();
      for (Eigen::Index c = 1; c < t.channel_count(); ++c)
        resampled.row(c) =
            resample(t.samples.row(c).transpose(), t.fs, recipe.resample_hz)
                .transpose();
      t.samples = std::move(resampled);
      t.fs = recipe.resample_hz;
    }
  }
  return out;
}

// Scoring metric per paradigm: balanced accuracy for the imbalanced
// paradigms, raw accuracy otherwise.
inline bool metric_uses_bca(Paradigm p) {
  return p == Paradigm::P300 || p == Paradigm::SEIZURE;
}

namespace detail {

inline std::map<int, std::vector<Trial>> by_subject(const std::vector<Trial>& trials) {
  std::map<int, std::vector<Trial>> groups;
  for (const Trial& t : trials) groups[t.subject].push_back(t);
  return groups;
}

// One (repeat, target) evaluation; returns the metric on the target's
// held-out stream.
inline double evaluate_target(const TrialSet& set, const ScenarioConfig& config,
                              int target, std::uint64_t run_seed) {
  std::vector<Trial> target_trials;
  std::vector<Trial> source_trials;
  for (const Trial& t : set.trials)
    (t.subject == target ? target_trials : source_trials).push_back(t);
  if (target_trials.empty())
    throw DataError("no trials for target subject " + std::to_string(target));

  std::vector<Trial> train_raw;
  std::vector<Trial> test_raw;
  switch (config.scenario) {
    case Scenario::WithinSubject: {
      auto [block, rest] = split_continuous_block(
          target_trials, config.n_labeled_per_class, set.class_count);
      train_raw = std::move(block);
      test_raw = std::move(rest);
      break;
    }
    case Scenario::CrossUnsupervised: {
      train_raw = source_trials;
      test_raw = target_trials;
      break;
    }
    case Scenario::CrossSupervised: {
      auto [block, rest] = split_continuous_block(
          target_trials, config.n_labeled_per_class, set.class_count);
      train_raw = source_trials;
      train_raw.insert(train_raw.end(), block.begin(), block.end());
      test_raw = std::move(rest);
      break;
    }
  }
  if (test_raw.empty())
    throw DataError("no test trials left for subject " + std::to_string(target));
  for (Trial& t : test_raw) t.test_only = true;

  // Per-subject alignment of the training data. The target's labeled block
  // (when present) seeds the reference that the test stream then updates.
  std::vector<Trial> train_aligned;
  train_aligned.reserve(train_raw.size());
  EaReference target_ref;  // unseeded in cross-unsupervised transfer
  for (auto& [subject, trials] : detail::by_subject(train_raw)) {
    const EaReference ref = ea_reference(trials);
    const Eigen::MatrixXd w = whitening_matrix(ref);
    for (const Trial& t : trials) {
      Trial a = t;
      a.samples = w * t.samples;
      train_aligned.push_back(std::move(a));
    }
    if (subject == target) target_ref = ref;
  }

  // Incremental EA on the test stream: each arriving trial is folded into
  // the reference, then aligned with the post-update whitener.
  std::vector<Trial> test_aligned;
  test_aligned.reserve(test_raw.size());
  for (const Trial& t : test_raw) {
    if (target_ref.count == 0) {
      target_ref.mean_cov = trial_covariance(t);
      target_ref.count = 1;
    } else {
      ea_update(target_ref, t);
    }
    Trial a = t;
    a.samples = whitening_matrix(target_ref) * t.samples;
    test_aligned.push_back(std::move(a));
  }

  TrialSet train_set;
  train_set.montage = set.montage;
  train_set.paradigm = set.paradigm;
  train_set.class_count = set.class_count;
  train_set.trials = std::move(train_aligned);
  train_set = augment_trainset(
      train_set, config.chain, config.params,
      Rng::derive({run_seed, static_cast<std::uint64_t>(target)}));

  std::vector<int> train_labels;
  train_labels.reserve(train_set.trials.size());
  for (const Trial& t : train_set.trials) train_labels.push_back(t.label);

  const CspModel csp = csp_fit(train_set.trials, train_labels, config.csp_filters);
  const LdaModel lda = lda_fit(csp_feature_matrix(train_set.trials, csp), train_labels);

  std::vector<int> preds;
  std::vector<int> truth;
  preds.reserve(test_aligned.size());
  for (const Trial& t : test_aligned) {
    preds.push_back(lda_predict(lda, csp_features(t, csp)));
    truth.push_back(t.label);
  }
  return metric_uses_bca(set.paradigm) ? bca(preds, truth) : accuracy(preds, truth);
}

}  // namespace detail

// Runs the configured scenario on an in-memory set. Repeat r uses seed
// base+r. Subject evaluations are independent given their derived seeds.
inline ResultTable run_scenario(const TrialSet& set, const ScenarioConfig& config) {
  config.validate();
  validate_trialset(set);
  if (set.class_count != 2)
    throw ConfigError("the CSP+LDA scoring pipeline is binary; class_count must be 2");

  const std::vector<int> all_subjects = subject_ids(set);
  std::vector<int> targets;
  if (config.target_subject < 0) {
    targets = all_subjects;
  } else {
    if (std::find(all_subjects.begin(), all_subjects.end(), config.target_subject) ==
        all_subjects.end())
      throw ConfigError("target subject " + std::to_string(config.target_subject) +
                        " not present in the data");
    targets = {config.target_subject};
  }
  if (config.scenario != Scenario::WithinSubject && all_subjects.size() < 2)
    throw ConfigError("cross-subject transfer needs at least 2 subjects");

  ResultTable table;
  table.method = to_string(config.chain);
  table.subjects = targets;
  table.repeats = config.repeats;
  table.per_repeat.resize(static_cast<std::size_t>(config.repeats));
  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(r);
    for (int target : targets)
      table.per_repeat[static_cast<std::size_t>(r)].push_back(
          detail::evaluate_target(set, config, target, run_seed));
  }

  table.per_subject.assign(targets.size(), 0.0);
  for (const auto& row : table.per_repeat)
    for (std::size_t i = 0; i < row.size(); ++i) table.per_subject[i] += row[i];
  for (double& v : table.per_subject) v /= static_cast<double>(config.repeats);

  table.avg = 0.0;
  for (double v : table.per_subject) table.avg += v;
  table.avg /= static_cast<double>(table.per_subject.size());

  double var = 0.0;
  for (const auto& row : table.per_repeat) {
    double repeat_avg = 0.0;
    for (double v : row) repeat_avg += v;
    repeat_avg /= static_cast<double>(row.size());
    var += (repeat_avg - table.avg) * (repeat_avg - table.avg);
  }
  table.stddev = std::sqrt(var / static_cast<double>(config.repeats));
  return table;
}

// Loads the dataset named by the config and runs it.
inline ResultTable run_scenario(const ScenarioConfig& config) {
  const TrialSet set = read_trialset(config.data_path);
  return run_scenario(preprocess(set, config.preprocess), config);
}

// Generator configuration document, line-oriented like montage-config:
//   montage builtin <dataset-id>   or   montage file <path>
//   paradigm mi_lr|mi_other|ssvep|p300|seizure
//   subjects / trials_per_class / fs / trial_s / erd_depth / noise_sigma /
//   subject_shift_sigma / seed <value>
//   minority_fraction <f>          switches to the imbalanced generator
// Relative montage paths resolve against base_dir.
struct SynthJob {
  SynthSpec spec;
  double minority_fraction{0.0};  // 0 = balanced mirror-symmetric generator

  TrialSet generate() const {
    return minority_fraction > 0.0 ? synth_imbalanced(spec, minority_fraction)
                                   : synth_mi(spec);
  }
};

inline SynthJob parse_synth_spec(const std::string& text,
                                 const std::filesystem::path& base_dir = ".") {
  SynthJob job;
  bool have_montage = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError("synth-spec line " + std::to_string(lineno) + ": " + msg);
    };
    auto number = [&]() {
      double v;
      if (!(ls >> v)) fail("expected a number after '" + key + "'");
      return v;
    };
    if (key == "montage") {
      std::string kind, arg;
      if (!(ls >> kind >> arg)) fail("expected 'montage builtin <id>' or 'montage file <path>'");
      if (kind == "builtin") {
        job.spec.montage = builtin_montage(dataset_id_from_string(arg));
      } else if (kind == "file") {
        std::filesystem::path p(arg);
        if (p.is_relative()) p = base_dir / p;
        job.spec.montage = parse_montage(detail::slurp(p));
      } else {
        fail("montage source must be 'builtin' or 'file'");
      }
      have_montage = true;
    } else if (key == "paradigm") {
      std::string p;
      if (!(ls >> p)) fail("expected a paradigm tag");
      job.spec.paradigm = paradigm_from_string(p);
    } else if (key == "subjects") {
      job.spec.subjects = static_cast<int>(number());
    } else if (key == "trials_per_class") {
      job.spec.trials_per_class = static_cast<int>(number());
    } else if (key == "fs") {
      job.spec.fs = number();
    } else if (key == "trial_s") {
      job.spec.trial_s = number();
    } else if (key == "erd_depth") {
      job.spec.erd_depth = number();
    } else if (key == "noise_sigma") {
      job.spec.noise_sigma = number();
    } else if (key == "subject_shift_sigma") {
      job.spec.subject_shift_sigma = number();
    } else if (key == "seed") {
      job.spec.seed = static_cast<std::uint64_t>(number());
    } else if (key == "minority_fraction") {
      job.minority_fraction = number();
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_montage) throw ConfigError("synth-spec: missing 'montage' line");
  return job;
}

enum class SweepParam { Noise, Freq, Scale };

inline const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Noise: return "noise";
    case SweepParam::Freq: return "freq";
    case SweepParam::Scale: return "scale";
  }
  return "?";
}

inline SweepParam sweep_param_from_string(const std::string& s) {
  for (SweepParam p : {SweepParam::Noise, SweepParam::Freq, SweepParam::Scale})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown sweep parameter: " + s);
}

inline std::vector<double> default_sweep_grid(SweepParam p) {
  switch (p) {
    case SweepParam::Noise: return {0.25, 0.5, 1.0, 2.0, 4.0};
    case SweepParam::Freq: return {0.1, 0.2, 0.3, 0.4, 0.5};
    case SweepParam::Scale: return {0.005, 0.01, 0.05, 0.1, 0.2};
  }
  return {};
}

// One scenario run per grid point, varying a single hyperparameter of the
// configured chain. The chain must actually use the swept parameter.
inline std::vector<ResultTable> sweep(const TrialSet& set, const ScenarioConfig& config,
                                      SweepParam param,
                                      const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("empty sweep grid");
  const AugmentKind needed = param == SweepParam::Noise  ? AugmentKind::Noise
                             : param == SweepParam::Freq ? AugmentKind::Freq
                                                         : AugmentKind::Scale;
  if (std::find(config.chain.begin(), config.chain.end(), needed) ==
      config.chain.end())
    throw ConfigError(std::string("sweep parameter '") + to_string(param) +
                      "' is not used by augmentation chain '" +
                      to_string(config.chain) + "'");
  std::vector<ResultTable> tables;
  tables.reserve(grid.size());
  for (double v : grid) {
    ScenarioConfig point = config;
    switch (param) {
      case SweepParam::Noise: point.params.c_noise = v; break;
      case SweepParam::Freq: point.params.c_freq = v; break;
      case SweepParam::Scale: point.params.c_scale = v; break;
    }
    ResultTable t = run_scenario(set, point);
    char label[64];
    std::snprintf(label, sizeof(label), "%s@%g", to_string(config.chain).c_str(), v);
    t.method = label;
    tables.push_back(std::move(t));
  }
  return tables;
}

namespace detail {

inline std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

enum class ReportFormat { Csv, Markdown };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw ConfigError("unknown report format: " + s);
}

// Renders result tables with per-subject columns followed by Avg and Std.
// Markdown bolds the best average across the methods in the file. Output
// bytes are a pure function of the tables.
inline std::string render_report(const std::vector<ResultTable>& tables,
                                 ReportFormat format) {
  if (tables.empty()) throw ConfigError("no tables to report");
  for (const ResultTable& t : tables)
    if (t.subjects != tables[0].subjects)
      throw ConfigError("tables in one report must share the subject set");

  std::string out;
  if (format == ReportFormat::Csv) {
    out += "method";
    for (int s : tables[0].subjects) out += ",S" + std::to_string(s);
    out += ",avg,std\n";
    for (const ResultTable& t : tables) {
      out += t.method;
      for (double v : t.per_subject) out += "," + detail::format_metric(v);
      out += "," + detail::format_metric(t.avg);
      out += "," + detail::format_metric(t.stddev);
      out += "\n";
    }
    return out;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < tables.size(); ++i)
    if (tables[i].avg > tables[best].avg) best = i;
  out += "| method |";
  for (int s : tables[0].subjects) out += " S" + std::to_string(s) + " |";
  out += " Avg | Std |\n|---|";
  for (std::size_t i = 0; i < tables[0].subjects.size() + 2; ++i) out += "---|";
  out += "\n";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const ResultTable& t = tables[i];
    out += "| " + t.method + " |";
    for (double v : t.per_subject) out += " " + detail::format_metric(v) + " |";
    const std::string avg = detail::format_metric(t.avg);
    out += (i == best) ? " **" + avg + "** |" : " " + avg + " |";
    out += " " + detail::format_metric(t.stddev) + " |\n";
  }
  return out;
}

inline void emit_report(const std::vector<ResultTable>& tables,
                        const std::filesystem::path& path, ReportFormat format) {
  const std::string body = render_report(tables, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open report for writing: " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw DataError("report write failed: " + path.string());
}

}  // namespace eegaug
