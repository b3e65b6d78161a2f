#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "eegaug/harness.hpp"
#include "eegaug/synth.hpp"

using namespace eegaug;

namespace {

std::vector<Trial> label_trials(const std::vector<int>& labels) {
  std::vector<Trial> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Trial t;
    t.samples = Eigen::MatrixXd::Constant(1, 2, static_cast<double>(i));
    t.fs = 1.0;
    t.label = labels[i];
    out.push_back(std::move(t));
  }
  return out;
}

// Brute-force reference for the continuous-block rule: the shortest prefix
// holding at least n of every class.
std::size_t brute_force_cut(const std::vector<int>& labels, int n, int classes) {
  if (n == 0) return 0;
  for (std::size_t p = 1; p <= labels.size(); ++p) {
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (std::size_t i = 0; i < p; ++i) counts[static_cast<std::size_t>(labels[i])]++;
    bool ok = true;
    for (int c : counts)
      if (c < n) ok = false;
    if (ok) return p;
  }
  return labels.size() + 1;  // unsatisfiable
}

TrialSet tiny_synth(int subjects = 3, std::uint64_t seed = 5) {
  SynthSpec spec;
  spec.montage = builtin_montage(DatasetId::MiII);
  spec.subjects = subjects;
  spec.trials_per_class = 12;
  spec.fs = 128.0;
  spec.trial_s = 1.0;
  spec.seed = seed;
  return synth_mi(spec);
}

ScenarioConfig within_config() {
  ScenarioConfig cfg;
  cfg.scenario = Scenario::WithinSubject;
  cfg.n_labeled_per_class = 4;
  cfg.csp_filters = 2;
  cfg.seed = 9;
  cfg.repeats = 1;
  return cfg;
}

}  // namespace

TEST_CASE("continuous-block split handles the edge patterns") {
  SECTION("alternating labels") {
    const auto trials = label_trials({0, 1, 0, 1, 0, 1, 0, 1});
    const auto [train, test] = split_continuous_block(trials, 2, 2);
    REQUIRE(train.size() == 4);
    REQUIRE(test.size() == 4);
  }
  SECTION("n = 0 keeps everything for test") {
    const auto trials = label_trials({0, 1, 0});
    const auto [train, test] = split_continuous_block(trials, 0, 2);
    REQUIRE(train.empty());
    REQUIRE(test.size() == 3);
  }
  SECTION("prefix continuity swallows surplus trials") {
    const auto trials = label_trials({0, 0, 0, 1, 0});
    const auto [train, test] = split_continuous_block(trials, 1, 2);
    REQUIRE(train.size() == 4);  // must reach the first 1
    REQUIRE(test.size() == 1);
  }
  SECTION("insufficient trials of a class") {
    const auto trials = label_trials({0, 0, 0});
    REQUIRE_THROWS_AS(split_continuous_block(trials, 1, 2), DataError);
  }
}

TEST_CASE("continuous-block split matches brute force on all short sequences") {
  for (int len = 0; len <= 8; ++len) {
    for (int bits = 0; bits < (1 << len); ++bits) {
      std::vector<int> labels;
      for (int i = 0; i < len; ++i) labels.push_back((bits >> i) & 1);
      const auto trials = label_trials(labels);
      for (int n = 0; n <= 4; ++n) {
        const std::size_t expect = brute_force_cut(labels, n, 2);
        if (expect > labels.size()) {
          REQUIRE_THROWS_AS(split_continuous_block(trials, n, 2), DataError);
          continue;
        }
        const auto [train, test] = split_continuous_block(trials, n, 2);
        REQUIRE(train.size() == expect);
        REQUIRE(train.size() + test.size() == labels.size());
        // contiguity: train is exactly the prefix, test the suffix
        for (std::size_t i = 0; i < train.size(); ++i)
          REQUIRE(train[i].samples(0, 0) == static_cast<double>(i));
        for (std::size_t i = 0; i < test.size(); ++i)
          REQUIRE(test[i].samples(0, 0) == static_cast<double>(train.size() + i));
      }
    }
  }
}

TEST_CASE("preprocess applies the recipe per channel") {
  TrialSet set = tiny_synth(1);
  PreprocessRecipe recipe;
  recipe.filters = {FilterSpec::bandpass(4.0, 40.0, 4)};

  const TrialSet out = preprocess(set, recipe);
  const Eigen::VectorXd direct = bandpass_zero_phase(
      set.trials[0].samples.row(1).transpose(), set.trials[0].fs, recipe.filters[0]);
  REQUIRE(out.trials[0].samples.row(1).transpose().isApprox(direct, 1e-12));

  SECTION("resampling rewrites the rate and length") {
    recipe.resample_hz = 64.0;
    const TrialSet down = preprocess(set, recipe);
    REQUIRE(down.trials[0].fs == 64.0);
    REQUIRE(down.trials[0].sample_count() == 64);
  }
}

TEST_CASE("run_scenario produces consistent aggregates") {
  const TrialSet set = tiny_synth();
  ScenarioConfig cfg = within_config();
  cfg.repeats = 3;
  cfg.chain = {AugmentKind::Noise};  // repeat-sensitive augmentation

  const ResultTable table = run_scenario(set, cfg);
  REQUIRE(table.subjects == std::vector<int>{0, 1, 2});
  REQUIRE(table.per_repeat.size() == 3);
  REQUIRE(table.per_subject.size() == 3);

  // brute-force aggregate recomputation
  double avg = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    double col = 0.0;
    for (const auto& row : table.per_repeat) col += row[s];
    col /= 3.0;
    REQUIRE(table.per_subject[s] == Approx(col).margin(1e-9));
    avg += col;
  }
  REQUIRE(table.avg == Approx(avg / 3.0).margin(1e-9));

  double var = 0.0;
  for (const auto& row : table.per_repeat) {
    double ravg = (row[0] + row[1] + row[2]) / 3.0;
    var += (ravg - table.avg) * (ravg - table.avg);
  }
  REQUIRE(table.stddev == Approx(std::sqrt(var / 3.0)).margin(1e-9));
}

TEST_CASE("run_scenario is deterministic and honors the taint guard") {
  const TrialSet set = tiny_synth();
  ScenarioConfig cfg = within_config();
  cfg.chain = {AugmentKind::Rs};

  const ResultTable a = run_scenario(set, cfg);
  const ResultTable b = run_scenario(set, cfg);
  REQUIRE(a.per_repeat == b.per_repeat);

  TrialSet poisoned = set;
  for (Trial& t : poisoned.trials) t.test_only = true;
  REQUIRE_THROWS_AS(run_scenario(poisoned, cfg), std::logic_error);
}

TEST_CASE("all three scenarios run end to end") {
  const TrialSet set = tiny_synth();

  ScenarioConfig cfg = within_config();
  cfg.chain = {AugmentKind::Cr};
  REQUIRE_NOTHROW(run_scenario(set, cfg));

  cfg.scenario = Scenario::CrossUnsupervised;
  cfg.n_labeled_per_class = 0;
  REQUIRE_NOTHROW(run_scenario(set, cfg));

  cfg.scenario = Scenario::CrossSupervised;
  cfg.n_labeled_per_class = 4;
  REQUIRE_NOTHROW(run_scenario(set, cfg));
}

TEST_CASE("imbalanced paradigms are scored with balanced accuracy") {
  REQUIRE(metric_uses_bca(Paradigm::P300));
  REQUIRE(metric_uses_bca(Paradigm::SEIZURE));
  REQUIRE_FALSE(metric_uses_bca(Paradigm::MI_LR));
  REQUIRE_FALSE(metric_uses_bca(Paradigm::MI_OTHER));
  REQUIRE_FALSE(metric_uses_bca(Paradigm::SSVEP));

  SynthSpec spec;
  spec.montage = builtin_montage(DatasetId::Ssvep);
  spec.paradigm = Paradigm::P300;
  spec.subjects = 2;
  spec.trials_per_class = 20;
  spec.fs = 256.0;
  spec.trial_s = 0.5;
  spec.seed = 41;
  const TrialSet set = synth_imbalanced(spec, 0.25);

  ScenarioConfig cfg = within_config();
  cfg.chain = {AugmentKind::Cr};  // label-keeping here
  REQUIRE_NOTHROW(run_scenario(set, cfg));
}

TEST_CASE("scenario configs are validated") {
  const TrialSet set = tiny_synth();
  ScenarioConfig cfg = within_config();

  SECTION("cross-unsupervised must not use labeled target trials") {
    cfg.scenario = Scenario::CrossUnsupervised;
    cfg.n_labeled_per_class = 4;
    REQUIRE_THROWS_AS(run_scenario(set, cfg), ConfigError);
  }
  SECTION("within-subject needs a labeled block") {
    cfg.n_labeled_per_class = 0;
    REQUIRE_THROWS_AS(run_scenario(set, cfg), ConfigError);
  }
  SECTION("unknown target subject") {
    cfg.target_subject = 12;
    REQUIRE_THROWS_AS(run_scenario(set, cfg), ConfigError);
  }
  SECTION("single target subject restricts the table") {
    cfg.target_subject = 1;
    const ResultTable t = run_scenario(set, cfg);
    REQUIRE(t.subjects == std::vector<int>{1});
  }
}

TEST_CASE("sweep emits one table per grid point and checks the chain") {
  const TrialSet set = tiny_synth(2);
  ScenarioConfig cfg = within_config();
  cfg.chain = {AugmentKind::Noise};

  const auto tables = sweep(set, cfg, SweepParam::Noise, {0.5, 1.0, 2.0});
  REQUIRE(tables.size() == 3);
  REQUIRE(tables[0].method == "noise@0.5");
  REQUIRE(tables[2].method == "noise@2");

  REQUIRE_THROWS_AS(sweep(set, cfg, SweepParam::Scale, {0.05}), ConfigError);
  REQUIRE(default_sweep_grid(SweepParam::Noise) ==
          std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0});
  REQUIRE(default_sweep_grid(SweepParam::Freq) ==
          std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
  REQUIRE(default_sweep_grid(SweepParam::Scale) ==
          std::vector<double>{0.005, 0.01, 0.05, 0.1, 0.2});
}

TEST_CASE("reports render deterministically with subjects, Avg, Std columns") {
  ResultTable a;
  a.method = "none";
  a.subjects = {0, 1};
  a.per_subject = {70.0, 60.0};
  a.avg = 65.0;
  a.stddev = 1.25;
  ResultTable b = a;
  b.method = "cr";
  b.per_subject = {74.0, 64.0};
  b.avg = 69.0;
  b.stddev = 0.5;

  SECTION("csv layout") {
    const std::string csv = render_report({a, b}, ReportFormat::Csv);
    REQUIRE(csv ==
            "method,S0,S1,avg,std\n"
            "none,70.00,60.00,65.00,1.25\n"
            "cr,74.00,64.00,69.00,0.50\n");
  }
  SECTION("markdown bolds the best average") {
    const std::string md = render_report({a, b}, ReportFormat::Markdown);
    REQUIRE(md.find("| cr | 74.00 | 64.00 | **69.00** | 0.50 |") != std::string::npos);
    REQUIRE(md.find("| none | 70.00 | 60.00 | 65.00 | 1.25 |") != std::string::npos);
  }
  SECTION("re-emission is byte-identical") {
    const auto path = std::filesystem::temp_directory_path() / "eegaug_report.csv";
    emit_report({a, b}, path, ReportFormat::Csv);
    std::ifstream in1(path, std::ios::binary);
    const std::string first((std::istreambuf_iterator<char>(in1)),
                            std::istreambuf_iterator<char>());
    emit_report({a, b}, path, ReportFormat::Csv);
    std::ifstream in2(path, std::ios::binary);
    const std::string second((std::istreambuf_iterator<char>(in2)),
                             std::istreambuf_iterator<char>());
    REQUIRE(first == second);
    REQUIRE(first == render_report({a, b}, ReportFormat::Csv));
    std::filesystem::remove(path);
  }
  SECTION("mismatched subject sets are rejected") {
    ResultTable c = a;
    c.subjects = {0, 2};
    REQUIRE_THROWS_AS(render_report({a, c}, ReportFormat::Csv), ConfigError);
  }
}

TEST_CASE("synth-spec documents parse into generator jobs") {
  const SynthJob job = parse_synth_spec(
      "# surrogate dataset\n"
      "montage builtin MI-II\n"
      "paradigm mi_lr\n"
      "subjects 4\n"
      "trials_per_class 6\n"
      "fs 128\n"
      "trial_s 1\n"
      "erd_depth 0.4\n"
      "noise_sigma 8\n"
      "subject_shift_sigma 0.05\n"
      "seed 99\n");
  REQUIRE(job.spec.montage == builtin_montage(DatasetId::MiII));
  REQUIRE(job.spec.subjects == 4);
  REQUIRE(job.spec.trials_per_class == 6);
  REQUIRE(job.spec.fs == 128.0);
  REQUIRE(job.spec.erd_depth == 0.4);
  REQUIRE(job.spec.seed == 99);
  REQUIRE(job.minority_fraction == 0.0);
  REQUIRE(job.generate().trials.size() == 48);

  SECTION("minority_fraction switches to the imbalanced generator") {
    const SynthJob imb = parse_synth_spec(
        "montage builtin SSVEP\n"
        "paradigm p300\n"
        "subjects 1\n"
        "trials_per_class 20\n"
        "fs 256\n"
        "trial_s 0.5\n"
        "minority_fraction 0.25\n");
    const TrialSet set = imb.generate();
    REQUIRE(set.trials.size() == 40);
    int minority = 0;
    for (const Trial& t : set.trials)
      if (t.label == 1) ++minority;
    REQUIRE(minority == 10);
  }
  SECTION("montage file paths resolve against the base directory") {
    const auto dir = std::filesystem::temp_directory_path() / "eegaug_spec_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "cap.montage") << render_montage(builtin_montage(DatasetId::MiII));
    const SynthJob job2 =
        parse_synth_spec("montage file cap.montage\nsubjects 1\n", dir);
    REQUIRE(job2.spec.montage == builtin_montage(DatasetId::MiII));
    std::filesystem::remove_all(dir);
  }
  SECTION("malformed documents are rejected") {
    REQUIRE_THROWS_AS(parse_synth_spec("subjects 3\n"), ConfigError);   // no montage
    REQUIRE_THROWS_AS(parse_synth_spec("montage builtin MI-II\nwavelets 3\n"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_synth_spec("montage builtin NOPE\n"), ConfigError);
  }
}

TEST_CASE("within-subject decoding clears 85% with 45 labeled trials per class") {
  SynthSpec spec;  // default surrogate difficulty
  spec.montage = builtin_montage(DatasetId::MiI);
  spec.subjects = 1;
  spec.trials_per_class = 60;
  spec.seed = 99;
  const TrialSet set = synth_mi(spec);

  ScenarioConfig cfg;
  cfg.scenario = Scenario::WithinSubject;
  cfg.n_labeled_per_class = 45;
  cfg.seed = 1;
  cfg.repeats = 1;
  const ResultTable table = run_scenario(set, cfg);
  REQUIRE(table.avg >= 85.0);
}
