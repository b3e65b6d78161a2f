// Command-line harness around the eegaug library: synthetic dataset
// generation, scenario runs, hyperparameter sweeps, montage validation, and
// feature export. Exit codes: 0 success, 2 configuration error, 3 data
// error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eegaug/augment.hpp"
#include "eegaug/decode.hpp"
#include "eegaug/eegt_io.hpp"
#include "eegaug/harness.hpp"
#include "eegaug/synth.hpp"

namespace fs = std::filesystem;
using namespace eegaug;

namespace {

std::string slurp_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --data accepts either an .eegt file or a directory holding exactly one.
fs::path locate_dataset(const std::string& data_arg) {
  fs::path p(data_arg);
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p)) {
    std::vector<fs::path> hits;
    for (const auto& entry : fs::directory_iterator(p))
      if (entry.path().extension() == ".eegt") hits.push_back(entry.path());
    if (hits.size() == 1) return hits[0];
    if (hits.empty()) throw DataError("no .eegt file in directory: " + data_arg);
    throw DataError("multiple .eegt files in directory: " + data_arg);
  }
  throw DataError("no such file or directory: " + data_arg);
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      grid.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad grid value: '" + tok + "'");
    }
  }
  return grid;
}

struct RunOptions {
  std::string data;
  std::string scenario{"within"};
  std::string augment{"none"};
  int n_labeled{0};
  int target_subject{-1};
  std::uint64_t seed{0};
  int repeats{5};
  std::string out;
  std::string format{"csv"};
  double c_noise{2.0};
  double c_scale{0.05};
  double c_freq{0.2};
  int csp_filters{10};
  std::string bandpass;  // "lo:hi" or "lo:hi:order"
  std::string notch_arg; // "f0" or "f0:q"
  double resample_hz{0.0};
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--data", opt.data, ".eegt file or directory with one")->required();
  cmd->add_option("--scenario", opt.scenario, "within|cross-unsup|cross-sup");
  cmd->add_option("--augment", opt.augment,
                  "augmentation chain(s): none|noise|flip|scale|freq|symm|rs|cr, "
                  "'+' composes, ',' separates methods");
  cmd->add_option("--n-labeled", opt.n_labeled, "labeled target trials per class");
  cmd->add_option("--target-subject", opt.target_subject,
                  "evaluate one subject only (default: all in turn)");
  cmd->add_option("--seed", opt.seed, "base random seed");
  cmd->add_option("--repeats", opt.repeats, "repetitions, seeds base..base+r-1");
  cmd->add_option("--out", opt.out, "report file (default: stdout)");
  cmd->add_option("--format", opt.format, "csv|md");
  cmd->add_option("--c-noise", opt.c_noise, "noise divisor");
  cmd->add_option("--c-scale", opt.c_scale, "scale offset");
  cmd->add_option("--c-freq", opt.c_freq, "frequency shift, Hz");
  cmd->add_option("--csp-filters", opt.csp_filters, "spatial filter count");
  cmd->add_option("--bandpass", opt.bandpass, "zero-phase band-pass lo:hi[:order]");
  cmd->add_option("--notch", opt.notch_arg, "zero-phase notch f0[:q]");
  cmd->add_option("--resample", opt.resample_hz, "target sample rate, Hz");
}

ScenarioConfig to_config(const RunOptions& opt) {
  ScenarioConfig cfg;
  cfg.scenario = scenario_from_string(opt.scenario);
  cfg.n_labeled_per_class = opt.n_labeled;
  cfg.target_subject = opt.target_subject;
  cfg.seed = opt.seed;
  cfg.repeats = opt.repeats;
  cfg.params.c_noise = opt.c_noise;
  cfg.params.c_scale = opt.c_scale;
  cfg.params.c_freq = opt.c_freq;
  cfg.csp_filters = opt.csp_filters;
  if (!opt.notch_arg.empty()) {
    double f0 = 50.0, q = 30.0;
    if (std::sscanf(opt.notch_arg.c_str(), "%lf:%lf", &f0, &q) < 1)
      throw ConfigError("bad --notch argument: " + opt.notch_arg);
    cfg.preprocess.filters.push_back(FilterSpec::notch(f0, q));
  }
  if (!opt.bandpass.empty()) {
    double lo = 0.0, hi = 0.0;
    int order = 4;
    if (std::sscanf(opt.bandpass.c_str(), "%lf:%lf:%d", &lo, &hi, &order) < 2)
      throw ConfigError("bad --bandpass argument: " + opt.bandpass);
    cfg.preprocess.filters.push_back(FilterSpec::bandpass(lo, hi, order));
  }
  cfg.preprocess.resample_hz = opt.resample_hz;
  return cfg;
}

void write_or_print(const std::vector<ResultTable>& tables, const RunOptions& opt) {
  const ReportFormat format = report_format_from_string(opt.format);
  if (opt.out.empty()) {
    std::cout << render_report(tables, format);
  } else {
    emit_report(tables, opt.out, format);
    std::cout << "wrote " << opt.out << "\n";
  }
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  const fs::path spec_file(spec_path);
  const SynthJob job =
      parse_synth_spec(slurp_file(spec_file), spec_file.parent_path());
  const TrialSet set = job.generate();
  fs::create_directories(out_dir);
  const fs::path out = fs::path(out_dir) / "data.eegt";
  write_trialset(set, out);
  std::cout << "wrote " << out.string() << " (" << set.trials.size() << " trials, "
            << subject_ids(set).size() << " subjects, C="
            << set.montage.channel_count() << ", fs=" << set.trials[0].fs
            << ")\n";
  return 0;
}

int cmd_run(const RunOptions& opt) {
  const TrialSet raw = read_trialset(locate_dataset(opt.data));
  const ScenarioConfig base = to_config(opt);
  const TrialSet set = preprocess(raw, base.preprocess);

  std::vector<ResultTable> tables;
  std::istringstream methods(opt.augment);
  std::string chain_text;
  while (std::getline(methods, chain_text, ',')) {
    ScenarioConfig cfg = base;
    cfg.chain = parse_augment_chain(chain_text);
    tables.push_back(run_scenario(set, cfg));
  }
  if (tables.empty()) throw ConfigError("no augmentation chain given");
  write_or_print(tables, opt);
  return 0;
}

int cmd_sweep(const RunOptions& opt, const std::string& param_name,
              const std::string& grid_csv, bool cr_reference) {
  const SweepParam param = sweep_param_from_string(param_name);
  const TrialSet raw = read_trialset(locate_dataset(opt.data));
  ScenarioConfig cfg = to_config(opt);
  const TrialSet set = preprocess(raw, cfg.preprocess);
  cfg.chain = opt.augment == "none"
                  ? AugmentChain{param == SweepParam::Noise  ? AugmentKind::Noise
                                 : param == SweepParam::Freq ? AugmentKind::Freq
                                                             : AugmentKind::Scale}
                  : parse_augment_chain(opt.augment);

  const std::vector<double> grid =
      grid_csv.empty() ? default_sweep_grid(param) : parse_grid(grid_csv);
  std::vector<ResultTable> tables = sweep(set, cfg, param, grid);
  if (cr_reference) {
    // CR has no hyperparameter; it enters the sweep report as a flat line.
    ScenarioConfig cr_cfg = cfg;
    cr_cfg.chain = {AugmentKind::Cr};
    tables.push_back(run_scenario(set, cr_cfg));
  }
  write_or_print(tables, opt);
  return 0;
}

int cmd_validate_montage(const std::string& path) {
  const Montage m = parse_montage(slurp_file(path));
  std::cout << path << ": ok (" << m.channel_count() << " channels, "
            << m.pair_count() << " pairs, " << m.midline.size() << " midline)\n";
  return 0;
}

int cmd_features(const std::string& data, const std::string& out,
                 const std::string& augment, int csp_filters,
                 std::uint64_t seed) {
  const TrialSet set = read_trialset(locate_dataset(data));
  if (set.class_count != 2)
    throw ConfigError("feature export uses the binary CSP pipeline");
  std::vector<int> labels;
  for (const Trial& t : set.trials) labels.push_back(t.label);
  const CspModel model = csp_fit(set.trials, labels, csp_filters);

  TrialSet exported = set;
  if (augment != "none")
    exported = augment_trainset(set, parse_augment_chain(augment), {}, seed);
  export_features_csv(exported.trials, model, out);
  std::cout << "wrote " << out << " (" << exported.trials.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG data-augmentation evaluation harness"};
  app.require_subcommand(1);

  // synth
  std::string spec_path, out_dir;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a surrogate dataset from a spec file");
  synth_cmd->add_option("--spec", spec_path, "synth-spec document")->required();
  synth_cmd->add_option("--out", out_dir, "output directory")->required();

  // run
  RunOptions run_opt;
  CLI::App* run_cmd = app.add_subcommand("run", "run an evaluation scenario");
  add_run_options(run_cmd, run_opt);

  // sweep
  RunOptions sweep_opt;
  std::string sweep_param, sweep_grid;
  bool no_cr_reference = false;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "sweep one augmentation hyperparameter");
  sweep_cmd->add_option("--param", sweep_param, "noise|freq|scale")->required();
  sweep_cmd->add_option("--grid", sweep_grid, "comma list (default: built-in grid)");
  sweep_cmd->add_flag("--no-cr-reference", no_cr_reference,
                      "omit the parameter-free cr reference row");
  add_run_options(sweep_cmd, sweep_opt);

  // validate-montage
  std::string montage_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate-montage", "check a montage-config document");
  validate_cmd->add_option("file", montage_path, "montage-config file")->required();

  // features
  std::string feat_data, feat_out, feat_augment{"none"};
  int feat_filters = 10;
  std::uint64_t feat_seed = 0;
  CLI::App* features_cmd = app.add_subcommand(
      "features", "export per-trial CSP features as CSV for external plotting");
  features_cmd->add_option("--data", feat_data, ".eegt file or directory")->required();
  features_cmd->add_option("--out", feat_out, "output CSV path")->required();
  features_cmd->add_option("--augment", feat_augment,
                           "also export features of augmented copies");
  features_cmd->add_option("--csp-filters", feat_filters, "spatial filter count");
  features_cmd->add_option("--seed", feat_seed, "augmentation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(spec_path, out_dir);
    if (run_cmd->parsed()) return cmd_run(run_opt);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_opt, sweep_param, sweep_grid, !no_cr_reference);
    if (validate_cmd->parsed()) return cmd_validate_montage(montage_path);
    if (features_cmd->parsed())
      return cmd_features(feat_data, feat_out, feat_augment, feat_filters, feat_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
