// rmsteg: corpus generation, feature extraction, training, evaluation and
// scanning for calibrated audio steganalysis. Every subcommand is
// deterministic given its flags and --seed; exit codes are 0 (success),
// 1 (runtime failure), 2 (usage).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmsteg/csv.hpp"
#include "rmsteg/error.hpp"
#include "rmsteg/eval.hpp"
#include "rmsteg/features.hpp"
#include "rmsteg/ga.hpp"
#include "rmsteg/parallel.hpp"
#include "rmsteg/rng.hpp"
#include "rmsteg/svm.hpp"
#include "rmsteg/wav.hpp"

namespace fs = std::filesystem;
using namespace rmsteg;

namespace {

constexpr uint64_t kCalSeedTag = 0xCA11;

struct EmbedFlags {
  std::string algo;
  double bpb = 6.25;
  double strength = 0.0;
  double target_snr = 0.0;
  uint64_t embed_seed = 0;
  CLI::Option* target_snr_opt = nullptr;
  CLI::Option* embed_seed_opt = nullptr;

  void attach(CLI::App* cmd, bool required) {
    auto* a = cmd->add_option("--algo", algo, "Embedder: lsb-replace, lsb-match, dsss, cox");
    if (required) a->required();
    cmd->add_option("--bpb", bpb, "Capacity in bit-per-bit percent (LSB family)");
    cmd->add_option("--strength", strength,
                    "Multiplicative strength (cox) or additive gain (dsss)");
    target_snr_opt = cmd->add_option("--target-snr", target_snr, "Target SNR in dB (dsss)");
    embed_seed_opt =
        cmd->add_option("--cal-seed", embed_seed, "Embedding seed (default: derived from --seed)");
  }

  bool given() const { return !algo.empty(); }

  /// for_calibration picks a seed lane distinct from corpus payload seeds so
  /// re-embedding a stego file never reuses its own payload.
  EmbedConfig build(uint64_t base_seed, bool for_calibration = true) const {
    EmbedConfig cfg;
    cfg.algorithm = algo_from_string(algo);
    cfg.capacity_bpb = bpb;
    cfg.strength = strength;
    if (target_snr_opt && target_snr_opt->count() > 0) cfg.target_snr_db = target_snr;
    if (embed_seed_opt && embed_seed_opt->count() > 0)
      cfg.seed = embed_seed;
    else
      cfg.seed = for_calibration ? derive_seed(base_seed, kCalSeedTag) : base_seed;
    if (cfg.algorithm == EmbedAlgo::dsss && !cfg.target_snr_db && cfg.strength <= 0.0)
      cfg.target_snr_db = kDsssDefaultTargetSnrDb;
    if (cfg.algorithm == EmbedAlgo::cox_dct && cfg.strength <= 0.0)
      cfg.strength = kCoxDefaultStrength;
    return cfg;
  }
};

struct HyperFlags {
  double c_reg = 8.0;
  double gamma = 0.03125;
  bool grid = false;
  int folds = 5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--c", c_reg, "SVM regularization C");
    cmd->add_option("--gamma", gamma, "RBF kernel gamma");
    cmd->add_flag("--grid", grid, "Grid-search (C, gamma) by cross-validation");
    cmd->add_option("--folds", folds, "Cross-validation folds for --grid");
  }

  HyperSpec build() const {
    HyperSpec h;
    h.c_reg = c_reg;
    h.gamma = gamma;
    h.grid = grid;
    h.folds = folds;
    return h;
  }
};

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\nRun with --help for usage.\n";
  return 2;
}

std::vector<fs::path> list_wavs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

FeatureKind features_kind(const std::vector<FeatureVector>& features) {
  if (features.empty()) raise(Errc::bad_config, "feature file is empty");
  for (const FeatureVector& fv : features)
    if (fv.kind != features[0].kind)
      raise(Errc::bad_config, "feature file mixes plain and calibrated rows");
  return features[0].kind;
}

// ---------------------------------------------------------------- corpus --

struct CorpusArgs {
  size_t synthetic = 0;
  std::string covers_dir;
  double duration = 1.0;
  int sample_rate = 44100;
  EmbedFlags embed;
  uint64_t seed = 0;
  std::string out_dir;
};

int run_corpus(const CorpusArgs& a) {
  if (a.synthetic == 0 && a.covers_dir.empty())
    return usage_error("corpus needs --synthetic N or --covers DIR");
  if (a.synthetic > 0 && !a.covers_dir.empty())
    return usage_error("--synthetic and --covers are mutually exclusive");

  EmbedConfig cfg = a.embed.build(a.seed);
  cfg.seed = a.embed.explicit_seed ? *a.embed.explicit_seed : a.seed;

  std::vector<ManifestRow> rows;
  if (a.synthetic > 0) {
    SynthSpec spec;
    spec.count = a.synthetic;
    spec.duration_s = a.duration;
    spec.sample_rate = a.sample_rate;
    spec.seed = a.seed;
    rows = build_corpus(spec, cfg, a.out_dir);
  } else {
    rows = build_corpus(list_wavs(a.covers_dir), cfg, a.out_dir);
  }
  std::cout << "wrote " << rows.size() << " signals and manifest.csv to " << a.out_dir
            << "\n";
  return 0;
}

// --------------------------------------------------------------- extract --

struct ExtractArgs {
  std::string manifest;
  std::string out;
  std::string kind = "plain";
  EmbedFlags embed;
  uint64_t seed = 0;
  unsigned jobs = 1;
  bool keep_going = false;
};

int run_extract(const ExtractArgs& a) {
  ExtractOptions opts;
  opts.kind = kind_from_string(a.kind);
  opts.jobs = a.jobs;
  opts.keep_going = a.keep_going;
  if (opts.kind == FeatureKind::calibrated) {
    if (!a.embed.given())
      return usage_error("--kind calibrated needs a calibration embedder (--algo ...)");
    opts.calibration = a.embed.build(a.seed);
  }

  const RMelFilterbank bank = build_filterbank(44100);
  const ExtractOutcome outcome = extract_features(a.manifest, bank, opts);
  write_features_csv(a.out, outcome.features);
  std::cout << "wrote " << outcome.features.size() << " feature rows to " << a.out << "\n";
  if (!outcome.failures.empty()) {
    std::cerr << "failed to process " << outcome.failures.size() << " file(s):\n";
    for (const std::string& f : outcome.failures) std::cerr << "  " << f << "\n";
    return 1;
  }
  return 0;
}

// ----------------------------------------------------------------- train --

struct TrainArgs {
  std::string features;
  std::string out;
  HyperFlags hyper;
  uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  const std::vector<FeatureVector> data = read_features_csv(a.features);
  features_kind(data);
  double c = a.hyper.c_reg, g = a.hyper.gamma;
  if (a.hyper.grid) {
    const auto [bc, bg] =
        grid_search(data, default_c_grid(), default_gamma_grid(), a.hyper.folds, a.seed);
    c = bc;
    g = bg;
    std::cout << "grid search selected C=" << format_double(c) << " gamma=" << format_double(g)
              << "\n";
  }
  const SvmModel model = train_svm(data, c, g);
  save_model(a.out, model);
  std::cout << "trained on " << data.size() << " vectors ("
            << model.support_vectors.size() << " support vectors"
            << (model.converged ? "" : ", NOT converged") << "), wrote " << a.out << "\n";
  return 0;
}

// ------------------------------------------------------------------ eval --

struct EvalArgs {
  std::string features;
  std::string out;
  std::string roc_out;
  int repetitions = 20;
  double train_frac = 0.70;
  HyperFlags hyper;
  uint64_t seed = 0;
};

int run_eval(const EvalArgs& a) {
  const std::vector<FeatureVector> data = read_features_csv(a.features);
  features_kind(data);
  EvalReport report = run_trials(data, a.repetitions, a.hyper.build(), a.seed, a.train_frac);
  report.manifest_ref = a.features;
  write_report(a.out, report);
  const std::string roc_path =
      a.roc_out.empty() ? (fs::path(a.out).replace_extension(".roc.csv")).string() : a.roc_out;
  write_text_file(roc_path, roc_to_csv(report.roc));
  std::cout << "mean sensitivity " << format_double(report.mean_se) << "%, specificity "
            << format_double(report.mean_sp) << "%, accuracy " << format_double(report.mean_ac)
            << "%, pooled AUC " << format_double(report.roc.auc) << "\n";
  std::cout << "wrote " << a.out << " and " << roc_path << "\n";
  return 0;
}

// --------------------------------------------------------------- compare --

struct CompareArgs {
  std::string manifest;
  std::string out_dir;
  EmbedFlags embed;
  int repetitions = 20;
  HyperFlags hyper;
  uint64_t seed = 0;
  unsigned jobs = 1;
  bool use_ga = false;
  size_t ga_population = 40;
  size_t ga_generations = 10;
};

int run_compare(const CompareArgs& a) {
  if (!a.embed.given()) return usage_error("compare needs a calibration embedder (--algo ...)");
  const EmbedConfig cal_cfg = a.embed.build(a.seed);
  const RMelFilterbank bank = build_filterbank(44100);
  CompareResult res = compare_feature_kinds(a.manifest, cal_cfg, bank, a.hyper.build(),
                                            a.repetitions, a.seed, a.jobs);

  if (a.use_ga) {
    // GA-driven scatter selection: evolve a mask, then keep its three best
    // dimensions by class separation.
    ExtractOptions opts;
    opts.kind = FeatureKind::calibrated;
    opts.calibration = cal_cfg;
    opts.jobs = a.jobs;
    const std::vector<FeatureVector> feats =
        extract_features(a.manifest, bank, opts).features;
    GaConfig ga;
    ga.population = a.ga_population;
    ga.generations = a.ga_generations;
    ga.seed = derive_seed(a.seed, 0x6A);
    const std::vector<uint8_t> mask = ga_select(feats, ga);
    std::vector<size_t> chosen;
    for (size_t d : rank_dims_by_tstat(feats)) {
      if (mask[d]) chosen.push_back(d);
      if (chosen.size() == 3) break;
    }
    if (chosen.size() == 3) {
      res.top_dims_calibrated = chosen;
      res.scatter_calibrated = scatter_csv(feats, chosen);
    }
  }

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_report(dir / "report_plain.json", res.plain);
  write_report(dir / "report_calibrated.json", res.calibrated);
  write_text_file(dir / "roc_plain.csv", roc_to_csv(res.plain.roc));
  write_text_file(dir / "roc_calibrated.csv", roc_to_csv(res.calibrated.roc));
  write_text_file(dir / "scatter_plain.csv", res.scatter_plain);
  write_text_file(dir / "scatter_calibrated.csv", res.scatter_calibrated);

  std::string summary = "{\n  \"version\": \"rmsteg-compare-v1\",\n";
  summary += "  \"auc_plain\": " + format_double(res.plain.roc.auc) + ",\n";
  summary += "  \"auc_calibrated\": " + format_double(res.calibrated.roc.auc) + ",\n";
  summary += "  \"auc_delta\": " + format_double(res.auc_delta) + ",\n";
  summary += "  \"mean_accuracy_plain\": " + format_double(res.plain.mean_ac) + ",\n";
  summary += "  \"mean_accuracy_calibrated\": " + format_double(res.calibrated.mean_ac) + "\n}\n";
  write_text_file(dir / "compare.json", summary);

  std::cout << "AUC plain " << format_double(res.plain.roc.auc) << ", calibrated "
            << format_double(res.calibrated.roc.auc) << ", delta "
            << format_double(res.auc_delta) << "\n";
  std::cout << "wrote reports to " << a.out_dir << "\n";
  return 0;
}

// ------------------------------------------------------------------ scan --

struct ScanArgs {
  std::string model;
  std::string features;
  std::vector<std::string> wavs;
  EmbedFlags embed;
  uint64_t seed = 0;
  unsigned jobs = 1;
};

int run_scan(const ScanArgs& a) {
  const SvmModel model = load_model(a.model);
  if (a.features.empty() == a.wavs.empty())
    return usage_error("scan needs either --features FILE or WAV paths");

  std::vector<FeatureVector> inputs;
  std::vector<std::string> names;
  if (!a.features.empty()) {
    inputs = read_features_csv(a.features);
    for (const FeatureVector& fv : inputs) names.push_back(fv.source_id);
  } else {
    std::optional<EmbedConfig> cal;
    if (model.kind == FeatureKind::calibrated) {
      if (a.embed.given())
        cal = a.embed.build(a.seed);
      else if (model.calibration)
        cal = model.calibration;
      else
        return usage_error("model expects calibrated features; give --algo ... for calibration");
    }
    const RMelFilterbank bank = build_filterbank(44100);
    inputs.resize(a.wavs.size());
    parallel_for(a.wavs.size(), a.jobs, [&](size_t i) {
      const AudioSignal x = read_wav(a.wavs[i]);
      inputs[i] = cal ? feature_vector_calibrated(x, *cal, bank, a.wavs[i])
                      : feature_vector_plain(x, bank, a.wavs[i]);
    });
    names = a.wavs;
  }

  for (size_t i = 0; i < inputs.size(); ++i) {
    const auto [label, decision] = predict(model, inputs[i]);
    std::cout << names[i] << "\t" << to_string(label) << "\t" << format_double(decision)
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrated audio steganalysis toolkit"};
  app.require_subcommand(1);

  CorpusArgs corpus_args;
  CLI::App* corpus_cmd =
      app.add_subcommand("corpus", "Generate a cover/stego corpus with a manifest");
  corpus_cmd->add_option("--synthetic", corpus_args.synthetic, "Number of synthetic covers");
  corpus_cmd->add_option("--covers", corpus_args.covers_dir, "Directory of cover WAV files");
  corpus_cmd->add_option("--duration", corpus_args.duration, "Synthetic cover length, seconds");
  corpus_cmd->add_option("--sample-rate", corpus_args.sample_rate, "Synthetic sample rate, Hz");
  corpus_args.embed.attach(corpus_cmd, true);
  corpus_cmd->add_option("--seed", corpus_args.seed, "Master seed");
  corpus_cmd->add_option("--out", corpus_args.out_dir, "Output directory")->required();

  ExtractArgs extract_args;
  CLI::App* extract_cmd =
      app.add_subcommand("extract", "Extract feature vectors from a corpus manifest");
  extract_cmd->add_option("--manifest", extract_args.manifest, "Corpus manifest CSV")->required();
  extract_cmd->add_option("--out", extract_args.out, "Output feature CSV")->required();
  extract_cmd->add_option("--kind", extract_args.kind, "plain or calibrated");
  extract_args.embed.attach(extract_cmd, false);
  extract_cmd->add_option("--seed", extract_args.seed, "Master seed");
  extract_cmd->add_option("--jobs", extract_args.jobs, "Parallel workers");
  extract_cmd->add_flag("--keep-going", extract_args.keep_going,
                        "Continue past unreadable files");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train an SVM detector on features");
  train_cmd->add_option("--features", train_args.features, "Feature CSV")->required();
  train_cmd->add_option("--out", train_args.out, "Output model JSON")->required();
  train_args.hyper.attach(train_cmd);
  train_cmd->add_option("--seed", train_args.seed, "Master seed");

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Repeated split/train/test evaluation with ROC");
  eval_cmd->add_option("--features", eval_args.features, "Feature CSV")->required();
  eval_cmd->add_option("--out", eval_args.out, "Output report JSON")->required();
  eval_cmd->add_option("--roc", eval_args.roc_out, "Output ROC CSV");
  eval_cmd->add_option("--repetitions", eval_args.repetitions, "Number of random splits");
  eval_cmd->add_option("--train-frac", eval_args.train_frac, "Training fraction");
  eval_args.hyper.attach(eval_cmd);
  eval_cmd->add_option("--seed", eval_args.seed, "Master seed");

  CompareArgs compare_args;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Evaluate plain vs calibrated features on one corpus, shared splits");
  compare_cmd->add_option("--manifest", compare_args.manifest, "Corpus manifest CSV")
      ->required();
  compare_cmd->add_option("--out-dir", compare_args.out_dir, "Output directory")->required();
  compare_args.embed.attach(compare_cmd, false);
  compare_cmd->add_option("--repetitions", compare_args.repetitions, "Number of random splits");
  compare_args.hyper.attach(compare_cmd);
  compare_cmd->add_option("--seed", compare_args.seed, "Master seed");
  compare_cmd->add_option("--jobs", compare_args.jobs, "Parallel workers");
  compare_cmd->add_flag("--ga", compare_args.use_ga,
                        "Select scatter dimensions with the genetic algorithm");
  compare_cmd->add_option("--ga-population", compare_args.ga_population, "GA population size");
  compare_cmd->add_option("--ga-generations", compare_args.ga_generations, "GA generations");

  ScanArgs scan_args;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Classify signals with a trained model");
  scan_cmd->add_option("--model", scan_args.model, "Model JSON")->required();
  scan_cmd->add_option("--features", scan_args.features, "Feature CSV to classify");
  scan_cmd->add_option("wavs", scan_args.wavs, "WAV files to classify");
  scan_args.embed.attach(scan_cmd, false);
  scan_cmd->add_option("--seed", scan_args.seed, "Master seed");
  scan_cmd->add_option("--jobs", scan_args.jobs, "Parallel workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(corpus_cmd)) return run_corpus(corpus_args);
    if (app.got_subcommand(extract_cmd)) return run_extract(extract_args);
    if (app.got_subcommand(train_cmd)) return run_train(train_args);
    if (app.got_subcommand(eval_cmd)) return run_eval(eval_args);
    if (app.got_subcommand(compare_cmd)) return run_compare(compare_args);
    if (app.got_subcommand(scan_cmd)) return run_scan(scan_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
