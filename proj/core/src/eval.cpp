#include "rmsteg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "rmsteg/csv.hpp"
#include "rmsteg/error.hpp"
#include "rmsteg/parallel.hpp"
#include "rmsteg/rng.hpp"
#include "rmsteg/synth.hpp"
#include "rmsteg/wav.hpp"

namespace rmsteg {
namespace {

constexpr const char* kReportVersion = "rmsteg-report-v1";

std::string pad4(size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

std::vector<ManifestRow> build_corpus_impl(
    const std::vector<AudioSignal>& covers, const std::vector<uint64_t>& cover_seeds,
    const EmbedConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestRow> rows;
  rows.reserve(2 * covers.size());
  for (size_t i = 0; i < covers.size(); ++i) {
    const AudioSignal& cover = covers[i];
    EmbedConfig stego_cfg = cfg;
    stego_cfg.seed = derive_seed(cfg.seed, 2 * i + 1);
    const size_t n_bits = capacity_bits(stego_cfg, cover);
    const Payload payload = gen_payload(n_bits, stego_cfg.seed);
    const AudioSignal stego = embed(cover, payload, stego_cfg);

    const std::string base = "clip_" + pad4(i);
    const std::string cover_name = base + "_cover.wav";
    const std::string stego_name = base + "_stego.wav";
    write_wav(cover, out_dir / cover_name);
    write_wav(stego, out_dir / stego_name);

    ManifestRow cover_row;
    cover_row.path = cover_name;
    cover_row.label = Label::cover;
    cover_row.algorithm = "none";
    cover_row.capacity_bpb = 0.0;
    cover_row.seed = cover_seeds[i];
    cover_row.snr_db = std::numeric_limits<double>::infinity();
    rows.push_back(cover_row);

    ManifestRow stego_row;
    stego_row.path = stego_name;
    stego_row.label = Label::stego;
    stego_row.algorithm = to_string(cfg.algorithm);
    stego_row.capacity_bpb = bpb_percent(static_cast<long long>(n_bits), cover);
    stego_row.seed = stego_cfg.seed;
    stego_row.snr_db = snr_db(cover, stego);
    rows.push_back(stego_row);
  }
  write_manifest(out_dir / "manifest.csv", rows);
  return rows;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Population standard deviation, matching the statistics convention used
// for the features themselves.
double std_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

RocCurve roc_and_auc(std::vector<std::pair<double, int>> scores) {
  size_t n_pos = 0, n_neg = 0;
  for (const auto& [s, y] : scores) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    raise(Errc::single_class, "ROC needs scores from both classes");

  std::sort(scores.begin(), scores.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < scores.size()) {
    const double v = scores[i].first;
    while (i < scores.size() && scores[i].first == v) {
      (scores[i].second > 0 ? tp : fp)++;
      ++i;
    }
    roc.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos));
    roc.thresholds.push_back(v);
  }
  double auc = 0.0;
  for (size_t k = 1; k < roc.points.size(); ++k) {
    const auto& [x0, y0] = roc.points[k - 1];
    const auto& [x1, y1] = roc.points[k];
    auc += (x1 - x0) * (y0 + y1) / 2.0;
  }
  roc.auc = auc;
  return roc;
}

std::vector<ManifestRow> build_corpus(const std::vector<std::filesystem::path>& covers,
                                      const EmbedConfig& cfg,
                                      const std::filesystem::path& out_dir) {
  if (covers.empty()) raise(Errc::bad_config, "no cover files given");
  std::vector<AudioSignal> signals;
  signals.reserve(covers.size());
  for (const std::filesystem::path& p : covers) signals.push_back(read_wav(p));
  return build_corpus_impl(signals, std::vector<uint64_t>(covers.size(), 0), cfg, out_dir);
}

std::vector<ManifestRow> build_corpus(const SynthSpec& spec, const EmbedConfig& cfg,
                                      const std::filesystem::path& out_dir) {
  if (spec.count == 0) raise(Errc::bad_config, "synthesis count must be positive");
  std::vector<AudioSignal> signals;
  std::vector<uint64_t> seeds;
  signals.reserve(spec.count);
  for (size_t i = 0; i < spec.count; ++i) {
    seeds.push_back(derive_seed(spec.seed, 2 * i));
    signals.push_back(synth_cover(spec.duration_s, spec.sample_rate, seeds.back()));
  }
  return build_corpus_impl(signals, seeds, cfg, out_dir);
}

std::string manifest_to_csv(std::span<const ManifestRow> rows) {
  std::string out = "path,label,algorithm,capacity_bpb,seed,snr_db\n";
  for (const ManifestRow& r : rows) {
    out += r.path;
    out += ',';
    out += to_string(r.label);
    out += ',';
    out += r.algorithm;
    out += ',';
    out += format_double(r.capacity_bpb);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_double(r.snr_db);
    out += '\n';
  }
  return out;
}

std::vector<ManifestRow> manifest_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) raise(Errc::bad_config, "empty manifest");
  std::vector<ManifestRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 6) raise(Errc::bad_config, "manifest row needs 6 fields");
    ManifestRow r;
    r.path = f[0];
    r.label = label_from_string(f[1]);
    r.algorithm = f[2];
    r.capacity_bpb = parse_double(f[3]);
    r.seed = std::stoull(f[4]);
    r.snr_db = parse_double(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestRow> rows) {
  write_text_file(path, manifest_to_csv(rows));
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  return manifest_from_csv(read_text_file(path));
}

std::string source_id_from_path(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  for (const char* suffix : {"_cover", "_stego"}) {
    const size_t len = std::string(suffix).size();
    if (stem.size() > len && stem.compare(stem.size() - len, len, suffix) == 0)
      return stem.substr(0, stem.size() - len);
  }
  return stem;
}

std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>> split_train_test(
    std::span<const FeatureVector> features, double train_frac, uint64_t seed) {
  if (train_frac <= 0.0 || train_frac >= 1.0)
    raise(Errc::bad_config, "train fraction must be in (0, 1)");
  bool has_cover = false, has_stego = false;
  for (const FeatureVector& fv : features) {
    has_cover |= fv.label == Label::cover;
    has_stego |= fv.label == Label::stego;
  }
  if (!has_cover || !has_stego) raise(Errc::single_class, "need both classes to split");

  // Group rows by source id so a cover and its stego twin never straddle
  // the split.
  std::vector<std::string> group_ids;
  std::map<std::string, size_t> group_index;
  std::vector<bool> group_has_cover, group_has_stego;
  std::vector<size_t> group_of(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    const std::string& id = features[i].source_id;
    auto [it, inserted] = group_index.emplace(id, group_ids.size());
    if (inserted) {
      group_ids.push_back(id);
      group_has_cover.push_back(false);
      group_has_stego.push_back(false);
    }
    group_of[i] = it->second;
    if (features[i].label == Label::stego)
      group_has_stego[it->second] = true;
    else
      group_has_cover[it->second] = true;
  }

  // Strata: paired groups, cover-only, stego-only; each split 70/30 on its
  // own so class balance carries over.
  std::vector<std::vector<size_t>> strata(3);
  for (size_t g = 0; g < group_ids.size(); ++g) {
    const int s = group_has_cover[g] && group_has_stego[g] ? 0 : (group_has_cover[g] ? 1 : 2);
    strata[s].push_back(g);
  }

  Rng rng(seed);
  std::vector<bool> in_train(group_ids.size(), false);
  for (std::vector<size_t>& stratum : strata) {
    for (size_t i = stratum.size(); i > 1; --i)
      std::swap(stratum[i - 1], stratum[rng.below(i)]);
    const size_t n_train =
        static_cast<size_t>(std::floor(train_frac * static_cast<double>(stratum.size()) + 0.5));
    for (size_t i = 0; i < stratum.size(); ++i) in_train[stratum[i]] = i < n_train;
  }

  std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>> out;
  for (size_t i = 0; i < features.size(); ++i)
    (in_train[group_of[i]] ? out.first : out.second).push_back(features[i]);
  return out;
}

EvalReport run_trials(std::span<const FeatureVector> features, int repetitions,
                      const HyperSpec& hyper, uint64_t seed, double train_frac) {
  if (repetitions < 1) raise(Errc::bad_config, "need at least one repetition");

  EvalReport report;
  report.repetitions = repetitions;
  report.hyper = hyper;
  report.kind = features.empty() ? FeatureKind::plain : features[0].kind;
  if (!features.empty()) report.embedder = features[0].calibration;

  std::vector<std::pair<double, int>> pooled;
  std::vector<double> se, sp, ac;
  for (int r = 0; r < repetitions; ++r) {
    const uint64_t trial_seed = derive_seed(seed, static_cast<uint64_t>(r));
    const auto [train, test] = split_train_test(features, train_frac, trial_seed);

    double c = hyper.c_reg, g = hyper.gamma;
    if (hyper.grid)
      std::tie(c, g) = grid_search(train, hyper.c_grid, hyper.gamma_grid, hyper.folds,
                                   derive_seed(trial_seed, 1));
    const SvmModel model = train_svm(train, c, g);

    TrialResult t;
    t.trial_seed = trial_seed;
    t.c_used = c;
    t.gamma_used = g;
    std::vector<std::pair<double, int>> trial_scores;
    for (const FeatureVector& fv : test) {
      const auto [label, decision] = predict(model, fv);
      const int y = fv.label == Label::stego ? +1 : -1;
      trial_scores.emplace_back(decision, y);
      pooled.emplace_back(decision, y);
      if (y > 0)
        (label == Label::stego ? t.tp : t.fn)++;
      else
        (label == Label::cover ? t.tn : t.fp)++;
    }
    const long pos = t.tp + t.fn, neg = t.tn + t.fp;
    t.sensitivity = pos > 0 ? 100.0 * t.tp / pos : 0.0;
    t.specificity = neg > 0 ? 100.0 * t.tn / neg : 0.0;
    t.accuracy = 100.0 * (t.tp + t.tn) / std::max(1l, pos + neg);
    t.auc = (pos > 0 && neg > 0) ? roc_and_auc(trial_scores).auc : 0.0;
    se.push_back(t.sensitivity);
    sp.push_back(t.specificity);
    ac.push_back(t.accuracy);
    report.trials.push_back(t);
  }
  report.mean_se = mean_of(se);
  report.mean_sp = mean_of(sp);
  report.mean_ac = mean_of(ac);
  report.std_se = std_of(se);
  report.std_sp = std_of(sp);
  report.std_ac = std_of(ac);
  report.roc = roc_and_auc(std::move(pooled));
  return report;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["version"] = kReportVersion;
  j["feature_kind"] = to_string(report.kind);
  j["manifest"] = report.manifest_ref;
  if (report.embedder)
    j["embedder"] = nlohmann::ordered_json::parse(to_json_string(*report.embedder));
  else
    j["embedder"] = nullptr;
  j["repetitions"] = report.repetitions;
  j["hyper"] = {{"mode", report.hyper.grid ? "grid" : "fixed"},
                {"c_reg", report.hyper.c_reg},
                {"gamma", report.hyper.gamma},
                {"folds", report.hyper.folds},
                {"c_grid", report.hyper.c_grid},
                {"gamma_grid", report.hyper.gamma_grid}};
  j["trials"] = nlohmann::ordered_json::array();
  for (const TrialResult& t : report.trials) {
    j["trials"].push_back({{"seed", t.trial_seed},
                           {"tp", t.tp},
                           {"fp", t.fp},
                           {"tn", t.tn},
                           {"fn", t.fn},
                           {"sensitivity", t.sensitivity},
                           {"specificity", t.specificity},
                           {"accuracy", t.accuracy},
                           {"auc", t.auc},
                           {"c_reg", t.c_used},
                           {"gamma", t.gamma_used}});
  }
  j["mean"] = {{"sensitivity", report.mean_se},
               {"specificity", report.mean_sp},
               {"accuracy", report.mean_ac}};
  j["std"] = {{"sensitivity", report.std_se},
              {"specificity", report.std_sp},
              {"accuracy", report.std_ac}};
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const auto& [x, y] : report.roc.points) points.push_back({x, y});
  j["roc"] = {{"auc", report.roc.auc}, {"points", points}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(Errc::bad_config, "malformed report JSON");
  if (!j.contains("version") || j["version"] != kReportVersion)
    raise(Errc::version_mismatch, "report version is not " + std::string(kReportVersion));
  EvalReport r;
  r.kind = kind_from_string(j.at("feature_kind").get<std::string>());
  r.manifest_ref = j.at("manifest").get<std::string>();
  if (!j.at("embedder").is_null())
    r.embedder = embed_config_from_json(j.at("embedder").dump());
  r.repetitions = j.at("repetitions").get<int>();
  r.hyper.grid = j.at("hyper").at("mode").get<std::string>() == "grid";
  r.hyper.c_reg = j.at("hyper").at("c_reg").get<double>();
  r.hyper.gamma = j.at("hyper").at("gamma").get<double>();
  r.hyper.folds = j.at("hyper").at("folds").get<int>();
  r.hyper.c_grid = j.at("hyper").at("c_grid").get<std::vector<double>>();
  r.hyper.gamma_grid = j.at("hyper").at("gamma_grid").get<std::vector<double>>();
  for (const auto& tj : j.at("trials")) {
    TrialResult t;
    t.trial_seed = tj.at("seed").get<uint64_t>();
    t.tp = tj.at("tp").get<long>();
    t.fp = tj.at("fp").get<long>();
    t.tn = tj.at("tn").get<long>();
    t.fn = tj.at("fn").get<long>();
    t.sensitivity = tj.at("sensitivity").get<double>();
    t.specificity = tj.at("specificity").get<double>();
    t.accuracy = tj.at("accuracy").get<double>();
    t.auc = tj.at("auc").get<double>();
    t.c_used = tj.at("c_reg").get<double>();
    t.gamma_used = tj.at("gamma").get<double>();
    r.trials.push_back(t);
  }
  r.mean_se = j.at("mean").at("sensitivity").get<double>();
  r.mean_sp = j.at("mean").at("specificity").get<double>();
  r.mean_ac = j.at("mean").at("accuracy").get<double>();
  r.std_se = j.at("std").at("sensitivity").get<double>();
  r.std_sp = j.at("std").at("specificity").get<double>();
  r.std_ac = j.at("std").at("accuracy").get<double>();
  r.roc.auc = j.at("roc").at("auc").get<double>();
  for (const auto& pj : j.at("roc").at("points"))
    r.roc.points.emplace_back(pj.at(0).get<double>(), pj.at(1).get<double>());
  return r;
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
  write_text_file(path, report_to_json(report));
}

EvalReport read_report(const std::filesystem::path& path) {
  return report_from_json(read_text_file(path));
}

std::string roc_to_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr,threshold\n";
  for (size_t i = 0; i < roc.points.size(); ++i) {
    out += format_double(roc.points[i].first);
    out += ',';
    out += format_double(roc.points[i].second);
    out += ',';
    out += i < roc.thresholds.size() ? format_double(roc.thresholds[i]) : "";
    out += '\n';
  }
  return out;
}

ExtractOutcome extract_features(const std::filesystem::path& manifest_path,
                                const RMelFilterbank& bank, const ExtractOptions& options) {
  if (options.kind == FeatureKind::calibrated && !options.calibration)
    raise(Errc::bad_config, "calibrated extraction needs an embedder config");
  const std::vector<ManifestRow> rows = read_manifest(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();

  std::vector<std::optional<FeatureVector>> slots(rows.size());
  std::vector<std::string> errors(rows.size());
  parallel_for(rows.size(), options.jobs, [&](size_t i) {
    const std::filesystem::path path =
        rows[i].path.empty() || std::filesystem::path(rows[i].path).is_absolute()
            ? std::filesystem::path(rows[i].path)
            : base / rows[i].path;
    try {
      const AudioSignal x = read_wav(path);
      FeatureVector fv = options.kind == FeatureKind::calibrated
                             ? feature_vector_calibrated(x, *options.calibration, bank,
                                                         source_id_from_path(path))
                             : feature_vector_plain(x, bank, source_id_from_path(path));
      fv.label = rows[i].label;
      slots[i] = std::move(fv);
    } catch (const Error& e) {
      errors[i] = path.string() + ": " + e.what();
    }
  });

  ExtractOutcome out;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      out.features.push_back(std::move(*slots[i]));
    else
      out.failures.push_back(errors[i]);
  }
  if (!out.failures.empty() && !options.keep_going)
    raise(Errc::io_failure, out.failures.front());
  return out;
}

std::vector<size_t> rank_dims_by_tstat(std::span<const FeatureVector> features) {
  std::array<double, kFeatureDim> t{};
  for (size_t d = 0; d < kFeatureDim; ++d) {
    double mu[2] = {0, 0}, var[2] = {0, 0};
    size_t n[2] = {0, 0};
    for (const FeatureVector& fv : features) {
      const int c = fv.label == Label::stego ? 1 : 0;
      mu[c] += fv.values[d];
      n[c]++;
    }
    if (n[0] == 0 || n[1] == 0) raise(Errc::single_class, "ranking needs both classes");
    mu[0] /= n[0];
    mu[1] /= n[1];
    for (const FeatureVector& fv : features) {
      const int c = fv.label == Label::stego ? 1 : 0;
      var[c] += (fv.values[d] - mu[c]) * (fv.values[d] - mu[c]);
    }
    var[0] /= n[0];
    var[1] /= n[1];
    t[d] = std::abs(mu[1] - mu[0]) / std::sqrt(var[0] / n[0] + var[1] / n[1] + 1e-300);
  }
  std::vector<size_t> order(kFeatureDim);
  for (size_t d = 0; d < kFeatureDim; ++d) order[d] = d;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return t[a] > t[b]; });
  return order;
}

std::string scatter_csv(std::span<const FeatureVector> features,
                        std::span<const size_t> dims3) {
  std::string out;
  for (size_t k = 0; k < dims3.size(); ++k) {
    if (k) out += ',';
    out += feature_name(dims3[k]);
  }
  out += ",label\n";
  for (const FeatureVector& fv : features) {
    for (size_t k = 0; k < dims3.size(); ++k) {
      if (k) out += ',';
      out += format_double(fv.values[dims3[k]]);
    }
    out += ',';
    out += to_string(fv.label);
    out += '\n';
  }
  return out;
}

CompareResult compare_feature_kinds(const std::filesystem::path& manifest_path,
                                    const EmbedConfig& cal_cfg, const RMelFilterbank& bank,
                                    const HyperSpec& hyper, int repetitions, uint64_t seed,
                                    unsigned jobs) {
  ExtractOptions plain_opts;
  plain_opts.kind = FeatureKind::plain;
  plain_opts.jobs = jobs;
  ExtractOptions cal_opts;
  cal_opts.kind = FeatureKind::calibrated;
  cal_opts.calibration = cal_cfg;
  cal_opts.jobs = jobs;

  const std::vector<FeatureVector> plain = extract_features(manifest_path, bank, plain_opts).features;
  const std::vector<FeatureVector> calibrated =
      extract_features(manifest_path, bank, cal_opts).features;

  CompareResult res;
  // Identical seeds on identically ordered rows give identical partitions.
  res.plain = run_trials(plain, repetitions, hyper, seed);
  res.calibrated = run_trials(calibrated, repetitions, hyper, seed);
  res.plain.manifest_ref = manifest_path.filename().string();
  res.calibrated.manifest_ref = manifest_path.filename().string();
  res.auc_delta = res.calibrated.roc.auc - res.plain.roc.auc;

  const std::vector<size_t> rank_p = rank_dims_by_tstat(plain);
  const std::vector<size_t> rank_c = rank_dims_by_tstat(calibrated);
  res.top_dims_plain.assign(rank_p.begin(), rank_p.begin() + 3);
  res.top_dims_calibrated.assign(rank_c.begin(), rank_c.begin() + 3);
  res.scatter_plain = scatter_csv(plain, res.top_dims_plain);
  res.scatter_calibrated = scatter_csv(calibrated, res.top_dims_calibrated);
  return res;
}

}  // namespace rmsteg
