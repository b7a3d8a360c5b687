#include "rmsteg/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "rmsteg/csv.hpp"
#include "rmsteg/error.hpp"
#include "rmsteg/rng.hpp"

namespace rmsteg {
namespace {

constexpr const char* kModelVersion = "rmsteg-model-v1";
constexpr double kQuadFloor = 1e-12;

int label_to_y(Label l) {
  switch (l) {
    case Label::cover: return -1;
    case Label::stego: return +1;
    case Label::unknown: break;
  }
  raise(Errc::bad_config, "training data must be labeled cover or stego");
}

void check_both_classes(std::span<const FeatureVector> data) {
  bool has_cover = false, has_stego = false;
  for (const FeatureVector& fv : data) {
    has_cover |= fv.label == Label::cover;
    has_stego |= fv.label == Label::stego;
  }
  if (!has_cover || !has_stego)
    raise(Errc::single_class, "need both cover and stego examples");
}

std::vector<double> masked_row(const FeatureVector& fv, const std::vector<uint8_t>& mask) {
  std::vector<double> row;
  row.reserve(mask.size());
  for (size_t d = 0; d < mask.size(); ++d)
    if (mask[d]) row.push_back(fv.values[d]);
  return row;
}

/// Stratified fold ids (0..folds-1) per sample, seeded.
std::vector<int> stratified_folds(std::span<const FeatureVector> data, int folds,
                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<size_t> covers, stegos;
  for (size_t i = 0; i < data.size(); ++i)
    (data[i].label == Label::stego ? stegos : covers).push_back(i);
  std::vector<int> fold_of(data.size(), 0);
  for (std::vector<size_t>* cls : {&covers, &stegos}) {
    for (size_t i = cls->size(); i > 1; --i)
      std::swap((*cls)[i - 1], (*cls)[rng.below(i)]);
    for (size_t i = 0; i < cls->size(); ++i)
      fold_of[(*cls)[i]] = static_cast<int>(i % folds);
  }
  return fold_of;
}

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) raise(Errc::dim_mismatch, "kernel arguments differ in dimension");
  if (gamma <= 0.0) raise(Errc::bad_config, "gamma must be positive");
  double d2 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

Scaler Scaler::fit(const std::vector<std::vector<double>>& rows) {
  Scaler s;
  if (rows.empty()) return s;
  const size_t dim = rows[0].size();
  s.lo.assign(dim, std::numeric_limits<double>::infinity());
  s.hi.assign(dim, -std::numeric_limits<double>::infinity());
  for (const std::vector<double>& r : rows)
    for (size_t d = 0; d < dim; ++d) {
      s.lo[d] = std::min(s.lo[d], r[d]);
      s.hi[d] = std::max(s.hi[d], r[d]);
    }
  return s;
}

std::vector<double> Scaler::apply(std::span<const double> row) const {
  if (row.size() != lo.size()) raise(Errc::dim_mismatch, "scaler dimension mismatch");
  std::vector<double> out(row.size());
  for (size_t d = 0; d < row.size(); ++d)
    out[d] = hi[d] == lo[d] ? 0.0 : -1.0 + 2.0 * (row[d] - lo[d]) / (hi[d] - lo[d]);
  return out;
}

SmoResult smo_solve(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    double c_reg, double gamma, double tol, size_t max_pair_updates) {
  const size_t n = x.size();
  if (n == 0 || y.size() != n) raise(Errc::bad_config, "empty or inconsistent training set");

  std::vector<double> kernel(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j)
      kernel[i * n + j] = kernel[j * n + i] = rbf_kernel(x[i], x[j], gamma);
  const auto K = [&](size_t i, size_t j) { return kernel[i * n + j]; };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a at a = 0
  const auto in_up = [&](size_t t) {
    return y[t] > 0 ? alpha[t] < c_reg : alpha[t] > 0.0;
  };
  const auto in_low = [&](size_t t) {
    return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c_reg;
  };

  SmoResult res;
  res.converged = false;
  while (res.pair_updates < max_pair_updates) {
    // Maximal violating pair, second-order choice for j.
    double m_up = -std::numeric_limits<double>::infinity();
    size_t i = n;
    for (size_t t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * grad[t] > m_up) {
        m_up = -y[t] * grad[t];
        i = t;
      }
    double m_low = std::numeric_limits<double>::infinity();
    size_t j = n;
    double best_obj = 0.0;
    for (size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      m_low = std::min(m_low, v);
      const double gap = m_up - v;
      if (gap > 0.0) {
        const double quad = std::max(K(i, i) + K(t, t) - 2.0 * K(i, t), kQuadFloor);
        const double obj = -(gap * gap) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || m_up - m_low < tol) {
      res.converged = true;
      break;
    }
    ++res.pair_updates;

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double quad = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), kQuadFloor);
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > c_reg) { alpha[i] = c_reg; alpha[j] = c_reg - diff; }
      } else {
        if (alpha[j] > c_reg) { alpha[j] = c_reg; alpha[i] = c_reg + diff; }
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c_reg) {
        if (alpha[i] > c_reg) { alpha[i] = c_reg; alpha[j] = sum - c_reg; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > c_reg) {
        if (alpha[j] > c_reg) { alpha[j] = c_reg; alpha[i] = sum - c_reg; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }

    const double d_i = alpha[i] - old_ai;
    const double d_j = alpha[j] - old_aj;
    for (size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * K(i, t) * d_i + y[j] * K(j, t) * d_j);
  }

  // Bias from the KKT conditions: free vectors sit exactly on the margin.
  double free_sum = 0.0;
  size_t free_count = 0;
  for (size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0 && alpha[t] < c_reg) {
      free_sum += -y[t] * grad[t];
      ++free_count;
    }
  if (free_count > 0) {
    res.bias = free_sum / static_cast<double>(free_count);
  } else {
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < n; ++t) {
      if (in_up(t)) m_up = std::max(m_up, -y[t] * grad[t]);
      if (in_low(t)) m_low = std::min(m_low, -y[t] * grad[t]);
    }
    res.bias = (m_up + m_low) / 2.0;
  }

  double sum_alpha = 0.0, alpha_dot_grad = 0.0;
  for (size_t t = 0; t < n; ++t) {
    sum_alpha += alpha[t];
    alpha_dot_grad += alpha[t] * grad[t];
  }
  res.dual_objective = 0.5 * (sum_alpha - alpha_dot_grad);
  res.alpha = std::move(alpha);
  return res;
}

SvmModel train_svm(std::span<const FeatureVector> data, double c_reg, double gamma,
                   std::vector<uint8_t> mask) {
  check_both_classes(data);
  if (c_reg <= 0.0) raise(Errc::bad_config, "c_reg must be positive");
  if (mask.empty()) mask.assign(kFeatureDim, 1);
  if (mask.size() != kFeatureDim) raise(Errc::dim_mismatch, "mask must cover all dimensions");

  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  rows.reserve(data.size());
  y.reserve(data.size());
  for (const FeatureVector& fv : data) {
    rows.push_back(masked_row(fv, mask));
    y.push_back(label_to_y(fv.label));
  }

  SvmModel model;
  model.scaler = Scaler::fit(rows);
  for (std::vector<double>& r : rows) r = model.scaler.apply(r);

  const SmoResult sol = smo_solve(rows, y, c_reg, gamma);
  model.bias = sol.bias;
  model.gamma = gamma;
  model.c_reg = c_reg;
  model.feature_mask = std::move(mask);
  model.kind = data[0].kind;
  model.converged = sol.converged;
  model.calibration = data[0].calibration;
  const double dust = 1e-12 * c_reg;
  for (size_t t = 0; t < rows.size(); ++t)
    if (sol.alpha[t] > dust) {
      model.support_vectors.push_back(rows[t]);
      model.alphas.push_back(sol.alpha[t] * y[t]);
    }
  return model;
}

std::pair<Label, double> predict_values(const SvmModel& model,
                                        std::span<const double> values) {
  if (values.size() != model.feature_mask.size())
    raise(Errc::dim_mismatch, "input dimension does not match model mask");
  std::vector<double> row;
  row.reserve(model.scaler.lo.size());
  for (size_t d = 0; d < model.feature_mask.size(); ++d)
    if (model.feature_mask[d]) row.push_back(values[d]);
  const std::vector<double> scaled = model.scaler.apply(row);

  double decision = model.bias;
  for (size_t s = 0; s < model.support_vectors.size(); ++s)
    decision += model.alphas[s] * rbf_kernel(model.support_vectors[s], scaled, model.gamma);
  return {decision > 0.0 ? Label::stego : Label::cover, decision};
}

std::pair<Label, double> predict(const SvmModel& model, const FeatureVector& x) {
  if (x.kind != model.kind)
    raise(Errc::dim_mismatch, std::string("model expects ") + to_string(model.kind) +
                                  " features, got " + to_string(x.kind));
  return predict_values(model, x.values);
}

double masked_cv_accuracy(std::span<const FeatureVector> data,
                          const std::vector<uint8_t>& mask, double c_reg, double gamma,
                          int folds, uint64_t seed) {
  if (std::count(mask.begin(), mask.end(), 1) == 0) return 0.0;
  size_t covers = 0, stegos = 0;
  for (const FeatureVector& fv : data) (fv.label == Label::stego ? stegos : covers)++;
  const int usable = static_cast<int>(std::min({static_cast<size_t>(folds), covers, stegos}));
  if (usable < 2) return 0.0;

  const std::vector<int> fold_of = stratified_folds(data, usable, seed);
  size_t correct = 0;
  for (int f = 0; f < usable; ++f) {
    std::vector<FeatureVector> train;
    for (size_t i = 0; i < data.size(); ++i)
      if (fold_of[i] != f) train.push_back(data[i]);
    const SvmModel model = train_svm(train, c_reg, gamma, mask);
    for (size_t i = 0; i < data.size(); ++i)
      if (fold_of[i] == f && predict(model, data[i]).first == data[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::pair<double, double> grid_search(std::span<const FeatureVector> data,
                                      std::span<const double> c_grid,
                                      std::span<const double> gamma_grid, int folds,
                                      uint64_t seed) {
  check_both_classes(data);
  if (c_grid.empty() || gamma_grid.empty()) raise(Errc::bad_config, "empty hyperparameter grid");
  if (folds < 2) raise(Errc::bad_config, "need at least 2 folds");

  std::vector<double> cs(c_grid.begin(), c_grid.end());
  std::vector<double> gs(gamma_grid.begin(), gamma_grid.end());
  std::sort(cs.begin(), cs.end());
  std::sort(gs.begin(), gs.end());

  const std::vector<uint8_t> all(kFeatureDim, 1);
  double best_acc = -1.0;
  std::pair<double, double> best{cs[0], gs[0]};
  for (double c : cs)
    for (double g : gs) {
      const double acc = masked_cv_accuracy(data, all, c, g, folds, seed);
      if (acc > best_acc + 1e-12) {
        best_acc = acc;
        best = {c, g};
      }
    }
  return best;
}

std::vector<double> default_c_grid() {
  std::vector<double> g;
  for (int e = -1; e <= 9; e += 2) g.push_back(std::pow(2.0, e));
  return g;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int e = -9; e <= 1; e += 2) g.push_back(std::pow(2.0, e));
  return g;
}

std::string model_to_json(const SvmModel& model) {
  nlohmann::ordered_json j;
  j["version"] = kModelVersion;
  j["feature_kind"] = to_string(model.kind);
  j["gamma"] = model.gamma;
  j["c_reg"] = model.c_reg;
  j["bias"] = model.bias;
  j["converged"] = model.converged;
  j["feature_mask"] = model.feature_mask;
  j["scaler"] = {{"min", model.scaler.lo}, {"max", model.scaler.hi}};
  j["support_vectors"] = model.support_vectors;
  j["alphas"] = model.alphas;
  if (model.calibration)
    j["calibration"] = nlohmann::ordered_json::parse(to_json_string(*model.calibration));
  else
    j["calibration"] = nullptr;
  return j.dump(2) + "\n";
}

SvmModel model_from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(Errc::bad_config, "malformed model JSON");
  if (!j.contains("version") || j["version"] != kModelVersion)
    raise(Errc::version_mismatch, "model version is not " + std::string(kModelVersion));
  SvmModel m;
  m.kind = kind_from_string(j.at("feature_kind").get<std::string>());
  m.gamma = j.at("gamma").get<double>();
  m.c_reg = j.at("c_reg").get<double>();
  m.bias = j.at("bias").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.feature_mask = j.at("feature_mask").get<std::vector<uint8_t>>();
  m.scaler.lo = j.at("scaler").at("min").get<std::vector<double>>();
  m.scaler.hi = j.at("scaler").at("max").get<std::vector<double>>();
  m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  m.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("calibration") && !j.at("calibration").is_null())
    m.calibration = embed_config_from_json(j.at("calibration").dump());
  return m;
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  write_text_file(path, model_to_json(model));
}

SvmModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace rmsteg
