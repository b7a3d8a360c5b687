#include "rmsteg/ga.hpp"

#include <algorithm>
#include <map>

#include "rmsteg/error.hpp"
#include "rmsteg/rng.hpp"
#include "rmsteg/svm.hpp"

namespace rmsteg {
namespace {

using Mask = std::vector<uint8_t>;

struct Fitness {
  std::span<const FeatureVector> data;
  const GaConfig& cfg;
  uint64_t cv_seed;
  std::map<Mask, double> cache;

  double operator()(const Mask& mask) {
    const auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    // CV folds are fixed across evaluations so fitness is a pure function
    // of the mask.
    const double acc =
        masked_cv_accuracy(data, mask, cfg.c_reg, cfg.gamma, cfg.folds, cv_seed);
    cache.emplace(mask, acc);
    return acc;
  }
};

}  // namespace

std::vector<uint8_t> ga_select(std::span<const FeatureVector> data, const GaConfig& cfg) {
  if (cfg.population < 2 || cfg.population % 2 != 0)
    raise(Errc::bad_config, "population must be even and at least 2");
  if (cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0)
    raise(Errc::bad_config, "mutation_rate must be in [0, 1]");
  bool has_cover = false, has_stego = false;
  for (const FeatureVector& fv : data) {
    has_cover |= fv.label == Label::cover;
    has_stego |= fv.label == Label::stego;
  }
  if (!has_cover || !has_stego) raise(Errc::single_class, "need both classes for selection");

  Rng rng(cfg.seed);
  Fitness fitness{data, cfg, derive_seed(cfg.seed, 0xF17), {}};

  std::vector<Mask> pop(cfg.population, Mask(kFeatureDim, 0));
  for (Mask& m : pop)
    for (uint8_t& bit : m) bit = static_cast<uint8_t>(rng.bit());

  std::vector<double> fit(pop.size());
  for (size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);

  const auto best_index = [&]() {
    size_t best = 0;
    for (size_t i = 1; i < pop.size(); ++i)
      if (fit[i] > fit[best]) best = i;
    return best;
  };
  Mask best_mask = pop[best_index()];
  double best_fit = fit[best_index()];

  const auto tournament = [&]() -> const Mask& {
    const size_t a = rng.below(pop.size());
    const size_t b = rng.below(pop.size());
    return fit[a] >= fit[b] ? pop[a] : pop[b];
  };

  for (size_t gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Mask> next;
    next.reserve(cfg.population);
    next.push_back(best_mask);  // elitism
    while (next.size() < cfg.population) {
      const Mask& pa = tournament();
      const Mask& pb = tournament();
      size_t p1 = rng.below(kFeatureDim + 1);
      size_t p2 = rng.below(kFeatureDim + 1);
      if (p1 > p2) std::swap(p1, p2);
      Mask c1 = pa, c2 = pb;
      for (size_t d = p1; d < p2; ++d) std::swap(c1[d], c2[d]);
      for (Mask* child : {&c1, &c2})
        for (uint8_t& bit : *child)
          if (rng.unit() < cfg.mutation_rate) bit ^= 1;
      next.push_back(std::move(c1));
      if (next.size() < cfg.population) next.push_back(std::move(c2));
    }
    pop = std::move(next);
    for (size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i]);
    const size_t b = best_index();
    if (fit[b] > best_fit) {
      best_fit = fit[b];
      best_mask = pop[b];
    }
  }
  return best_mask;
}

}  // namespace rmsteg
