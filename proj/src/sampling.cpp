#include "tokalign/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tokalign/errors.hpp"

namespace tokalign {
namespace {

constexpr double kTopPSlack = 1e-12;

std::size_t checked_argmax(std::span<const double> dist) {
  if (dist.empty()) throw ContractViolation("cannot sample from an empty distribution");
  std::size_t best = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!(dist[i] >= 0.0) || !std::isfinite(dist[i]))
      throw ContractViolation("distribution entry " + std::to_string(i) +
                              " is negative or not finite");
    total += dist[i];
    if (dist[i] > dist[best]) best = i;
  }
  if (total <= 0.0) throw ContractViolation("cannot sample from an all-zero distribution");
  return best;
}

}  // namespace

void validate(const SamplerConfig& cfg) {
  if (!(cfg.top_p > 0.0 && cfg.top_p <= 1.0)) throw ContractViolation("top_p must be in (0, 1]");
  if (!(cfg.temperature > 0.0)) throw ContractViolation("temperature must be > 0");
}

std::vector<double> sampling_distribution(std::span<const double> dist, const SamplerConfig& cfg) {
  const std::size_t best = checked_argmax(dist);
  std::vector<double> out(dist.size(), 0.0);
  if (cfg.mode == SamplingMode::greedy) {
    out[best] = 1.0;
    return out;
  }
  validate(cfg);

  const double log_max = std::log(dist[best]);
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) {
      out[i] = cfg.temperature == 1.0 ? dist[i]
                                      : std::exp((std::log(dist[i]) - log_max) / cfg.temperature);
      total += out[i];
    }
  }
  for (auto& p : out) p /= total;

  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out[a] > out[b]; });
  double cumulative = 0.0;
  std::size_t kept = 0;
  while (kept < order.size() && out[order[kept]] > 0.0) {
    cumulative += out[order[kept]];
    ++kept;
    if (cumulative >= cfg.top_p - kTopPSlack) break;
  }
  for (std::size_t k = kept; k < order.size(); ++k) out[order[k]] = 0.0;
  for (auto& p : out) p /= cumulative;
  return out;
}

TokenId sample(std::span<const double> dist, const SamplerConfig& cfg, Rng& rng) {
  if (cfg.mode == SamplingMode::greedy) return static_cast<TokenId>(checked_argmax(dist));
  const auto kept = sampling_distribution(dist, cfg);
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] <= 0.0) continue;
    cumulative += kept[i];
    last = i;
    if (u < cumulative) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last);
}

}  // namespace tokalign
