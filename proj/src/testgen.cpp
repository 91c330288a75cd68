// Copyright 2026 The czfault Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "czfault/testgen.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "czfault/parallel.hpp"

namespace czfault {

void ChiSquareConfig::validate() const {
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw std::invalid_argument("chi-square: quantile must lie in (0, 1)");
  }
  if (trials < 1) throw std::invalid_argument("chi-square: trials < 1");
  if (cap < 1) throw std::invalid_argument("chi-square: cap < 1");
}

PooledBins pool_bins(std::span<const double> expected) {
  PooledBins bins;
  bins.bin_of.assign(expected.size(), -1);
  double pooled = 0.0;
  bool any_pooled = false, any_mass = false;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (expected[j] < 0.0 || !std::isfinite(expected[j])) {
      throw std::domain_error("chi-square: invalid probability");
    }
    if (expected[j] > 0.0) any_mass = true;
    if (expected[j] >= kPoolThreshold) {
      bins.bin_of[j] = static_cast<int>(bins.probs.size());
      bins.probs.push_back(expected[j]);
    } else {
      pooled += expected[j];
      any_pooled = true;
    }
  }
  if (!any_mass) throw std::domain_error("chi-square: all probabilities zero");
  if (any_pooled) {
    const int catch_all = static_cast<int>(bins.probs.size());
    for (int& b : bins.bin_of) {
      if (b < 0) b = catch_all;
    }
    bins.probs.push_back(std::max(pooled, kPoolThreshold));
  }
  return bins;
}

double chi_square_statistic(std::span<const long> counts,
                            std::span<const double> expected, long n) {
  if (counts.size() != expected.size()) {
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  }
  const PooledBins bins = pool_bins(expected);
  std::vector<double> observed(bins.probs.size(), 0.0);
  long total = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0) throw std::invalid_argument("negative count");
    observed[bins.bin_of[j]] += static_cast<double>(counts[j]);
    total += counts[j];
  }
  if (total != n) {
    throw std::invalid_argument("chi_square_statistic: counts do not sum to N");
  }
  double x2 = 0.0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    const double mu = static_cast<double>(n) * bins.probs[b];
    x2 += (observed[b] - mu) * (observed[b] - mu) / mu;
  }
  return x2;
}

double chi_square_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square: dof < 1");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square: dof < 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi-square: p must lie in (0, 1)");
  }
  return 2.0 * boost::math::gamma_p_inv(0.5 * dof, p);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DiscreteSampler::DiscreteSampler(std::span<const double> p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw std::invalid_argument("sampler: negative weight");
    total += p[i];
    if (p[i] > 0.0) last_ = static_cast<int>(i);
  }
  if (!(total > 0.0)) throw std::invalid_argument("sampler: zero weights");
  double acc = 0.0;
  for (double v : p) {
    acc += v / total;
    cdf_.push_back(acc);
  }
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument(
        "chi-square: distributions need equal size >= 2");
  }
}

}  // namespace

TestOutcome min_repetitions(std::span<const double> p_faulty,
                            std::span<const double> p_ideal,
                            const ChiSquareConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  check_pair(p_faulty, p_ideal);
  const PooledBins bins = pool_bins(p_ideal);
  const double threshold = chi_square_quantile(cfg.quantile, bins.dof());
  const DiscreteSampler sample(p_faulty);
  std::vector<double> inv_p(bins.probs.size());
  for (std::size_t b = 0; b < inv_p.size(); ++b) inv_p[b] = 1.0 / bins.probs[b];

  TestOutcome out;
  out.trials = cfg.trials;
  std::vector<long> counts(bins.probs.size());
  double sum_detected = 0.0;
  int detected = 0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    std::fill(counts.begin(), counts.end(), 0);
    // X^2 = sum_b n_b^2 / (N p_b) - N, tracked through s = sum_b n_b^2 / p_b.
    double s = 0.0;
    for (long n = 1; n <= cfg.cap; ++n) {
      const int b = bins.bin_of[sample(rng)];
      s += static_cast<double>(2 * counts[b] + 1) * inv_p[b];
      ++counts[b];
      const double nd = static_cast<double>(n);
      if (s / nd - nd > threshold) {
        sum_detected += nd;
        ++detected;
        break;
      }
    }
  }
  out.detection_rate = static_cast<double>(detected) / cfg.trials;
  if (detected > 0) {
    out.repetitions = static_cast<long>(std::ceil(sum_detected / detected));
  }
  return out;
}

long fixed_n_repetitions(std::span<const double> p_faulty,
                         std::span<const double> p_ideal,
                         const ChiSquareConfig& cfg, std::uint64_t seed,
                         double power) {
  cfg.validate();
  check_pair(p_faulty, p_ideal);
  if (!(power > 0.0 && power <= 1.0)) {
    throw std::invalid_argument("fixed_n_repetitions: power in (0, 1]");
  }
  const PooledBins bins = pool_bins(p_ideal);
  const double threshold = chi_square_quantile(cfg.quantile, bins.dof());
  const DiscreteSampler sample(p_faulty);
  auto reaches_power = [&](long n) {
    int rejected = 0;
    std::vector<double> counts(bins.probs.size());
    for (int trial = 0; trial < cfg.trials; ++trial) {
      std::mt19937_64 rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(n)),
                                   static_cast<std::uint64_t>(trial)));
      std::fill(counts.begin(), counts.end(), 0.0);
      for (long k = 0; k < n; ++k) counts[bins.bin_of[sample(rng)]] += 1.0;
      double x2 = 0.0;
      for (std::size_t b = 0; b < counts.size(); ++b) {
        const double mu = static_cast<double>(n) * bins.probs[b];
        x2 += (counts[b] - mu) * (counts[b] - mu) / mu;
      }
      if (x2 > threshold) ++rejected;
    }
    return rejected >= power * cfg.trials;
  };
  long hi = 1;
  while (hi < cfg.cap && !reaches_power(hi)) hi = std::min(cfg.cap, hi * 2);
  if (!reaches_power(hi)) return kUndetectable;
  long lo = hi / 2;  // lo fails (or is zero)
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (reaches_power(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::optional<std::size_t> best_pattern(std::span<const TestOutcome> outcomes) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].detectable()) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = outcomes[i];
    const auto& b = outcomes[*best];
    if (a.repetitions < b.repetitions ||
        (a.repetitions == b.repetitions && a.pattern < b.pattern)) {
      best = i;
    }
  }
  return best;
}

PatternSweep sweep_patterns(const Circuit& c, const GateChannelMap& faulty,
                            const ChiSquareConfig& cfg, std::uint64_t seed,
                            long fault_id, int workers,
                            std::span<const Index> patterns) {
  std::vector<Index> inputs(patterns.begin(), patterns.end());
  if (inputs.empty()) {
    for (Index i = 0; i < (Index{1} << c.width); ++i) inputs.push_back(i);
  }
  PatternSweep sweep;
  sweep.outcomes.resize(inputs.size());
  const GateChannelMap ideal;
  parallel_for(inputs.size(), workers, [&](std::size_t i) {
    const auto p_ideal = simulate_distribution(c, inputs[i], ideal);
    const auto p_faulty = simulate_distribution(c, inputs[i], faulty);
    const std::uint64_t stream =
        mix_seed(mix_seed(seed, static_cast<std::uint64_t>(inputs[i])),
                 static_cast<std::uint64_t>(fault_id));
    TestOutcome out = min_repetitions(p_faulty, p_ideal, cfg, stream);
    out.pattern = inputs[i];
    out.fault_id = fault_id;
    sweep.outcomes[i] = out;
  });
  sweep.best = best_pattern(sweep.outcomes);
  return sweep;
}

double fault_coverage(const Circuit& c, const FaultUniverse& universe,
                      ChannelCache& cache, std::span<const Index> patterns,
                      long budget, const ChiSquareConfig& cfg,
                      std::uint64_t seed, int workers) {
  if (patterns.empty() || universe.faults.empty()) return 0.0;
  std::vector<char> covered(universe.faults.size(), 0);
  // Characterize channels up front so worker threads only read the cache.
  for (const auto& f : universe.faults) cache.get(f);
  parallel_for(universe.faults.size(), workers, [&](std::size_t k) {
    const GateChannelMap map = fault_channel_map(c, universe.faults[k], cache);
    const PatternSweep sweep = sweep_patterns(
        c, map, cfg, seed, static_cast<long>(k), 1, patterns);
    for (const auto& o : sweep.outcomes) {
      if (o.detectable() && o.repetitions <= budget) covered[k] = 1;
    }
  });
  std::size_t n = 0;
  for (char v : covered) n += v;
  return static_cast<double>(n) / static_cast<double>(universe.faults.size());
}

void write_outcomes_csv(std::ostream& os, std::span<const TestOutcome> rows,
                        int width, bool header) {
  if (header) {
    os << "pattern,fault_id,kind,target_gate,magnitude,repetitions,"
          "detection_rate\n";
  }
  for (const auto& r : rows) {
    for (int b = width - 1; b >= 0; --b) os << ((r.pattern >> b) & 1);
    os << ',' << r.fault_id << ',' << r.fault.label() << ','
       << r.fault.target_gate << ',' << std::setprecision(6)
       << r.fault.magnitude << ',';
    if (r.detectable()) {
      os << r.repetitions;
    } else {
      os << "UNDETECTABLE";
    }
    os << ',' << std::setprecision(6) << r.detection_rate << '\n';
  }
}

}  // namespace czfault
