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

// Chi-square detection of faulty output distributions.
//
// Samples are drawn from the faulty distribution and compared with the
// fault-free one through sum_j (n_j - N p_j)^2 / (N p_j). Outcomes whose
// fault-free probability is below 1e-12 share one catch-all bin whose
// probability is floored at 1e-12, so a single impossible outcome rejects.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "czfault/circuits.hpp"
#include "czfault/faults.hpp"

namespace czfault {

struct ChiSquareConfig {
  double quantile = 0.99;
  int trials = 50;
  long cap = 100000;

  void validate() const;
};

inline constexpr double kPoolThreshold = 1e-12;

// Bin assignment after pooling the outcomes with probability below
// kPoolThreshold.
struct PooledBins {
  std::vector<int> bin_of;    // outcome -> bin
  std::vector<double> probs;  // per bin

  int dof() const { return static_cast<int>(probs.size()) - 1; }
};

// Throws std::domain_error when every probability is zero.
PooledBins pool_bins(std::span<const double> expected);

// Statistic over the pooled bins of `expected` for per-outcome counts
// summing to n.
double chi_square_statistic(std::span<const long> counts,
                            std::span<const double> expected, long n);

// P(X <= x) for X ~ chi^2_dof.
double chi_square_cdf(double x, int dof);
// Inverse of chi_square_cdf.
double chi_square_quantile(double p, int dof);

// splitmix64 finalizer, used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Index drawn from a discrete distribution by inversion of its CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> p);
  template <typename Rng>
  int operator()(Rng& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    int i = 0;
    while (i < last_ && cdf_[i] <= u) ++i;
    return i;
  }

 private:
  std::vector<double> cdf_;
  int last_ = 0;  // last outcome with non-zero probability
};

inline constexpr long kUndetectable = -1;

struct TestOutcome {
  Index pattern = 0;
  long fault_id = -1;
  FaultSpec fault;
  long repetitions = kUndetectable;  // ceil of mean first rejection
  double detection_rate = 0.0;       // trials rejecting before the cap
  int trials = 0;

  bool detectable() const { return repetitions != kUndetectable; }
};

// Sequential test: each trial draws from p_faulty one sample at a time and
// records the first N at which the statistic exceeds the quantile. The
// repetitions are the rounded-up mean over the rejecting trials;
// kUndetectable when every trial reaches the cap.
TestOutcome min_repetitions(std::span<const double> p_faulty,
                            std::span<const double> p_ideal,
                            const ChiSquareConfig& cfg, std::uint64_t seed);

// Fixed-N alternative: the smallest N (up to the cap) at which at least
// `power` of the trials reject with exactly N samples. Searched by doubling
// and bisection; kUndetectable when the cap does not reach the power.
long fixed_n_repetitions(std::span<const double> p_faulty,
                         std::span<const double> p_ideal,
                         const ChiSquareConfig& cfg, std::uint64_t seed,
                         double power = 0.5);

struct PatternSweep {
  std::vector<TestOutcome> outcomes;  // by pattern
  std::optional<std::size_t> best;    // fewest repetitions, lowest pattern

  const TestOutcome* best_outcome() const {
    return best ? &outcomes[*best] : nullptr;
  }
};

// Picks the detectable outcome with the fewest repetitions (ties to the
// lower pattern).
std::optional<std::size_t> best_pattern(std::span<const TestOutcome> outcomes);

// Compares the circuit under `faulty` channels with its fault-free version
// for every basis input (or the given patterns). Seeds are split per
// (pattern, fault_id, trial).
PatternSweep sweep_patterns(const Circuit& c, const GateChannelMap& faulty,
                            const ChiSquareConfig& cfg, std::uint64_t seed,
                            long fault_id = 0, int workers = 1,
                            std::span<const Index> patterns = {});

// Fraction of faults whose repetitions are at most `budget` under at least
// one pattern. An empty pattern set covers nothing.
double fault_coverage(const Circuit& c, const FaultUniverse& universe,
                      ChannelCache& cache, std::span<const Index> patterns,
                      long budget, const ChiSquareConfig& cfg,
                      std::uint64_t seed, int workers = 1);

// pattern,fault_id,kind,magnitude,repetitions,detection_rate rows.
void write_outcomes_csv(std::ostream& os, std::span<const TestOutcome> rows,
                        int width, bool header = true);

}  // namespace czfault
