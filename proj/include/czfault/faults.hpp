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

// Fault models for the CZ gate and their circuit-level channels.
//
// Coherent faults: ratio, bias and truncation errors in the pulse, and the
// missing gate (idling under the static ZZ shift). Incoherent faults: state
// leakage through the generator S' with U' = U exp(iS'), and decoherence.

#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "czfault/circuits.hpp"
#include "czfault/core.hpp"
#include "czfault/device.hpp"
#include "czfault/pulses.hpp"

namespace czfault {

enum class FaultKind {
  kRatio,
  kBias,
  kTruncation,
  kMissingGate,
  kLeakage,
  kDecoherence
};

std::string_view to_string(FaultKind kind);
FaultKind parse_fault_kind(std::string_view name);

// target_gate value selecting every CZ of a circuit.
inline constexpr long kAllGates = -1;

struct LeakageParams {
  std::array<double, 3> chi{};
  std::array<double, 4> zeta{};
  std::array<double, 3> phi{};
};

struct FaultSpec {
  FaultKind kind = FaultKind::kRatio;
  long target_gate = kAllGates;  // circuit position of a CZ, or kAllGates
  double magnitude = 0.0;        // epsilon for ratio, bias, truncation
  int coefficient = 1;           // n of lambda_n for ratio and bias
  LeakageParams leakage;
  DecoherenceParams decoherence;

  // Throws std::invalid_argument for epsilon outside [0, 0.5], a
  // coefficient below 1 or leakage magnitudes above 0.1.
  void validate() const;
  // Short tag such as "ratio-l1", "truncation" or "missing".
  std::string label() const;
};

struct FaultUniverse {
  int cz_count = 0;
  int fourier_terms = 0;
  std::vector<FaultSpec> faults;

  std::size_t pulse_fault_count() const;
};

// ratio: lambda_n *= 1 + eps; bias: lambda_n += eps * lambda_1; truncation:
// the schedule is kept and the pulse is cut at (1 - eps) t_gate. Throws
// UnsupportedShapeError for non-Fourier pulses and std::invalid_argument for
// other fault kinds.
Pulse apply_parameter_fault(const Pulse& p, const FaultSpec& f);

// diag(1, 1, 1, exp(i zeta t)).
Operator missing_gate_unitary(double zeta, double t);

// 6x6 Hermitian generator on |00>, |01>, |02>, |10>, |11>, |20>.
Operator leakage_generator(const LeakageParams& params);

// u * exp(i s).
Operator noisy_gate_from_leakage(const Operator& u, const Operator& s);

// tr((e^{iS})^dag e^{iS}) / d^2; equals 1/d for every Hermitian S.
double leakage_trace_diagnostic(const Operator& s);

// Ideal CZ on the six-level leakage basis (identity on |02> and |20>).
Operator cz_leakage_basis();

// Per CZ: ratio and bias on each of m coefficients, truncation, missing
// gate. All magnitudes are set to `magnitude`.
FaultUniverse enumerate_faults(const Circuit& c, int m,
                               double magnitude = 0.1);

// kind,target_gate,coefficient,magnitude rows.
void write_fault_universe_csv(std::ostream& os, const FaultUniverse& u);

// The calibrated CZ gate at pulse level.
struct CzModel {
  DeviceParams device;
  Pulse pulse;
  GateFrame frame;
  GateSimOptions sim;
  Operator correction;     // virtual-Z of the fault-free pulse
  double nominal_phase = 0.0;

  static CzModel from_pulse(const DeviceParams& dev, const Pulse& pulse,
                            const GateSimOptions& sim = {});
};

struct FaultyGate {
  Operator u4;  // projected, virtual-Z re-fitted to the faulty gate
  double fidelity = 0.0;             // of u4 vs CZ
  double fixed_frame_fidelity = 0.0; // keeping the fault-free virtual-Z
  double phase_error = 0.0;          // wrapped change of conditional phase
};

// Coherent faults (ratio, bias, truncation, missing gate, leakage). Single
// qubit phases are absorbed by virtual-Z as for a calibrated gate, so only
// conditional-phase and leakage errors remain.
FaultyGate faulty_cz(const CzModel& model, const FaultSpec& f);

// Two-qubit channel of the CZ under the fault. Decoherence faults evolve the
// fault-free pulse under the Lindblad equation.
GateChannel faulty_cz_channel(const CzModel& model, const FaultSpec& f);

// Superoperator of the calibrated pulse under decoherence, in the gate frame
// and restricted to the computational subspace.
Operator decoherent_cz_superoperator(const CzModel& model,
                                     const DecoherenceParams& dec);

// Memoizes faulty_cz_channel; safe to share between threads.
class ChannelCache {
 public:
  explicit ChannelCache(CzModel model) : model_(std::move(model)) {}

  const GateChannel& get(const FaultSpec& f);
  const CzModel& model() const { return model_; }

 private:
  CzModel model_;
  std::mutex mu_;
  std::map<std::string, GateChannel> cache_;
};

// Channels for every CZ hit by the fault. Throws std::invalid_argument when
// the target is not a CZ position.
GateChannelMap fault_channel_map(const Circuit& c, const FaultSpec& f,
                                 ChannelCache& cache);

}  // namespace czfault
