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

// Run configuration for the command-line front-end.
//
// Frequencies are given in GHz and times in ns or us in the JSON document;
// the parsed structs hold SI angular units like the rest of the library.
// Unknown keys are rejected at every level.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "czfault/device.hpp"
#include "czfault/faults.hpp"
#include "czfault/pulses.hpp"
#include "czfault/testgen.hpp"

namespace czfault {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "full-adder", "random" or "file" (JSON circuit document).
struct CircuitSelection {
  std::string name = "full-adder";
  std::uint64_t seed = 7;  // random circuits
  int width = 4;
  int cz_count = 9;
  std::string file;
};

struct FaultSweepConfig {
  std::vector<FaultKind> kinds = {FaultKind::kRatio, FaultKind::kBias,
                                  FaultKind::kTruncation};
  std::vector<int> coefficients = {1, 2};
  std::vector<double> epsilons = {0.0, 0.05, 0.1, 0.15, 0.2};
};

struct TestgenConfig {
  std::vector<std::string> circuits = {"full-adder", "random"};
  std::vector<double> all_cz_epsilons = {0.05, 0.1, 0.15, 0.2};
  std::vector<double> single_cz_epsilons = {0.1, 0.2};
  std::vector<FaultKind> kinds = {FaultKind::kRatio, FaultKind::kBias,
                                  FaultKind::kTruncation,
                                  FaultKind::kMissingGate};
  FaultKind all_cz_kind = FaultKind::kRatio;
  int coefficient = 1;  // lambda index for ratio and bias
  ChiSquareConfig chi;
};

struct DecoherenceBenchConfig {
  int depth_min = 1;
  int depth_max = 101;
  int depth_step = 4;
  int samples = 4;  // random circuits per depth
  double single_qubit_time = ns(20.0);
};

struct EnumerateConfig {
  std::vector<std::string> circuits = {"full-adder", "random"};
  int fourier_terms = 2;
  double magnitude = 0.1;
};

struct GateSimConfig {
  std::optional<FaultSpec> fault;
  bool waveform = true;
  int waveform_samples = 401;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "out";

  DeviceParams device = DeviceParams::defaults();
  DecoherenceParams decoherence = DecoherenceParams::from_t1_t2(us(100.0),
                                                                us(20.0));
  PulseShape shape = PulseShape::kFourier2;
  std::optional<double> t_gate;  // skips the gate-time search when set
  CalibrationOptions calibration;
  std::vector<PulseShape> calibrate_shapes = {std::begin(kAllPulseShapes),
                                              std::end(kAllPulseShapes)};
  CircuitSelection circuit;
  FaultSweepConfig fault_sweep;
  TestgenConfig testgen;
  DecoherenceBenchConfig decoherence_bench;
  EnumerateConfig enumerate;
  GateSimConfig gate_sim;

  // Throws ConfigError on malformed input or unknown keys. An empty string
  // yields the defaults.
  static RunConfig from_json(std::string_view text);
  static RunConfig from_file(const std::string& path);

  // Canonical JSON with every field spelled out, in config units.
  std::string to_json() const;
  // FNV-1a 64 of to_json(), as 16 hex digits.
  std::string hash() const;
};

FaultSpec fault_spec_from_json(std::string_view text);

}  // namespace czfault
