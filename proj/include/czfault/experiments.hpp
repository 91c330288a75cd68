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

// Experiment drivers behind the command-line subcommands. Each command
// returns its files in memory; write_outputs puts them on disk together with
// a metadata sidecar per CSV.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "czfault/config.hpp"
#include "czfault/faults.hpp"
#include "czfault/testgen.hpp"

namespace czfault {

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandOutput {
  std::string command;
  std::vector<OutputFile> files;

  const OutputFile* find(const std::string& name) const;
};

// Calibrates the configured shape, or only solves the peak angle when the
// gate time is pinned.
CalibrationResult calibrate_configured(const RunConfig& cfg);

// "full-adder", "random" or "file", decomposed to CZ.
Circuit select_circuit(const std::string& name, const RunConfig& cfg);

// F(d) = A exp(-d / tau) + C by least squares. A flat series gives A = 0,
// tau = inf and r2 = 1.
struct ExponentialFit {
  double a = 0.0;
  double tau = 0.0;
  double c = 0.0;
  double r2 = 0.0;
};
ExponentialFit fit_exponential(std::span<const double> x,
                               std::span<const double> y);

// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Decoherence-only CZ channel: the Lindblad superoperator of the pulse with
// its coherent part divided out, followed by the ideal CZ.
GateChannel decoherence_only_cz(const CzModel& model,
                                const DecoherenceParams& dec);

struct DecoherencePoint {
  int depth = 0;
  double fidelity = 0.0;  // process fidelity, averaged over the samples
};
std::vector<DecoherencePoint> decoherence_curve(const RunConfig& cfg,
                                                const CzModel& model,
                                                const DecoherenceParams& dec);

struct TestgenExperiment {
  std::string circuit;
  std::string name;    // e.g. "all-cz-ratio-l1-0.10"
  bool all_cz = true;
  double epsilon = 0.0;
  std::vector<TestOutcome> outcomes;  // every (fault, pattern) pair
};

// Best outcome per fault of an experiment, in fault order.
std::vector<TestOutcome> best_per_fault(const TestgenExperiment& e);

std::vector<TestgenExperiment> run_testgen(const RunConfig& cfg,
                                           ChannelCache& cache);

CommandOutput cmd_calibrate(const RunConfig& cfg);
CommandOutput cmd_fault_sweep(const RunConfig& cfg);
CommandOutput cmd_decoherence_bench(const RunConfig& cfg);
CommandOutput cmd_testgen(const RunConfig& cfg);
CommandOutput cmd_enumerate(const RunConfig& cfg);
CommandOutput cmd_gate_sim(const RunConfig& cfg);

// Dispatches by subcommand name; throws std::invalid_argument when unknown.
CommandOutput run_command(const std::string& command, const RunConfig& cfg);

// Writes the files into `dir` (created when missing) and, for each CSV, a
// <name>.meta.json sidecar with the config hash, tool version and wall time.
void write_outputs(const std::string& dir, const CommandOutput& out,
                   const RunConfig& cfg, double wall_time_s);

std::string tool_version();

}  // namespace czfault
