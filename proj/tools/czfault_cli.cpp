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

// czfault: batch front-end for the CZ fault simulator.
//
//   czfault <command> [--config cfg.json] [--out dir] [--seed n] [--workers n]

#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "czfault/config.hpp"
#include "czfault/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int run(const std::string& command, const Flags& flags) {
  czfault::RunConfig cfg = flags.config.empty()
                               ? czfault::RunConfig{}
                               : czfault::RunConfig::from_file(flags.config);
  if (flags.out) cfg.out = *flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.workers) cfg.workers = *flags.workers;

  const auto t0 = std::chrono::steady_clock::now();
  const czfault::CommandOutput out = czfault::run_command(command, cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  czfault::write_outputs(cfg.out, out, cfg, wall);
  for (const auto& f : out.files) {
    std::cout << cfg.out << "/" << f.name << "\n";
  }
  std::cerr << command << ": done in " << wall << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level CZ fault simulation and test generation"};
  app.set_version_flag("--version", czfault::tool_version());
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"calibrate", "Calibrate each pulse shape for the best CZ fidelity"},
      {"fault-sweep", "Conditional-phase error and fidelity versus noise"},
      {"decoherence-bench", "Fidelity versus depth under T1/T2 decay"},
      {"testgen", "Chi-square test repetitions per fault and pattern"},
      {"enumerate", "Dump the pulse and missing-gate fault universe"},
      {"gate-sim", "Simulate one (optionally faulty) CZ gate"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Master seed (u64)");
    sub->add_option("--workers", flags.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
