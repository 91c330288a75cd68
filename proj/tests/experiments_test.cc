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

#include "czfault/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "czfault/metrics.hpp"

namespace czfault {
namespace {

RunConfig pinned() {
  RunConfig cfg;
  cfg.t_gate = ns(200.0);
  return cfg;
}

const CzModel& model() {
  static const CzModel m = [] {
    const RunConfig cfg = pinned();
    return CzModel::from_pulse(cfg.device, calibrate_configured(cfg).pulse);
  }();
  return m;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(FitExponential, RecoversSyntheticCurve) {
  std::vector<double> x, y;
  for (int d = 1; d <= 101; d += 4) {
    x.push_back(d);
    y.push_back(0.7 * std::exp(-d / 37.0) + 0.25);
  }
  const ExponentialFit f = fit_exponential(x, y);
  EXPECT_NEAR(f.tau, 37.0, 0.05);
  EXPECT_NEAR(f.a, 0.7, 1e-3);
  EXPECT_NEAR(f.c, 0.25, 1e-3);
  EXPECT_GT(f.r2, 0.999999);
}

TEST(FitExponential, FlatSeries) {
  const std::vector<double> x = {1, 2, 3, 4}, y = {0.5, 0.5, 0.5, 0.5};
  const ExponentialFit f = fit_exponential(x, y);
  EXPECT_TRUE(std::isinf(f.tau));
  EXPECT_DOUBLE_EQ(f.c, 0.5);
  EXPECT_DOUBLE_EQ(f.r2, 1.0);
  EXPECT_THROW(fit_exponential(std::vector<double>{1, 2},
                               std::vector<double>{1, 2}),
               std::invalid_argument);
}

TEST(Spearman, Examples) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{2, 4, 6, 8, 100}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  // No ties: 1 - 6 sum d^2 / (n (n^2 - 1)) with d = (0, 0, 1, -1, 0).
  EXPECT_NEAR(spearman(x, std::vector<double>{1, 2, 4, 3, 5}),
              1.0 - 6.0 * 2.0 / (5.0 * 24.0), 1e-12);
  // Average ranks for ties: Pearson of (1, 2.5, 2.5, 4) and (1, 3, 2, 4).
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 2, 3},
                       std::vector<double>{1, 3, 2, 4}),
              std::sqrt(0.9), 1e-12);
}

TEST(SelectCircuit, Names) {
  const RunConfig cfg;
  EXPECT_EQ(select_circuit("full-adder", cfg).cz_indices().size(), 15u);
  EXPECT_EQ(select_circuit("random", cfg).cz_indices().size(),
            static_cast<std::size_t>(cfg.circuit.cz_count));
  EXPECT_ANY_THROW(select_circuit("qft", cfg));
}

TEST(CalibrateConfigured, PinnedGateTime) {
  EXPECT_DOUBLE_EQ(model().pulse.t_gate, ns(200.0));
  FaultSpec none;
  EXPECT_GE(faulty_cz(model(), none).fidelity, 0.999);
}

TEST(DecoherenceOnlyCz, NoDecayIsIdealCz) {
  const GateChannel ch = decoherence_only_cz(model(), DecoherenceParams{});
  EXPECT_NEAR(process_fidelity(gates::cz(), ch.kraus), 1.0, 1e-8);
}

TEST(DecoherenceOnlyCz, DecayLowersFidelity) {
  const auto dec = DecoherenceParams::from_t1_t2(us(10.0), us(5.0));
  const GateChannel ch = decoherence_only_cz(model(), dec);
  const double f = process_fidelity(gates::cz(), ch.kraus);
  EXPECT_LT(f, 1.0 - 1e-3);
  EXPECT_GT(f, 0.9);
}

TEST(DecoherenceCurve, DecaysWithDepth) {
  RunConfig cfg = pinned();
  cfg.decoherence_bench.depth_min = 1;
  cfg.decoherence_bench.depth_max = 41;
  cfg.decoherence_bench.depth_step = 20;
  cfg.decoherence_bench.samples = 2;
  const auto dec = DecoherenceParams::from_t1_t2(us(10.0), us(5.0));
  const auto pts = decoherence_curve(cfg, model(), dec);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_GT(pts[0].fidelity, pts[1].fidelity);
  EXPECT_GT(pts[1].fidelity, pts[2].fidelity);
  const auto again = decoherence_curve(cfg, model(), dec);
  EXPECT_EQ(again[2].fidelity, pts[2].fidelity);
}

TEST(DecoherenceCurve, FitsExponentialAtDefaultCoherence) {
  RunConfig cfg = pinned();
  cfg.decoherence_bench.depth_max = 61;
  cfg.decoherence_bench.depth_step = 10;
  cfg.decoherence_bench.samples = 2;
  const auto pts = decoherence_curve(cfg, model(), cfg.decoherence);
  std::vector<double> d, f;
  for (const auto& p : pts) {
    d.push_back(p.depth);
    f.push_back(p.fidelity);
  }
  const ExponentialFit fit = fit_exponential(d, f);
  EXPECT_GE(fit.r2, 0.98);
  EXPECT_GT(fit.tau, 0.0);
}

TEST(Testgen, RepetitionsFallWithNoise) {
  RunConfig cfg = pinned();
  cfg.testgen.circuits = {"random"};
  cfg.testgen.kinds.clear();
  ChannelCache cache(model());
  std::vector<double> eps, reps;
  for (const auto& e : run_testgen(cfg, cache)) {
    if (!e.all_cz) continue;
    const auto best = best_per_fault(e);
    ASSERT_EQ(best.size(), 1u);
    ASSERT_TRUE(best[0].detectable()) << e.name;
    eps.push_back(e.epsilon);
    reps.push_back(static_cast<double>(best[0].repetitions));
  }
  ASSERT_EQ(eps.size(), 4u);
  EXPECT_LT(spearman(eps, reps), -0.9);
}

TEST(Commands, EnumerateCounts) {
  const CommandOutput out = cmd_enumerate(RunConfig{});
  const OutputFile* fa = out.find("faults_full-adder.csv");
  const OutputFile* rnd = out.find("faults_random.csv");
  ASSERT_NE(fa, nullptr);
  ASSERT_NE(rnd, nullptr);
  EXPECT_EQ(count_lines(fa->content), 91);
  EXPECT_EQ(count_lines(rnd->content), 55);
  EXPECT_NE(out.find("fault_counts.json"), nullptr);
}

TEST(Commands, UnknownRejected) {
  EXPECT_THROW(run_command("frobnicate", RunConfig{}), std::invalid_argument);
}

TEST(Commands, GateSimIsDeterministic) {
  RunConfig cfg = pinned();
  cfg.gate_sim.waveform_samples = 21;
  const CommandOutput a = cmd_gate_sim(cfg);
  const CommandOutput b = cmd_gate_sim(cfg);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) {
    EXPECT_EQ(a.files[k].content, b.files[k].content) << a.files[k].name;
  }
  const OutputFile* wf = a.find("waveform.csv");
  ASSERT_NE(wf, nullptr);
  EXPECT_EQ(count_lines(wf->content), 22);
}

TEST(WriteOutputs, SidecarPerCsv) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "czfault_outputs_test";
  fs::remove_all(dir);
  CommandOutput out{"enumerate", {{"a.csv", "x\n1\n"}, {"b.json", "{}"}}};
  write_outputs(dir.string(), out, RunConfig{}, 0.5);
  EXPECT_TRUE(fs::exists(dir / "a.csv"));
  EXPECT_TRUE(fs::exists(dir / "a.csv.meta.json"));
  EXPECT_FALSE(fs::exists(dir / "b.json.meta.json"));
  std::ifstream in(dir / "a.csv.meta.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find(RunConfig{}.hash()), std::string::npos);
  EXPECT_NE(ss.str().find("tool_version"), std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace czfault
