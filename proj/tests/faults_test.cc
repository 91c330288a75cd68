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

#include "czfault/faults.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "czfault/metrics.hpp"

namespace czfault {
namespace {

using std::numbers::pi;

// One calibrated Fourier-2 gate shared by the tests below.
const CzModel& model() {
  static const CzModel m = [] {
    const DeviceParams d = DeviceParams::defaults();
    CalibrationOptions o;
    o.t_lo = o.t_hi = ns(200.0);
    const CalibrationResult r = calibrate(PulseShape::kFourier2, d, o);
    return CzModel::from_pulse(d, r.pulse);
  }();
  return m;
}

TEST(MissingGate, PeriodAndCz) {
  const double zeta = -2 * pi * 0.665e6;
  const double period = 2 * pi / std::abs(zeta);
  EXPECT_LE(max_abs(missing_gate_unitary(zeta, period) -
                    Operator::Identity(4, 4)),
            1e-12);
  const Operator half = missing_gate_unitary(zeta, period / 2);
  EXPECT_LE(max_abs(half - gates::cz()), 1e-12);
}

TEST(MissingGate, Composition) {
  const double zeta = 2 * pi * 1.3e6;
  const Operator a = missing_gate_unitary(zeta, ns(30.0));
  const Operator b = missing_gate_unitary(zeta, ns(55.0));
  EXPECT_LE(max_abs(a * b - missing_gate_unitary(zeta, ns(85.0))), 1e-12);
}

TEST(Leakage, GeneratorShape) {
  EXPECT_LE(max_abs(leakage_generator({})), 0.0);
  LeakageParams p;
  p.chi = {0.01, 0.02, 0.03};
  p.zeta = {0.01, -0.02, 0.005, 0.0};
  p.phi = {0.3, 1.0, -2.0};
  const Operator s = leakage_generator(p);
  EXPECT_EQ(s.rows(), 6);
  EXPECT_TRUE(is_hermitian(s, 1e-15));
  EXPECT_NEAR(leakage_trace_diagnostic(s), 1.0 / 6.0, 1e-12);
}

TEST(Leakage, ComputationalBlockIsSubunitary) {
  LeakageParams p;
  p.chi = {0.0, 0.0, 0.05};
  const Operator u6 =
      noisy_gate_from_leakage(cz_leakage_basis(), leakage_generator(p));
  EXPECT_TRUE(is_unitary(u6, 1e-12));
  // |11> (index 4) keeps amplitude cos(chi) and leaks sin(chi) to |20>.
  EXPECT_NEAR(std::abs(u6(4, 4)), std::cos(0.05), 1e-12);
  EXPECT_NEAR(std::abs(u6(5, 4)), std::sin(0.05), 1e-12);
}

TEST(Leakage, FidelityClosedForm) {
  FaultSpec f;
  f.kind = FaultKind::kLeakage;
  f.leakage.chi = {0.0, 0.0, 0.05};
  const FaultyGate g = faulty_cz(model(), f);
  // u4 = CZ with -cos(chi) on |11>: F = (3 + cos chi)^2 / 16.
  EXPECT_NEAR(g.fidelity, std::pow(3.0 + std::cos(0.05), 2) / 16.0, 1e-12);
}

TEST(Leakage, SecondOrderDrop) {
  FaultSpec f;
  f.kind = FaultKind::kLeakage;
  f.leakage.chi = {0.01, 0.01, 0.01};
  f.leakage.zeta = {0.01, 0.01, 0.01, 0.01};
  f.leakage.phi = {0.01, 0.01, 0.01};
  const double drop = 1.0 - faulty_cz(model(), f).fidelity;
  EXPECT_GT(drop, 0.0);
  EXPECT_LT(drop, 1e-3);
}

TEST(Enumerate, Counts) {
  const Circuit rnd = decompose_to_cz(build_random_circuit(7));
  const Circuit fa = decompose_to_cz(build_full_adder());
  EXPECT_EQ(enumerate_faults(rnd, 2).faults.size(), 54u);
  EXPECT_EQ(enumerate_faults(fa, 2).faults.size(), 90u);
  EXPECT_EQ(enumerate_faults(Circuit{2, {}}, 2).faults.size(), 0u);
  const Circuit one{2, {{GateKind::kCZ, {0, 1}}}};
  const FaultUniverse u = enumerate_faults(one, 1);
  EXPECT_EQ(u.faults.size(), 4u);
  EXPECT_EQ(u.cz_count, 1);
  EXPECT_EQ(u.pulse_fault_count(), 3u);
  EXPECT_THROW(enumerate_faults(build_full_adder(), 2), std::invalid_argument);
}

TEST(Enumerate, CsvRows) {
  const Circuit one{2, {{GateKind::kCZ, {0, 1}}}};
  std::ostringstream os;
  write_fault_universe_csv(os, enumerate_faults(one, 1));
  int lines = 0;
  for (char c : os.str()) lines += c == '\n';
  EXPECT_EQ(lines, 5);
}

TEST(ParameterFault, Definitions) {
  Pulse p;
  p.family = PulseFamily::kFourier;
  p.lambdas = {2.0, -0.5};
  p.t_gate = p.duration = 1.0;
  FaultSpec f;
  f.magnitude = 0.1;
  f.coefficient = 2;
  f.kind = FaultKind::kRatio;
  EXPECT_NEAR(apply_parameter_fault(p, f).lambdas[1], -0.55, 1e-15);
  f.kind = FaultKind::kBias;
  EXPECT_NEAR(apply_parameter_fault(p, f).lambdas[1], -0.3, 1e-15);
  f.kind = FaultKind::kTruncation;
  const Pulse t = apply_parameter_fault(p, f);
  EXPECT_NEAR(t.duration, 0.9, 1e-15);
  EXPECT_EQ(t.t_gate, 1.0);
  f.kind = FaultKind::kMissingGate;
  EXPECT_THROW(apply_parameter_fault(p, f), std::invalid_argument);
  p.family = PulseFamily::kSquare;
  f.kind = FaultKind::kRatio;
  EXPECT_THROW(apply_parameter_fault(p, f), UnsupportedShapeError);
}

TEST(FaultSpec, Validation) {
  FaultSpec f;
  f.magnitude = 0.6;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f.magnitude = 0.1;
  f.coefficient = 0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f.coefficient = 2;
  EXPECT_EQ(f.label(), "ratio-l2");
  EXPECT_EQ(parse_fault_kind("truncation"), FaultKind::kTruncation);
}

TEST(FaultyCz, ZeroEpsilonUnchanged) {
  FaultSpec f;
  const FaultyGate g = faulty_cz(model(), f);
  EXPECT_LE(max_abs(g.u4 - virtual_z_correction(g.u4) * g.u4), 1e-9);
  EXPECT_GE(g.fidelity, 0.999);
  EXPECT_NEAR(g.phase_error, 0.0, 1e-9);
  EXPECT_NEAR(g.fidelity, g.fixed_frame_fidelity, 1e-9);
}

TEST(FaultyCz, Deterministic) {
  FaultSpec f;
  f.kind = FaultKind::kBias;
  f.magnitude = 0.07;
  f.coefficient = 2;
  EXPECT_EQ(max_abs(faulty_cz(model(), f).u4 - faulty_cz(model(), f).u4), 0.0);
}

TEST(FaultyCz, FidelityMonotoneInRatio) {
  double prev = 2.0;
  for (int k = 0; k <= 5; ++k) {
    FaultSpec f;
    f.magnitude = 0.01 * k;
    const double fid = faulty_cz(model(), f).fidelity;
    EXPECT_LT(fid, prev + 1e-12) << f.magnitude;
    prev = fid;
  }
}

TEST(FaultyCz, MissingGateIsStaticZz) {
  FaultSpec f;
  f.kind = FaultKind::kMissingGate;
  const FaultyGate g = faulty_cz(model(), f);
  const double zeta = static_zz(model().device);
  EXPECT_NEAR(std::remainder(conditional_phase(g.u4) + zeta * model().pulse.t_gate,
                             2 * pi),
              0.0, 1e-9);
  // Diagonal with conditional phase -zeta t instead of pi.
  const double t = model().pulse.t_gate;
  EXPECT_NEAR(g.fidelity, std::norm(3.0 - std::exp(kI * zeta * t)) / 16.0,
              1e-12);
}

TEST(Channel, CoherentFaultIsUnitary) {
  FaultSpec f;
  f.magnitude = 0.1;
  const GateChannel ch = faulty_cz_channel(model(), f);
  ASSERT_EQ(ch.kraus.size(), 1u);
  EXPECT_LE(max_abs(ch.kraus[0] - faulty_cz(model(), f).u4), 0.0);
}

TEST(Channel, MapTargetsCz) {
  ChannelCache cache(model());
  const Circuit c = decompose_to_cz(build_random_circuit(2, 3, 3));
  FaultSpec f;
  f.magnitude = 0.1;
  EXPECT_EQ(fault_channel_map(c, f, cache).size(), 3u);
  f.target_gate = static_cast<long>(c.cz_indices()[1]);
  EXPECT_EQ(fault_channel_map(c, f, cache).size(), 1u);
  f.target_gate = static_cast<long>(c.cz_indices()[1]) + 1;
  EXPECT_THROW(fault_channel_map(c, f, cache), std::invalid_argument);
}

TEST(Decoherence, NearlyTracePreservingOnComputationalInputs) {
  const auto dec = DecoherenceParams::from_t1_t2(us(10.0), us(5.0));
  const Operator s = decoherent_cz_superoperator(model(), dec);
  ASSERT_EQ(s.rows(), 16);
  // Dephasing during the excursion to |20> strands a little population
  // outside the computational subspace; it stays below a percent.
  for (int i = 0; i < 4; ++i) {
    double tr = 0.0;
    for (int k = 0; k < 4; ++k) tr += s(k + 4 * k, i + 4 * i).real();
    EXPECT_LE(tr, 1.0 + 1e-9);
    EXPECT_GT(tr, 0.99);
  }
}

}  // namespace
}  // namespace czfault
