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
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "czfault/evolution.hpp"
#include "czfault/metrics.hpp"

namespace czfault {

using std::numbers::pi;

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kRatio: return "ratio";
    case FaultKind::kBias: return "bias";
    case FaultKind::kTruncation: return "truncation";
    case FaultKind::kMissingGate: return "missing";
    case FaultKind::kLeakage: return "leakage";
    case FaultKind::kDecoherence: return "decoherence";
  }
  return "?";
}

FaultKind parse_fault_kind(std::string_view name) {
  for (FaultKind k :
       {FaultKind::kRatio, FaultKind::kBias, FaultKind::kTruncation,
        FaultKind::kMissingGate, FaultKind::kLeakage, FaultKind::kDecoherence}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown fault kind: " + std::string(name));
}

void FaultSpec::validate() const {
  switch (kind) {
    case FaultKind::kRatio:
    case FaultKind::kBias:
      if (coefficient < 1) {
        throw std::invalid_argument("fault: coefficient index must be >= 1");
      }
      [[fallthrough]];
    case FaultKind::kTruncation:
      if (!(magnitude >= 0.0 && magnitude <= 0.5)) {
        throw std::invalid_argument("fault: epsilon must lie in [0, 0.5]");
      }
      break;
    case FaultKind::kLeakage:
      for (double v : leakage.chi) {
        if (std::abs(v) > 0.1) throw std::invalid_argument("fault: |chi| > 0.1");
      }
      for (double v : leakage.zeta) {
        if (std::abs(v) > 0.1) throw std::invalid_argument("fault: |zeta| > 0.1");
      }
      break;
    case FaultKind::kDecoherence:
      if (!(decoherence.t1 > 0.0) || !(decoherence.t_phi > 0.0)) {
        throw std::invalid_argument("fault: coherence times must be > 0");
      }
      break;
    case FaultKind::kMissingGate:
      break;
  }
}

std::string FaultSpec::label() const {
  std::string s(to_string(kind));
  if (kind == FaultKind::kRatio || kind == FaultKind::kBias) {
    s += "-l" + std::to_string(coefficient);
  }
  return s;
}

std::size_t FaultUniverse::pulse_fault_count() const {
  std::size_t n = 0;
  for (const auto& f : faults) {
    if (f.kind == FaultKind::kRatio || f.kind == FaultKind::kBias ||
        f.kind == FaultKind::kTruncation) {
      ++n;
    }
  }
  return n;
}

Pulse apply_parameter_fault(const Pulse& p, const FaultSpec& f) {
  if (f.kind != FaultKind::kRatio && f.kind != FaultKind::kBias &&
      f.kind != FaultKind::kTruncation) {
    throw std::invalid_argument("apply_parameter_fault: not a pulse fault");
  }
  if (p.family != PulseFamily::kFourier) {
    throw UnsupportedShapeError(
        "apply_parameter_fault: pulse faults need a Fourier pulse");
  }
  f.validate();
  Pulse out = p;
  if (f.kind == FaultKind::kTruncation) {
    out.duration = p.duration * (1.0 - f.magnitude);
    return out;
  }
  if (f.coefficient > static_cast<int>(p.lambdas.size())) {
    throw std::invalid_argument("apply_parameter_fault: no lambda_" +
                                std::to_string(f.coefficient));
  }
  double& lambda = out.lambdas[f.coefficient - 1];
  if (f.kind == FaultKind::kRatio) {
    lambda *= 1.0 + f.magnitude;
  } else {
    lambda += f.magnitude * p.lambdas[0];
  }
  return out;
}

Operator missing_gate_unitary(double zeta, double t) {
  Operator u = Operator::Identity(4, 4);
  u(3, 3) = std::exp(kI * (zeta * t));
  return u;
}

Operator leakage_generator(const LeakageParams& params) {
  Operator s = Operator::Zero(6, 6);
  s(1, 1) = params.zeta[0];
  s(3, 3) = params.zeta[1];
  s(4, 4) = params.zeta[2];
  s(5, 5) = params.zeta[3];
  auto couple = [&](Index r, Index c, double chi, double phi) {
    s(r, c) = kI * chi * std::exp(kI * phi);
    s(c, r) = std::conj(s(r, c));
  };
  couple(1, 3, params.chi[0], params.phi[0]);
  couple(2, 4, params.chi[1], params.phi[1]);
  couple(4, 5, params.chi[2], params.phi[2]);
  return s;
}

Operator noisy_gate_from_leakage(const Operator& u, const Operator& s) {
  if (u.rows() != s.rows()) {
    throw std::invalid_argument("noisy_gate_from_leakage: size mismatch");
  }
  return u * expm_hermitian(s, kI);
}

double leakage_trace_diagnostic(const Operator& s) {
  const Operator e = expm_hermitian(s, kI);
  const double d = static_cast<double>(s.rows());
  return (e.adjoint() * e).trace().real() / (d * d);
}

Operator cz_leakage_basis() {
  Operator u = Operator::Identity(6, 6);
  u(4, 4) = -1.0;
  return u;
}

FaultUniverse enumerate_faults(const Circuit& c, int m, double magnitude) {
  if (!c.is_cz_decomposed()) {
    throw std::invalid_argument("enumerate_faults: decompose the circuit first");
  }
  if (m < 0) throw std::invalid_argument("enumerate_faults: m < 0");
  FaultUniverse u;
  u.fourier_terms = m;
  for (std::size_t pos : c.cz_indices()) {
    ++u.cz_count;
    const long target = static_cast<long>(pos);
    for (int n = 1; n <= m; ++n) {
      u.faults.push_back({FaultKind::kRatio, target, magnitude, n});
      u.faults.push_back({FaultKind::kBias, target, magnitude, n});
    }
    u.faults.push_back({FaultKind::kTruncation, target, magnitude, 1});
    u.faults.push_back({FaultKind::kMissingGate, target, 0.0, 1});
  }
  return u;
}

void write_fault_universe_csv(std::ostream& os, const FaultUniverse& u) {
  os << "id,kind,target_gate,coefficient,magnitude\n";
  for (std::size_t i = 0; i < u.faults.size(); ++i) {
    const auto& f = u.faults[i];
    os << i << ',' << to_string(f.kind) << ',' << f.target_gate << ',';
    if (f.kind == FaultKind::kRatio || f.kind == FaultKind::kBias) {
      os << f.coefficient;
    }
    os << ',' << f.magnitude << '\n';
  }
}

CzModel CzModel::from_pulse(const DeviceParams& dev, const Pulse& pulse,
                            const GateSimOptions& sim) {
  CzModel m;
  m.device = dev;
  m.pulse = pulse;
  m.frame = GateFrame::from_device(dev);
  m.sim = sim;
  const Operator u4 =
      project_computational(cz_propagator(pulse, dev, m.frame, sim));
  m.correction = virtual_z_correction(u4);
  m.nominal_phase = conditional_phase(u4);
  return m;
}

namespace {

constexpr Index kLeakageComputational[4] = {0, 1, 3, 4};

FaultyGate summarize(const Operator& raw, const Operator& fixed_correction,
                     double nominal_phase) {
  FaultyGate g;
  g.u4 = virtual_z_correction(raw) * raw;
  g.fidelity = gate_fidelity(gates::cz(), g.u4);
  g.fixed_frame_fidelity = gate_fidelity(gates::cz(), fixed_correction * raw);
  g.phase_error =
      std::remainder(conditional_phase(raw) - nominal_phase, 2.0 * pi);
  return g;
}

}  // namespace

FaultyGate faulty_cz(const CzModel& model, const FaultSpec& f) {
  f.validate();
  switch (f.kind) {
    case FaultKind::kRatio:
    case FaultKind::kBias:
    case FaultKind::kTruncation: {
      const Pulse p = apply_parameter_fault(model.pulse, f);
      const Operator u4 = project_computational(
          cz_propagator(p, model.device, model.frame, model.sim));
      return summarize(u4, model.correction, model.nominal_phase);
    }
    case FaultKind::kMissingGate: {
      // In the gate frame idling only advances |11> by -zeta t.
      const Operator u4 =
          missing_gate_unitary(-static_zz(model.device), model.pulse.t_gate);
      return summarize(u4, Operator::Identity(4, 4), model.nominal_phase);
    }
    case FaultKind::kLeakage: {
      const Operator u6 = noisy_gate_from_leakage(
          cz_leakage_basis(), leakage_generator(f.leakage));
      Operator u4(4, 4);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          u4(r, c) = u6(kLeakageComputational[r], kLeakageComputational[c]);
        }
      }
      return summarize(u4, Operator::Identity(4, 4), pi);
    }
    case FaultKind::kDecoherence:
      break;
  }
  throw std::invalid_argument("faulty_cz: decoherence is not a unitary fault");
}

Operator decoherent_cz_superoperator(const CzModel& model,
                                     const DecoherenceParams& dec) {
  const Pulse& p = model.pulse;
  const TimeDependentHamiltonian h = pulse_hamiltonian(
      p, model.device, model.frame, p.t_gate / model.sim.steps_per_gate);
  const Operator& v = model.frame.idle.vectors;
  std::vector<Operator> states;
  for (int b = 0; b < 4; ++b) {
    for (int a = 0; a < 4; ++a) {
      states.push_back(v.col(kComputationalIndices[a]) *
                       v.col(kComputationalIndices[b]).adjoint());
    }
  }
  states = lindblad_split_evolve(h, std::move(states),
                                 collapse_operators(dec, 2), p.duration);
  const Operator w = gate_frame_rotation(model.frame, p.duration);
  Operator s(16, 16);
  for (int col = 0; col < 16; ++col) {
    const Operator y = w * states[col] * w.adjoint();
    for (int d = 0; d < 4; ++d) {
      for (int c = 0; c < 4; ++c) {
        s(c + 4 * d, col) =
            y(kComputationalIndices[c], kComputationalIndices[d]);
      }
    }
  }
  const Operator& z = model.correction;
  return kron_compose(Operator(z.conjugate()), z) * s;
}

GateChannel faulty_cz_channel(const CzModel& model, const FaultSpec& f) {
  if (f.kind == FaultKind::kDecoherence) {
    f.validate();
    return GateChannel::from_superoperator(
        decoherent_cz_superoperator(model, f.decoherence));
  }
  return GateChannel::unitary(faulty_cz(model, f).u4);
}

namespace {

std::string cache_key(const FaultSpec& f) {
  std::ostringstream os;
  os << std::setprecision(17) << f.label() << '|' << f.magnitude;
  if (f.kind == FaultKind::kLeakage) {
    for (double v : f.leakage.chi) os << ',' << v;
    for (double v : f.leakage.zeta) os << ',' << v;
    for (double v : f.leakage.phi) os << ',' << v;
  }
  if (f.kind == FaultKind::kDecoherence) {
    os << ',' << f.decoherence.t1 << ',' << f.decoherence.t_phi;
  }
  return os.str();
}

}  // namespace

const GateChannel& ChannelCache::get(const FaultSpec& f) {
  const std::string key = cache_key(f);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  GateChannel ch = faulty_cz_channel(model_, f);
  std::lock_guard lock(mu_);
  // std::map nodes are stable, so the reference outlives later inserts.
  return cache_.try_emplace(key, std::move(ch)).first->second;
}

GateChannelMap fault_channel_map(const Circuit& c, const FaultSpec& f,
                                 ChannelCache& cache) {
  const auto cz = c.cz_indices();
  GateChannelMap map;
  if (f.target_gate == kAllGates) {
    const GateChannel& ch = cache.get(f);
    for (std::size_t pos : cz) map.emplace(pos, ch);
    return map;
  }
  const auto pos = static_cast<std::size_t>(f.target_gate);
  if (f.target_gate < 0 || std::find(cz.begin(), cz.end(), pos) == cz.end()) {
    throw std::invalid_argument("fault_channel_map: gate " +
                                std::to_string(f.target_gate) +
                                " is not a CZ");
  }
  map.emplace(pos, cache.get(f));
  return map;
}

}  // namespace czfault
