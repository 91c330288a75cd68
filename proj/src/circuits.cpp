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

#include "czfault/circuits.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace czfault {

using std::numbers::pi;

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kH: return "H";
    case GateKind::kX: return "X";
    case GateKind::kRx: return "Rx";
    case GateKind::kRy: return "Ry";
    case GateKind::kRz: return "Rz";
    case GateKind::kCZ: return "CZ";
    case GateKind::kCNOT: return "CNOT";
    case GateKind::kToffoli: return "Toffoli";
  }
  return "?";
}

GateKind parse_gate_kind(std::string_view name) {
  for (GateKind k : {GateKind::kH, GateKind::kX, GateKind::kRx, GateKind::kRy,
                     GateKind::kRz, GateKind::kCZ, GateKind::kCNOT,
                     GateKind::kToffoli}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate: " + std::string(name));
}

int arity(GateKind kind) {
  switch (kind) {
    case GateKind::kCZ:
    case GateKind::kCNOT: return 2;
    case GateKind::kToffoli: return 3;
    default: return 1;
  }
}

Operator gate_matrix(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::kH: return gates::hadamard();
    case GateKind::kX: return gates::pauli_x();
    case GateKind::kRx: return gates::rx(gate.angle);
    case GateKind::kRy: return gates::ry(gate.angle);
    case GateKind::kRz: return gates::rz(gate.angle);
    case GateKind::kCZ: return gates::cz();
    case GateKind::kCNOT: return gates::cnot();
    case GateKind::kToffoli: return gates::toffoli();
  }
  throw std::logic_error("gate_matrix: unhandled kind");
}

std::vector<std::size_t> Circuit::cz_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i].kind == GateKind::kCZ) out.push_back(i);
  }
  return out;
}

bool Circuit::is_cz_decomposed() const {
  for (const auto& g : gates) {
    if (g.kind == GateKind::kCNOT || g.kind == GateKind::kToffoli) return false;
  }
  return true;
}

void Circuit::validate() const {
  if (width < 0 || width > 6) {
    throw std::invalid_argument("circuit width must be in [0, 6]");
  }
  for (const auto& g : gates) {
    if (static_cast<int>(g.qubits.size()) != arity(g.kind)) {
      throw std::invalid_argument("gate " + std::string(to_string(g.kind)) +
                                  ": wrong qubit count");
    }
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      if (g.qubits[i] < 0 || g.qubits[i] >= width) {
        throw std::invalid_argument("gate qubit out of range");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (g.qubits[i] == g.qubits[j]) {
          throw std::invalid_argument("gate qubits must be distinct");
        }
      }
    }
  }
}

Circuit build_full_adder() {
  constexpr int a = 0, b = 1, cin = 2, cout = 3;
  Circuit c;
  c.width = 4;
  c.gates = {
      {GateKind::kToffoli, {a, b, cout}},
      {GateKind::kCNOT, {a, b}},
      {GateKind::kToffoli, {b, cin, cout}},
      {GateKind::kCNOT, {b, cin}},
      {GateKind::kCNOT, {a, b}},
  };
  return c;
}

namespace {

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

Gate random_rotation(std::mt19937_64& rng, int qubit) {
  static constexpr GateKind kinds[] = {GateKind::kRx, GateKind::kRy,
                                       GateKind::kRz};
  return {kinds[pick(rng, 3)], {qubit}, pi / 4.0};
}

}  // namespace

Circuit build_random_circuit(std::uint64_t seed, int width, int n_cz) {
  if (width < 2 || n_cz < 0) {
    throw std::invalid_argument("build_random_circuit: width >= 2, n_cz >= 0");
  }
  std::mt19937_64 rng(seed);
  Circuit c;
  c.width = width;
  for (int placed = 0; placed < n_cz; ++placed) {
    for (int q = 0; q < width; ++q) c.gates.push_back(random_rotation(rng, q));
    const int q = static_cast<int>(pick(rng, width - 1));
    c.gates.push_back({GateKind::kCZ, {q, q + 1}});
  }
  for (int q = 0; q < width; ++q) c.gates.push_back(random_rotation(rng, q));
  return c;
}

Circuit build_decoherence_benchmark(std::uint64_t seed, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  std::mt19937_64 rng(seed);
  Circuit c;
  c.width = 2;
  for (int layer = 0; layer < depth; ++layer) {
    c.gates.push_back(random_rotation(rng, 0));
    c.gates.push_back(random_rotation(rng, 1));
    const int control = static_cast<int>(pick(rng, 2));
    c.gates.push_back({GateKind::kCNOT, {control, 1 - control}});
  }
  return c;
}

namespace {

void push_cnot_as_cz(std::vector<Gate>& out, int control, int target) {
  out.push_back({GateKind::kH, {target}});
  out.push_back({GateKind::kCZ, {control, target}});
  out.push_back({GateKind::kH, {target}});
}

void push_toffoli(std::vector<Gate>& out, int c1, int c2, int t) {
  const double q = pi / 4.0;
  auto rz = [&](int qubit, double angle) {
    out.push_back({GateKind::kRz, {qubit}, angle});
  };
  out.push_back({GateKind::kH, {t}});
  push_cnot_as_cz(out, c2, t);
  rz(t, -q);
  push_cnot_as_cz(out, c1, t);
  rz(t, q);
  push_cnot_as_cz(out, c2, t);
  rz(t, -q);
  push_cnot_as_cz(out, c1, t);
  rz(c2, q);
  rz(t, q);
  out.push_back({GateKind::kH, {t}});
  push_cnot_as_cz(out, c1, c2);
  rz(c1, q);
  rz(c2, -q);
  push_cnot_as_cz(out, c1, c2);
}

}  // namespace

Circuit decompose_to_cz(const Circuit& c) {
  c.validate();
  Circuit out;
  out.width = c.width;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::kCNOT:
        push_cnot_as_cz(out.gates, g.qubits[0], g.qubits[1]);
        break;
      case GateKind::kToffoli:
        push_toffoli(out.gates, g.qubits[0], g.qubits[1], g.qubits[2]);
        break;
      default:
        out.gates.push_back(g);
    }
  }
  return out;
}

Operator circuit_unitary(const Circuit& c) {
  c.validate();
  const Index dim = Index{1} << c.width;
  Operator u = Operator::Identity(dim, dim);
  for (const auto& g : c.gates) {
    u = embed_on_qubits(gate_matrix(g), g.qubits, c.width) * u;
  }
  return u;
}

GateChannel GateChannel::unitary(const Operator& u) { return {{u}}; }

GateChannel GateChannel::from_superoperator(const Operator& s) {
  const Index d2 = s.rows();
  const Index d = static_cast<Index>(std::llround(std::sqrt(double(d2))));
  if (d * d != d2 || s.cols() != d2) {
    throw std::invalid_argument("from_superoperator: not a d^2 x d^2 matrix");
  }
  // Choi(i d + a, j d + b) = E(|i><j|)_{ab} = S(a + d b, i + d j).
  Operator choi(d2, d2);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
          choi(i * d + a, j * d + b) = s(a + d * b, i + d * j);
        }
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (choi + choi.adjoint()));
  GateChannel ch;
  for (Index k = d2 - 1; k >= 0; --k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda < 1e-12) continue;
    Operator kraus(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index a = 0; a < d; ++a) {
        kraus(a, i) = std::sqrt(lambda) * es.eigenvectors()(i * d + a, k);
      }
    }
    ch.kraus.push_back(std::move(kraus));
  }
  return ch;
}

Operator GateChannel::superoperator() const {
  const Index d = dim();
  Operator s = Operator::Zero(d * d, d * d);
  for (const auto& k : kraus) s += kron_compose(k.conjugate(), k);
  return s;
}

GateChannel qubit_decay_channel(const DecoherenceParams& dec, double t) {
  const double gamma = 1.0 - std::exp(-t / dec.t1);
  const double f = std::exp(-t / dec.t_phi);
  const double p = 0.5 * (1.0 + f);
  Operator k0 = Operator::Zero(2, 2), k1 = Operator::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  const Operator z = gates::pauli_z();
  GateChannel ch;
  for (const Operator& k : {k0, k1}) {
    if (max_abs(k) == 0.0) continue;
    ch.kraus.push_back(std::sqrt(p) * k);
    if (p < 1.0) ch.kraus.push_back(std::sqrt(1.0 - p) * z * k);
  }
  return ch;
}

namespace {

struct Step {
  std::vector<int> qubits;
  const GateChannel* channel;
};

// Flattens the circuit into channel applications, interleaving idle decay.
template <typename Fn>
void for_each_step(const Circuit& c, const GateChannelMap& channels,
                   const IdleNoise* idle, Fn&& fn) {
  c.validate();
  std::optional<GateChannel> decay_1q, decay_cz;
  if (idle && !idle->decoherence.is_coherent()) {
    decay_1q = qubit_decay_channel(idle->decoherence, idle->single_qubit_time);
    decay_cz = qubit_decay_channel(idle->decoherence, idle->cz_time);
  }
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const auto it = channels.find(i);
    GateChannel ideal;
    const GateChannel* ch = nullptr;
    if (it != channels.end()) {
      ch = &it->second;
      if (ch->dim() != (Index{1} << g.qubits.size())) {
        throw std::invalid_argument("channel dimension does not match gate");
      }
    } else {
      ideal = GateChannel::unitary(gate_matrix(g));
      ch = &ideal;
    }
    fn(Step{g.qubits, ch});
    if (!decay_1q) continue;
    const GateChannel& decay = arity(g.kind) == 1 ? *decay_1q : *decay_cz;
    for (int q = 0; q < c.width; ++q) {
      const bool acted = std::find(g.qubits.begin(), g.qubits.end(), q) !=
                         g.qubits.end();
      if (!acted || it == channels.end()) fn(Step{{q}, &decay});
    }
  }
}

}  // namespace

DensityMatrix simulate_density(const Circuit& c, Index input,
                               const GateChannelMap& channels,
                               const IdleNoise* idle) {
  const Index dim = Index{1} << c.width;
  if (input < 0 || input >= dim) {
    throw std::out_of_range("simulate_density: input out of range");
  }
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(input, input) = 1.0;
  for_each_step(c, channels, idle, [&](const Step& s) {
    DensityMatrix next = DensityMatrix::Zero(dim, dim);
    for (const auto& k : s.channel->kraus) {
      const Operator full = embed_on_qubits(k, s.qubits, c.width);
      next.noalias() += full * rho * full.adjoint();
    }
    rho = std::move(next);
  });
  return rho;
}

std::vector<double> simulate_distribution(const Circuit& c, Index input,
                                          const GateChannelMap& channels,
                                          const IdleNoise* idle) {
  const DensityMatrix rho = simulate_density(c, input, channels, idle);
  std::vector<double> p(rho.rows());
  double total = 0.0;
  for (Index i = 0; i < rho.rows(); ++i) {
    p[i] = std::max(0.0, rho(i, i).real());
    total += p[i];
  }
  if (!(total > 1e-12)) {
    throw std::domain_error("simulate_distribution: no population left");
  }
  for (double& v : p) v /= total;
  return p;
}

Operator circuit_superoperator(const Circuit& c,
                               const GateChannelMap& channels,
                               const IdleNoise* idle) {
  if (c.width > 3) {
    throw CapacityError("circuit_superoperator: width > 3");
  }
  const Index dim = Index{1} << c.width;
  Operator s = Operator::Identity(dim * dim, dim * dim);
  for_each_step(c, channels, idle, [&](const Step& step) {
    Operator sg = Operator::Zero(dim * dim, dim * dim);
    for (const auto& k : step.channel->kraus) {
      const Operator full = embed_on_qubits(k, step.qubits, c.width);
      sg += kron_compose(full.conjugate(), full);
    }
    s = sg * s;
  });
  return s;
}

std::string circuit_to_json(const Circuit& c) {
  nlohmann::ordered_json j;
  j["width"] = c.width;
  j["gates"] = nlohmann::ordered_json::array();
  for (const auto& g : c.gates) {
    nlohmann::ordered_json jg;
    jg["name"] = std::string(to_string(g.kind));
    jg["qubits"] = g.qubits;
    if (g.kind == GateKind::kRx || g.kind == GateKind::kRy ||
        g.kind == GateKind::kRz) {
      jg["angle"] = g.angle;
    }
    j["gates"].push_back(jg);
  }
  return j.dump(2);
}

Circuit circuit_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  Circuit c;
  c.width = j.at("width").get<int>();
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = parse_gate_kind(jg.at("name").get<std::string>());
    g.qubits = jg.at("qubits").get<std::vector<int>>();
    g.angle = jg.value("angle", 0.0);
    c.gates.push_back(std::move(g));
  }
  c.validate();
  return c;
}

void write_distribution_csv(std::ostream& os, const std::vector<double>& p,
                            int width) {
  os << "bitstring,probability\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int b = width - 1; b >= 0; --b) os << ((i >> b) & 1);
    os << ',' << p[i] << '\n';
  }
}

}  // namespace czfault
