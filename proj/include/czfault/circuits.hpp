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

// Gate-level circuits and density-matrix simulation. Qubit 0 is the most
// significant bit of a basis index.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "czfault/core.hpp"
#include "czfault/device.hpp"

namespace czfault {

enum class GateKind { kH, kX, kRx, kRy, kRz, kCZ, kCNOT, kToffoli };

std::string_view to_string(GateKind kind);
GateKind parse_gate_kind(std::string_view name);
int arity(GateKind kind);

struct Gate {
  GateKind kind = GateKind::kH;
  std::vector<int> qubits;  // controls first, target last
  double angle = 0.0;       // Rx, Ry, Rz only

  bool operator==(const Gate&) const = default;
};

// 2^k x 2^k matrix of the gate on its own qubits, in the order listed.
Operator gate_matrix(const Gate& gate);

struct Circuit {
  int width = 0;
  std::vector<Gate> gates;

  // Positions of the CZ gates, in order.
  std::vector<std::size_t> cz_indices() const;
  // True when only single-qubit gates and CZ remain.
  bool is_cz_decomposed() const;
  // Throws std::invalid_argument on bad arity or qubit indices.
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

// a, b, c_in, c_out on qubits 0..3. For input |a, b, c_in, 0> the sum ends
// on the c_in wire and the carry on c_out; a and b are restored.
Circuit build_full_adder();

// Alternating layers of random Rx/Ry/Rz(pi/4) on every qubit and one CZ on a
// random adjacent pair until n_cz CZ gates are placed, closed by a final
// rotation layer.
Circuit build_random_circuit(std::uint64_t seed, int width = 4, int n_cz = 9);

// Two qubits, `depth` layers of two random rotations and one CNOT with a
// random control.
Circuit build_decoherence_benchmark(std::uint64_t seed, int depth);

// CNOT(c, t) -> H(t) CZ(c, t) H(t); Toffoli -> six CNOTs with T-type Rz
// rotations, then CNOT -> CZ. Equal to the input up to a global phase.
Circuit decompose_to_cz(const Circuit& c);

// Product of the gate matrices.
Operator circuit_unitary(const Circuit& c);

// A completely positive map on the qubits of one gate.
struct GateChannel {
  std::vector<Operator> kraus;

  static GateChannel unitary(const Operator& u);
  // Kraus operators from the Choi matrix of a column-stacking superoperator.
  // Eigenvalues below 1e-12 are dropped.
  static GateChannel from_superoperator(const Operator& s);
  // sum_k conj(K) (x) K.
  Operator superoperator() const;
  Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
};

// Gate position -> channel. Unmapped positions use the ideal gate.
using GateChannelMap = std::map<std::size_t, GateChannel>;

// Qubit-level T1/T2 decay applied to qubits while other gates run.
struct IdleNoise {
  DecoherenceParams decoherence;
  double single_qubit_time = ns(20.0);
  double cz_time = ns(40.0);
};

// Amplitude damping for time t followed by phase flips, matching
// populations exp(-t/t1) and coherence exp(-t/t2) of a qubit.
GateChannel qubit_decay_channel(const DecoherenceParams& dec, double t);

// Final density matrix for a basis input. With `idle` set, every gate is
// followed by decay of the qubits it does not act on (and of its own qubits
// for ideal single-qubit gates) for the gate duration.
DensityMatrix simulate_density(const Circuit& c, Index input,
                               const GateChannelMap& channels,
                               const IdleNoise* idle = nullptr);

// Computational-basis output distribution. Population lost from the
// computational subspace is discarded and the remainder renormalized.
std::vector<double> simulate_distribution(const Circuit& c, Index input,
                                          const GateChannelMap& channels,
                                          const IdleNoise* idle = nullptr);

// Superoperator of the whole circuit (width <= 3).
Operator circuit_superoperator(const Circuit& c,
                               const GateChannelMap& channels,
                               const IdleNoise* idle = nullptr);

std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(std::string_view json);

// bitstring,probability rows.
void write_distribution_csv(std::ostream& os, const std::vector<double>& p,
                            int width);

}  // namespace czfault
