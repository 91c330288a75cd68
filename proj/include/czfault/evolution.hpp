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

// Time evolution: midpoint product-formula propagators for coherent dynamics
// and fixed-step RK4 for the Lindblad master equation.

#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "czfault/core.hpp"
#include "czfault/device.hpp"

namespace czfault {

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeDependentHamiltonian {
  std::function<Operator(double)> sampler;
  double t_gate = 0.0;
  double dt = 0.0;
  // Optional partition of the basis into blocks that H(t) never couples.
  // When set, each step exponentiates the blocks independently.
  std::vector<std::vector<Index>> blocks;
};

struct EvolutionResult {
  Operator propagator;                  // unitary path
  std::vector<DensityMatrix> states;    // Lindblad path
  std::vector<double> times;
};

struct PropagationOptions {
  // Re-run with dt/2 and throw StepSizeError if the propagators differ by
  // more than step_tolerance in max-norm.
  bool verify_step = false;
  double step_tolerance = 1e-4;
};

// U = prod_k exp(-i H(t_k + dt/2) dt), later steps multiplied on the left.
// The step is shrunk so an integer number of steps spans [t_begin, t_end].
Operator propagate_unitary(const TimeDependentHamiltonian& h, double t_begin,
                           double t_end);
Operator propagate_unitary(const TimeDependentHamiltonian& h,
                           const PropagationOptions& options = {});

// Fixed-step RK4 on drho/dt = -i[H, rho] + sum_k rate_k D[L_k] rho. Returns
// the state at each entry of `times` (non-decreasing, starting at >= 0; the
// evolution starts at t = 0). Throws StepSizeError when the trace drifts by
// more than 1e-6.
EvolutionResult lindblad_evolve(const TimeDependentHamiltonian& h,
                                const DensityMatrix& rho0,
                                const std::vector<CollapseOperator>& c_ops,
                                const std::vector<double>& times);

// Evolves every |i><j| with i, j drawn from `subspace` over [0, h.t_gate]
// and returns the superoperator restricted to that subspace, in the
// column-stacking convention vec(A X B) = (B^T (x) A) vec(X). The result is
// trace non-increasing when population leaves the subspace.
Operator lindblad_superoperator(const TimeDependentHamiltonian& h,
                                const std::vector<CollapseOperator>& c_ops,
                                std::span<const Index> subspace);

// Second-order splitting exp(D dt/2) U_k exp(D dt/2) per step, where U_k is
// the exact midpoint step of propagate_unitary and D the time-independent
// dissipator, exponentiated once. Each operator in `states` (not required to
// be a density matrix) is advanced from 0 to t_end. Suited to dissipation
// that is weak on the scale of 1/dt.
std::vector<Operator> lindblad_split_evolve(
    const TimeDependentHamiltonian& h, std::vector<Operator> states,
    const std::vector<CollapseOperator>& c_ops, double t_end);

// t, population of every basis state, trace.
void write_trajectory_csv(std::ostream& os, const EvolutionResult& result);

}  // namespace czfault
