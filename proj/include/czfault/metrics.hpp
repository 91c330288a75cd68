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

#pragma once

#include <vector>

#include "czfault/core.hpp"

namespace czfault {

enum class FidelityKind { kState, kGate };

struct FidelityReport {
  double value = 0.0;
  FidelityKind kind = FidelityKind::kGate;
  Index dim = 0;
};

// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Square roots go through Hermitian
// eigendecompositions with eigenvalues below 1e-12 clamped to zero.
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// |tr(U_ideal^dag U_real)|^2 / d^2.
double gate_fidelity(const Operator& u_ideal, const Operator& u_real);

// Channel generalization of gate_fidelity for Kraus operators:
// sum_k |tr(U^dag K_k)|^2 / d^2. Reduces to gate_fidelity for one unitary
// Kraus operator.
double process_fidelity(const Operator& u_ideal,
                        const std::vector<Operator>& kraus);

// arg(u00 u11 / (u01 u10)) over the diagonal of a two-qubit gate.
double conditional_phase(const Operator& u4);

// Virtual-Z correction diag(1, e^{i tb}, e^{i ta}, e^{i(ta+tb)}) with
// tb = -arg(u_{01,01}/u_{00,00}) and ta = -arg(u_{10,10}/u_{00,00}).
Operator virtual_z_correction(const Operator& u4);

// gate_fidelity(CZ, virtual_z_correction(u4) * u4).
double phase_corrected_gate_fidelity(const Operator& u4);

FidelityReport state_fidelity_report(const DensityMatrix& rho,
                                     const DensityMatrix& sigma);
FidelityReport gate_fidelity_report(const Operator& u_ideal,
                                    const Operator& u_real);

}  // namespace czfault
