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

#include "czfault/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace czfault {
namespace {

constexpr double kClamp = 1e-12;

Operator hermitian_sqrt(const Operator& m) {
  const Operator h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  Eigen::VectorXd roots = es.eigenvalues();
  for (Index i = 0; i < roots.size(); ++i) {
    roots(i) = roots(i) < kClamp ? 0.0 : std::sqrt(roots(i));
  }
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

void check_square_pair(const Operator& a, const Operator& b,
                       const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_square_pair(rho, sigma, "state_fidelity");
  validate_density_matrix(rho);
  validate_density_matrix(sigma);
  const Operator root = hermitian_sqrt(rho);
  const Operator inner = root * sigma * root;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (inner + inner.adjoint()),
                                             Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double mu = es.eigenvalues()(i);
    if (mu > kClamp) s += std::sqrt(mu);
  }
  return s * s;
}

double gate_fidelity(const Operator& u_ideal, const Operator& u_real) {
  check_square_pair(u_ideal, u_real, "gate_fidelity");
  const double d = static_cast<double>(u_ideal.rows());
  return std::norm((u_ideal.adjoint() * u_real).trace()) / (d * d);
}

double process_fidelity(const Operator& u_ideal,
                        const std::vector<Operator>& kraus) {
  double total = 0.0;
  for (const auto& k : kraus) total += gate_fidelity(u_ideal, k);
  return total;
}

double conditional_phase(const Operator& u4) {
  if (u4.rows() != 4 || u4.cols() != 4) {
    throw std::invalid_argument("conditional_phase: expected 4x4");
  }
  return std::arg(u4(0, 0) * u4(3, 3) / (u4(1, 1) * u4(2, 2)));
}

Operator virtual_z_correction(const Operator& u4) {
  if (u4.rows() != 4 || u4.cols() != 4) {
    throw std::invalid_argument("virtual_z_correction: expected 4x4");
  }
  const double tb = -std::arg(u4(1, 1) / u4(0, 0));
  const double ta = -std::arg(u4(2, 2) / u4(0, 0));
  Operator z = Operator::Zero(4, 4);
  z(0, 0) = 1.0;
  z(1, 1) = std::exp(kI * tb);
  z(2, 2) = std::exp(kI * ta);
  z(3, 3) = std::exp(kI * (ta + tb));
  return z;
}

double phase_corrected_gate_fidelity(const Operator& u4) {
  return gate_fidelity(gates::cz(), virtual_z_correction(u4) * u4);
}

FidelityReport state_fidelity_report(const DensityMatrix& rho,
                                     const DensityMatrix& sigma) {
  return {state_fidelity(rho, sigma), FidelityKind::kState, rho.rows()};
}

FidelityReport gate_fidelity_report(const Operator& u_ideal,
                                    const Operator& u_real) {
  return {gate_fidelity(u_ideal, u_real), FidelityKind::kGate, u_ideal.rows()};
}

}  // namespace czfault
