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

#include "czfault/core.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace czfault {

Index BasisConvention::dim() const {
  Index d = 1;
  for (int s = 0; s < sites; ++s) d *= levels;
  return d;
}

Index BasisConvention::index_of(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != sites) {
    throw std::invalid_argument("BasisConvention: wrong number of digits");
  }
  Index idx = 0;
  for (int d : digits) {
    if (d < 0 || d >= levels) {
      throw std::out_of_range("BasisConvention: level out of range");
    }
    idx = idx * levels + d;
  }
  return idx;
}

Operator expm_hermitian(const Operator& h, Complex scale) {
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Eigen::VectorXcd phases =
      (scale * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

Operator expm(const Operator& m, Complex scale) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("expm: matrix must be square");
  }
  if (!m.allFinite() || !std::isfinite(scale.real()) ||
      !std::isfinite(scale.imag())) {
    throw std::domain_error("expm: non-finite input");
  }
  if (m.rows() == 0) return m;
  if (is_hermitian(m, 1e-14 * std::max(1.0, max_abs(m)))) {
    // Symmetrize so round-off does not leak into the eigensolver.
    const Operator h = 0.5 * (m + m.adjoint());
    return expm_hermitian(h, scale);
  }
  const Operator a = scale * m;
  return a.exp();
}

Operator embed(const Operator& op, int site, int sites, int levels) {
  if (sites <= 0 || site < 0 || site >= sites) {
    throw std::out_of_range("embed: site out of range");
  }
  if (op.rows() != levels || op.cols() != levels) {
    throw std::invalid_argument("embed: operator dimension != levels");
  }
  Operator out = Operator::Identity(1, 1);
  const Operator id = Operator::Identity(levels, levels);
  for (int s = 0; s < sites; ++s) {
    out = kron_compose(out, s == site ? op : id);
  }
  return out;
}

Operator embed_on_qubits(const Operator& op, std::span<const int> qubits,
                         int width) {
  const int k = static_cast<int>(qubits.size());
  if (op.rows() != (Index{1} << k) || op.cols() != op.rows()) {
    throw std::invalid_argument("embed_on_qubits: operator size mismatch");
  }
  for (int i = 0; i < k; ++i) {
    if (qubits[i] < 0 || qubits[i] >= width) {
      throw std::out_of_range("embed_on_qubits: qubit out of range");
    }
    for (int j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) {
        throw std::invalid_argument("embed_on_qubits: repeated qubit");
      }
    }
  }
  const Index dim = Index{1} << width;
  Index mask = 0;
  for (int q : qubits) mask |= Index{1} << (width - 1 - q);
  auto sub_index = [&](Index full) {
    Index s = 0;
    for (int q : qubits) s = (s << 1) | ((full >> (width - 1 - q)) & 1);
    return s;
  };
  auto with_sub = [&](Index rest, Index sub) {
    Index full = rest;
    for (int i = 0; i < k; ++i) {
      const Index bit = (sub >> (k - 1 - i)) & 1;
      full |= bit << (width - 1 - qubits[i]);
    }
    return full;
  };
  Operator out = Operator::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const Index rest = col & ~mask;
    const Index sc = sub_index(col);
    for (Index sr = 0; sr < op.rows(); ++sr) {
      const Complex v = op(sr, sc);
      if (v != Complex{0.0, 0.0}) out(with_sub(rest, sr), col) = v;
    }
  }
  return out;
}

Operator project_computational(const Operator& u9) {
  if (u9.rows() != 9 || u9.cols() != 9) {
    throw std::invalid_argument("project_computational: expected 9x9");
  }
  Operator out(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out(r, c) = u9(kComputationalIndices[r], kComputationalIndices[c]);
    }
  }
  return out;
}

void validate_density_matrix(const DensityMatrix& rho, double hermiticity_tol,
                             double trace_tol, double psd_tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("density matrix must be square, non-empty");
  }
  if (!rho.allFinite()) {
    throw std::invalid_argument("density matrix has non-finite entries");
  }
  if (!is_hermitian(rho, hermiticity_tol)) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > trace_tol) {
    throw std::invalid_argument("density matrix trace != 1");
  }
  const Operator h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

DensityMatrix pure_state(const StateVector& psi) { return psi * psi.adjoint(); }

StateVector basis_state(Index dim, Index index) {
  if (index < 0 || index >= dim) {
    throw std::out_of_range("basis_state: index out of range");
  }
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

namespace gates {

Operator pauli_x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Operator pauli_y() {
  Operator m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Operator pauli_z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Operator hadamard() {
  Operator m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Operator rx(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Operator m(2, 2);
  m << c, -kI * s, -kI * s, c;
  return m;
}

Operator ry(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Operator m(2, 2);
  m << c, -s, s, c;
  return m;
}

Operator rz(double angle) {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = std::exp(-kI * (angle / 2));
  m(1, 1) = std::exp(kI * (angle / 2));
  return m;
}

Operator cz() {
  Operator m = Operator::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

Operator cnot() {
  Operator m = Operator::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Operator toffoli() {
  Operator m = Operator::Identity(8, 8);
  m(6, 6) = m(7, 7) = 0.0;
  m(6, 7) = m(7, 6) = 1.0;
  return m;
}

}  // namespace gates

}  // namespace czfault
