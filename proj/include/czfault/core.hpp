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

// Dense complex linear algebra for small Hilbert spaces: operator
// composition, matrix exponentials, tensor embedding and projection onto the
// two-qubit computational subspace of a pair of qutrits.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace czfault {

using Complex = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar = double>
using OperatorT =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar = double>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Operator = OperatorT<double>;
using StateVector = StateVectorT<double>;
// Density matrices share the operator representation; validity is checked by
// validate_density_matrix().
using DensityMatrix = Operator;

inline constexpr double kUnitarityTol = 1e-8;
inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
// Largest operator dimension kron_compose will build (16 qubits).
inline constexpr Index kMaxOperatorDim = Index{1} << 16;

inline constexpr Complex kI{0.0, 1.0};

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Site ordering |i>|j>... -> levels*i + j; site 0 is the most significant.
struct BasisConvention {
  int levels = 3;
  int sites = 2;

  Index dim() const;
  Index index_of(std::span<const int> digits) const;
};

// Two-qutrit indices of |00>, |01>, |10>, |11>.
inline constexpr std::array<Index, 4> kComputationalIndices{0, 1, 3, 4};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  double tol = kHermiticityTol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

// max |U^dagger U - I| <= tol.
template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u,
                double tol = kUnitarityTol) {
  if (u.rows() != u.cols()) return false;
  const auto n = u.rows();
  using Scalar = typename Derived::Scalar;
  return max_abs(u.adjoint() * u -
                 Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::
                     Identity(n, n)) <= tol;
}

// Kronecker product a (x) b.
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron_compose(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  static_assert(std::is_same_v<typename DA::Scalar, typename DB::Scalar>);
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > kMaxOperatorDim || cols > kMaxOperatorDim) {
    throw CapacityError("kron_compose: dimension " + std::to_string(rows) +
                        " exceeds capacity");
  }
  Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(rows,
                                                                        cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// exp(scale * m). Hermitian inputs go through an eigendecomposition; anything
// else through Pade scaling-and-squaring.
Operator expm(const Operator& m, Complex scale = 1.0);

// Exponential of a Hermitian matrix times scale, without the Hermiticity
// check. Used on hot paths where the caller guarantees the structure.
Operator expm_hermitian(const Operator& h, Complex scale);

// Identity on every site except `site`, which carries `op`.
Operator embed(const Operator& op, int site, int sites, int levels);

// Places an operator on an ordered subset of qubits of a `width`-qubit
// register (qubit 0 is the most significant bit).
Operator embed_on_qubits(const Operator& op, std::span<const int> qubits,
                         int width);

// 4x4 block of a two-qutrit operator on rows/cols {|00>,|01>,|10>,|11>}.
// No renormalization: the result is sub-unitary when population leaked.
Operator project_computational(const Operator& u9);

// Throws std::invalid_argument if rho is not Hermitian, unit trace and PSD
// within the given tolerances.
void validate_density_matrix(const DensityMatrix& rho,
                             double hermiticity_tol = kHermiticityTol,
                             double trace_tol = kTraceTol,
                             double psd_tol = 1e-8);

// |psi><psi|.
DensityMatrix pure_state(const StateVector& psi);

// Basis vector |index> of dimension dim.
StateVector basis_state(Index dim, Index index);

namespace gates {
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator hadamard();
Operator rx(double angle);
Operator ry(double angle);
Operator rz(double angle);
Operator cz();
Operator cnot();  // control = first qubit
Operator toffoli();
}  // namespace gates

}  // namespace czfault
