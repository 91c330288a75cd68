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

// Two coupled transmon qutrits in the dispersive, rotating-wave regime.
// Units: hbar = 1, angular frequencies in rad/s, times in s.

#pragma once

#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "czfault/core.hpp"

namespace czfault {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// GHz (cycles) -> rad/s.
constexpr double ghz(double f) { return kTwoPi * f * 1e9; }
constexpr double mhz(double f) { return kTwoPi * f * 1e6; }
constexpr double ns(double t) { return t * 1e-9; }
constexpr double us(double t) { return t * 1e-6; }

struct DeviceParams {
  double omega1_idle = 0.0;  // control qubit at idle
  double omega2 = 0.0;
  double alpha = 0.0;  // anharmonicity, negative
  double g = 0.0;      // qubit-qubit coupling
  double kappa_inv = 0.0;  // resonator lifetime 1/kappa
  double g_res = 0.0;      // qubit-resonator coupling
  double omega_r = 0.0;

  static DeviceParams defaults();

  // Angular frequency at which |11> and |20> are degenerate.
  double crossing_frequency() const { return omega2 - alpha; }
  // sqrt(2) g, the |11>-|20> matrix element.
  double coupling_11_20() const;

  // Throws std::invalid_argument when alpha >= 0, g <= 0 or values are not
  // finite.
  void validate() const;
};

struct DecoherenceParams {
  double t1 = std::numeric_limits<double>::infinity();
  double t_phi = std::numeric_limits<double>::infinity();

  double t2() const;
  // Solves 1/t2 = 1/(2 t1) + 1/t_phi for t_phi.
  static DecoherenceParams from_t1_t2(double t1, double t2);
  bool is_coherent() const;
};

class LabelingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace qutrit {
// |0><1| + sqrt(2)|1><2|.
Operator lowering();
// |1><1| + 2|2><2|.
Operator number();
}  // namespace qutrit

// Per-site number operators n1 (x) I and I (x) n2 on the two-qutrit space.
Operator site_number(int site);

// Sum_j w_j|1><1| + (2 w_j + alpha)|2><2| + g (J1^dag J2 + J1 J2^dag), with
// w_1 = omega1.
Operator build_hamiltonian(const DeviceParams& dev, double omega1);

// Eigenpairs labeled by the bare state they connect to. energies(k) and
// vectors.col(k) belong to the label with two-qutrit index k (|ij> ->
// 3i + j). Each eigenvector's component on its own label is real positive.
struct LabeledEigensystem {
  Eigen::VectorXd energies;
  Operator vectors;

  double energy(int i, int j) const { return energies(3 * i + j); }
};

// Labels follow the eigenvectors by maximum overlap while omega1 is swept
// from idle to the target in steps of at most g/10. Throws LabelingError
// when no candidate overlaps a previous label by more than 0.5.
LabeledEigensystem eigen_tracked(const DeviceParams& dev, double omega1);

// E_11 - E_10 - E_01 + E_00 at idle.
double static_zz(const DeviceParams& dev);

// Dressed energies of |00>, |01>, |10>, |11> from the excitation-number
// blocks of H: the |11> branch is the middle level of the {02, 11, 20} block,
// which stays continuous through the |11>-|20> avoided crossing.
std::array<double, 4> adiabatic_energies(const DeviceParams& dev,
                                         double omega1);

// kappa * g^2 / detuning^2. Throws std::domain_error on zero detuning.
double purcell_rate(double kappa, double g_res, double detuning);

// 1 / (1/(2 t1) + 1/t_phi); infinities are handled as zero rates.
double total_t2(double t1, double t_phi);

struct CollapseOperator {
  double rate = 0.0;
  Operator op;
};

// Amplitude damping (rate 1/t1, L1) and dephasing (rate 2/t_phi, L2) per
// site. Zero-rate channels are omitted.
std::vector<CollapseOperator> collapse_operators(const DecoherenceParams& dec,
                                                 int sites = 2);

}  // namespace czfault
