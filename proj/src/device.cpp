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

#include "czfault/device.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace czfault {

DeviceParams DeviceParams::defaults() {
  DeviceParams d;
  d.omega1_idle = ghz(6.0);
  d.omega2 = ghz(5.1);
  d.alpha = ghz(-0.3);
  d.g = mhz(20.0);
  d.kappa_inv = ns(160.0);
  d.g_res = mhz(100.0);
  d.omega_r = ghz(7.0);
  return d;
}

double DeviceParams::coupling_11_20() const { return std::sqrt(2.0) * g; }

void DeviceParams::validate() const {
  const double vals[] = {omega1_idle, omega2,  alpha,  g,
                         kappa_inv,   g_res,   omega_r};
  for (double v : vals) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("DeviceParams: non-finite value");
    }
  }
  if (alpha >= 0.0) throw std::invalid_argument("DeviceParams: alpha >= 0");
  if (g <= 0.0) throw std::invalid_argument("DeviceParams: g <= 0");
  if (omega1_idle <= 0.0 || omega2 <= 0.0) {
    throw std::invalid_argument("DeviceParams: frequencies must be positive");
  }
}

double DecoherenceParams::t2() const { return total_t2(t1, t_phi); }

DecoherenceParams DecoherenceParams::from_t1_t2(double t1, double t2) {
  const double inv_phi =
      1.0 / t2 - (std::isinf(t1) ? 0.0 : 1.0 / (2.0 * t1));
  if (inv_phi < 0.0) {
    throw std::invalid_argument("DecoherenceParams: t2 > 2 t1");
  }
  DecoherenceParams d;
  d.t1 = t1;
  d.t_phi = inv_phi == 0.0 ? std::numeric_limits<double>::infinity()
                           : 1.0 / inv_phi;
  return d;
}

bool DecoherenceParams::is_coherent() const {
  return std::isinf(t1) && std::isinf(t_phi);
}

namespace qutrit {

Operator lowering() {
  Operator j = Operator::Zero(3, 3);
  j(0, 1) = 1.0;
  j(1, 2) = std::sqrt(2.0);
  return j;
}

Operator number() {
  Operator n = Operator::Zero(3, 3);
  n(1, 1) = 1.0;
  n(2, 2) = 2.0;
  return n;
}

}  // namespace qutrit

Operator site_number(int site) { return embed(qutrit::number(), site, 2, 3); }

Operator build_hamiltonian(const DeviceParams& dev, double omega1) {
  const double omegas[2] = {omega1, dev.omega2};
  Operator h = Operator::Zero(9, 9);
  for (int s = 0; s < 2; ++s) {
    Operator local = Operator::Zero(3, 3);
    local(1, 1) = omegas[s];
    local(2, 2) = 2.0 * omegas[s] + dev.alpha;
    h += embed(local, s, 2, 3);
  }
  const Operator j1 = embed(qutrit::lowering(), 0, 2, 3);
  const Operator j2 = embed(qutrit::lowering(), 1, 2, 3);
  h += dev.g * (j1.adjoint() * j2 + j1 * j2.adjoint());
  return h;
}

namespace {

struct RawEigen {
  Eigen::VectorXd values;
  Operator vectors;
};

RawEigen diagonalize(const DeviceParams& dev, double omega1) {
  Eigen::SelfAdjointEigenSolver<Operator> es(build_hamiltonian(dev, omega1));
  return {es.eigenvalues(), es.eigenvectors()};
}

// Assigns each label k the eigenvector with the largest overlap against
// reference.col(k). Greedy by descending overlap so labels stay a
// permutation.
LabeledEigensystem assign(const RawEigen& raw, const Operator& reference) {
  const Index n = raw.vectors.cols();
  const Eigen::MatrixXd overlap =
      (reference.adjoint() * raw.vectors).cwiseAbs2();
  std::vector<Index> label_of_vec(n, -1);
  std::vector<bool> label_used(n, false);
  for (Index round = 0; round < n; ++round) {
    double best = -1.0;
    Index bl = -1, bv = -1;
    for (Index l = 0; l < n; ++l) {
      if (label_used[l]) continue;
      for (Index v = 0; v < n; ++v) {
        if (label_of_vec[v] >= 0) continue;
        if (overlap(l, v) > best) {
          best = overlap(l, v);
          bl = l;
          bv = v;
        }
      }
    }
    if (best < 0.5) {
      throw LabelingError(
          "eigen_tracked: ambiguous eigenstate label (overlap " +
          std::to_string(best) + ")");
    }
    label_used[bl] = true;
    label_of_vec[bv] = bl;
  }
  LabeledEigensystem out;
  out.energies.resize(n);
  out.vectors.resize(n, n);
  for (Index v = 0; v < n; ++v) {
    const Index l = label_of_vec[v];
    out.energies(l) = raw.values(v);
    StateVector vec = raw.vectors.col(v);
    // Fix the gauge against the reference column.
    const Complex ov = reference.col(l).dot(vec);
    vec *= std::conj(ov) / std::abs(ov);
    out.vectors.col(l) = vec;
  }
  return out;
}

}  // namespace

LabeledEigensystem eigen_tracked(const DeviceParams& dev, double omega1) {
  if (!std::isfinite(omega1) || !std::isfinite(dev.g)) {
    throw std::invalid_argument("eigen_tracked: non-finite input");
  }
  const double span = omega1 - dev.omega1_idle;
  // Without coupling the bare basis is the eigenbasis everywhere.
  const double max_step = dev.g / 10.0;
  const int steps =
      max_step > 0.0
          ? static_cast<int>(std::ceil(std::abs(span) / max_step))
          : 0;
  const Operator reference = Operator::Identity(9, 9);
  LabeledEigensystem current = assign(
      diagonalize(dev, steps > 0 ? dev.omega1_idle : omega1), reference);
  for (int k = 1; k <= steps; ++k) {
    const double w = dev.omega1_idle + span * k / steps;
    current = assign(diagonalize(dev, w), current.vectors);
  }
  // Re-fix the gauge against the bare basis so each vector has a real
  // positive component on its own label.
  for (Index l = 0; l < 9; ++l) {
    const Complex c = current.vectors(l, l);
    if (std::abs(c) > 0.0) current.vectors.col(l) *= std::conj(c) / std::abs(c);
  }
  return current;
}

double static_zz(const DeviceParams& dev) {
  const auto e = eigen_tracked(dev, dev.omega1_idle);
  return e.energy(1, 1) - e.energy(1, 0) - e.energy(0, 1) + e.energy(0, 0);
}

std::array<double, 4> adiabatic_energies(const DeviceParams& dev,
                                         double omega1) {
  const Operator h = build_hamiltonian(dev, omega1);
  // One-excitation block {|01>, |10>}.
  Eigen::Matrix2cd b1;
  b1 << h(1, 1), h(1, 3), h(3, 1), h(3, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es1(b1,
                                                      Eigen::EigenvaluesOnly);
  // Two-excitation block {|02>, |11>, |20>}.
  const Index idx[3] = {2, 4, 6};
  Eigen::Matrix3cd b2;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) b2(r, c) = h(idx[r], idx[c]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es2(b2,
                                                      Eigen::EigenvaluesOnly);
  // |10> is the upper single-excitation branch while omega1 > omega2, which
  // holds over the whole tuning range.
  const bool q1_above = omega1 > dev.omega2;
  const double e01 = q1_above ? es1.eigenvalues()(0) : es1.eigenvalues()(1);
  const double e10 = q1_above ? es1.eigenvalues()(1) : es1.eigenvalues()(0);
  return {h(0, 0).real(), e01, e10, es2.eigenvalues()(1)};
}

double purcell_rate(double kappa, double g_res, double detuning) {
  if (detuning == 0.0) {
    throw std::domain_error("purcell_rate: zero detuning");
  }
  const double ratio = g_res / detuning;
  return kappa * ratio * ratio;
}

double total_t2(double t1, double t_phi) {
  const double r1 = std::isinf(t1) ? 0.0 : 1.0 / (2.0 * t1);
  const double rphi = std::isinf(t_phi) ? 0.0 : 1.0 / t_phi;
  const double r = r1 + rphi;
  return r == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / r;
}

std::vector<CollapseOperator> collapse_operators(const DecoherenceParams& dec,
                                                 int sites) {
  std::vector<CollapseOperator> out;
  const double relax = std::isinf(dec.t1) ? 0.0 : 1.0 / dec.t1;
  // D[L2] damps the 0-1 coherence at rate/2, so rate 2/t_phi gives exp(-t/t_phi).
  const double dephase = std::isinf(dec.t_phi) ? 0.0 : 2.0 / dec.t_phi;
  for (int s = 0; s < sites; ++s) {
    if (relax > 0.0) {
      out.push_back({relax, embed(qutrit::lowering(), s, sites, 3)});
    }
    if (dephase > 0.0) {
      out.push_back({dephase, embed(qutrit::number(), s, sites, 3)});
    }
  }
  return out;
}

}  // namespace czfault
