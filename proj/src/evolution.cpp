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

#include "czfault/evolution.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace czfault {
namespace {

int step_count(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolution: dt must be > 0");
  if (span <= 0.0) return 0;
  // Guard against 4000.0000001 -> 4001 from round-off.
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

Operator step_exponential(const TimeDependentHamiltonian& h,
                          const Operator& hm, double dt) {
  if (h.blocks.empty()) return expm_hermitian(hm, Complex{0.0, -dt});
  Operator u = Operator::Zero(hm.rows(), hm.cols());
  for (const auto& block : h.blocks) {
    const Index n = static_cast<Index>(block.size());
    if (n == 1) {
      u(block[0], block[0]) =
          std::exp(Complex{0.0, -dt} * hm(block[0], block[0]).real());
      continue;
    }
    Operator sub(n, n);
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) sub(r, c) = hm(block[r], block[c]);
    }
    const Operator e = expm_hermitian(sub, Complex{0.0, -dt});
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) u(block[r], block[c]) = e(r, c);
    }
  }
  return u;
}

void check_hamiltonian(const TimeDependentHamiltonian& h) {
  if (!h.sampler) throw std::invalid_argument("evolution: empty sampler");
  if (!(h.t_gate >= 0.0)) {
    throw std::invalid_argument("evolution: negative t_gate");
  }
}

}  // namespace

Operator propagate_unitary(const TimeDependentHamiltonian& h, double t_begin,
                           double t_end) {
  check_hamiltonian(h);
  const Operator h0 = h.sampler(t_begin);
  const Index dim = h0.rows();
  Operator u = Operator::Identity(dim, dim);
  const int steps = step_count(t_end - t_begin, h.dt);
  if (steps == 0) return u;
  const double dt = (t_end - t_begin) / steps;
  for (int k = 0; k < steps; ++k) {
    const double tm = t_begin + (k + 0.5) * dt;
    u = step_exponential(h, h.sampler(tm), dt) * u;
  }
  return u;
}

Operator propagate_unitary(const TimeDependentHamiltonian& h,
                           const PropagationOptions& options) {
  const Operator u = propagate_unitary(h, 0.0, h.t_gate);
  if (options.verify_step) {
    TimeDependentHamiltonian half = h;
    half.dt = h.dt / 2.0;
    const Operator u_half = propagate_unitary(half, 0.0, h.t_gate);
    const double delta = max_abs(u - u_half);
    if (delta > options.step_tolerance) {
      throw StepSizeError("propagate_unitary: dt-halving changed U by " +
                          std::to_string(delta));
    }
  }
  return u;
}

namespace {

// Applies the Lindblad generator at a fixed Hamiltonian. H_eff = H -
// (i/2) sum rate L^dag L is folded once per stage.
class Liouvillian {
 public:
  explicit Liouvillian(const std::vector<CollapseOperator>& c_ops) {
    for (const auto& c : c_ops) {
      if (c.rate < 0.0) {
        throw std::invalid_argument("lindblad: negative collapse rate");
      }
      if (c.rate == 0.0) continue;
      jumps_.push_back(std::sqrt(c.rate) * c.op);
    }
    if (!jumps_.empty()) {
      const Index n = jumps_.front().rows();
      decay_ = Operator::Zero(n, n);
      for (const auto& l : jumps_) decay_ += l.adjoint() * l;
    }
  }

  void set_hamiltonian(const Operator& h) {
    heff_ = decay_.size() ? Operator(h - 0.5 * kI * decay_) : h;
    heff_adj_ = heff_.adjoint();
  }

  Operator apply(const Operator& rho) const {
    Operator out = -kI * (heff_ * rho - rho * heff_adj_);
    for (const auto& l : jumps_) out.noalias() += l * rho * l.adjoint();
    return out;
  }

 private:
  std::vector<Operator> jumps_;
  Operator decay_;
  Operator heff_;
  Operator heff_adj_;
};

// Advances every matrix in `states` from t to t + dt with classic RK4.
void rk4_step(const TimeDependentHamiltonian& h, Liouvillian& lv, double t,
              double dt, std::vector<Operator>& states) {
  const Operator h0 = h.sampler(t);
  const Operator hm = h.sampler(t + 0.5 * dt);
  const Operator h1 = h.sampler(t + dt);
  for (auto& rho : states) {
    lv.set_hamiltonian(h0);
    const Operator k1 = lv.apply(rho);
    lv.set_hamiltonian(hm);
    const Operator k2 = lv.apply(rho + 0.5 * dt * k1);
    const Operator k3 = lv.apply(rho + 0.5 * dt * k2);
    lv.set_hamiltonian(h1);
    const Operator k4 = lv.apply(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace

EvolutionResult lindblad_evolve(const TimeDependentHamiltonian& h,
                                const DensityMatrix& rho0,
                                const std::vector<CollapseOperator>& c_ops,
                                const std::vector<double>& times) {
  check_hamiltonian(h);
  validate_density_matrix(rho0);
  Liouvillian lv(c_ops);
  EvolutionResult result;
  std::vector<Operator> state{rho0};
  const Complex trace0 = rho0.trace();
  double t = 0.0;
  for (double target : times) {
    if (target < t) {
      throw std::invalid_argument("lindblad_evolve: times must be sorted");
    }
    const int steps = step_count(target - t, h.dt);
    const double dt = steps ? (target - t) / steps : 0.0;
    for (int k = 0; k < steps; ++k) rk4_step(h, lv, t + k * dt, dt, state);
    t = target;
    const double drift = std::abs(state[0].trace() - trace0);
    if (drift > 1e-6) {
      throw StepSizeError("lindblad_evolve: trace drift " +
                          std::to_string(drift));
    }
    result.states.push_back(state[0]);
    result.times.push_back(t);
  }
  return result;
}

Operator lindblad_superoperator(const TimeDependentHamiltonian& h,
                                const std::vector<CollapseOperator>& c_ops,
                                std::span<const Index> subspace) {
  check_hamiltonian(h);
  const Index d = static_cast<Index>(subspace.size());
  const Index full = h.sampler(0.0).rows();
  std::vector<Operator> states;
  states.reserve(d * d);
  // Column-stacking order: input |i><j| sits at column i + d j.
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Operator x = Operator::Zero(full, full);
      x(subspace[i], subspace[j]) = 1.0;
      states.push_back(std::move(x));
    }
  }
  Liouvillian lv(c_ops);
  const int steps = step_count(h.t_gate, h.dt);
  const double dt = steps ? h.t_gate / steps : 0.0;
  for (int k = 0; k < steps; ++k) rk4_step(h, lv, k * dt, dt, states);
  Operator s(d * d, d * d);
  for (Index col = 0; col < d * d; ++col) {
    for (Index b = 0; b < d; ++b) {
      for (Index a = 0; a < d; ++a) {
        s(a + d * b, col) = states[col](subspace[a], subspace[b]);
      }
    }
  }
  return s;
}

std::vector<Operator> lindblad_split_evolve(
    const TimeDependentHamiltonian& h, std::vector<Operator> states,
    const std::vector<CollapseOperator>& c_ops, double t_end) {
  check_hamiltonian(h);
  if (states.empty()) return states;
  const Index n = states.front().rows();
  const int steps = step_count(t_end, h.dt);
  if (steps == 0) return states;
  const double dt = t_end / steps;
  // Column-stacking dissipator: sum rate [conj(L) (x) L - (I (x) L^dag L +
  // (L^dag L)^T (x) I) / 2].
  const Operator eye = Operator::Identity(n, n);
  Operator d = Operator::Zero(n * n, n * n);
  bool dissipative = false;
  for (const auto& c : c_ops) {
    if (c.rate < 0.0) throw std::invalid_argument("lindblad: negative rate");
    if (c.rate == 0.0) continue;
    dissipative = true;
    const Operator ldl = c.op.adjoint() * c.op;
    d += c.rate * (kron_compose(c.op.conjugate(), c.op) -
                   0.5 * kron_compose(eye, ldl) -
                   0.5 * kron_compose(Operator(ldl.transpose()), eye));
  }
  const Operator half = dissipative ? expm(d, 0.5 * dt) : Operator();
  auto dissipate = [&](Operator& rho) {
    if (!dissipative) return;
    Eigen::Map<Eigen::VectorXcd> v(rho.data(), n * n);
    const Eigen::VectorXcd out = half * v;
    v = out;
  };
  for (int k = 0; k < steps; ++k) {
    const Operator u = step_exponential(h, h.sampler((k + 0.5) * dt), dt);
    for (auto& rho : states) {
      dissipate(rho);
      rho = u * rho * u.adjoint();
      dissipate(rho);
    }
  }
  return states;
}

void write_trajectory_csv(std::ostream& os, const EvolutionResult& result) {
  if (result.states.empty()) return;
  const Index dim = result.states.front().rows();
  os << "t";
  for (Index i = 0; i < dim; ++i) os << ",p" << i;
  os << ",trace\n";
  os << std::setprecision(12);
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    const auto& rho = result.states[k];
    os << result.times[k];
    for (Index i = 0; i < dim; ++i) os << ',' << rho(i, i).real();
    os << ',' << rho.trace().real() << '\n';
  }
}

}  // namespace czfault
