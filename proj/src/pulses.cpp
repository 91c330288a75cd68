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

#include "czfault/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "czfault/metrics.hpp"
#include "czfault/parallel.hpp"

namespace czfault {

using std::numbers::pi;

std::string_view to_string(PulseShape shape) {
  switch (shape) {
    case PulseShape::kSquare: return "square";
    case PulseShape::kCosine: return "cosine";
    case PulseShape::kHanning: return "hanning";
    case PulseShape::kFourier2: return "fourier-2";
    case PulseShape::kFourier4: return "fourier-4";
    case PulseShape::kSlepian: return "slepian";
  }
  return "unknown";
}

PulseShape parse_pulse_shape(std::string_view name) {
  for (PulseShape s : kAllPulseShapes) {
    if (to_string(s) == name) return s;
  }
  throw UnsupportedShapeError("unknown pulse shape: " + std::string(name));
}

PulseFamily family_of(PulseShape shape) {
  switch (shape) {
    case PulseShape::kSquare: return PulseFamily::kSquare;
    case PulseShape::kCosine: return PulseFamily::kCosine;
    default: return PulseFamily::kFourier;
  }
}

int fourier_terms(PulseShape shape) {
  switch (shape) {
    case PulseShape::kHanning: return 1;
    case PulseShape::kFourier2: return 2;
    case PulseShape::kFourier4: return 4;
    case PulseShape::kSlepian: return 8;
    default: return 0;
  }
}

double theta_from_detuning(double omega1, const DeviceParams& dev) {
  return std::atan2(dev.coupling_11_20(), omega1 - dev.omega2 + dev.alpha);
}

double detuning_from_theta(double theta, const DeviceParams& dev) {
  if (theta == 0.0) {
    throw std::domain_error("detuning_from_theta: theta = 0 is infinitely "
                            "detuned");
  }
  return dev.crossing_frequency() + dev.coupling_11_20() / std::tan(theta);
}

namespace {

constexpr int kDpssLength = 1024;
constexpr double kTimeBandwidth = 3.0;

// Zeroth-order DPSS from the commuting tridiagonal matrix.
const Eigen::VectorXd& dpss0() {
  static const Eigen::VectorXd seq = [] {
    const int n = kDpssLength;
    const double w = kTimeBandwidth / n;
    Eigen::VectorXd diag(n), sub(n - 1);
    for (int k = 0; k < n; ++k) {
      const double a = (n - 1 - 2.0 * k) / 2.0;
      diag(k) = a * a * std::cos(2.0 * pi * w);
    }
    for (int k = 1; k < n; ++k) sub(k - 1) = k * (n - k) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    Eigen::VectorXd v = es.eigenvectors().col(n - 1);
    if (v.sum() < 0.0) v = -v;
    return v;
  }();
  return seq;
}

}  // namespace

std::vector<double> slepian_coefficients(int m) {
  if (m < 1) throw std::invalid_argument("slepian_coefficients: m < 1");
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  const Eigen::VectorXd& target = dpss0();
  const int n = static_cast<int>(target.size());
  Eigen::MatrixXd basis(n, m);
  for (int k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k) / (n - 1);
    for (int j = 0; j < m; ++j) {
      basis(k, j) = 1.0 - std::cos(2.0 * pi * (j + 1) * tau);
    }
  }
  const Eigen::VectorXd fit = basis.colPivHouseholderQr().solve(target);
  const double total = fit.sum();
  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) out[j] = fit(j) / total;
  cache.emplace(m, out);
  return out;
}

Pulse make_pulse(PulseShape shape, const DeviceParams& dev, double t_gate,
                 double theta_max) {
  if (!(t_gate > 0.0)) throw std::invalid_argument("make_pulse: t_gate <= 0");
  Pulse p;
  p.family = family_of(shape);
  p.t_gate = t_gate;
  p.duration = t_gate;
  p.theta_idle = theta_from_detuning(dev.omega1_idle, dev);
  p.theta_max = theta_max;
  if (p.family == PulseFamily::kFourier) {
    const auto shape_coeffs = slepian_coefficients(fourier_terms(shape));
    // theta(T/2) = theta_idle - (T/2) sum lambda.
    const double scale = -2.0 * (theta_max - p.theta_idle) / t_gate;
    for (double c : shape_coeffs) p.lambdas.push_back(scale * c);
  }
  return p;
}

double theta_dot(double t, const Pulse& p) {
  if (p.family != PulseFamily::kFourier) {
    throw UnsupportedShapeError("theta_dot: only defined for Fourier pulses");
  }
  const double half = p.t_gate / 2.0;
  const double sgn = t > half ? 1.0 : (t < half ? -1.0 : 0.0);
  double s = 0.0;
  for (std::size_t n = 0; n < p.lambdas.size(); ++n) {
    s += p.lambdas[n] *
         (1.0 - std::cos(2.0 * pi * static_cast<double>(n + 1) * t / p.t_gate));
  }
  return sgn * s;
}

namespace {

// Integral of sum_n lambda_n [1 - cos(2 pi n t / T)] from 0 to t.
double fourier_antiderivative(double t, const Pulse& p) {
  double a = 0.0;
  for (std::size_t n = 0; n < p.lambdas.size(); ++n) {
    const double k = 2.0 * pi * static_cast<double>(n + 1) / p.t_gate;
    a += p.lambdas[n] * (t - std::sin(k * t) / k);
  }
  return a;
}

double scheduled_omega(double t, const Pulse& p, const DeviceParams& dev) {
  switch (p.family) {
    case PulseFamily::kSquare:
      if (t <= 0.0 || t >= p.t_gate) return dev.omega1_idle;
      return detuning_from_theta(p.theta_max, dev);
    case PulseFamily::kCosine: {
      const double peak = detuning_from_theta(p.theta_max, dev);
      const double tc = std::clamp(t, 0.0, p.t_gate);
      return dev.omega1_idle + (peak - dev.omega1_idle) *
                                   (1.0 - std::cos(2.0 * pi * tc / p.t_gate)) /
                                   2.0;
    }
    case PulseFamily::kFourier:
      return detuning_from_theta(theta_at(t, p, dev), dev);
  }
  return dev.omega1_idle;
}

}  // namespace

double theta_at(double t, const Pulse& p, const DeviceParams& dev) {
  if (p.family != PulseFamily::kFourier) {
    return theta_from_detuning(scheduled_omega(t, p, dev), dev);
  }
  const double tc = std::clamp(t, 0.0, p.t_gate);
  const double half = p.t_gate / 2.0;
  if (tc <= half) return p.theta_idle - fourier_antiderivative(tc, p);
  return p.theta_idle - 2.0 * fourier_antiderivative(half, p) +
         fourier_antiderivative(tc, p);
}

ThetaTrajectory theta_trajectory(const Pulse& p, const DeviceParams& dev,
                                 double dt) {
  if (!(dt > 0.0) || dt > p.t_gate / 1000.0) {
    throw std::invalid_argument("theta_trajectory: dt must be <= t_gate/1000");
  }
  const int steps = static_cast<int>(std::ceil(p.t_gate / dt - 1e-9));
  const double h = p.t_gate / steps;
  ThetaTrajectory out;
  out.times.reserve(steps + 1);
  out.theta.reserve(steps + 1);
  out.times.push_back(0.0);
  if (p.family != PulseFamily::kFourier) {
    out.theta.push_back(theta_at(0.0, p, dev));
    for (int k = 1; k <= steps; ++k) {
      out.times.push_back(k * h);
      out.theta.push_back(theta_at(k * h, p, dev));
    }
    return out;
  }
  const double half = p.t_gate / 2.0;
  // Unsigned rate; the sign is taken from the interval midpoint so the jump
  // at T/2 never falls inside a Simpson panel's interior evaluation.
  auto rate = [&](double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < p.lambdas.size(); ++n) {
      s += p.lambdas[n] * (1.0 - std::cos(2.0 * pi * static_cast<double>(n + 1) *
                                          t / p.t_gate));
    }
    return s;
  };
  double theta = p.theta_idle;
  out.theta.push_back(theta);
  for (int k = 0; k < steps; ++k) {
    const double a = k * h, b = (k + 1) * h, m = 0.5 * (a + b);
    const double sgn = m > half ? 1.0 : -1.0;
    theta += sgn * h / 6.0 * (rate(a) + 4.0 * rate(m) + rate(b));
    out.times.push_back(b);
    out.theta.push_back(theta);
  }
  return out;
}

double shape_waveform(double t, const Pulse& p, const DeviceParams& dev) {
  if (t <= 0.0 || t >= p.duration) return dev.omega1_idle;
  return scheduled_omega(t, p, dev);
}

PhaseEstimate conditional_phase_estimate(const Pulse& p,
                                         const DeviceParams& dev,
                                         int samples) {
  const double c = dev.coupling_11_20();
  const double limit = pi / 2.0 - 1e-2;
  const double h = p.duration / samples;
  PhaseEstimate est;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) * h;
    const double detuning = shape_waveform(t, p, dev) - dev.omega2 + dev.alpha;
    double arg = detuning > 0.0 ? c / detuning : limit;
    if (arg > limit) {
      arg = limit;
      est.clamped = true;
    }
    if (detuning <= 0.0) est.clamped = true;
    est.phase += c * std::tan(arg) * h;
  }
  return est;
}

double adiabatic_phase_estimate(const Pulse& p, const DeviceParams& dev,
                                int samples) {
  const double h = p.duration / samples;
  double phase = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) * h;
    const auto e = adiabatic_energies(dev, shape_waveform(t, p, dev));
    phase -= (e[3] - e[2] - e[1] + e[0]) * h;
  }
  return phase;
}

GateFrame GateFrame::from_device(const DeviceParams& dev) {
  GateFrame f;
  f.idle = eigen_tracked(dev, dev.omega1_idle);
  f.omega_q1 = f.idle.energy(1, 0) - f.idle.energy(0, 0);
  f.omega_q2 = f.idle.energy(0, 1) - f.idle.energy(0, 0);
  f.omega_ref = 0.5 * (f.omega_q1 + f.omega_q2);
  return f;
}

std::vector<std::vector<Index>> excitation_blocks() {
  return {{0}, {1, 3}, {2, 4, 6}, {5, 7}, {8}};
}

TimeDependentHamiltonian pulse_hamiltonian(const Pulse& p,
                                           const DeviceParams& dev,
                                           const GateFrame& frame, double dt) {
  const Operator n1 = site_number(0);
  const Operator total = n1 + site_number(1);
  const Operator fixed =
      build_hamiltonian(dev, 0.0) - frame.omega_ref * total;
  TimeDependentHamiltonian h;
  h.t_gate = p.duration;
  h.dt = dt;
  h.blocks = excitation_blocks();
  h.sampler = [fixed, n1, p, dev](double t) -> Operator {
    return fixed + shape_waveform(t, p, dev) * n1;
  };
  return h;
}

Operator gate_frame_rotation(const GateFrame& frame, double t) {
  Operator w = frame.idle.vectors.adjoint();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double rate = (frame.omega_q1 - frame.omega_ref) * i +
                          (frame.omega_q2 - frame.omega_ref) * j;
      w.row(3 * i + j) *= std::exp(kI * (rate * t));
    }
  }
  return w;
}

Operator to_gate_frame(const Operator& u_shifted, const GateFrame& frame,
                       double t) {
  return gate_frame_rotation(frame, t) * u_shifted * frame.idle.vectors;
}

Operator cz_propagator(const Pulse& p, const DeviceParams& dev,
                       const GateFrame& frame,
                       const GateSimOptions& options) {
  const double dt = p.t_gate / options.steps_per_gate;
  const TimeDependentHamiltonian h = pulse_hamiltonian(p, dev, frame, dt);
  return to_gate_frame(propagate_unitary(h, 0.0, p.duration), frame,
                       p.duration);
}

CalibrationPoint evaluate_pulse(const Pulse& p, const DeviceParams& dev,
                                const GateFrame& frame,
                                const GateSimOptions& options) {
  const Operator u4 = project_computational(cz_propagator(p, dev, frame, options));
  return {p.t_gate, p.theta_max, phase_corrected_gate_fidelity(u4),
          conditional_phase(u4)};
}

namespace {

double phase_residual(double phase) { return std::remainder(phase - pi, 2 * pi); }

// Peak angle for which the conditional phase equals pi at this gate time.
CalibrationPoint solve_gate_time(PulseShape shape, const DeviceParams& dev,
                                 const GateFrame& frame, double t_gate,
                                 const CalibrationOptions& opt) {
  const double theta_idle = theta_from_detuning(dev.omega1_idle, dev);
  const double lo = theta_idle + 1e-4;
  const double hi = opt.theta_limit;
  auto estimate = [&](double th) {
    return adiabatic_phase_estimate(make_pulse(shape, dev, t_gate, th), dev,
                                    400);
  };
  // Initial guess from the adiabatic phase: the smallest odd multiple of pi
  // not already exceeded by idling alone.
  const double e_lo = estimate(lo);
  double target = pi;
  while (target < e_lo) target += 2.0 * pi;
  double th0 = hi;
  if (estimate(hi) >= target) {
    double a = lo, b = hi;
    for (int it = 0; it < 50; ++it) {
      const double m = 0.5 * (a + b);
      (estimate(m) < target ? a : b) = m;
    }
    th0 = 0.5 * (a + b);
  }

  CalibrationPoint best;
  best.fidelity = -1.0;
  auto probe = [&](double th) {
    const CalibrationPoint pt =
        evaluate_pulse(make_pulse(shape, dev, t_gate, th), dev, frame, opt.sim);
    if (pt.fidelity > best.fidelity) best = pt;
    return phase_residual(pt.phase);
  };
  double x0 = th0, f0 = probe(x0);
  if (std::abs(f0) < 1e-7) return best;
  double x1 = std::clamp(x0 - 0.01, lo, hi);
  if (x1 == x0) x1 = std::clamp(x0 + 0.01, lo, hi);
  double f1 = probe(x1);
  for (int it = 0; it < 12 && std::abs(f1) > 1e-7; ++it) {
    const double denom = f1 - f0;
    if (denom == 0.0) break;
    double x2 = x1 - f1 * (x1 - x0) / denom;
    // Keep steps local; the residual wraps every 2 pi.
    x2 = std::clamp(x2, x1 - 0.2, x1 + 0.2);
    x2 = std::clamp(x2, lo, hi);
    if (x2 == x1) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = probe(x1);
  }
  return best;
}

bool better(const CalibrationPoint& a, const CalibrationPoint& b) {
  if (a.fidelity != b.fidelity) return a.fidelity > b.fidelity;
  return a.t_gate < b.t_gate;
}

}  // namespace

CalibrationResult calibrate(PulseShape shape, const DeviceParams& dev,
                            const CalibrationOptions& opt) {
  dev.validate();
  const double t_min = ns(20.0) - 1e-15, t_max = ns(200.0) + 1e-15;
  if (opt.t_lo < t_min || opt.t_hi > t_max || opt.t_lo > opt.t_hi) {
    throw std::invalid_argument("calibrate: t_range must lie in [20, 200] ns");
  }
  if (!(opt.t_step > 0.0) || opt.coarse_step < opt.t_step) {
    throw std::invalid_argument("calibrate: bad grid steps");
  }
  const GateFrame frame = GateFrame::from_device(dev);
  const long tick_lo = std::lround(opt.t_lo / opt.t_step);
  const long tick_hi = std::lround(opt.t_hi / opt.t_step);
  const long stride = std::max(1L, std::lround(opt.coarse_step / opt.t_step));

  std::map<long, CalibrationPoint> evaluated;
  auto run = [&](const std::vector<long>& ticks) {
    std::vector<CalibrationPoint> pts(ticks.size());
    parallel_for(ticks.size(), opt.workers, [&](std::size_t i) {
      pts[i] = solve_gate_time(shape, dev, frame, ticks[i] * opt.t_step, opt);
    });
    for (std::size_t i = 0; i < ticks.size(); ++i) evaluated[ticks[i]] = pts[i];
  };

  std::vector<long> level;
  for (long k = tick_lo; k <= tick_hi; k += stride) level.push_back(k);
  if (level.back() != tick_hi) level.push_back(tick_hi);
  run(level);

  // Refine by factors of ten around the best candidates of each level.
  for (long s = stride; s > 1;) {
    const long next = std::max(1L, s / 10);
    std::vector<long> ranked;
    for (const auto& [tick, pt] : evaluated) ranked.push_back(tick);
    std::sort(ranked.begin(), ranked.end(), [&](long a, long b) {
      return better(evaluated[a], evaluated[b]);
    });
    std::set<long> fine;
    const int candidates =
        std::min<int>(opt.refine_candidates, static_cast<int>(ranked.size()));
    for (int c = 0; c < candidates; ++c) {
      for (long k = ranked[c] - s + next; k < ranked[c] + s; k += next) {
        if (k >= tick_lo && k <= tick_hi && !evaluated.contains(k)) {
          fine.insert(k);
        }
      }
    }
    run(std::vector<long>(fine.begin(), fine.end()));
    s = next;
  }

  CalibrationResult result;
  result.shape = shape;
  CalibrationPoint best;
  best.fidelity = -1.0;
  for (const auto& [tick, pt] : evaluated) {
    result.trace.push_back(pt);
    if (better(pt, best)) best = pt;
  }
  if (best.fidelity < 0.9) {
    throw CalibrationError("calibrate: no candidate reached fidelity 0.9 for " +
                           std::string(to_string(shape)));
  }
  result.pulse = make_pulse(shape, dev, best.t_gate, best.theta_max);
  result.fidelity = best.fidelity;
  result.phase = best.phase;
  return result;
}

}  // namespace czfault
