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

// Frequency-tuning pulses for the adiabatic CZ gate.
//
// The control angle theta = atan(sqrt(2) g / (omega1 - omega2 + alpha))
// parameterizes the |11>-|20> detuning: theta -> 0 far from the crossing and
// theta = pi/2 on resonance. Fourier-family pulses prescribe
//
//   dtheta/dt = sgn(t - T/2) sum_n lambda_n [1 - cos(2 pi n t / T)],
//
// with lambda_n in rad/s. The coefficient shape is a least-squares fit to a
// zeroth-order discrete prolate spheroidal sequence; the overall scale sets
// the peak angle reached at T/2.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "czfault/core.hpp"
#include "czfault/device.hpp"
#include "czfault/evolution.hpp"

namespace czfault {

enum class PulseFamily { kSquare, kCosine, kFourier };

// Named shapes benchmarked by the calibration command.
enum class PulseShape { kSquare, kCosine, kHanning, kFourier2, kFourier4, kSlepian };

inline constexpr PulseShape kAllPulseShapes[] = {
    PulseShape::kSquare,   PulseShape::kCosine,   PulseShape::kHanning,
    PulseShape::kFourier2, PulseShape::kFourier4, PulseShape::kSlepian};

std::string_view to_string(PulseShape shape);
PulseShape parse_pulse_shape(std::string_view name);
PulseFamily family_of(PulseShape shape);
// Number of Fourier terms (0 for square and cosine).
int fourier_terms(PulseShape shape);

class UnsupportedShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Pulse {
  PulseFamily family = PulseFamily::kFourier;
  std::vector<double> lambdas;  // rad/s, Fourier family only
  double t_gate = 0.0;          // schedule length
  double duration = 0.0;        // applied length; < t_gate when truncated
  double theta_idle = 0.0;
  // Plateau (square) or peak (cosine, Fourier) angle requested at
  // construction. Fourier pulses derive their trajectory from lambdas, so a
  // modified lambda vector moves the real peak away from this value.
  double theta_max = 0.0;
};

// atan2(sqrt(2) g, omega1 - omega2 + alpha), in (0, pi).
double theta_from_detuning(double omega1, const DeviceParams& dev);

// omega2 - alpha + sqrt(2) g / tan(theta). Throws std::domain_error for
// theta == 0.
double detuning_from_theta(double theta, const DeviceParams& dev);

// Normalized (sum = 1) least-squares fit of the m-term series to the
// zeroth-order DPSS with time-bandwidth product 3 on 1024 samples.
std::vector<double> slepian_coefficients(int m);

// Pulse of the given shape peaking at theta_max.
Pulse make_pulse(PulseShape shape, const DeviceParams& dev, double t_gate,
                 double theta_max);

// Fourier-family angular rate; sgn(0) = 0. Throws UnsupportedShapeError for
// other families.
double theta_dot(double t, const Pulse& p);

// Exact theta(t) on the pulse schedule (closed-form antiderivative for the
// Fourier family). Ignores truncation.
double theta_at(double t, const Pulse& p, const DeviceParams& dev);

struct ThetaTrajectory {
  std::vector<double> times;
  std::vector<double> theta;
};

// theta_idle + integral of theta_dot, Simpson's rule per step. Non-Fourier
// families are sampled from the waveform. Requires dt <= t_gate / 1000.
ThetaTrajectory theta_trajectory(const Pulse& p, const DeviceParams& dev,
                                 double dt);

// omega1(t) of the control qubit. Idle outside (0, duration).
double shape_waveform(double t, const Pulse& p, const DeviceParams& dev);

struct PhaseEstimate {
  double phase = 0.0;
  bool clamped = false;  // the tan() argument hit its singular limit
};

// Quadrature of sqrt(2) g tan(sqrt(2) g / (omega1(t) - omega2 + alpha)) over
// the pulse, with the tan() argument clamped below pi/2. Only valid far
// from the crossing; kept as a diagnostic.
PhaseEstimate conditional_phase_estimate(const Pulse& p,
                                         const DeviceParams& dev,
                                         int samples = 4000);

// -integral (E11 - E10 - E01 + E00)(t) dt from adiabatic eigenenergies: the
// conditional phase accumulated when the pulse is slow compared with the
// avoided-crossing gap.
double adiabatic_phase_estimate(const Pulse& p, const DeviceParams& dev,
                                int samples = 4000);

// Dressed idle eigenbasis and rotating frame in which gate propagators are
// reported.
struct GateFrame {
  LabeledEigensystem idle;
  double omega_q1 = 0.0;  // E10 - E00
  double omega_q2 = 0.0;  // E01 - E00
  double omega_ref = 0.0;

  static GateFrame from_device(const DeviceParams& dev);
};

// Excitation-number blocks of the two-qutrit space.
std::vector<std::vector<Index>> excitation_blocks();

// H(t) - omega_ref N for the pulse. The shift commutes with H and is undone
// by to_gate_frame.
TimeDependentHamiltonian pulse_hamiltonian(const Pulse& p,
                                           const DeviceParams& dev,
                                           const GateFrame& frame, double dt);

// diag(exp(i((omega_q1 - omega_ref) i + (omega_q2 - omega_ref) j) t)) V^dag,
// which maps bare-basis states of the shifted frame at time t into the gate
// frame.
Operator gate_frame_rotation(const GateFrame& frame, double t);

// Converts a propagator of pulse_hamiltonian over [0, t] to the dressed
// idle basis, rotating at the dressed qubit frequencies.
Operator to_gate_frame(const Operator& u_shifted, const GateFrame& frame,
                       double t);

struct GateSimOptions {
  int steps_per_gate = 4000;
};

// 9x9 propagator of the pulse, in the gate frame, over its applied duration.
Operator cz_propagator(const Pulse& p, const DeviceParams& dev,
                       const GateFrame& frame,
                       const GateSimOptions& options = {});

struct CalibrationPoint {
  double t_gate = 0.0;
  double theta_max = 0.0;
  double fidelity = 0.0;
  double phase = 0.0;
};

struct CalibrationResult {
  PulseShape shape = PulseShape::kSlepian;
  Pulse pulse;
  double fidelity = 0.0;
  double phase = 0.0;  // conditional phase of the full propagator
  std::vector<CalibrationPoint> trace;  // sorted by t_gate
};

struct CalibrationOptions {
  double t_lo = ns(20.0);
  double t_hi = ns(200.0);
  double t_step = ns(0.1);
  double coarse_step = ns(10.0);
  int refine_candidates = 3;
  double theta_limit = 0.98 * std::numbers::pi / 2.0;
  GateSimOptions sim;
  int workers = 1;
};

// Fidelity and conditional phase of one pulse, phase-corrected against CZ.
CalibrationPoint evaluate_pulse(const Pulse& p, const DeviceParams& dev,
                                const GateFrame& frame,
                                const GateSimOptions& options = {});

// Best pulse of the shape whose gate time lies on the t_step grid. For each
// gate time the peak angle is solved so the conditional phase equals pi;
// the gate time is scanned on a coarse grid and refined in factors of ten
// down to t_step around the best candidates. Ties go to the shorter gate.
// Throws CalibrationError if no candidate reaches fidelity 0.9.
CalibrationResult calibrate(PulseShape shape, const DeviceParams& dev,
                            const CalibrationOptions& options = {});

}  // namespace czfault
