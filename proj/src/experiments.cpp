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

#include "czfault/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "czfault/metrics.hpp"
#include "czfault/parallel.hpp"

#ifndef CZFAULT_VERSION
#define CZFAULT_VERSION "0.0.0"
#endif

namespace czfault {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kGhz = 2.0 * std::numbers::pi * 1e9;

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string bits(Index pattern, int width) {
  std::string s;
  for (int b = width - 1; b >= 0; --b) s += ((pattern >> b) & 1) ? '1' : '0';
  return s;
}

std::string reps(const TestOutcome& o) {
  return o.detectable() ? std::to_string(o.repetitions) : "UNDETECTABLE";
}

Operator super_of(const Operator& u) { return kron_compose(u.conjugate(), u); }

CzModel model_for(const RunConfig& cfg) {
  const CalibrationResult r = calibrate_configured(cfg);
  return CzModel::from_pulse(cfg.device, r.pulse, cfg.calibration.sim);
}

}  // namespace

const OutputFile* CommandOutput::find(const std::string& name) const {
  for (const auto& f : files) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string tool_version() { return CZFAULT_VERSION; }

CalibrationResult calibrate_configured(const RunConfig& cfg) {
  CalibrationOptions o = cfg.calibration;
  o.workers = cfg.workers;
  if (cfg.t_gate) o.t_lo = o.t_hi = *cfg.t_gate;
  return calibrate(cfg.shape, cfg.device, o);
}

Circuit select_circuit(const std::string& name, const RunConfig& cfg) {
  Circuit c;
  if (name == "full-adder") {
    c = build_full_adder();
  } else if (name == "random") {
    c = build_random_circuit(cfg.circuit.seed, cfg.circuit.width,
                             cfg.circuit.cz_count);
  } else if (name == "file") {
    std::ifstream in(cfg.circuit.file);
    if (!in) throw ConfigError("cannot open circuit file " + cfg.circuit.file);
    std::stringstream ss;
    ss << in.rdbuf();
    c = circuit_from_json(ss.str());
  } else {
    throw ConfigError("unknown circuit: " + name);
  }
  return decompose_to_cz(c);
}

ExponentialFit fit_exponential(std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("fit_exponential: need >= 3 points");
  }
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mean) * (v - mean);
  ExponentialFit best;
  if (ss_tot < 1e-20) {
    best.c = mean;
    best.tau = std::numeric_limits<double>::infinity();
    best.r2 = 1.0;
    return best;
  }
  // Linear least squares in (A, C) for a given tau.
  auto solve = [&](double tau) {
    double s_ee = 0, s_e = 0, s_ey = 0, s_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::exp(-x[i] / tau);
      s_ee += e * e;
      s_e += e;
      s_ey += e * y[i];
      s_y += y[i];
    }
    ExponentialFit f;
    f.tau = tau;
    const double det = s_ee * n - s_e * s_e;
    if (std::abs(det) < 1e-300) {
      f.c = mean;
    } else {
      f.a = (s_ey * n - s_e * s_y) / det;
      f.c = (s_ee * s_y - s_e * s_ey) / det;
    }
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.a * std::exp(-x[i] / tau) + f.c);
      ss_res += r * r;
    }
    f.r2 = 1.0 - ss_res / ss_tot;
    return f;
  };
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double span = std::max(*hi_it - *lo_it, 1e-12);
  // Log grid over tau, then golden-section refinement around the best node.
  const double lg_lo = std::log(span * 1e-3), lg_hi = std::log(span * 1e4);
  const int grid = 400;
  int best_k = 0;
  best = solve(std::exp(lg_lo));
  for (int k = 1; k <= grid; ++k) {
    const ExponentialFit f = solve(std::exp(lg_lo + (lg_hi - lg_lo) * k / grid));
    if (f.r2 > best.r2) {
      best = f;
      best_k = k;
    }
  }
  double a = lg_lo + (lg_hi - lg_lo) * std::max(0, best_k - 1) / grid;
  double b = lg_lo + (lg_hi - lg_lo) * std::min(grid, best_k + 1) / grid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = b - phi * (b - a), m2 = a + phi * (b - a);
    if (solve(std::exp(m1)).r2 > solve(std::exp(m2)).r2) {
      b = m2;
    } else {
      a = m1;
    }
  }
  const ExponentialFit refined = solve(std::exp(0.5 * (a + b)));
  return refined.r2 > best.r2 ? refined : best;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length series");
  }
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

GateChannel decoherence_only_cz(const CzModel& model,
                                const DecoherenceParams& dec) {
  const Operator s_noisy = decoherent_cz_superoperator(model, dec);
  const Operator u =
      model.correction * project_computational(cz_propagator(
                             model.pulse, model.device, model.frame, model.sim));
  const Operator s_coherent = super_of(u);
  const Operator noise = s_noisy * s_coherent.inverse();
  return GateChannel::from_superoperator(noise * super_of(gates::cz()));
}

std::vector<DecoherencePoint> decoherence_curve(const RunConfig& cfg,
                                                const CzModel& model,
                                                const DecoherenceParams& dec) {
  const auto& b = cfg.decoherence_bench;
  IdleNoise idle;
  idle.decoherence = dec;
  idle.single_qubit_time = b.single_qubit_time;
  idle.cz_time = model.pulse.t_gate;
  const GateChannel cz = decoherence_only_cz(model, dec);

  std::vector<int> depths;
  for (int d = b.depth_min; d <= b.depth_max; d += b.depth_step) {
    depths.push_back(d);
  }
  std::vector<DecoherencePoint> points(depths.size());
  parallel_for(depths.size(), cfg.workers, [&](std::size_t k) {
    double sum = 0.0;
    for (int s = 0; s < b.samples; ++s) {
      const std::uint64_t seed = mix_seed(
          mix_seed(cfg.seed, static_cast<std::uint64_t>(depths[k])),
          static_cast<std::uint64_t>(s));
      const Circuit c =
          decompose_to_cz(build_decoherence_benchmark(seed, depths[k]));
      GateChannelMap channels;
      for (std::size_t pos : c.cz_indices()) channels.emplace(pos, cz);
      const Operator s_real = circuit_superoperator(c, channels, &idle);
      const Operator s_ideal = super_of(circuit_unitary(c));
      const double d2 = static_cast<double>(s_ideal.rows());
      sum += (s_ideal.adjoint() * s_real).trace().real() / d2;
    }
    points[k] = {depths[k], sum / b.samples};
  });
  return points;
}

std::vector<TestOutcome> best_per_fault(const TestgenExperiment& e) {
  std::vector<TestOutcome> best;
  std::size_t i = 0;
  while (i < e.outcomes.size()) {
    std::size_t j = i;
    while (j < e.outcomes.size() &&
           e.outcomes[j].fault_id == e.outcomes[i].fault_id) {
      ++j;
    }
    std::span<const TestOutcome> group(e.outcomes.data() + i, j - i);
    const auto b = best_pattern(group);
    best.push_back(b ? group[*b] : group.front());
    i = j;
  }
  return best;
}

std::vector<TestgenExperiment> run_testgen(const RunConfig& cfg,
                                           ChannelCache& cache) {
  const auto& t = cfg.testgen;
  std::vector<TestgenExperiment> experiments;
  for (std::size_t ci = 0; ci < t.circuits.size(); ++ci) {
    const std::string& name = t.circuits[ci];
    const Circuit c = select_circuit(name, cfg);
    const std::uint64_t seed = mix_seed(cfg.seed, ci);
    long fault_id = 0;
    auto run = [&](TestgenExperiment e, const std::vector<FaultSpec>& faults) {
      e.circuit = name;
      for (const FaultSpec& f : faults) {
        const GateChannelMap map = fault_channel_map(c, f, cache);
        PatternSweep sweep =
            sweep_patterns(c, map, t.chi, seed, fault_id, cfg.workers);
        for (auto& o : sweep.outcomes) {
          o.fault = f;
          e.outcomes.push_back(o);
        }
        ++fault_id;
      }
      experiments.push_back(std::move(e));
    };
    auto tag = [&](FaultKind kind) {
      FaultSpec f{kind, kAllGates, 0.0, t.coefficient};
      return f.label();
    };

    for (double eps : t.all_cz_epsilons) {
      TestgenExperiment e;
      e.all_cz = true;
      e.epsilon = eps;
      e.name = "all-cz-" + tag(t.all_cz_kind) + "-" + fixed(eps, 2);
      run(e, {FaultSpec{t.all_cz_kind, kAllGates, eps, t.coefficient}});
    }
    const auto cz = c.cz_indices();
    for (FaultKind kind : t.kinds) {
      const bool has_eps = kind == FaultKind::kRatio ||
                           kind == FaultKind::kBias ||
                           kind == FaultKind::kTruncation;
      if (!has_eps && kind != FaultKind::kMissingGate) {
        throw ConfigError("testgen: unsupported fault kind " +
                          std::string(to_string(kind)));
      }
      const std::vector<double> eps_list =
          has_eps ? t.single_cz_epsilons : std::vector<double>{0.0};
      for (double eps : eps_list) {
        TestgenExperiment e;
        e.all_cz = false;
        e.epsilon = eps;
        e.name = "single-cz-" + tag(kind) + (has_eps ? "-" + fixed(eps, 2) : "");
        std::vector<FaultSpec> faults;
        for (std::size_t pos : cz) {
          faults.push_back(
              {kind, static_cast<long>(pos), eps, t.coefficient});
        }
        run(e, faults);
      }
    }
  }
  return experiments;
}

CommandOutput cmd_calibrate(const RunConfig& cfg) {
  CommandOutput out{"calibrate", {}};
  std::ostringstream csv;
  csv << "shape,t_gate_ns,theta_max,fidelity,conditional_phase,status\n";
  Json traces = Json::array();
  CalibrationOptions o = cfg.calibration;
  o.workers = cfg.workers;
  if (cfg.t_gate) o.t_lo = o.t_hi = *cfg.t_gate;
  for (PulseShape shape : cfg.calibrate_shapes) {
    Json jt;
    jt["shape"] = std::string(to_string(shape));
    try {
      const CalibrationResult r = calibrate(shape, cfg.device, o);
      csv << to_string(shape) << ',' << fixed(r.pulse.t_gate * 1e9, 1) << ','
          << num(r.pulse.theta_max) << ',' << num(r.fidelity) << ','
          << num(r.phase) << ",ok\n";
      Json pts = Json::array();
      for (const auto& p : r.trace) {
        pts.push_back({{"t_gate_ns", p.t_gate * 1e9},
                       {"theta_max", p.theta_max},
                       {"fidelity", p.fidelity},
                       {"conditional_phase", p.phase}});
      }
      jt["t_gate_ns"] = r.pulse.t_gate * 1e9;
      jt["fidelity"] = r.fidelity;
      jt["trace"] = std::move(pts);
    } catch (const CalibrationError& e) {
      csv << to_string(shape) << ",,,,,failed\n";
      jt["error"] = e.what();
    }
    traces.push_back(std::move(jt));
  }
  out.files.push_back({"calibration.csv", csv.str()});
  out.files.push_back({"calibration_traces.json", traces.dump(2) + "\n"});
  return out;
}

CommandOutput cmd_fault_sweep(const RunConfig& cfg) {
  CommandOutput out{"fault-sweep", {}};
  const CzModel model = model_for(cfg);
  const double adiabatic0 = adiabatic_phase_estimate(model.pulse, cfg.device);
  const PhaseEstimate tan0 = conditional_phase_estimate(model.pulse, cfg.device);
  const FaultyGate base = faulty_cz(model, FaultSpec{FaultKind::kRatio,
                                                     kAllGates, 0.0, 1});

  struct Row {
    FaultSpec f;
    FaultyGate g;
    double adiabatic = 0.0;
    double tan_estimate = 0.0;
    bool clamped = false;
  };
  std::vector<FaultSpec> specs;
  const auto& s = cfg.fault_sweep;
  for (FaultKind kind : s.kinds) {
    switch (kind) {
      case FaultKind::kRatio:
      case FaultKind::kBias:
        for (int n : s.coefficients) {
          for (double e : s.epsilons) specs.push_back({kind, kAllGates, e, n});
        }
        break;
      case FaultKind::kTruncation:
        for (double e : s.epsilons) specs.push_back({kind, kAllGates, e, 1});
        break;
      case FaultKind::kMissingGate:
        specs.push_back({kind, kAllGates, 0.0, 1});
        break;
      default:
        throw ConfigError("fault-sweep: unsupported fault kind " +
                          std::string(to_string(kind)));
    }
  }
  std::vector<Row> rows(specs.size());
  parallel_for(specs.size(), cfg.workers, [&](std::size_t i) {
    Row& r = rows[i];
    r.f = specs[i];
    r.g = faulty_cz(model, r.f);
    if (r.f.kind != FaultKind::kMissingGate) {
      const Pulse p = apply_parameter_fault(model.pulse, r.f);
      r.adiabatic = adiabatic_phase_estimate(p, cfg.device) - adiabatic0;
      const PhaseEstimate est = conditional_phase_estimate(p, cfg.device);
      r.tan_estimate = est.phase - tan0.phase;
      r.clamped = est.clamped || tan0.clamped;
    }
  });

  std::ostringstream csv;
  csv << "kind,coefficient,epsilon,phase_error,adiabatic_estimate,"
         "tan_estimate,tan_clamped,fidelity,fixed_frame_fidelity,"
         "fidelity_drop\n";
  for (const Row& r : rows) {
    const bool coef =
        r.f.kind == FaultKind::kRatio || r.f.kind == FaultKind::kBias;
    csv << to_string(r.f.kind) << ',' << (coef ? std::to_string(r.f.coefficient)
                                               : std::string())
        << ',' << fixed(r.f.magnitude, 4) << ',' << num(r.g.phase_error) << ','
        << num(r.adiabatic) << ',' << num(r.tan_estimate) << ','
        << (r.clamped ? 1 : 0) << ',' << num(r.g.fidelity) << ','
        << num(r.g.fixed_frame_fidelity) << ','
        << num(base.fidelity - r.g.fidelity) << '\n';
  }
  out.files.push_back({"fault_sweep.csv", csv.str()});
  Json meta;
  meta["shape"] = std::string(to_string(cfg.shape));
  meta["t_gate_ns"] = model.pulse.t_gate * 1e9;
  meta["baseline_fidelity"] = base.fidelity;
  meta["nominal_conditional_phase"] = model.nominal_phase;
  out.files.push_back({"fault_sweep.json", meta.dump(2) + "\n"});
  return out;
}

CommandOutput cmd_decoherence_bench(const RunConfig& cfg) {
  CommandOutput out{"decoherence-bench", {}};
  const CzModel model = model_for(cfg);
  const auto points = decoherence_curve(cfg, model, cfg.decoherence);
  std::ostringstream csv;
  csv << "depth,fidelity\n";
  std::vector<double> x, y;
  for (const auto& p : points) {
    csv << p.depth << ',' << num(p.fidelity) << '\n';
    x.push_back(p.depth);
    y.push_back(p.fidelity);
  }
  const ExponentialFit fit = fit_exponential(x, y);
  Json j;
  j["model"] = "F(d) = A exp(-d / tau) + C";
  j["A"] = fit.a;
  j["tau"] = std::isinf(fit.tau) ? Json(nullptr) : Json(fit.tau);
  j["C"] = fit.c;
  j["r2"] = fit.r2;
  j["t1_us"] = std::isinf(cfg.decoherence.t1) ? Json(nullptr)
                                              : Json(cfg.decoherence.t1 * 1e6);
  j["t2_us"] = std::isinf(cfg.decoherence.t2())
                   ? Json(nullptr)
                   : Json(cfg.decoherence.t2() * 1e6);
  j["t_gate_ns"] = model.pulse.t_gate * 1e9;
  out.files.push_back({"decoherence.csv", csv.str()});
  out.files.push_back({"decoherence_fit.json", j.dump(2) + "\n"});
  return out;
}

CommandOutput cmd_testgen(const RunConfig& cfg) {
  CommandOutput out{"testgen", {}};
  ChannelCache cache(model_for(cfg));
  const auto experiments = run_testgen(cfg, cache);

  Json summary;
  summary["t_gate_ns"] = cache.model().pulse.t_gate * 1e9;
  Json circuits = Json::array();
  for (const std::string& name : cfg.testgen.circuits) {
    const int width = select_circuit(name, cfg).width;
    std::ostringstream csv;
    csv << "experiment,pattern,fault_id,kind,target_gate,epsilon,repetitions,"
           "detection_rate\n";
    Json jc;
    jc["circuit"] = name;
    Json jexp = Json::array();
    std::vector<double> eps, best_reps;
    for (const auto& e : experiments) {
      if (e.circuit != name) continue;
      for (const auto& o : e.outcomes) {
        csv << e.name << ',' << bits(o.pattern, width) << ',' << o.fault_id
            << ',' << o.fault.label() << ',' << o.fault.target_gate << ','
            << fixed(o.fault.magnitude, 4) << ',' << reps(o) << ','
            << fixed(o.detection_rate, 4) << '\n';
      }
      Json je;
      je["experiment"] = e.name;
      je["epsilon"] = e.epsilon;
      const auto best = best_per_fault(e);
      if (e.all_cz) {
        const TestOutcome& b = best.front();
        je["best_pattern"] = b.detectable() ? Json(bits(b.pattern, width))
                                            : Json(nullptr);
        je["repetitions"] = reps(b);
        if (b.detectable()) {
          eps.push_back(e.epsilon);
          best_reps.push_back(static_cast<double>(b.repetitions));
        }
      } else {
        Json faults = Json::array();
        int undetectable = 0;
        for (const auto& b : best) {
          if (!b.detectable()) ++undetectable;
          faults.push_back(
              {{"target_gate", b.fault.target_gate},
               {"best_pattern",
                b.detectable() ? Json(bits(b.pattern, width)) : Json(nullptr)},
               {"repetitions", reps(b)}});
        }
        je["undetectable"] = undetectable;
        je["faults"] = std::move(faults);
      }
      jexp.push_back(std::move(je));
    }
    if (eps.size() >= 2) jc["all_cz_spearman"] = spearman(eps, best_reps);
    jc["experiments"] = std::move(jexp);
    circuits.push_back(std::move(jc));
    out.files.push_back({"testgen_" + name + ".csv", csv.str()});
  }
  summary["circuits"] = std::move(circuits);
  out.files.push_back({"testgen_summary.json", summary.dump(2) + "\n"});
  return out;
}

CommandOutput cmd_enumerate(const RunConfig& cfg) {
  CommandOutput out{"enumerate", {}};
  Json counts = Json::array();
  for (const std::string& name : cfg.enumerate.circuits) {
    const Circuit c = select_circuit(name, cfg);
    const FaultUniverse u =
        enumerate_faults(c, cfg.enumerate.fourier_terms,
                         cfg.enumerate.magnitude);
    std::ostringstream csv;
    write_fault_universe_csv(csv, u);
    out.files.push_back({"faults_" + name + ".csv", csv.str()});
    counts.push_back({{"circuit", name},
                      {"cz_count", u.cz_count},
                      {"fourier_terms", u.fourier_terms},
                      {"pulse_faults", u.pulse_fault_count()},
                      {"total_faults", u.faults.size()}});
  }
  out.files.push_back({"fault_counts.json", counts.dump(2) + "\n"});
  return out;
}

CommandOutput cmd_gate_sim(const RunConfig& cfg) {
  CommandOutput out{"gate-sim", {}};
  const CzModel model = model_for(cfg);
  Json j;
  j["shape"] = std::string(to_string(cfg.shape));
  j["t_gate_ns"] = model.pulse.t_gate * 1e9;
  j["theta_max"] = model.pulse.theta_max;
  j["static_zz_mhz"] = static_zz(cfg.device) / (2.0 * std::numbers::pi * 1e6);

  std::ostringstream csv;
  const auto& fault = cfg.gate_sim.fault;
  if (fault && fault->kind == FaultKind::kDecoherence) {
    const Operator s = decoherent_cz_superoperator(model, fault->decoherence);
    const Operator s_cz = super_of(gates::cz());
    csv << "row,col,re,im\n";
    for (Index r = 0; r < s.rows(); ++r) {
      for (Index c = 0; c < s.cols(); ++c) {
        csv << r << ',' << c << ',' << num(s(r, c).real()) << ','
            << num(s(r, c).imag()) << '\n';
      }
    }
    j["fault"] = fault->label();
    j["process_fidelity"] = (s_cz.adjoint() * s).trace().real() / 16.0;
    j["unitarity_note"] = "entries are the 16x16 column-stacking superoperator";
  } else {
    const FaultyGate g = faulty_cz(
        model, fault ? *fault : FaultSpec{FaultKind::kRatio, kAllGates, 0.0, 1});
    csv << "row,col,re,im,abs\n";
    const Index idx[4] = {0, 1, 3, 4};
    for (Index r = 0; r < 4; ++r) {
      for (Index c = 0; c < 4; ++c) {
        const Complex v = g.u4(r, c);
        csv << idx[r] << ',' << idx[c] << ',' << num(v.real()) << ','
            << num(v.imag()) << ',' << num(std::abs(v)) << '\n';
      }
    }
    j["fault"] = fault ? Json(fault->label()) : Json(nullptr);
    j["fidelity"] = g.fidelity;
    j["fixed_frame_fidelity"] = g.fixed_frame_fidelity;
    j["conditional_phase"] = conditional_phase(g.u4);
    j["phase_error"] = g.phase_error;
    double leak = 0.0;
    for (Index c = 0; c < 4; ++c) {
      leak = std::max(leak, 1.0 - g.u4.col(c).squaredNorm());
    }
    j["max_leakage"] = leak;
  }
  out.files.push_back({"gate_sim.csv", csv.str()});

  if (cfg.gate_sim.waveform) {
    Pulse p = model.pulse;
    if (fault && (fault->kind == FaultKind::kRatio ||
                  fault->kind == FaultKind::kBias ||
                  fault->kind == FaultKind::kTruncation)) {
      p = apply_parameter_fault(p, *fault);
    }
    const int n = std::max(2, cfg.gate_sim.waveform_samples);
    std::ostringstream w;
    w << "t_ns,theta,omega1_ghz\n";
    for (int k = 0; k < n; ++k) {
      const double t = p.t_gate * k / (n - 1);
      const double omega = shape_waveform(t, p, cfg.device);
      w << num(t * 1e9) << ',' << num(theta_from_detuning(omega, cfg.device))
        << ',' << num(omega / kGhz) << '\n';
    }
    out.files.push_back({"waveform.csv", w.str()});
  }
  out.files.push_back({"gate_sim.json", j.dump(2) + "\n"});
  return out;
}

CommandOutput run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "calibrate") return cmd_calibrate(cfg);
  if (command == "fault-sweep") return cmd_fault_sweep(cfg);
  if (command == "decoherence-bench") return cmd_decoherence_bench(cfg);
  if (command == "testgen") return cmd_testgen(cfg);
  if (command == "enumerate") return cmd_enumerate(cfg);
  if (command == "gate-sim") return cmd_gate_sim(cfg);
  throw std::invalid_argument("unknown command: " + command);
}

void write_outputs(const std::string& dir, const CommandOutput& out,
                   const RunConfig& cfg, double wall_time_s) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string hash = cfg.hash();
  for (const auto& f : out.files) {
    std::ofstream os(fs::path(dir) / f.name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + f.name);
    os << f.content;
    if (f.name.ends_with(".csv")) {
      Json meta;
      meta["command"] = out.command;
      meta["file"] = f.name;
      meta["config_hash"] = hash;
      meta["tool_version"] = tool_version();
      meta["wall_time_s"] = wall_time_s;
      meta["seed"] = cfg.seed;
      meta["workers"] = cfg.workers;
      std::ofstream ms(fs::path(dir) / (f.name + ".meta.json"),
                       std::ios::binary);
      ms << meta.dump(2) << '\n';
    }
  }
}

}  // namespace czfault
