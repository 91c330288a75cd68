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

#include "czfault/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace czfault {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kGhz = 2.0 * std::numbers::pi * 1e9;

// Reads the members of one JSON object and rejects the keys nobody asked for.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(path_ + ": unknown key '" + key + "'");
      }
    }
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (const Json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const Json::exception& e) {
        throw ConfigError(where(key) + ": " + e.what());
      }
    }
  }

  // Numbers scaled by `unit`; null stands for infinity.
  void get_scaled(const std::string& key, double unit, double& out) {
    if (const Json* v = find(key)) {
      if (v->is_null()) {
        out = std::numeric_limits<double>::infinity();
      } else if (v->is_number()) {
        out = v->get<double>() * unit;
      } else {
        throw ConfigError(where(key) + ": expected a number");
      }
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename Parse>
void get_list(Section& s, const std::string& key, std::vector<T>& out,
              Parse parse) {
  std::vector<std::string> names;
  s.get(key, names);
  if (!s.find(key) || names.empty()) return;
  out.clear();
  try {
    for (const auto& n : names) out.push_back(parse(n));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.where(key) + ": " + e.what());
  }
}

// Unit conversion leaves last-bit noise (6 GHz reads back as 5.999...);
// twelve significant digits keep to_json() a fixed point of from_json().
double canon(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

Json scaled_or_null(double v, double unit) {
  if (std::isinf(v)) return nullptr;
  return canon(v / unit);
}

FaultSpec parse_fault(const Json& j, const std::string& path) {
  Section s(j, path);
  FaultSpec f;
  std::string kind = "ratio";
  s.get("kind", kind);
  try {
    f.kind = parse_fault_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.where("kind") + ": " + e.what());
  }
  s.get("target_gate", f.target_gate);
  s.get("epsilon", f.magnitude);
  s.get("coefficient", f.coefficient);
  if (const Json* v = s.find("leakage")) {
    Section l(*v, s.where("leakage"));
    l.get("chi", f.leakage.chi);
    l.get("zeta", f.leakage.zeta);
    l.get("phi", f.leakage.phi);
  }
  if (const Json* v = s.find("decoherence")) {
    Section d(*v, s.where("decoherence"));
    double t1 = f.decoherence.t1, t2 = f.decoherence.t2();
    d.get_scaled("t1_us", 1e-6, t1);
    d.get_scaled("t2_us", 1e-6, t2);
    try {
      f.decoherence = DecoherenceParams::from_t1_t2(t1, t2);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.where("decoherence") + ": " + e.what());
    }
  }
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return f;
}

Json fault_to_json(const FaultSpec& f) {
  Json j;
  j["kind"] = std::string(to_string(f.kind));
  j["target_gate"] = f.target_gate;
  j["epsilon"] = f.magnitude;
  j["coefficient"] = f.coefficient;
  j["leakage"] = {{"chi", f.leakage.chi},
                  {"zeta", f.leakage.zeta},
                  {"phi", f.leakage.phi}};
  j["decoherence"] = {{"t1_us", scaled_or_null(f.decoherence.t1, 1e-6)},
                      {"t2_us", scaled_or_null(f.decoherence.t2(), 1e-6)}};
  return j;
}

template <typename T, typename Name>
Json names(const std::vector<T>& v, Name name) {
  Json j = Json::array();
  for (const auto& x : v) j.push_back(std::string(name(x)));
  return j;
}

}  // namespace

RunConfig RunConfig::from_json(std::string_view text) {
  RunConfig c;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return c;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Section s(root, "config");
  s.get("seed", c.seed);
  s.get("workers", c.workers);
  s.get("out", c.out);
  if (c.workers < 1) throw ConfigError("config.workers: must be >= 1");

  if (const Json* v = s.find("device")) {
    Section d(*v, "config.device");
    d.get_scaled("omega1_idle_ghz", kGhz, c.device.omega1_idle);
    d.get_scaled("omega2_ghz", kGhz, c.device.omega2);
    d.get_scaled("alpha_ghz", kGhz, c.device.alpha);
    d.get_scaled("g_ghz", kGhz, c.device.g);
    d.get_scaled("kappa_inv_ns", 1e-9, c.device.kappa_inv);
    d.get_scaled("g_res_ghz", kGhz, c.device.g_res);
    d.get_scaled("omega_r_ghz", kGhz, c.device.omega_r);
  }
  try {
    c.device.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.device: ") + e.what());
  }

  if (const Json* v = s.find("decoherence")) {
    Section d(*v, "config.decoherence");
    double t1 = c.decoherence.t1, t2 = c.decoherence.t2();
    d.get_scaled("t1_us", 1e-6, t1);
    d.get_scaled("t2_us", 1e-6, t2);
    try {
      c.decoherence = DecoherenceParams::from_t1_t2(t1, t2);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.decoherence: ") + e.what());
    }
  }

  if (const Json* v = s.find("pulse")) {
    Section p(*v, "config.pulse");
    std::string shape(to_string(c.shape));
    p.get("shape", shape);
    try {
      c.shape = parse_pulse_shape(shape);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.pulse.shape: ") + e.what());
    }
    if (const Json* t = p.find("t_gate_ns"); t && !t->is_null()) {
      if (!t->is_number()) throw ConfigError("config.pulse.t_gate_ns: number");
      c.t_gate = t->get<double>() * 1e-9;
    }
  }

  if (const Json* v = s.find("calibration")) {
    Section k(*v, "config.calibration");
    auto& o = c.calibration;
    k.get_scaled("t_lo_ns", 1e-9, o.t_lo);
    k.get_scaled("t_hi_ns", 1e-9, o.t_hi);
    k.get_scaled("t_step_ns", 1e-9, o.t_step);
    k.get_scaled("coarse_step_ns", 1e-9, o.coarse_step);
    k.get("refine_candidates", o.refine_candidates);
    k.get("steps_per_gate", o.sim.steps_per_gate);
    get_list(k, "shapes", c.calibrate_shapes, parse_pulse_shape);
  }
  if (c.calibration.sim.steps_per_gate < 100) {
    throw ConfigError("config.calibration.steps_per_gate: must be >= 100");
  }

  if (const Json* v = s.find("circuit")) {
    Section k(*v, "config.circuit");
    k.get("name", c.circuit.name);
    k.get("seed", c.circuit.seed);
    k.get("width", c.circuit.width);
    k.get("cz_count", c.circuit.cz_count);
    k.get("file", c.circuit.file);
  }

  if (const Json* v = s.find("fault_sweep")) {
    Section k(*v, "config.fault_sweep");
    get_list(k, "kinds", c.fault_sweep.kinds, parse_fault_kind);
    k.get("coefficients", c.fault_sweep.coefficients);
    k.get("epsilons", c.fault_sweep.epsilons);
  }

  if (const Json* v = s.find("testgen")) {
    Section k(*v, "config.testgen");
    auto& t = c.testgen;
    k.get("circuits", t.circuits);
    k.get("all_cz_epsilons", t.all_cz_epsilons);
    k.get("single_cz_epsilons", t.single_cz_epsilons);
    get_list(k, "kinds", t.kinds, parse_fault_kind);
    std::string all_cz(to_string(t.all_cz_kind));
    k.get("all_cz_kind", all_cz);
    try {
      t.all_cz_kind = parse_fault_kind(all_cz);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.testgen.all_cz_kind: ") + e.what());
    }
    k.get("coefficient", t.coefficient);
    k.get("quantile", t.chi.quantile);
    k.get("trials", t.chi.trials);
    k.get("cap", t.chi.cap);
    try {
      t.chi.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.testgen: ") + e.what());
    }
  }

  if (const Json* v = s.find("decoherence_bench")) {
    Section k(*v, "config.decoherence_bench");
    auto& b = c.decoherence_bench;
    k.get("depth_min", b.depth_min);
    k.get("depth_max", b.depth_max);
    k.get("depth_step", b.depth_step);
    k.get("samples", b.samples);
    k.get_scaled("single_qubit_time_ns", 1e-9, b.single_qubit_time);
    if (b.depth_min < 1 || b.depth_max < b.depth_min || b.depth_step < 1 ||
        b.samples < 1) {
      throw ConfigError("config.decoherence_bench: invalid depth grid");
    }
  }

  if (const Json* v = s.find("enumerate")) {
    Section k(*v, "config.enumerate");
    k.get("circuits", c.enumerate.circuits);
    k.get("fourier_terms", c.enumerate.fourier_terms);
    k.get("epsilon", c.enumerate.magnitude);
  }

  if (const Json* v = s.find("gate_sim")) {
    Section k(*v, "config.gate_sim");
    if (const Json* f = k.find("fault"); f && !f->is_null()) {
      c.gate_sim.fault = parse_fault(*f, "config.gate_sim.fault");
    }
    k.get("waveform", c.gate_sim.waveform);
    k.get("waveform_samples", c.gate_sim.waveform_samples);
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

FaultSpec fault_spec_from_json(std::string_view text) {
  try {
    return parse_fault(Json::parse(text), "fault");
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("fault: ") + e.what());
  }
}

std::string RunConfig::to_json() const {
  Json j;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out"] = out;
  j["device"] = {{"omega1_idle_ghz", canon(device.omega1_idle / kGhz)},
                 {"omega2_ghz", canon(device.omega2 / kGhz)},
                 {"alpha_ghz", canon(device.alpha / kGhz)},
                 {"g_ghz", canon(device.g / kGhz)},
                 {"kappa_inv_ns", canon(device.kappa_inv * 1e9)},
                 {"g_res_ghz", canon(device.g_res / kGhz)},
                 {"omega_r_ghz", canon(device.omega_r / kGhz)}};
  j["decoherence"] = {{"t1_us", scaled_or_null(decoherence.t1, 1e-6)},
                      {"t2_us", scaled_or_null(decoherence.t2(), 1e-6)}};
  j["pulse"] = {{"shape", std::string(to_string(shape))},
                {"t_gate_ns",
                 t_gate ? Json(canon(*t_gate * 1e9)) : Json(nullptr)}};
  j["calibration"] = {
      {"t_lo_ns", canon(calibration.t_lo * 1e9)},
      {"t_hi_ns", canon(calibration.t_hi * 1e9)},
      {"t_step_ns", canon(calibration.t_step * 1e9)},
      {"coarse_step_ns", canon(calibration.coarse_step * 1e9)},
      {"refine_candidates", calibration.refine_candidates},
      {"steps_per_gate", calibration.sim.steps_per_gate},
      {"shapes", names(calibrate_shapes,
                       [](PulseShape s) { return to_string(s); })}};
  j["circuit"] = {{"name", circuit.name},
                  {"seed", circuit.seed},
                  {"width", circuit.width},
                  {"cz_count", circuit.cz_count},
                  {"file", circuit.file}};
  auto kind_name = [](FaultKind k) { return to_string(k); };
  j["fault_sweep"] = {{"kinds", names(fault_sweep.kinds, kind_name)},
                      {"coefficients", fault_sweep.coefficients},
                      {"epsilons", fault_sweep.epsilons}};
  j["testgen"] = {{"circuits", testgen.circuits},
                  {"all_cz_epsilons", testgen.all_cz_epsilons},
                  {"single_cz_epsilons", testgen.single_cz_epsilons},
                  {"kinds", names(testgen.kinds, kind_name)},
                  {"all_cz_kind", std::string(to_string(testgen.all_cz_kind))},
                  {"coefficient", testgen.coefficient},
                  {"quantile", testgen.chi.quantile},
                  {"trials", testgen.chi.trials},
                  {"cap", testgen.chi.cap}};
  j["decoherence_bench"] = {
      {"depth_min", decoherence_bench.depth_min},
      {"depth_max", decoherence_bench.depth_max},
      {"depth_step", decoherence_bench.depth_step},
      {"samples", decoherence_bench.samples},
      {"single_qubit_time_ns",
       canon(decoherence_bench.single_qubit_time * 1e9)}};
  j["enumerate"] = {{"circuits", enumerate.circuits},
                    {"fourier_terms", enumerate.fourier_terms},
                    {"epsilon", enumerate.magnitude}};
  j["gate_sim"] = {
      {"fault", gate_sim.fault ? fault_to_json(*gate_sim.fault) : Json()},
      {"waveform", gate_sim.waveform},
      {"waveform_samples", gate_sim.waveform_samples}};
  return j.dump(2);
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace czfault
