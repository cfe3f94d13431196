/*
 * Copyright 2026 The overlap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "overlap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "overlap/csv.hpp"
#include "overlap/dd.hpp"
#include "overlap/kernels.hpp"
#include "overlap/objective.hpp"

namespace overlap {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorCategory::kConfig, path + ": " + what);
}

// Reads keys of one JSON object and rejects any key nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) config_error(field(it.key()), "unknown key");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) { return j_.at(key); }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_number()) config_error(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(field(key), "must be finite");
    return x;
  }
  std::uint64_t count(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      config_error(field(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    if (!at(key).is_boolean()) config_error(field(key), "expected true or false");
    return at(key).get<bool>();
  }
  std::string text(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    if (!at(key).is_string()) config_error(field(key), "expected a string");
    return at(key).get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = at(key);
    if (!v.is_array()) config_error(field(key), "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        config_error(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Task parse_task(const std::string& name, const std::string& path) {
  if (name == "gate_protect") return Task::kGateProtect;
  if (name == "cool") return Task::kCool;
  if (name == "heat") return Task::kHeat;
  if (name == "score_only") return Task::kScoreOnly;
  if (name == "ddcompare") return Task::kDdCompare;
  if (name == "simulate") return Task::kSimulate;
  config_error(path, "unknown task '" + name + "'");
}

SimMethod parse_method(const std::string& name, const std::string& path) {
  for (SimMethod m : {SimMethod::kDyson2, SimMethod::kTcl2, SimMethod::kNz2}) {
    if (name == sim_method_name(m)) return m;
  }
  config_error(path, "unknown method '" + name + "'");
}

const char* energy_kind_name(EnergyKind kind) {
  return kind == EnergyKind::kSpeed ? "speed" : "modulation";
}

const char* parametrization_name(Parametrization p) {
  return p == Parametrization::kEuler ? "euler" : "hamiltonian";
}

bool optimizing(Task task) {
  return task == Task::kGateProtect || task == Task::kCool || task == Task::kHeat;
}

ScoreKind score_kind_of(const RunConfig& c) {
  if (c.score.kind) return *c.score.kind;
  return c.task == Task::kGateProtect ? ScoreKind::kGateError : ScoreKind::kLinearEntropy;
}

Parametrization parametrization_of(const RunConfig& c) {
  if (c.controls.parametrization) return *c.controls.parametrization;
  return c.dimension == 2 ? Parametrization::kEuler : Parametrization::kHamiltonian;
}

double omega0_of(const RunConfig& c) {
  return c.constraint.omega0 ? *c.constraint.omega0 : kTwoPi / c.t;
}

std::size_t quad_steps_of(const RunConfig& c) {
  return c.quad_steps > 0 ? c.quad_steps : 10 * c.knots;
}

double narrowest_width(const BathConfig& b) {
  double w = 0.0;
  auto take = [&](double weight, double width) {
    if (weight > 0.0) w = w > 0.0 ? std::min(w, width) : width;
  };
  take(b.weight, b.width);
  take(b.tail_weight, b.tail_width);
  return w;
}

// Smallest K > M with Omega / K <= width / 10.
std::size_t omega_half_of(const RunConfig& c) {
  if (c.omega_half > 0) return c.omega_half;
  const std::size_t m = quad_steps_of(c);
  const double cutoff = kPi * static_cast<double>(m) / c.t;
  std::size_t k = m + 1;
  const double w = narrowest_width(c.bath);
  if (w > 0.0) {
    k = std::max(k, static_cast<std::size_t>(std::ceil(10.0 * cutoff / w - 1e-9)));
  }
  return k;
}

std::string read_file(const fs::path& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error(field, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const RunConfig& c, const std::string& file) {
  const fs::path p(file);
  return p.is_absolute() || c.base_dir.empty() ? p : c.base_dir / p;
}

bool is_trajectory_file(const std::string& initial) {
  return !initial.empty() && initial != "free" && initial != "random";
}

void validate(const RunConfig& c) {
  if (c.dimension < 2) config_error("dimension", "must be >= 2");
  if (!(c.t > 0.0)) config_error("t", "must be > 0");
  if (c.knots < 1) config_error("knots", "must be >= 1");
  if (quad_steps_of(c) < c.knots) config_error("quad_steps", "must be >= knots");
  if (c.bath.file.empty()) {
    const std::size_t m = quad_steps_of(c);
    if (omega_half_of(c) <= m) config_error("omega_half", "must exceed quad_steps");
    const double cutoff = kPi * static_cast<double>(m) / c.t;
    if (c.bath.center >= cutoff) {
      config_error("bath.center", "must lie below the cutoff pi quad_steps / t = " +
                                      csv::format(cutoff));
    }
    if (c.bath.width < 0.0) config_error("bath.width", "must be >= 0");
    if (c.bath.tail_width < 0.0) config_error("bath.tail_width", "must be >= 0");
    if (c.bath.weight < 0.0) config_error("bath.weight", "must be >= 0");
    if (c.bath.tail_weight < 0.0) config_error("bath.tail_weight", "must be >= 0");
    if (!(c.bath.kappa > 0.0)) config_error("bath.kappa", "must be > 0");
    const std::size_t channels = static_cast<std::size_t>(c.dimension * c.dimension - 1);
    if (!c.bath.channels.empty() && c.bath.channels.size() != channels) {
      config_error("bath.channels", "expected " + std::to_string(channels) + " entries");
    }
  }
  const ScoreKind kind = score_kind_of(c);
  if (c.dimension == 2 && c.score.populations.empty() && !(c.score.p >= 0.0 && c.score.p <= 0.5)) {
    config_error("score.p", "must lie in [0, 0.5]");
  }
  if (!c.score.populations.empty() &&
      c.score.populations.size() != static_cast<std::size_t>(c.dimension)) {
    config_error("score.populations", "expected " + std::to_string(c.dimension) + " entries");
  }
  if (c.dimension > 2 && c.score.populations.empty() && kind != ScoreKind::kGateError &&
      kind != ScoreKind::kFidelity && c.task != Task::kDdCompare) {
    config_error("score.populations", "required for dimension > 2");
  }
  if (kind == ScoreKind::kExpectation &&
      c.score.observable.size() != static_cast<std::size_t>(c.dimension)) {
    config_error("score.observable", "expected " + std::to_string(c.dimension) + " entries");
  }
  if (kind == ScoreKind::kFidelity &&
      c.score.psi.size() != static_cast<std::size_t>(c.dimension)) {
    config_error("score.psi", "expected " + std::to_string(c.dimension) + " entries");
  }
  if (c.score.k < 0.0) config_error("score.k", "must be >= 0");
  if (c.constraint.energy < 0.0) config_error("constraint.energy", "must be >= 0");
  if (parametrization_of(c) == Parametrization::kEuler && c.dimension != 2) {
    config_error("controls.parametrization", "euler controls need dimension 2");
  }
  const OptimizerConfig& o = c.optimizer;
  if (!(o.step > 0.0)) config_error("optimizer.step", "must be > 0");
  if (o.step_norm < 0.0) config_error("optimizer.step_norm", "must be >= 0");
  if (!(o.fd_step > 0.0)) config_error("optimizer.fd_step", "must be > 0");
  if (!(o.drift_tol > 0.0)) config_error("optimizer.drift_tol", "must be > 0");
  if (o.grad_tol < 0.0) config_error("optimizer.grad_tol", "must be >= 0");
  if (o.el_tol < 0.0) config_error("optimizer.el_tol", "must be >= 0");
  if (c.sim.memory_window < 0.0) config_error("sim.memory_window", "must be >= 0");
  if (c.task == Task::kDdCompare) {
    if (c.dimension != 2) config_error("dimension", "ddcompare is qubit only");
    if (c.dd.n.empty()) config_error("dd.n", "must not be empty");
    if (c.dd.omega_half < 1) config_error("dd.omega_half", "must be >= 1");
    if (c.dd.channel < 1 || c.dd.channel > 3) config_error("dd.channel", "must be 1, 2 or 3");
    if (c.dd.axis < 1 || c.dd.axis > 3) config_error("dd.axis", "must be 1, 2 or 3");
  }
  if (!c.sweep.parameter.empty()) {
    const std::string& p = c.sweep.parameter;
    if (p != "p" && p != "energy" && p != "kappa" && p != "n") {
      config_error("sweep.parameter", "expected p, energy, kappa or n");
    }
    if (c.sweep.values.empty()) config_error("sweep.values", "must not be empty");
  }
}

}  // namespace

const char* task_name(Task task) {
  switch (task) {
    case Task::kGateProtect:
      return "gate_protect";
    case Task::kCool:
      return "cool";
    case Task::kHeat:
      return "heat";
    case Task::kScoreOnly:
      return "score_only";
    case Task::kDdCompare:
      return "ddcompare";
    case Task::kSimulate:
      return "simulate";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::kConfig, std::string("config: ") + e.what());
  }
  RunConfig c;
  c.base_dir = base_dir;
  {
    Section root(j, "");
    c.task = parse_task(root.text("task", "cool"), "task");
    c.dimension = static_cast<int>(root.count("dimension", 2));
    c.t = root.number("t", c.t);
    c.knots = root.count("knots", c.knots);
    c.quad_steps = root.count("quad_steps", 0);
    c.omega_half = root.count("omega_half", 0);
    c.seed = root.count("seed", c.seed);
    c.output = root.text("output", "");

    if (root.has("bath")) {
      Section s(root.at("bath"), "bath");
      BathConfig& b = c.bath;
      b.center = s.number("center", b.center);
      b.width = s.number("width", b.width);
      b.weight = s.number("weight", b.weight);
      b.tail_weight = s.number("tail_weight", b.tail_weight);
      b.tail_width = s.number("tail_width", b.tail_width);
      b.kappa = s.number("kappa", b.kappa);
      b.file = s.text("file", "");
      if (s.has("channels")) {
        const json& v = s.at("channels");
        if (!v.is_array()) config_error("bath.channels", "expected an array of booleans");
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!v[i].is_boolean()) {
            config_error("bath.channels[" + std::to_string(i) + "]", "expected true or false");
          }
          b.channels.push_back(v[i].get<bool>());
        }
      }
    }
    if (root.has("score")) {
      Section s(root.at("score"), "score");
      if (s.has("kind")) {
        const std::string name = s.text("kind", "");
        try {
          c.score.kind = parse_score_kind(name);
        } catch (const Error&) {
          config_error("score.kind", "unknown score '" + name + "'");
        }
      }
      c.score.p = s.number("p", c.score.p);
      c.score.populations = s.numbers("populations");
      c.score.k = s.number("k", c.score.k);
      c.score.observable = s.numbers("observable");
      c.score.psi = s.numbers("psi");
    }
    if (root.has("constraint")) {
      Section s(root.at("constraint"), "constraint");
      const std::string kind = s.text("kind", "modulation");
      if (kind == "speed") {
        c.constraint.kind = EnergyKind::kSpeed;
      } else if (kind != "modulation") {
        config_error("constraint.kind", "expected speed or modulation");
      }
      c.constraint.energy = s.number("energy", c.constraint.energy);
      if (s.has("omega0")) c.constraint.omega0 = s.number("omega0", 0.0);
    }
    if (root.has("controls")) {
      Section s(root.at("controls"), "controls");
      if (s.has("parametrization")) {
        const std::string p = s.text("parametrization", "");
        if (p == "euler") {
          c.controls.parametrization = Parametrization::kEuler;
        } else if (p == "hamiltonian") {
          c.controls.parametrization = Parametrization::kHamiltonian;
        } else {
          config_error("controls.parametrization", "expected euler or hamiltonian");
        }
      }
      c.controls.pin_end = s.boolean("pin_end", false);
      c.controls.initial = s.text("initial", "");
    }
    if (root.has("optimizer")) {
      Section s(root.at("optimizer"), "optimizer");
      OptimizerConfig& o = c.optimizer;
      o.step = s.number("step", o.step);
      o.step_norm = s.number("step_norm", o.step_norm);
      o.max_iters = s.count("max_iters", o.max_iters);
      o.grad_tol = s.number("grad_tol", o.grad_tol);
      o.el_tol = s.number("el_tol", o.el_tol);
      o.fd_step = s.number("fd_step", o.fd_step);
      o.restarts = s.count("restarts", o.restarts);
      o.drift_tol = s.number("drift_tol", o.drift_tol);
      o.max_rejections = s.count("max_rejections", o.max_rejections);
    }
    if (root.has("sim")) {
      Section s(root.at("sim"), "sim");
      if (s.has("methods")) {
        const json& v = s.at("methods");
        if (!v.is_array()) config_error("sim.methods", "expected an array of names");
        c.sim.methods.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
          const std::string path = "sim.methods[" + std::to_string(i) + "]";
          if (!v[i].is_string()) config_error(path, "expected a string");
          c.sim.methods.push_back(parse_method(v[i].get<std::string>(), path));
        }
      }
      c.sim.steps = s.count("steps", 0);
      c.sim.memory_window = s.number("memory_window", 0.0);
    }
    if (root.has("dd")) {
      Section s(root.at("dd"), "dd");
      if (s.has("n")) {
        c.dd.n.clear();
        for (double v : s.numbers("n")) {
          if (v < 0.0 || v != std::floor(v)) config_error("dd.n", "expected pulse counts");
          c.dd.n.push_back(static_cast<std::size_t>(v));
        }
      }
      c.dd.omega_cutoff = s.number("omega_cutoff", 0.0);
      c.dd.omega_half = s.count("omega_half", c.dd.omega_half);
      c.dd.channel = static_cast<int>(s.count("channel", 3));
      c.dd.axis = static_cast<int>(s.count("axis", 1));
    }
    if (root.has("sweep")) {
      Section s(root.at("sweep"), "sweep");
      c.sweep.parameter = s.text("parameter", "");
      c.sweep.values = s.numbers("values");
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const fs::path& path) {
  return parse_config(read_file(path, "--config"), path.parent_path());
}

std::string canonical_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["task"] = task_name(c.task);
  j["dimension"] = c.dimension;
  j["t"] = c.t;
  j["knots"] = c.knots;
  j["quad_steps"] = quad_steps_of(c);
  j["omega_half"] = c.bath.file.empty() ? omega_half_of(c) : 0;
  j["seed"] = c.seed;
  auto& b = j["bath"];
  if (c.bath.file.empty()) {
    b["center"] = c.bath.center;
    b["width"] = c.bath.width;
    b["weight"] = c.bath.weight;
    b["tail_weight"] = c.bath.tail_weight;
    b["tail_width"] = c.bath.tail_width;
    b["kappa"] = c.bath.kappa;
    b["channels"] = c.bath.channels;
  } else {
    b["file"] = c.bath.file;
  }
  auto& s = j["score"];
  s["kind"] = score_kind_name(score_kind_of(c));
  s["p"] = c.score.p;
  s["populations"] = c.score.populations;
  s["k"] = c.score.k;
  s["observable"] = c.score.observable;
  s["psi"] = c.score.psi;
  j["constraint"] = {{"kind", energy_kind_name(c.constraint.kind)},
                     {"energy", c.constraint.energy},
                     {"omega0", omega0_of(c)}};
  j["controls"] = {{"parametrization", parametrization_name(parametrization_of(c))},
                   {"pin_end", c.controls.pin_end},
                   {"initial", c.controls.initial}};
  const OptimizerConfig& o = c.optimizer;
  j["optimizer"] = {{"step", o.step},           {"step_norm", o.step_norm},
                    {"max_iters", o.max_iters}, {"grad_tol", o.grad_tol},
                    {"el_tol", o.el_tol},       {"fd_step", o.fd_step},
                    {"restarts", o.restarts},   {"drift_tol", o.drift_tol},
                    {"max_rejections", o.max_rejections}};
  std::vector<std::string> methods;
  for (SimMethod m : c.sim.methods) methods.push_back(sim_method_name(m));
  j["sim"] = {{"methods", methods}, {"steps", c.sim.steps},
              {"memory_window", c.sim.memory_window}};
  j["dd"] = {{"n", c.dd.n},           {"omega_cutoff", c.dd.omega_cutoff},
             {"omega_half", c.dd.omega_half}, {"channel", c.dd.channel},
             {"axis", c.dd.axis}};
  j["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  return j.dump();
}

std::string config_hash(const RunConfig& c) {
  std::string data = canonical_config(c);
  if (!c.bath.file.empty()) data += read_file(resolve(c, c.bath.file), "bath.file");
  if (is_trajectory_file(c.controls.initial)) {
    data += read_file(resolve(c, c.controls.initial), "controls.initial");
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Problem build_problem(const RunConfig& c) {
  Problem p;
  p.basis = generate_basis(c.dimension);
  if (c.bath.file.empty()) {
    LorentzianParams lp;
    lp.center = c.bath.center;
    lp.width = c.bath.width;
    lp.weight = c.bath.weight;
    lp.tail_weight = c.bath.tail_weight;
    lp.tail_width = c.bath.tail_width;
    lp.kappa = c.bath.kappa;
    const std::size_t m = quad_steps_of(c);
    lp.cutoff = kPi * static_cast<double>(m) / c.t;
    lp.step = lp.cutoff / static_cast<double>(omega_half_of(c));
    lp.channel_mask = c.bath.channels.empty()
                          ? std::vector<bool>(p.basis.size(), true)
                          : c.bath.channels;
    p.bath = make_lorentzian_bath(lp);
    p.quadrature = {c.t, m};
  } else {
    std::ifstream in(resolve(c, c.bath.file));
    if (!in) config_error("bath.file", "cannot open '" + c.bath.file + "'");
    p.bath = read_bath_csv(in);
    if (p.bath.channels != p.basis.size()) {
      config_error("bath.file", "channel count does not match the dimension");
    }
    // The quadrature step must be the Nyquist step pi / Omega of the file's grid.
    const double m = p.bath.grid.cutoff() * c.t / kPi;
    const double rounded = std::round(m);
    if (rounded < 1.0 || std::abs(m - rounded) > 1e-6 * m) {
      config_error("bath.file", "cutoff * t / pi must be an integer (got " + csv::format(m) + ")");
    }
    p.quadrature = {c.t, static_cast<std::size_t>(rounded)};
    if (p.bath.grid.half <= p.quadrature.steps) {
      config_error("bath.file", "grid needs more points than the quadrature has steps");
    }
  }
  p.corr = correlation_from_spectrum(p.bath);

  const int d = c.dimension;
  const ScoreKind kind = score_kind_of(c);
  Operator rho0;
  if (!c.score.populations.empty()) {
    rho0 = Operator::Zero(d, d);
    for (int i = 0; i < d; ++i) rho0(i, i) = c.score.populations[static_cast<std::size_t>(i)];
  } else if (d == 2) {
    rho0 = mixture_state(c.score.p);
  } else {
    rho0 = Operator::Identity(d, d) / static_cast<double>(d);
  }
  ScoreExtras extra;
  extra.k = c.score.k;
  if (kind == ScoreKind::kExpectation) {
    extra.observable = Operator::Zero(d, d);
    for (int i = 0; i < d; ++i) extra.observable(i, i) = c.score.observable[static_cast<std::size_t>(i)];
  }
  if (kind == ScoreKind::kFidelity) {
    extra.psi = Eigen::VectorXcd::Zero(d);
    for (int i = 0; i < d; ++i) extra.psi(i) = c.score.psi[static_cast<std::size_t>(i)];
    if (c.score.populations.empty()) rho0 = Operator();
  }
  try {
    p.spec = make_score_spec(kind, rho0, extra);
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kValidation) config_error("score", e.what());
    throw;
  }
  p.gamma = spec_gamma(p.spec, p.basis);
  p.factor = kind == ScoreKind::kGateError ? -1.0 : 1.0;
  p.k = c.score.k > 0.0 ? c.score.k : static_cast<double>(d) / (d - 1.0);
  p.h0 = (0.5 * omega0_of(c)) * (d == 2 ? pauli(3) : p.basis.ops.back());
  return p;
}

namespace {

ControlTrajectory free_controls(const RunConfig& c, const Problem& p) {
  ControlTrajectory traj;
  traj.t = c.t;
  traj.dim = c.dimension;
  traj.kind = parametrization_of(c);
  traj.pin_start = traj.kind == Parametrization::kEuler;
  traj.pin_end = c.controls.pin_end;
  const auto rows = static_cast<Eigen::Index>(c.knots + 1);
  const auto params = static_cast<Eigen::Index>(p.basis.size());
  traj.f = RealMatrix::Zero(rows, params);
  const TimeGrid grid = traj.grid();
  if (traj.kind == Parametrization::kEuler) {
    for (Eigen::Index k = 0; k < rows; ++k) {
      traj.f(k, 2) = omega0_of(c) * grid.at(static_cast<std::size_t>(k));
    }
  } else {
    const Vector h = expand(p.h0, p.basis).real();
    for (Eigen::Index k = 0; k < rows; ++k) traj.f.row(k) = h.transpose();
  }
  return traj;
}

OptimizerConfig optimizer_config(const RunConfig& c, const Problem& p) {
  OptimizerConfig o = c.optimizer;
  o.direction = c.task == Task::kHeat ? Direction::kMaximize : Direction::kMinimize;
  o.constraint = c.constraint.kind;
  o.target = c.constraint.energy;
  o.h0 = p.h0;
  o.seed = c.seed;
  return o;
}

QuadraticOverlap::Mode mode_of(const Problem& p) {
  return p.spec.commuting ? QuadraticOverlap::Mode::kFull : QuadraticOverlap::Mode::kCausal;
}

std::ofstream open_out(const fs::path& dir, const std::string& name,
                       std::vector<std::string>& files) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) fail(ErrorCategory::kRuntime, "cannot write '" + (dir / name).string() + "'");
  files.push_back(name);
  return out;
}

void write_manifest(const fs::path& dir, const RunConfig& c, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json j;
  j["name"] = "overlap";
  j["version"] = kVersion;
  j["task"] = task_name(c.task);
  j["config_hash"] = config_hash(c);
  j["config"] = nlohmann::ordered_json::parse(canonical_config(c));
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  j["kernels"] = kernels::isa_name(kernels::active_kernels().isa);
  j["files"] = files;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) fail(ErrorCategory::kRuntime, "cannot write manifest");
  out << j.dump(2) << '\n';
}

std::vector<std::size_t> sim_steps_ladder(std::size_t first) {
  std::vector<std::size_t> out;
  for (std::size_t s = first, i = 0; i < 6; ++i, s *= 2) out.push_back(s);
  return out;
}

ScoreReport report_for(const RunConfig& c, const Problem& p, const ControlTrajectory& traj) {
  const std::vector<Operator> path = propagators(traj, p.quadrature);
  const RotationPath rot = rotation_path(path, p.quadrature, p.basis);
  const SystemSpectrum sys = system_spectrum(rot, p.bath.grid);
  ScoreReport r;
  r.commuting = p.spec.commuting;
  r.p_tilde = score_noncommuting(rot, p.corr, p.gamma);
  if (p.spec.commuting) {
    r.p_time = score_timedomain(rot, p.corr, p.gamma);
    r.p_spectral = score_spectral(sys, p.bath, p.gamma);
    const ScoreBounds b = score_bounds(p.gamma, p.bath, c.t);
    r.bound_lo = b.lo;
    r.bound_hi = b.hi;
  } else {
    r.p_time = r.p_spectral = std::nan("");
    r.bound_lo = r.bound_hi = std::nan("");
  }
  if (p.spec.kind == ScoreKind::kGateError) {
    r.has_gate_error = true;
    r.gate_error = gate_error(sys, p.bath, c.dimension);
  }
  r.t = c.t;
  r.time_steps = p.quadrature.steps;
  r.omega_points = p.bath.grid.size();
  r.omega_cutoff = p.bath.grid.cutoff();
  r.omega_step = p.bath.grid.step;
  r.kappa = p.bath.kappa;
  return r;
}

void write_spectra(std::ostream& out, const Problem& p, const ControlTrajectory& traj) {
  const std::vector<Operator> path = propagators(traj, p.quadrature);
  const RotationPath rot = rotation_path(path, p.quadrature, p.basis);
  const SystemSpectrum sys = system_spectrum(rot, p.bath.grid);
  const std::vector<ComplexMatrix> f = system_spectral_matrix(sys, p.gamma);
  const std::size_t n = p.basis.size();
  std::vector<std::string> header{"omega"};
  for (std::size_t j = 1; j <= n; ++j) header.push_back("F_" + std::to_string(j));
  for (std::size_t j = 1; j <= n; ++j) header.push_back("G_" + std::to_string(j));
  for (std::size_t j = 1; j <= n; ++j) header.push_back("F_norm_" + std::to_string(j));
  csv::write_header(out, header);
  std::vector<double> peak(n, 0.0);
  for (const auto& m : f) {
    for (std::size_t j = 0; j < n; ++j) peak[j] = std::max(peak[j], std::abs(m(j, j).real()));
  }
  for (std::size_t k = 0; k < f.size(); ++k) {
    std::vector<double> row{p.bath.grid.omega(k)};
    for (std::size_t j = 0; j < n; ++j) row.push_back(f[k](j, j).real());
    for (std::size_t j = 0; j < n; ++j) row.push_back(p.bath.spectrum[k](j, j).real());
    for (std::size_t j = 0; j < n; ++j) {
      row.push_back(peak[j] > 0.0 ? f[k](j, j).real() / peak[j] : 0.0);
    }
    csv::write_row(out, row);
  }
}

void write_hamiltonian(std::ostream& out, const Problem& p, const ControlTrajectory& traj) {
  const std::vector<Operator> path = propagators(traj, p.quadrature);
  const std::vector<Operator> h = hamiltonian_from_propagator(path, p.quadrature.step());
  std::vector<std::string> header{"tau"};
  for (std::size_t j = 1; j <= p.basis.size(); ++j) header.push_back("omega_" + std::to_string(j));
  csv::write_header(out, header);
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::vector<double> row{p.quadrature.at(i)};
    const Vector w = expand(h[i], p.basis).real();
    row.insert(row.end(), w.data(), w.data() + w.size());
    csv::write_row(out, row);
  }
}

RunOutcome run_dd(const RunConfig& c, const fs::path& out) {
  RunOutcome o;
  o.task = c.task;
  o.status = "done";
  const std::size_t n_max = *std::max_element(c.dd.n.begin(), c.dd.n.end());
  const double cutoff = c.dd.omega_cutoff > 0.0
                            ? c.dd.omega_cutoff
                            : 2.0 * 4.0 * kPi * static_cast<double>(std::max<std::size_t>(n_max, 1)) / c.t;
  const FrequencyGrid grid{c.dd.omega_half, cutoff / static_cast<double>(c.dd.omega_half)};
  std::ofstream summary = open_out(out, "dd_summary.csv", o.files);
  csv::write_header(summary, {"n", "pdd_peak", "udd_peak", "low_cutoff", "pdd_low", "udd_low"});
  for (std::size_t n : c.dd.n) {
    const std::vector<double> pdd = dd_spectrum(pdd_sequence(n, c.t, c.dd.axis), grid, c.dd.channel);
    const std::vector<double> udd = dd_spectrum(udd_sequence(n, c.t, c.dd.axis), grid, c.dd.channel);
    std::ofstream a = open_out(out, "dd_pdd" + std::to_string(n) + ".csv", o.files);
    write_dd_csv(a, grid, pdd);
    std::ofstream b = open_out(out, "dd_udd" + std::to_string(n) + ".csv", o.files);
    write_dd_csv(b, grid, udd);
    const double pp = main_peak(grid, pdd);
    const double up = main_peak(grid, udd);
    const double low = 0.5 * pp;
    csv::write_row(summary, {static_cast<double>(n), pp, up, low,
                             low_frequency_weight(grid, pdd, low),
                             low_frequency_weight(grid, udd, low)});
  }
  return o;
}

}  // namespace

ControlTrajectory initial_trajectory(const RunConfig& c, const Problem& p) {
  const ControlTrajectory free = free_controls(c, p);
  const std::string& init = c.controls.initial;
  if (is_trajectory_file(init)) {
    std::ifstream in(resolve(c, init));
    if (!in) config_error("controls.initial", "cannot open '" + init + "'");
    ControlTrajectory traj = read_trajectory_csv(in, c.dimension);
    if (std::abs(traj.t - c.t) > 1e-9 * c.t) config_error("controls.initial", "t differs from config");
    traj.kind = free.kind;
    traj.pin_start = free.pin_start;
    traj.pin_end = free.pin_end;
    return traj;
  }
  const bool random = init == "random" || (init.empty() && optimizing(c.task));
  if (!random) return free;
  std::mt19937_64 rng(c.seed);
  return random_trajectory(free, optimizer_config(c, p), rng);
}

std::vector<SimResult> simulate(const Problem& p, const ControlTrajectory& traj,
                                const SimConfig& sim, const Operator& rho0) {
  std::vector<SimResult> out;
  if (sim.methods.empty()) return out;
  const double t = p.quadrature.t;
  std::string last;
  for (std::size_t steps : sim_steps_ladder(sim.steps > 0 ? sim.steps : p.quadrature.steps)) {
    try {
      const TimeGrid half_grid{t, 2 * steps};
      const std::vector<Operator> half = propagators(traj, half_grid);
      MasterOptions options;
      options.steps = steps;
      options.memory_window = sim.memory_window;
      options.k = p.k;
      std::vector<SimResult> results;
      CorrelationPath corr_half;
      for (SimMethod m : sim.methods) {
        if (m == SimMethod::kDyson2) {
          const TimeGrid grid{t, steps};
          std::vector<Operator> path;
          for (std::size_t i = 0; i < half.size(); i += 2) path.push_back(half[i]);
          const CorrelationPath corr = correlation_from_spectrum(p.bath, grid.step());
          results.push_back(dyson2_trace(rho0, path, grid, p.basis, corr, p.k));
          continue;
        }
        if (corr_half.values.empty()) corr_half = correlation_from_spectrum(p.bath, half_grid.step());
        results.push_back(m == SimMethod::kTcl2
                              ? tcl2_integrate(rho0, half, p.basis, corr_half, t, options)
                              : nz2_integrate(rho0, half, p.basis, corr_half, t, options));
      }
      return results;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kResolution || sim.steps > 0) throw;
      last = e.what();
    }
  }
  fail(ErrorCategory::kResolution, "simulate: no step count resolves the trajectory (" + last + ")");
}

RunOutcome run(const RunConfig& c, const fs::path& out) {
  fs::create_directories(out);
  if (c.task == Task::kDdCompare) {
    RunOutcome o = run_dd(c, out);
    write_manifest(out, c, o.files);
    return o;
  }
  const Problem p = build_problem(c);
  RunOutcome o;
  o.task = c.task;
  ControlTrajectory traj = initial_trajectory(c, p);
  OverlapObjective objective(p.basis, p.corr, c.t, p.quadrature.steps, p.gamma, mode_of(p),
                             p.factor);
  if (p.spec.commuting) {
    ScoreBounds b = score_bounds(p.gamma, p.bath, c.t);
    if (p.factor < 0.0) b = {-b.hi, -b.lo};
    objective.set_bounds(b);
  }
  nlohmann::ordered_json summary;
  summary["task"] = task_name(c.task);
  if (optimizing(c.task)) {
    const OptimizerConfig oc = optimizer_config(c, p);
    const OptimizationRun r = optimize_restarts(oc, objective, traj);
    traj = r.final;
    o.score = r.score;
    o.energy = r.energy;
    o.status = run_status_name(r.status);
    std::ofstream h = open_out(out, "history.csv", o.files);
    write_history_csv(h, r);
    summary["status"] = o.status;
    summary["diagnostic"] = r.diagnostic;
    summary["iterations"] = r.history.empty() ? 0 : r.history.back().iter;
    summary["el_residual"] = r.el_residual;
  } else {
    o.score = objective.value(traj);
    o.energy = control_energy(traj, c.constraint.kind, p.h0);
    o.status = "done";
    summary["status"] = o.status;
  }
  summary["score"] = o.score;
  summary["score_per_kappa"] = o.score / p.bath.kappa;
  summary["energy"] = o.energy;
  summary["evaluations"] = objective.evaluations();
  summary["bound_violations"] = objective.bound_violations();

  {
    std::ofstream f = open_out(out, "trajectory.csv", o.files);
    write_trajectory_csv(f, traj);
  }
  {
    std::ofstream f = open_out(out, "hamiltonian.csv", o.files);
    write_hamiltonian(f, p, traj);
  }
  {
    std::ofstream f = open_out(out, "spectra.csv", o.files);
    write_spectra(f, p, traj);
  }
  {
    std::ofstream f = open_out(out, "score.json", o.files);
    write_score_report(f, report_for(c, p, traj));
  }
  const bool run_sims = c.task == Task::kCool || c.task == Task::kHeat || c.task == Task::kSimulate;
  if (run_sims) {
    const Operator rho0 = p.spec.rho0.size() ? p.spec.rho0 : Operator(Operator::Identity(c.dimension, c.dimension) / c.dimension);
    for (const SimResult& s : simulate(p, traj, c.sim, rho0)) {
      std::ofstream f = open_out(out, std::string("sim_") + sim_method_name(s.method) + ".csv", o.files);
      write_sim_csv(f, s);
      const std::vector<double> overlap = ground_overlap_trace(s);
      o.sims.push_back({s.method, s.grid.steps, s.linear_entropy.back() - s.linear_entropy.front(),
                        overlap.back()});
    }
    auto& sims = summary["sims"];
    sims = nlohmann::ordered_json::array();
    for (const SimSummary& s : o.sims) {
      sims.push_back({{"method", sim_method_name(s.method)},
                      {"steps", s.steps},
                      {"delta_S_L", s.delta_entropy},
                      {"final_overlap", s.final_overlap}});
    }
  }
  {
    std::ofstream f = open_out(out, "run.json", o.files);
    f << summary.dump(2) << '\n';
  }
  write_manifest(out, c, o.files);
  return o;
}

std::vector<SweepRow> run_sweep(const RunConfig& c, const fs::path& out) {
  if (c.sweep.parameter.empty()) config_error("sweep.parameter", "required for a sweep");
  fs::create_directories(out);
  const std::vector<double>& values = c.sweep.values;
  std::vector<SweepRow> rows(values.size());
  auto one = [&](std::size_t i) {
    SweepRow row;
    row.value = values[i];
    RunConfig rc = c;
    rc.sweep = {};
    if (c.sweep.parameter == "p") rc.score.p = values[i];
    if (c.sweep.parameter == "energy") rc.constraint.energy = values[i];
    if (c.sweep.parameter == "kappa") rc.bath.kappa = values[i];
    if (c.sweep.parameter == "n") {
      if (values[i] < 0.0 || values[i] != std::floor(values[i])) {
        row.error = "n must be a pulse count";
        return row;
      }
      rc.dd.n = {static_cast<std::size_t>(values[i])};
    }
    try {
      validate(rc);
      row.outcome = run(rc, out / (c.sweep.parameter + "_" + std::to_string(i)));
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  };
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < values.size(); first += workers) {
    std::vector<std::future<SweepRow>> batch;
    const std::size_t last = std::min(values.size(), first + workers);
    for (std::size_t i = first; i < last; ++i) batch.push_back(std::async(std::launch::async, one, i));
    for (std::size_t i = first; i < last; ++i) rows[i] = batch[i - first].get();
  }
  std::vector<std::string> files;
  {
    std::ofstream f = open_out(out, "sweep.csv", files);
    f << c.sweep.parameter << ",score,score_per_kappa,energy,status\n";
    for (const SweepRow& r : rows) {
      const double kappa = c.sweep.parameter == "kappa" ? r.value : c.bath.kappa;
      f << csv::format(r.value) << ',';
      if (r.ok) {
        f << csv::format(r.outcome.score) << ',' << csv::format(r.outcome.score / kappa) << ','
          << csv::format(r.outcome.energy) << ',' << r.outcome.status << '\n';
      } else {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        f << ",,,error: " << msg << '\n';
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].ok) files.push_back(c.sweep.parameter + "_" + std::to_string(i) + "/manifest.json");
  }
  write_manifest(out, c, files);
  return rows;
}

}  // namespace overlap
