// Copyright 2026 The cprlab Authors
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


#include "cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cprlab/errors.hpp"
#include "cprlab/family_io.hpp"
#include "cprlab/pulse_io.hpp"
#include "cprlab/reconstruction.hpp"

namespace cprlab::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& key, const char* expected) {
  throw ValidationError("config key '" + key + "' must be " + expected);
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) bad_key(key, "a number");
  return v.get<double>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad_key(key, "an integer");
  return v.get<int>();
}

std::vector<double> as_numbers(const std::string& key, const json& v) {
  if (!v.is_array()) bad_key(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(key, x));
  return out;
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_key(key, "a string");
  return v.get<std::string>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_key(key, "true or false");
  return v.get<bool>();
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"basis", [](RunConfig& c, const json& v) { c.basis = as_string("basis", v); }},
      {"parameter", [](RunConfig& c, const json& v) { c.parameter = as_string("parameter", v); }},
      {"grid", [](RunConfig& c, const json& v) { c.grid = as_numbers("grid", v); }},
      {"dt_hartree_inv", [](RunConfig& c, const json& v) { c.dt_hartree_inv = as_number("dt_hartree_inv", v); }},
      {"m_e", [](RunConfig& c, const json& v) { c.m_e = as_number("m_e", v); }},
      {"device_dim", [](RunConfig& c, const json& v) { c.device_dim = as_int("device_dim", v); }},
      {"alpha_T_over_2pi_ghz",
       [](RunConfig& c, const json& v) { c.alpha_T_over_2pi_ghz = as_number("alpha_T_over_2pi_ghz", v); }},
      {"tau_ns", [](RunConfig& c, const json& v) { c.tau_ns = as_number("tau_ns", v); }},
      {"n_steps", [](RunConfig& c, const json& v) { c.n_steps = as_int("n_steps", v); }},
      {"target_infidelity",
       [](RunConfig& c, const json& v) { c.target_infidelity = as_number("target_infidelity", v); }},
      {"max_iterations", [](RunConfig& c, const json& v) { c.max_iterations = as_int("max_iterations", v); }},
      {"gradient_tolerance",
       [](RunConfig& c, const json& v) { c.gradient_tolerance = as_number("gradient_tolerance", v); }},
      {"warm_start", [](RunConfig& c, const json& v) { c.warm_start = as_bool("warm_start", v); }},
      {"lbfgs_history", [](RunConfig& c, const json& v) { c.lbfgs_history = as_int("lbfgs_history", v); }},
      {"amplitude_bound_rad_per_ns",
       [](RunConfig& c, const json& v) { c.amplitude_bound_rad_per_ns = as_number("amplitude_bound_rad_per_ns", v); }},
      {"random_guess_amplitude_rad_per_ns",
       [](RunConfig& c, const json& v) {
         c.random_guess_amplitude_rad_per_ns = as_number("random_guess_amplitude_rad_per_ns", v);
       }},
      {"seed",
       [](RunConfig& c, const json& v) {
         if (!v.is_number_unsigned()) bad_key("seed", "a non-negative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"method", [](RunConfig& c, const json& v) { c.method = as_string("method", v); }},
      {"degree_time", [](RunConfig& c, const json& v) { c.degree_time = as_int("degree_time", v); }},
      {"degree_param", [](RunConfig& c, const json& v) { c.degree_param = as_int("degree_param", v); }},
      {"spline_ends", [](RunConfig& c, const json& v) { c.spline_ends = as_string("spline_ends", v); }},
      {"holdout", [](RunConfig& c, const json& v) { c.holdout = as_numbers("holdout", v); }},
      {"bench_samples", [](RunConfig& c, const json& v) { c.bench_samples = as_numbers("bench_samples", v); }},
      {"schedule", [](RunConfig& c, const json& v) { c.schedule = as_string("schedule", v); }},
      {"n_max", [](RunConfig& c, const json& v) { c.n_max = as_int("n_max", v); }},
      {"schedule_amplitude",
       [](RunConfig& c, const json& v) { c.schedule_amplitude = as_number("schedule_amplitude", v); }},
      {"schedule_base", [](RunConfig& c, const json& v) { c.schedule_base = as_number("schedule_base", v); }},
      {"evolve_lambda",
       [](RunConfig& c, const json& v) {
         if (v.is_null()) {
           c.evolve_lambda.reset();
         } else {
           c.evolve_lambda = as_number("evolve_lambda", v);
         }
       }},
      {"evolve_steps", [](RunConfig& c, const json& v) { c.evolve_steps = as_int("evolve_steps", v); }},
      {"initial_state", [](RunConfig& c, const json& v) { c.initial_state = as_string("initial_state", v); }},
      {"out_dir", [](RunConfig& c, const json& v) { c.out_dir = as_string("out_dir", v); }},
      {"family_dir", [](RunConfig& c, const json& v) { c.family_dir = as_string("family_dir", v); }},
      {"model_file", [](RunConfig& c, const json& v) { c.model_file = as_string("model_file", v); }},
  };
  return table;
}

void require_increasing(const std::vector<double>& grid, const char* what) {
  for (double x : grid) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains a non-finite value");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError(std::string(what) + " must be strictly increasing");
  }
}

}  // namespace

json RunConfig::to_json() const {
  return {{"basis", basis},
          {"parameter", parameter},
          {"grid", grid},
          {"dt_hartree_inv", dt_hartree_inv},
          {"m_e", m_e},
          {"device_dim", device_dim},
          {"alpha_T_over_2pi_ghz", alpha_T_over_2pi_ghz},
          {"tau_ns", tau_ns},
          {"n_steps", n_steps},
          {"target_infidelity", target_infidelity},
          {"max_iterations", max_iterations},
          {"gradient_tolerance", gradient_tolerance},
          {"warm_start", warm_start},
          {"lbfgs_history", lbfgs_history},
          {"amplitude_bound_rad_per_ns", amplitude_bound_rad_per_ns},
          {"random_guess_amplitude_rad_per_ns", random_guess_amplitude_rad_per_ns},
          {"seed", seed},
          {"method", method},
          {"degree_time", degree_time},
          {"degree_param", degree_param},
          {"spline_ends", spline_ends},
          {"holdout", holdout},
          {"bench_samples", bench_samples},
          {"schedule", schedule},
          {"n_max", n_max},
          {"schedule_amplitude", schedule_amplitude},
          {"schedule_base", schedule_base},
          {"evolve_lambda", evolve_lambda ? json(*evolve_lambda) : json(nullptr)},
          {"evolve_steps", evolve_steps},
          {"initial_state", initial_state},
          {"out_dir", out_dir},
          {"family_dir", family_dir},
          {"model_file", model_file}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ValidationError("unknown config key '" + key + "'");
    it->second(c, value);
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

StoBasis RunConfig::basis_set() const { return StoBasis::by_name(basis); }

HydrogenTargets RunConfig::targets() const {
  HydrogenTargets t;
  t.basis = basis_set();
  t.parameter = parameter;
  t.dt = dt_hartree_inv;
  t.electron_mass = m_e;
  return t;
}

DeviceConfig RunConfig::device() const {
  DeviceConfig d;
  d.dim = device_dim;
  d.anharmonicity_over_2pi_ghz = alpha_T_over_2pi_ghz;
  d.pulse_duration_ns = tau_ns;
  d.n_steps = n_steps;
  return d;
}

GrapeSettings RunConfig::settings() const {
  GrapeSettings s;
  s.target_infidelity = target_infidelity;
  s.max_iterations = max_iterations;
  s.gradient_tolerance = gradient_tolerance;
  s.warm_start = warm_start;
  s.seed = seed;
  s.lbfgs_history = lbfgs_history;
  s.amplitude_bound = amplitude_bound_rad_per_ns;
  s.random_guess_amplitude = random_guess_amplitude_rad_per_ns;
  return s;
}

void RunConfig::validate() const {
  if (parameter != "dt" && parameter != "m_e") throw ValidationError("parameter must be 'dt' or 'm_e'");
  const StoBasis b = basis_set();
  device().validate(b.size());
  settings().validate();
  if (!(dt_hartree_inv > 0.0) || !std::isfinite(dt_hartree_inv)) {
    throw ValidationError("dt_hartree_inv must be positive");
  }
  if (!(m_e > 0.0) || !std::isfinite(m_e)) throw ValidationError("m_e must be positive");
  require_increasing(grid, "grid");
  if (parameter == "m_e" && !grid.empty() && !(grid.front() > 0.0)) {
    throw ValidationError("mass grid values must be positive");
  }
  if (method != "poly" && method != "spectral") throw ValidationError("method must be 'poly' or 'spectral'");
  if (degree_time < 0 || degree_param < 0) throw ValidationError("polynomial degrees must be non-negative");
  spline_ends_from_string(spline_ends);
  if (schedule != "sin" && schedule != "none") throw ValidationError("schedule must be 'sin' or 'none'");
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (evolve_steps < 0) throw ValidationError("evolve_steps must be non-negative");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr const char* kLockName = ".cprlab.lock";
constexpr const char* kPartialMarker = "PARTIAL";

// Exclusive claim on an output directory for the lifetime of one command.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / kLockName) {
    fs::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw ValidationError("output directory " + dir.string() + " is locked (remove " + path_.string() +
                            " if no other run is active)");
    }
  }
  ~OutputLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

struct Invocation {
  RunConfig cfg;
  fs::path out;
  bool dry_run = false;
  bool allow_partial = false;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// No timestamps or host data, so identical runs produce identical manifests.
void write_manifest(const Invocation& inv, const std::string& command, const json& inputs,
                    const std::vector<std::string>& artifacts) {
  const json config = inv.cfg.to_json();
  write_json(inv.out / "manifest.json", {{"tool", "cprlab"},
                                         {"version", CPRLAB_VERSION},
                                         {"command", command},
                                         {"config_hash_fnv1a64", hex64(fnv1a64(config.dump()))},
                                         {"config", config},
                                         {"inputs", inputs},
                                         {"artifacts", artifacts}});
}

void print_plan(const std::string& command, const json& plan) {
  std::cout << "dry run: " << command << " would execute\n" << plan.dump(2) << '\n';
}

fs::path model_path(const Invocation& inv, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (!inv.cfg.model_file.empty()) return inv.cfg.model_file;
  return inv.out / ("model_" + inv.cfg.method + ".json");
}

const json& context_entry(const PulseModel& model, const char* key) {
  const json& ctx = model_context(model);
  if (!ctx.contains(key)) {
    throw ValidationError(std::string("model file carries no '") + key + "' context; refit it with 'cprlab fit'");
  }
  return ctx.at(key);
}

HydrogenTargets model_targets(const PulseModel& model) {
  return HydrogenTargets::from_json(context_entry(model, "targets"));
}

DeviceConfig model_device(const PulseModel& model) { return device_from_json(context_entry(model, "device")); }

// Resolves the parameter value given through --lambda, --dt or --m-e.
double pick_lambda(const PulseModel& model, std::optional<double> lambda, std::optional<double> dt,
                   std::optional<double> mass, std::optional<double> fallback) {
  const std::string& name = model_parameter_name(model);
  int given = (lambda ? 1 : 0) + (dt ? 1 : 0) + (mass ? 1 : 0);
  if (given > 1) throw ValidationError("give only one of --lambda, --dt and --m-e");
  if (dt && name != "dt") throw ValidationError("--dt given but the model is parameterized by " + name);
  if (mass && name != "m_e") throw ValidationError("--m-e given but the model is parameterized by " + name);
  if (lambda) return *lambda;
  if (dt) return *dt;
  if (mass) return *mass;
  if (fallback) return *fallback;
  throw ValidationError("no parameter value given (use --lambda, --dt or --m-e)");
}

ComplexVector initial_state(const std::string& spec, const HydrogenModel& model) {
  if (spec == "contraction") return model.contraction_state();
  if (spec == "ground") return hermitian_eig(model.h_ortho).vectors.col(0);
  std::size_t used = 0;
  int level = -1;
  try {
    level = std::stoi(spec, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != spec.size() || level < 0 || level >= model.dim()) {
    throw ValidationError("initial_state must be 'contraction', 'ground' or a level index below " +
                          std::to_string(model.dim()));
  }
  ComplexVector psi = ComplexVector::Zero(model.dim());
  psi(level) = 1.0;
  return psi;
}

// ---------------------------------------------------------------------------

int cmd_family(const Invocation& inv) {
  const RunConfig& c = inv.cfg;
  if (c.grid.empty()) throw ValidationError("config 'grid' is empty");
  const HydrogenTargets targets = c.targets();
  const DeviceConfig device = c.device();
  const GrapeSettings settings = c.settings();
  if (inv.dry_run) {
    print_plan("family", {{"parameter", c.parameter},
                          {"grid", c.grid},
                          {"targets", targets.to_json()},
                          {"device", device_to_json(device)},
                          {"settings", settings_to_json(settings)},
                          {"out_dir", inv.out.string()}});
    return 0;
  }

  std::vector<std::pair<double, UnitaryMatrix>> grid;
  for (double x : c.grid) grid.emplace_back(x, targets(x));

  OutputLock lock(inv.out);
  const PulseFamily family = sweep_family(c.parameter, grid, device, settings);
  save_family(inv.out, family, {{"targets", targets.to_json()}});

  std::vector<std::string> artifacts{"family.json"};
  for (double x : c.grid) artifacts.push_back(pulse_filename(c.parameter, x));
  const std::vector<double> failed = family.non_converged();
  const fs::path marker = inv.out / kPartialMarker;
  if (failed.empty()) {
    fs::remove(marker);
  } else {
    std::ofstream m(marker);
    for (double x : failed) m << c.parameter << '=' << fmt(x) << '\n';
    artifacts.push_back(kPartialMarker);
  }
  write_manifest(inv, "family", json::object(), artifacts);

  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& r = family.results[i];
    std::printf("%s=%-8s fidelity=%.10f iterations=%d %s\n", c.parameter.c_str(), fmt(family.parameter_values[i]).c_str(),
                r.final_fidelity, r.iterations, r.converged ? "converged" : "NOT CONVERGED");
  }
  if (!failed.empty()) {
    std::string list;
    for (double x : failed) list += " " + fmt(x);
    if (!inv.allow_partial) {
      throw NumericalError("optimization did not converge for " + c.parameter + " =" + list +
                           "; archive marked PARTIAL (rerun with --allow-partial to accept it)");
    }
    std::fprintf(stderr, "warning: non-converged members kept (--allow-partial):%s\n", list.c_str());
  }
  std::printf("wrote %zu-member family to %s\n", family.size(), inv.out.string().c_str());
  return 0;
}

struct FitFlags {
  std::string family;
};

int cmd_fit(const Invocation& inv, const FitFlags& flags) {
  const RunConfig& c = inv.cfg;
  const fs::path dir = !flags.family.empty() ? fs::path(flags.family)
                       : !c.family_dir.empty() ? fs::path(c.family_dir)
                                               : inv.out;
  const LoadedFamily loaded = load_family(dir);
  if (fs::exists(dir / kPartialMarker) && !inv.allow_partial) {
    throw ValidationError("family archive " + dir.string() + " is marked PARTIAL (use --allow-partial)");
  }
  const PulseFamily& family = loaded.family;
  const std::string file = "model_" + c.method + ".json";
  if (inv.dry_run) {
    print_plan("fit", {{"family_dir", dir.string()},
                       {"members", family.size()},
                       {"method", c.method},
                       {"degree_time", c.degree_time},
                       {"degree_param", c.degree_param},
                       {"spline_ends", c.spline_ends},
                       {"model_file", (inv.out / file).string()}});
    return 0;
  }

  json context = loaded.context;
  context["device"] = device_to_json(family.device);
  context["settings"] = settings_to_json(family.settings);
  context["grid"] = family.parameter_values;
  std::vector<double> raw;
  for (const auto& r : family.results) raw.push_back(r.final_fidelity);
  context["node_fidelities"] = raw;

  PulseModel model = [&]() -> PulseModel {
    if (c.method == "poly") {
      PolyPulseModel m = fit_poly_model(family, c.degree_time, c.degree_param);
      m.context = context;
      return m;
    }
    SpectralPulseModel m = fit_spectral_model(family, spline_ends_from_string(c.spline_ends));
    m.context = context;
    return m;
  }();

  OutputLock lock(inv.out);
  save_model(inv.out / file, model);
  write_manifest(inv, "fit", {{"family_dir", dir.string()}}, {file});
  std::printf("wrote %s model (%zu members) to %s\n", c.method.c_str(), family.size(),
              (inv.out / file).string().c_str());
  return 0;
}

struct LambdaFlags {
  std::string model;
  std::optional<double> lambda, dt, mass;
};

int cmd_reconstruct(const Invocation& inv, const LambdaFlags& flags, bool extrapolate) {
  const fs::path path = model_path(inv, flags.model);
  const PulseModel model = load_model(path);
  const double lambda = pick_lambda(model, flags.lambda, flags.dt, flags.mass, inv.cfg.evolve_lambda);
  const std::string file = pulse_filename(model_parameter_name(model), lambda);
  if (inv.dry_run) {
    print_plan("reconstruct", {{"model", path.string()},
                               {"parameter", model_parameter_name(model)},
                               {"value", lambda},
                               {"pulse_file", (inv.out / file).string()}});
    return 0;
  }
  const ControlPulse pulse = reconstruct(model, lambda, extrapolate);
  OutputLock lock(inv.out);
  write_pulse_csv(inv.out / file, pulse);
  write_manifest(inv, "reconstruct", {{"model", path.string()}, {"value", lambda}}, {file});
  std::printf("wrote %s\n", (inv.out / file).string().c_str());
  return 0;
}

int cmd_verify(const Invocation& inv, const std::string& model_flag, std::vector<double> grid, bool nodes) {
  const fs::path path = model_path(inv, model_flag);
  const PulseModel model = load_model(path);
  const HydrogenTargets targets = model_targets(model);
  const DeviceConfig device = model_device(model);
  std::vector<double> raw;
  if (nodes) {
    grid = context_entry(model, "grid").get<std::vector<double>>();
    raw = model_context(model).value("node_fidelities", std::vector<double>{});
  } else if (grid.empty()) {
    grid = inv.cfg.holdout;
  }
  if (grid.empty()) throw ValidationError("no verification grid (use --grid, --nodes or config 'holdout')");
  require_increasing(grid, "verification grid");
  if (inv.dry_run) {
    print_plan("verify", {{"model", path.string()}, {"grid", grid}});
    return 0;
  }
  const FidelityReport report = verify_model(model, targets, grid, device);
  json j = report.to_json();
  j["parameter"] = model_parameter_name(model);
  if (!raw.empty()) {
    double mean = 0.0;
    for (double r : raw) mean += r / raw.size();
    j["raw_node_fidelity_mean"] = mean;
  }
  OutputLock lock(inv.out);
  write_json(inv.out / "fidelity_report.json", j);
  write_manifest(inv, "verify", {{"model", path.string()}}, {"fidelity_report.json"});
  std::printf("points=%zu mean_fidelity=%.12f min_fidelity=%.12f\n", grid.size(), report.mean, report.min);
  if (j.contains("raw_node_fidelity_mean")) {
    std::printf("raw_node_fidelity_mean=%.12f\n", j["raw_node_fidelity_mean"].get<double>());
  }
  return 0;
}

int cmd_evolve(const Invocation& inv, const LambdaFlags& flags) {
  const RunConfig& c = inv.cfg;
  const fs::path path = model_path(inv, flags.model);
  const PulseModel model = load_model(path);
  const HydrogenTargets targets = model_targets(model);
  const DeviceConfig device = model_device(model);

  json summary{{"model", path.string()}, {"schedule", c.schedule}, {"initial_state", c.initial_state}};
  if (c.schedule == "sin") {
    if (targets.parameter != "m_e") throw ValidationError("the mass schedule needs a model fitted over m_e");
    summary["n_max"] = c.n_max;
    summary["schedule_amplitude"] = c.schedule_amplitude;
    summary["schedule_base"] = c.schedule_base;
    summary["dt_hartree_inv"] = targets.dt;
  } else {
    const double lambda = pick_lambda(model, flags.lambda, flags.dt, flags.mass, c.evolve_lambda);
    summary["value"] = lambda;
    summary["steps"] = c.evolve_steps;
    summary["dt_hartree_inv"] = targets.step_at(lambda);
  }
  if (inv.dry_run) {
    print_plan("evolve", summary);
    return 0;
  }

  EvolutionTrace rec, exact;
  if (c.schedule == "sin") {
    const MassSchedule schedule = MassSchedule::sinusoidal(c.n_max, c.schedule_amplitude, c.schedule_base);
    const ComplexVector psi0 = initial_state(c.initial_state, build_model(targets.basis, c.schedule_base));
    DynamicMassResult r = dynamic_mass_simulation(model, schedule, device, targets.basis, targets.dt, psi0);
    rec = std::move(r.reconstructed);
    exact = std::move(r.exact);
  } else {
    const double lambda = summary["value"].get<double>();
    const HydrogenModel hm = targets.model_at(lambda);
    const ComplexVector psi0 = initial_state(c.initial_state, hm);
    const double dt = targets.step_at(lambda);
    ComplexVector padded = ComplexVector::Zero(device.dim);
    padded.head(psi0.size()) = psi0;
    rec = evolve_repeated(propagate(device, reconstruct(model, lambda)), padded, c.evolve_steps, dt);
    exact = exact_evolution(hm, psi0, rec.times);
  }
  const double deviation = max_population_deviation(rec, exact);
  summary["max_population_deviation"] = deviation;

  OutputLock lock(inv.out);
  write_trace_csv(inv.out / "trace_reconstructed.csv", rec);
  write_trace_csv(inv.out / "trace_exact.csv", exact);
  write_json(inv.out / "evolve_summary.json", summary);
  write_manifest(inv, "evolve", {{"model", path.string()}},
                 {"trace_reconstructed.csv", "trace_exact.csv", "evolve_summary.json"});
  std::printf("steps=%zu max_population_deviation=%.3e\n", rec.size() - 1, deviation);
  return 0;
}

int cmd_bench(const Invocation& inv, const std::string& model_flag, std::vector<double> samples) {
  const fs::path path = model_path(inv, model_flag);
  const PulseModel model = load_model(path);
  const HydrogenTargets targets = model_targets(model);
  const DeviceConfig device = model_device(model);
  // Re-optimize with the settings that produced the family, so both sides aim at the same target.
  const GrapeSettings settings = settings_from_json(context_entry(model, "settings"));
  if (samples.empty()) samples = inv.cfg.bench_samples;
  if (samples.empty()) throw ValidationError("no benchmark samples (use --samples or config 'bench_samples')");
  if (inv.dry_run) {
    print_plan("bench", {{"model", path.string()}, {"samples", samples}, {"settings", settings_to_json(settings)}});
    return 0;
  }
  const TimingReport report = benchmark(model, targets, device, settings, samples);
  OutputLock lock(inv.out);
  write_json(inv.out / "timing_report.json", report.to_json());
  write_manifest(inv, "bench", {{"model", path.string()}}, {"timing_report.json"});
  std::printf("samples=%zu reconstruct=%.4fs optimize=%.4fs speedup=%.2fx\n", report.sample_count,
              report.mean_reconstruct_seconds, report.mean_optimize_seconds, report.speedup_ratio);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"cprlab: optimal-control pulse families and their reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool allow_partial = false;
  bool dry_run = false;
  app.add_option("--config", config_path, "Flat JSON run configuration");
  app.add_option("--seed", seed, "Overrides the config seed");
  app.add_option("--out", out, "Output directory (overrides config out_dir)");
  app.add_flag("--allow-partial", allow_partial, "Accept families with non-converged members");
  app.add_flag("--dry-run", dry_run, "Validate and print the plan without writing anything");

  auto* family = app.add_subcommand("family", "Optimize a warm-started pulse family over the config grid");
  std::vector<double> family_grid;
  family->add_option("--grid", family_grid, "Comma-separated parameter grid")->delimiter(',');

  auto* fit = app.add_subcommand("fit", "Fit a reconstruction model to a family archive");
  FitFlags fit_flags;
  std::optional<std::string> method, spline_ends;
  std::optional<int> degree_time, degree_param;
  fit->add_option("--family", fit_flags.family, "Family archive directory");
  fit->add_option("--method", method, "poly or spectral");
  fit->add_option("--degree-time", degree_time, "Polynomial degree in time");
  fit->add_option("--degree-param", degree_param, "Polynomial degree in the parameter");
  fit->add_option("--spline-ends", spline_ends, "not_a_knot or natural (spectral method)");

  LambdaFlags lambda_flags;
  auto add_lambda = [&](CLI::App* sub) {
    sub->add_option("--model", lambda_flags.model, "Model JSON file");
    sub->add_option("--lambda", lambda_flags.lambda, "Parameter value");
    sub->add_option("--dt", lambda_flags.dt, "Time step in inverse Hartree");
    sub->add_option("--m-e", lambda_flags.mass, "Electron mass in atomic units");
  };

  auto* rec = app.add_subcommand("reconstruct", "Emit the pulse CSV for one parameter value");
  add_lambda(rec);
  bool extrapolate = false;
  rec->add_flag("--extrapolate", extrapolate, "Allow values outside the fitted span");

  auto* verify = app.add_subcommand("verify", "Device-simulated fidelity of reconstructed pulses");
  std::string verify_model_flag;
  std::vector<double> verify_grid;
  bool nodes = false;
  verify->add_option("--model", verify_model_flag, "Model JSON file");
  verify->add_option("--grid", verify_grid, "Comma-separated parameter values")->delimiter(',');
  verify->add_flag("--nodes", nodes, "Verify on the training grid and compare with the raw fidelities");

  auto* evolve = app.add_subcommand("evolve", "Reconstructed versus exact time evolution");
  add_lambda(evolve);
  std::optional<std::string> schedule, init;
  std::optional<int> nmax, steps;
  evolve->add_option("--schedule", schedule, "sin (mass schedule) or none");
  evolve->add_option("--nmax", nmax, "Schedule length N_max");
  evolve->add_option("--steps", steps, "Steps for a fixed parameter value");
  evolve->add_option("--initial-state", init, "contraction, ground or a level index");

  auto* bench = app.add_subcommand("bench", "Time reconstruction against re-optimization");
  std::string bench_model_flag;
  std::vector<double> bench_samples;
  bench->add_option("--model", bench_model_flag, "Model JSON file");
  bench->add_option("--samples", bench_samples, "Comma-separated parameter values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Invocation inv;
    if (!config_path.empty()) inv.cfg = RunConfig::load(config_path);
    RunConfig& c = inv.cfg;
    if (seed) c.seed = *seed;
    if (!out.empty()) c.out_dir = out;
    if (!family_grid.empty()) c.grid = family_grid;
    if (method) c.method = *method;
    if (degree_time) c.degree_time = *degree_time;
    if (degree_param) c.degree_param = *degree_param;
    if (spline_ends) c.spline_ends = *spline_ends;
    if (schedule) c.schedule = *schedule;
    if (nmax) c.n_max = *nmax;
    if (steps) c.evolve_steps = *steps;
    if (init) c.initial_state = *init;
    c.validate();
    inv.out = c.out_dir;
    inv.dry_run = dry_run;
    inv.allow_partial = allow_partial;

    if (*family) return cmd_family(inv);
    if (*fit) return cmd_fit(inv, fit_flags);
    if (*rec) return cmd_reconstruct(inv, lambda_flags, extrapolate);
    if (*verify) return cmd_verify(inv, verify_model_flag, verify_grid, nodes);
    if (*evolve) return cmd_evolve(inv, lambda_flags);
    if (*bench) return cmd_bench(inv, bench_model_flag, bench_samples);
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}

}  // namespace cprlab::cli
