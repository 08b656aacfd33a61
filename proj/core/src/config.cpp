#include "bohm/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "bohm/error.hpp"
#include "json.hpp"

namespace bohm {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

std::string indexed(std::string_view path, std::size_t i) {
  return std::string(path) + "[" + std::to_string(i) + "]";
}

static_assert(std::is_same_v<std::size_t, std::uint64_t>);

/// Reads typed values out of a JSON document, recording every problem
/// instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(std::string_view path, const std::string& what) {
    errors_.push_back(std::string(path.empty() ? "<root>" : path) + ": " + what);
  }

  /// Reports keys outside `allowed`; returns false if obj is not an object.
  bool object(const json& obj, std::string_view path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        errors_.push_back("unknown key at " + join(path, key));
      }
    }
    return true;
  }

  void read(const json& v, std::string_view path, double& out) {
    if (!v.is_number()) return fail(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(path, "must be finite");
  }

  void read(const json& v, std::string_view path, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer()) {
      fail(path, "must be non-negative");
    } else if (v.is_number_float() && v.get<double>() >= 0.0 &&
               v.get<double>() == std::floor(v.get<double>()) && v.get<double>() < 1.8e19) {
      out = static_cast<std::uint64_t>(v.get<double>());
    } else {
      fail(path, "expected a non-negative integer");
    }
  }

  void read(const json& v, std::string_view path, unsigned& out) {
    std::uint64_t u = out;
    read(v, path, u);
    if (u > 4096) return fail(path, "too large");
    out = static_cast<unsigned>(u);
  }

  void read(const json& v, std::string_view path, bool& out) {
    if (!v.is_boolean()) return fail(path, "expected true or false");
    out = v.get<bool>();
  }

  void read(const json& v, std::string_view path, std::string& out) {
    if (!v.is_string()) return fail(path, "expected a string");
    out = v.get<std::string>();
  }

  /// A real number or a [re, im] pair.
  void read(const json& v, std::string_view path, Complex& out) {
    if (v.is_number()) {
      out = Complex{v.get<double>(), 0.0};
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out = Complex{v[0].get<double>(), v[1].get<double>()};
    } else {
      fail(path, "expected a number or a [re, im] pair");
    }
  }

  template <class T>
  void read(const json& v, std::string_view path, std::vector<T>& out) {
    if (!v.is_array()) return fail(path, "expected an array");
    std::vector<T> items(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) read(v[i], indexed(path, i), items[i]);
    out = std::move(items);
  }

  template <class T>
  void field(const json& obj, std::string_view path, std::string_view key, T& out) {
    const auto it = obj.find(std::string(key));
    if (it != obj.end()) read(*it, join(path, key), out);
  }

 private:
  std::vector<std::string>& errors_;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t required_dims(const ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::BarrierDwell:
    case Preset::Stationary:
      return 1;
    default:
      return 2;
  }
}

void read_sections(Reader& r, const json& doc, ExperimentConfig& c) {
  if (const auto it = doc.find("double_slit"); it != doc.end()) {
    auto& d = c.double_slit;
    if (r.object(*it, "double_slit",
                 {"separation", "slit_width", "boost", "longitudinal_width", "longitudinal_start",
                  "which_way", "pointer_width", "pointer_shift"})) {
      r.field(*it, "double_slit", "separation", d.separation);
      r.field(*it, "double_slit", "slit_width", d.slit_width);
      r.field(*it, "double_slit", "boost", d.boost);
      r.field(*it, "double_slit", "longitudinal_width", d.longitudinal_width);
      r.field(*it, "double_slit", "longitudinal_start", d.longitudinal_start);
      r.field(*it, "double_slit", "which_way", d.which_way);
      r.field(*it, "double_slit", "pointer_width", d.pointer_width);
      r.field(*it, "double_slit", "pointer_shift", d.pointer_shift);
    }
  }
  if (const auto it = doc.find("pointer_measurement"); it != doc.end()) {
    auto& m = c.pointer;
    const char* p = "pointer_measurement";
    if (r.object(*it, p,
                 {"c1", "c2", "system_separation", "system_width", "pointer_width", "pointer_shift",
                  "max_overlap", "empty_wave_check"})) {
      r.field(*it, p, "c1", m.c1);
      r.field(*it, p, "c2", m.c2);
      r.field(*it, p, "system_separation", m.system_separation);
      r.field(*it, p, "system_width", m.system_width);
      r.field(*it, p, "pointer_width", m.pointer_width);
      r.field(*it, p, "pointer_shift", m.pointer_shift);
      r.field(*it, p, "max_overlap", m.max_overlap);
      r.field(*it, p, "empty_wave_check", m.empty_wave_check);
    }
  }
  if (const auto it = doc.find("barrier_dwell"); it != doc.end()) {
    auto& b = c.barrier;
    const char* p = "barrier_dwell";
    if (r.object(*it, p,
                 {"v0", "a", "b", "start", "width", "boost", "absorber_width", "absorber_strength"})) {
      r.field(*it, p, "v0", b.v0);
      r.field(*it, p, "a", b.a);
      r.field(*it, p, "b", b.b);
      r.field(*it, p, "start", b.start);
      r.field(*it, p, "width", b.width);
      r.field(*it, p, "boost", b.boost);
      r.field(*it, p, "absorber_width", b.absorber_width);
      r.field(*it, p, "absorber_strength", b.absorber_strength);
    }
  }
  if (const auto it = doc.find("stationary"); it != doc.end()) {
    auto& s = c.stationary;
    if (r.object(*it, "stationary", {"levels", "amplitudes", "omega"})) {
      r.field(*it, "stationary", "levels", s.levels);
      if (it->contains("amplitudes")) {
        r.field(*it, "stationary", "amplitudes", s.amplitudes);
      } else {
        s.amplitudes.assign(s.levels.size(), Complex{1.0, 0.0});
      }
      r.field(*it, "stationary", "omega", s.omega);
    }
  }
  if (const auto it = doc.find("relaxation"); it != doc.end()) {
    auto& x = c.relaxation;
    if (r.object(*it, "relaxation", {"mode_count", "phase_seed", "cell_points", "start"})) {
      r.field(*it, "relaxation", "mode_count", x.mode_count);
      r.field(*it, "relaxation", "phase_seed", x.phase_seed);
      r.field(*it, "relaxation", "cell_points", x.cell_points);
      std::string start = x.start == RelaxationStart::Uniform ? "uniform" : "equilibrium";
      r.field(*it, "relaxation", "start", start);
      if (start == "uniform") {
        x.start = RelaxationStart::Uniform;
      } else if (start == "equilibrium") {
        x.start = RelaxationStart::Equilibrium;
      } else {
        r.fail("relaxation.start", "expected \"uniform\" or \"equilibrium\"");
      }
    }
  }
}

void validate(Reader& r, const RunConfig& rc, bool grid_ok) {
  const auto& c = rc.experiment;
  if (!(c.dt > 0.0)) r.fail("evolution.dt", "must be positive");
  if (c.snapshot_stride == 0) {
    r.fail("evolution.snapshot_stride", "must be at least 1");
  } else if (c.steps % c.snapshot_stride != 0) {
    r.fail("evolution.steps", "evolution.steps (" + std::to_string(c.steps) +
                                  ") is not a multiple of evolution.snapshot_stride (" +
                                  std::to_string(c.snapshot_stride) + ")");
  }
  if (c.ensemble_size == 0) r.fail("ensemble_size", "must be at least 1");
  if (c.threads == 0) r.fail("threads", "must be at least 1");
  if (!(c.hbar > 0.0)) r.fail("units.hbar", "must be positive");
  if (!(c.mass > 0.0)) r.fail("units.mass", "must be positive");
  if (rc.output.directory.empty()) r.fail("output.directory", "must not be empty");
  if (rc.output.trajectory_stride == 0) r.fail("output.trajectory_stride", "must be at least 1");

  const double horizon = c.horizon();
  for (std::size_t i = 0; i < c.check_times.size(); ++i) {
    if (c.check_times[i] < 0.0 || c.check_times[i] > horizon * (1.0 + 1e-12)) {
      r.fail(indexed("check_times", i), "outside [0, " + std::to_string(horizon) + "]");
    }
  }
  for (std::size_t i = 0; i < c.field_times.size(); ++i) {
    if (c.field_times[i] < 0.0 || c.field_times[i] > horizon * (1.0 + 1e-12)) {
      r.fail(indexed("field_times", i), "outside [0, " + std::to_string(horizon) + "]");
    }
  }

  const auto known = available_checks(c);
  for (std::size_t i = 0; i < rc.checks.size(); ++i) {
    if (std::find(known.begin(), known.end(), rc.checks[i]) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      r.fail(indexed("checks", i), "unknown check '" + rc.checks[i] + "' for " +
                                       std::string(to_string(c.preset)) + " (available: " + list + ")");
    }
  }

  switch (c.preset) {
    case Preset::DoubleSlit: {
      const auto& d = c.double_slit;
      if (!(d.separation > 0.0)) r.fail("double_slit.separation", "must be positive");
      if (!(d.slit_width > 0.0)) r.fail("double_slit.slit_width", "must be positive");
      if (!(d.longitudinal_width > 0.0)) r.fail("double_slit.longitudinal_width", "must be positive");
      if (!(d.pointer_width > 0.0)) r.fail("double_slit.pointer_width", "must be positive");
      if (d.pointer_shift < 0.0) r.fail("double_slit.pointer_shift", "must be non-negative");
      break;
    }
    case Preset::PointerMeasurement: {
      const auto& m = c.pointer;
      if (!(std::norm(m.c1) + std::norm(m.c2) > 0.0)) {
        r.fail("pointer_measurement.c1", "c1 and c2 must not both vanish");
      }
      if (!(m.system_width > 0.0)) r.fail("pointer_measurement.system_width", "must be positive");
      if (!(m.pointer_width > 0.0)) r.fail("pointer_measurement.pointer_width", "must be positive");
      if (m.pointer_shift < 0.0) r.fail("pointer_measurement.pointer_shift", "must be non-negative");
      if (!(m.max_overlap > 0.0)) r.fail("pointer_measurement.max_overlap", "must be positive");
      break;
    }
    case Preset::BarrierDwell: {
      const auto& b = c.barrier;
      if (!(b.a < b.b)) r.fail("barrier_dwell.b", "barrier_dwell.a must be below barrier_dwell.b");
      if (!(b.width > 0.0)) r.fail("barrier_dwell.width", "must be positive");
      if (b.absorber_width < 0.0) r.fail("barrier_dwell.absorber_width", "must be non-negative");
      if (b.absorber_strength < 0.0) r.fail("barrier_dwell.absorber_strength", "must be non-negative");
      break;
    }
    case Preset::Stationary: {
      const auto& s = c.stationary;
      if (s.levels.empty()) r.fail("stationary.levels", "must not be empty");
      if (s.levels.size() != s.amplitudes.size()) {
        r.fail("stationary.amplitudes", "needs one entry per level in stationary.levels");
      }
      if (!(s.omega > 0.0)) r.fail("stationary.omega", "must be positive");
      break;
    }
    case Preset::Relaxation: {
      const auto& x = c.relaxation;
      const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(x.mode_count))));
      if (x.mode_count == 0 || side * side != x.mode_count) {
        r.fail("relaxation.mode_count", "must be a positive perfect square");
      }
      if (x.cell_points < 2) r.fail("relaxation.cell_points", "must be at least 2");
      break;
    }
  }

  if (!grid_ok) return;
  const auto& axes = c.grid;
  if (axes.size() != required_dims(c)) {
    r.fail("grid", std::string(to_string(c.preset)) + " needs " + std::to_string(required_dims(c)) +
                       " axes, got " + std::to_string(axes.size()));
    return;
  }
  bool axes_ok = true;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (!(axes[a].min < axes[a].max)) {
      r.fail(indexed("grid", a) + ".max", "must exceed min");
      axes_ok = false;
    }
    if (axes[a].points < 16 || !is_power_of_two(axes[a].points)) {
      r.fail(indexed("grid", a) + ".points", "must be a power of two >= 16");
      axes_ok = false;
    }
  }
  if (!axes_ok) return;
  try {
    const SpatialGrid g(axes);
    if (c.preset == Preset::Relaxation && c.relaxation.cell_points >= 2) {
      for (std::size_t a = 0; a < axes.size(); ++a) {
        if (axes[a].points % c.relaxation.cell_points != 0) {
          r.fail("relaxation.cell_points", "does not divide grid[" + std::to_string(a) + "].points");
        }
      }
    }
    if (c.dt > 0.0 && c.mass > 0.0 && c.hbar > 0.0) {
      const double phase = max_kinetic_phase(g, MassVector::uniform(g.dims(), c.mass), c.hbar, c.dt);
      if (phase >= std::numbers::pi) {
        r.fail("evolution.dt", "kinetic phase per step at the Nyquist wavenumber is " +
                                   std::to_string(phase) + " >= pi; reduce dt or coarsen the grid");
      }
    }
  } catch (const Error& e) {
    r.fail("grid", e.what());
  }
}

}  // namespace

std::vector<std::string> enabled_checks(const RunConfig& config) {
  return config.checks.empty() ? available_checks(config.experiment) : config.checks;
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw SchemaViolation({std::string("<root>: invalid JSON: ") + e.what()});
  }
  if (overrides.experiment) doc["experiment"] = *overrides.experiment;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.threads) doc["threads"] = *overrides.threads;
  if (overrides.checks) doc["checks"] = *overrides.checks;
  if (overrides.output_directory) doc["output"]["directory"] = *overrides.output_directory;

  std::vector<std::string> errors;
  Reader r(errors);
  if (!r.object(doc, "",
                {"experiment", "seed", "ensemble_size", "threads", "units", "grid", "evolution",
                 "check_times", "field_times", "checks", "output", "double_slit",
                 "pointer_measurement", "barrier_dwell", "stationary", "relaxation"})) {
    throw SchemaViolation(std::move(errors));
  }

  RunConfig rc;
  const auto exp = doc.find("experiment");
  if (exp == doc.end()) {
    errors.emplace_back("experiment: required key missing");
    throw SchemaViolation(std::move(errors));
  }
  std::string name;
  r.read(*exp, "experiment", name);
  const auto preset = preset_from_string(name);
  if (!preset) {
    errors.push_back("experiment: unknown preset '" + name +
                     "' (double_slit, pointer_measurement, barrier_dwell, stationary, relaxation)");
    throw SchemaViolation(std::move(errors));
  }
  auto& c = rc.experiment;
  c = default_config(*preset);
  c.grid.clear();

  r.field(doc, "", "seed", c.seed);
  r.field(doc, "", "ensemble_size", c.ensemble_size);
  r.field(doc, "", "threads", c.threads);
  if (const auto it = doc.find("units"); it != doc.end() && r.object(*it, "units", {"hbar", "mass"})) {
    r.field(*it, "units", "hbar", c.hbar);
    r.field(*it, "units", "mass", c.mass);
  }
  if (const auto it = doc.find("evolution");
      it != doc.end() && r.object(*it, "evolution", {"dt", "steps", "snapshot_stride"})) {
    r.field(*it, "evolution", "dt", c.dt);
    r.field(*it, "evolution", "steps", c.steps);
    r.field(*it, "evolution", "snapshot_stride", c.snapshot_stride);
  }
  r.field(doc, "", "check_times", c.check_times);
  r.field(doc, "", "field_times", c.field_times);
  r.field(doc, "", "checks", rc.checks);
  if (const auto it = doc.find("output");
      it != doc.end() &&
      r.object(*it, "output", {"directory", "max_trajectories", "trajectory_stride", "fields"})) {
    r.field(*it, "output", "directory", rc.output.directory);
    r.field(*it, "output", "max_trajectories", rc.output.max_trajectories);
    r.field(*it, "output", "trajectory_stride", rc.output.trajectory_stride);
    r.field(*it, "output", "fields", rc.output.fields);
  }
  read_sections(r, doc, c);

  bool grid_ok = true;
  if (const auto it = doc.find("grid"); it != doc.end()) {
    if (!it->is_array() || it->empty()) {
      r.fail("grid", "expected a non-empty array of axes");
      grid_ok = false;
    } else {
      for (std::size_t a = 0; a < it->size(); ++a) {
        const auto path = indexed("grid", a);
        Axis axis;
        const std::size_t before = errors.size();
        if (r.object((*it)[a], path, {"min", "max", "points"})) {
          for (const char* key : {"min", "max", "points"}) {
            if (!(*it)[a].contains(key)) r.fail(join(path, key), "required key missing");
          }
          r.field((*it)[a], path, "min", axis.min);
          r.field((*it)[a], path, "max", axis.max);
          r.field((*it)[a], path, "points", axis.points);
        }
        if (errors.size() != before) grid_ok = false;
        c.grid.push_back(axis);
      }
    }
  } else {
    c.grid = default_grid(c);
  }

  validate(r, rc, grid_ok);
  if (!errors.empty()) throw SchemaViolation(std::move(errors));
  return rc;
}

std::string serialize_config(const RunConfig& rc) {
  const auto& c = rc.experiment;
  auto complex = [](Complex z) { return ordered_json::array({z.real(), z.imag()}); };
  ordered_json doc;
  doc["experiment"] = std::string(to_string(c.preset));
  doc["seed"] = c.seed;
  doc["ensemble_size"] = c.ensemble_size;
  doc["threads"] = c.threads;
  doc["units"] = {{"hbar", c.hbar}, {"mass", c.mass}};
  auto& grid = doc["grid"] = ordered_json::array();
  for (const auto& a : c.grid.empty() ? default_grid(c) : c.grid) {
    grid.push_back({{"min", a.min}, {"max", a.max}, {"points", a.points}});
  }
  doc["evolution"] = {{"dt", c.dt}, {"steps", c.steps}, {"snapshot_stride", c.snapshot_stride}};
  doc["check_times"] = c.check_times;
  doc["field_times"] = c.field_times;
  doc["checks"] = rc.checks;
  doc["output"] = {{"directory", rc.output.directory},
                   {"max_trajectories", rc.output.max_trajectories},
                   {"trajectory_stride", rc.output.trajectory_stride},
                   {"fields", rc.output.fields}};
  const auto& d = c.double_slit;
  doc["double_slit"] = {{"separation", d.separation},
                        {"slit_width", d.slit_width},
                        {"boost", d.boost},
                        {"longitudinal_width", d.longitudinal_width},
                        {"longitudinal_start", d.longitudinal_start},
                        {"which_way", d.which_way},
                        {"pointer_width", d.pointer_width},
                        {"pointer_shift", d.pointer_shift}};
  const auto& m = c.pointer;
  doc["pointer_measurement"] = {{"c1", complex(m.c1)},
                                {"c2", complex(m.c2)},
                                {"system_separation", m.system_separation},
                                {"system_width", m.system_width},
                                {"pointer_width", m.pointer_width},
                                {"pointer_shift", m.pointer_shift},
                                {"max_overlap", m.max_overlap},
                                {"empty_wave_check", m.empty_wave_check}};
  const auto& b = c.barrier;
  doc["barrier_dwell"] = {{"v0", b.v0},
                          {"a", b.a},
                          {"b", b.b},
                          {"start", b.start},
                          {"width", b.width},
                          {"boost", b.boost},
                          {"absorber_width", b.absorber_width},
                          {"absorber_strength", b.absorber_strength}};
  auto amps = ordered_json::array();
  for (auto z : c.stationary.amplitudes) amps.push_back(complex(z));
  doc["stationary"] = {{"levels", c.stationary.levels}, {"amplitudes", amps}, {"omega", c.stationary.omega}};
  const auto& x = c.relaxation;
  doc["relaxation"] = {{"mode_count", x.mode_count},
                       {"phase_seed", x.phase_seed},
                       {"cell_points", x.cell_points},
                       {"start", x.start == RelaxationStart::Uniform ? "uniform" : "equilibrium"}};
  return doc.dump(2);
}

}  // namespace bohm
