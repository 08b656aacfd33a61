#include "bohm/output.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

#include "bohm/error.hpp"
#include "json.hpp"

namespace bohm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void put(std::ostream& out, double v) { out << format_real(v); }

std::string axis_columns(const char* prefix, std::size_t dims) {
  std::string s;
  for (std::size_t a = 0; a < dims; ++a) s += std::string(",") + prefix + std::to_string(a);
  return s;
}

ordered_json check_json(const Check& c, bool enabled) {
  return {{"name", c.name},      {"measured", c.measured}, {"threshold", c.threshold},
          {"relation", c.relation}, {"passed", c.passed},  {"enabled", enabled}};
}

ordered_json overrides_json(const Overrides& o) {
  ordered_json j = ordered_json::object();
  if (o.experiment) j["experiment"] = *o.experiment;
  if (o.output_directory) j["output_directory"] = *o.output_directory;
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;
  if (o.checks) j["checks"] = *o.checks;
  return j;
}

/// Writes through `write` into path; throws Io on any stream failure.
template <class F>
void write_file(const fs::path& path, F&& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

}  // namespace

void write_trajectories_csv(std::ostream& out, const TrajectoryEnsemble& ensemble,
                            const OutputOptions& options) {
  const std::size_t dims = ensemble.size() > 0 ? ensemble[0].dims() : 1;
  out << "traj_id,t" << axis_columns("q", dims) << ",flags\n";
  const auto times = ensemble.times();
  const std::size_t count = std::min(options.max_trajectories, ensemble.size());
  const std::size_t stride = std::max<std::size_t>(options.trajectory_stride, 1);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& tr = ensemble[i];
    for (std::size_t j = 0; j < tr.size(); j += stride) {
      out << i << ',';
      put(out, times[j]);
      for (std::size_t a = 0; a < dims; ++a) {
        out << ',';
        put(out, tr.position(j)[a]);
      }
      out << ',' << static_cast<unsigned>(tr.flags(j)) << '\n';
    }
  }
}

void write_fields_csv(std::ostream& out, const std::vector<WaveFunction>& fields,
                      const MassVector& masses) {
  const std::size_t dims = fields.empty() ? 1 : fields.front().grid().dims();
  out << "snapshot,t" << axis_columns("x", dims) << ",re_psi,im_psi,P" << axis_columns("v", dims)
      << ",Q,node_mask\n";
  for (std::size_t s = 0; s < fields.size(); ++s) {
    const auto& psi = fields[s];
    const auto& g = psi.grid();
    const auto polar = polar_fields(psi, masses);
    const std::string t = format_real(psi.time());
    for (std::size_t i = 0; i < g.size(); ++i) {
      out << s << ',' << t;
      const Point q = g.point(i);
      for (std::size_t a = 0; a < dims; ++a) {
        out << ',';
        put(out, q[a]);
      }
      out << ',';
      put(out, psi[i].real());
      out << ',';
      put(out, psi[i].imag());
      out << ',';
      put(out, polar.density[i]);
      for (std::size_t a = 0; a < dims; ++a) {
        out << ',';
        put(out, polar.velocity[a][i]);
      }
      out << ',';
      put(out, polar.quantum_potential[i]);
      out << ',' << static_cast<unsigned>(polar.node_mask[i]) << '\n';
    }
  }
}

void write_histograms_csv(std::ostream& out, const std::vector<Histogram>& histograms) {
  out << "histogram,bin,lo,hi,density,reference\n";
  for (const auto& h : histograms) {
    for (std::size_t b = 0; b < h.density.size(); ++b) {
      out << h.name << ',' << b << ',';
      put(out, h.edges[b]);
      out << ',';
      put(out, h.edges[b + 1]);
      out << ',';
      put(out, h.density[b]);
      out << ',';
      put(out, b < h.reference.size() ? h.reference[b] : 0.0);
      out << '\n';
    }
  }
}

void write_h_series_csv(std::ostream& out, const HSeries* series) {
  out << "t,H\n";
  if (series == nullptr) return;
  for (std::size_t i = 0; i < series->times.size(); ++i) {
    put(out, series->times[i]);
    out << ',';
    put(out, series->values[i]);
    out << '\n';
  }
}

std::string manifest_json(const RunConfig& config, const Overrides& overrides,
                          const ExperimentReport& report) {
  const auto enabled = enabled_checks(config);
  auto is_enabled = [&](const std::string& name) {
    return std::find(enabled.begin(), enabled.end(), name) != enabled.end();
  };

  ordered_json m;
  m["artifact"] = kArtifactName;
  m["version"] = kArtifactVersion;
  m["experiment"] = std::string(to_string(config.experiment.preset));
  m["config"] = ordered_json::parse(serialize_config(config));
  m["overrides"] = overrides_json(overrides);
  m["runtime_seconds"] = report.runtime_seconds;

  auto checks = ordered_json::array();
  bool pass = true;
  for (const auto& c : report.checks) {
    checks.push_back(check_json(c, is_enabled(c.name)));
    if (is_enabled(c.name) && !c.passed) pass = false;
  }
  for (const auto& name : enabled) {
    if (report.find_check(name) == nullptr) {
      checks.push_back({{"name", name}, {"measured", nullptr}, {"threshold", nullptr},
                        {"relation", nullptr}, {"passed", false}, {"enabled", true}});
      pass = false;
    }
  }
  m["checks"] = checks;

  auto eq = ordered_json::array();
  for (const auto& e : report.equivariance) {
    eq.push_back({{"time", e.time}, {"ks", e.distance}, {"critical", e.critical}, {"exceeds", e.exceeds}});
  }
  m["equivariance"] = eq;

  ordered_json scalars = ordered_json::object();
  for (const auto& s : report.scalars) scalars[s.name] = s.value;
  m["scalars"] = scalars;

  if (report.channels) {
    m["channels"] = {{"fractions", report.channels->fractions},
                     {"expected", report.channels->expected},
                     {"unclassified", report.channels->unclassified}};
  }
  if (report.dwell) {
    const auto& d = *report.dwell;
    m["dwell"] = {{"count", d.per_trajectory.size()},
                  {"mean", d.mean},
                  {"stddev", d.stddev},
                  {"oracle", d.oracle},
                  {"transmission", d.transmission},
                  {"transmission_oracle", d.transmission_oracle}};
  }
  m["files"] = {"trajectories.csv", "fields.csv", "histograms.csv", "h_series.csv"};
  m["status"] = pass ? "pass" : "check_failure";
  m["exit_code"] = pass ? kExitPass : kExitCheckFailure;
  return m.dump(2) + "\n";
}

RunOutcome run(const RunConfig& config, const Overrides& overrides) {
  RunOutcome outcome;
  const fs::path dir = config.output.directory;
  const fs::path manifest = dir / "manifest.json";
  const fs::path staging = dir / "manifest.json.tmp";
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() +
                                     (ec ? ": " + ec.message() : ""));
    }
    // A stale manifest must not outlive a failed rerun.
    fs::remove(manifest, ec);

    const auto report = run_experiment(config.experiment);

    write_file(dir / "trajectories.csv", [&](std::ostream& out) {
      if (report.ensemble) {
        write_trajectories_csv(out, *report.ensemble, config.output);
      } else {
        write_trajectories_csv(out, TrajectoryEnsemble({}, std::make_shared<std::vector<double>>(), 0,
                                                       SamplingMode::QuantumEquilibrium),
                               config.output);
      }
    });
    write_file(dir / "fields.csv", [&](std::ostream& out) {
      static const std::vector<WaveFunction> none;
      write_fields_csv(out, config.output.fields ? report.fields : none, report.masses);
    });
    write_file(dir / "histograms.csv",
               [&](std::ostream& out) { write_histograms_csv(out, report.histograms); });
    write_file(dir / "h_series.csv", [&](std::ostream& out) {
      write_h_series_csv(out, report.h ? &*report.h : nullptr);
    });

    const std::string text = manifest_json(config, overrides, report);
    write_file(staging, [&](std::ostream& out) { out << text; });
    fs::rename(staging, manifest);

    const auto enabled = enabled_checks(config);
    for (const auto& name : enabled) {
      const Check* c = report.find_check(name);
      if (c == nullptr || !c->passed) outcome.failed_checks.push_back(name);
    }
    outcome.manifest = manifest;
    outcome.exit_code = outcome.failed_checks.empty() ? kExitPass : kExitCheckFailure;
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove(staging, ec);
    outcome.exit_code = kExitError;
    outcome.manifest.clear();
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace bohm
