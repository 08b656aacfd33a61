#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bohm/config.hpp"
#include "bohm/error.hpp"
#include "bohm/output.hpp"

namespace {

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de Broglie-Bohm pilot-wave simulator"};
  app.set_version_flag("--version", std::string(bohm::kArtifactName) + " " + bohm::kArtifactVersion);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string experiment;
  std::string check_list;
  std::size_t threads = 0;
  auto* config_opt = app.add_option("--config", config_path, "JSON run configuration (comments allowed)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Ensemble seed");
  auto* exp_opt = app.add_option("--experiment", experiment,
                                 "Preset: double_slit, pointer_measurement, barrier_dwell, "
                                 "stationary, relaxation");
  auto* check_opt = app.add_option("--check", check_list, "Comma-separated checks deciding the exit code");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bohm::kExitError;
  }

  bohm::Overrides overrides;
  if (*out_opt) overrides.output_directory = out_dir;
  if (*seed_opt) overrides.seed = seed;
  if (*exp_opt) overrides.experiment = experiment;
  if (*check_opt) overrides.checks = split_list(check_list);
  if (*threads_opt) overrides.threads = threads;

  std::string text = "{}";
  if (*config_opt) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return bohm::kExitError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (!*exp_opt) {
    std::cerr << "error: give --config PATH or --experiment NAME\n";
    return bohm::kExitError;
  }

  bohm::RunConfig config;
  try {
    config = bohm::parse_config(text, overrides);
  } catch (const bohm::SchemaViolation& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return bohm::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bohm::kExitError;
  }

  const auto outcome = bohm::run(config, overrides);
  switch (outcome.exit_code) {
    case bohm::kExitPass:
      std::cout << "all checks passed; manifest " << outcome.manifest.string() << "\n";
      break;
    case bohm::kExitCheckFailure:
      std::cout << "check failure:";
      for (const auto& c : outcome.failed_checks) std::cout << ' ' << c;
      std::cout << "; manifest " << outcome.manifest.string() << "\n";
      break;
    default:
      std::cerr << "error: " << outcome.error << "\n";
  }
  return outcome.exit_code;
}
