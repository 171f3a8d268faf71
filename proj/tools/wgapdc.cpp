// Scenario runner: simulate, verify, export-tensor.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgapdc/config.hpp"
#include "wgapdc/io.hpp"
#include "wgapdc/scenarios.hpp"
#include "wgapdc/verification.hpp"

namespace {

using namespace wgapdc;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scenario name starts from its preset; anything else is read as a config file.
RunConfig resolve_config(const std::string& target, const std::vector<std::string>& overrides,
                         const std::optional<std::string>& out_dir, const std::optional<double>& smoothing_nm) {
  YAML::Node node;
  if (is_scenario_name(target)) {
    node = load_yaml(serialize(scenario_preset(target)));
  } else if (std::filesystem::is_regular_file(target)) {
    node = load_yaml(io::read_file(target));
  } else {
    throw UsageError("'" + target + "' is neither a scenario name nor a readable config file");
  }
  std::vector<std::string> all = overrides;
  if (out_dir) all.push_back("out_dir=" + YAML::Dump(YAML::Node(*out_dir)));
  if (smoothing_nm) all.push_back("smoothing_nm=" + io::format_double(*smoothing_nm));
  apply_overrides(node, all);
  return config_from_node(node);
}

int cmd_simulate(const std::string& target, const std::vector<std::string>& overrides,
                 const std::optional<std::string>& out_dir, const std::optional<double>& smoothing_nm) {
  const RunConfig cfg = resolve_config(target, overrides, out_dir, smoothing_nm);
  io::OutputSink sink(cfg.out_dir);
  const auto report = run_scenario(cfg, sink);
  sink.finish();
  std::cout << "scenario " << cfg.scenario << " -> " << cfg.out_dir << " (" << sink.file_count() << " files)\n";
  for (const auto& line : report.lines) std::cout << "  " << line << '\n';
  return 0;
}

int cmd_verify() {
  const auto results = verification::run_all();
  bool ok = true;
  std::printf("%-70s %-5s %12s %10s %8s\n", "check", "", "worst", "tol", "time/s");
  for (const auto& r : results) {
    std::printf("%-70s %-5s %12.3e %10.1e %8.2f\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.metric, r.tolerance,
                r.seconds);
    if (!r.detail.empty()) std::printf("    %s\n", r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitFailure;
}

int cmd_export(const std::string& path, const std::string& from, const std::vector<std::string>& overrides) {
  const RunConfig cfg = resolve_config(from, overrides, std::nullopt, std::nullopt);
  const auto tensor = Pipeline::from_config(cfg).source().to_dense();
  const std::string bytes = io::encode_tensor(tensor);
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::cout << path << ' ' << bytes.size() << " bytes, sha256 " << io::sha256_hex(bytes) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric down-conversion in nonlinear waveguide arrays"};
  app.require_subcommand(1);

  std::string target;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<double> smoothing_nm;
  auto* sim = app.add_subcommand("simulate", "Run a named scenario or a config file");
  sim->add_option("target", target, "Scenario name or path to a config file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--set", overrides, "Override a config key (key=value, repeatable)");
  sim->add_option("--smooth-nm", smoothing_nm, "Detector resolution FWHM in nm");

  auto* ver = app.add_subcommand("verify", "Run the oracle equivalence suite");
  ver->group("");  // hidden

  std::string export_path;
  std::string export_from = "fig4_phase_engineering";
  std::vector<std::string> export_overrides;
  auto* exp = app.add_subcommand("export-tensor", "Write the dense amplitude tensor of a configuration");
  exp->add_option("path", export_path, "Output file")->required();
  exp->add_option("--from", export_from, "Scenario name or config file (default: fig4_phase_engineering)");
  exp->add_option("--set", export_overrides, "Override a config key (key=value, repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(target, overrides, out_dir, smoothing_nm);
    if (*ver) return cmd_verify();
    if (*exp) return cmd_export(export_path, export_from, export_overrides);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
