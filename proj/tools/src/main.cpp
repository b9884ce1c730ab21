#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "invobs/errors.hpp"
#include "invobs/property_suite.hpp"
#include "invobs/scenario.hpp"

namespace {

using namespace invobs;
using nlohmann::json;

enum Exit { kOk = 0, kValidation = 1, kNumeric = 2, kProperty = 3 };

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string system;
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  bool no_noise = false;
  bool published_defaults = false;
  std::string out;
};

scenario::ScenarioConfig build_config(const RunArgs& a) {
  const scenario::SystemKind kind = scenario::parse_system(a.system);
  if (a.published_defaults && !a.preset.empty()) throw ValidationError("--paper-defaults and --preset are exclusive");
  const std::string name = a.preset.empty() ? scenario::default_preset(kind) : a.preset;
  scenario::ScenarioConfig c = scenario::preset(name);
  if (c.system != kind) throw ValidationError("preset '" + name + "' is for system '" + scenario::system_name(c.system) + "'");
  if (!a.config.empty()) c = scenario::apply_config_json(c, read_file(a.config));
  if (a.seed) c.seed = *a.seed;
  if (a.no_noise) {
    if (kind != scenario::SystemKind::ins) throw ValidationError("--no-noise applies to ins only");
    c.ins.noise = false;
  }
  return c;
}

void print_summary(const scenario::RunResult& r, const std::string& dir) {
  const json s = json::parse(r.summary_json);
  std::printf("wrote %s/{trace.csv,summary.json,errors.svg,states.svg}\n", dir.c_str());
  if (s.contains("final_error_norm") && s["final_error_norm"].is_number())
    std::printf("final error norm %.6e\n", s["final_error_norm"].get<double>());
  if (r.halvings) std::printf("step halvings: %ld\n", r.halvings);
  if (r.truncated) std::fprintf(stderr, "trace truncated: %s\n", r.diagnostic.c_str());
}

int cmd_run(const RunArgs& a) {
  const scenario::ScenarioConfig c = build_config(a);
  scenario::validate(c);
  const scenario::RunResult r = scenario::run_scenario(c);
  const std::string dir = a.out.empty() ? "out/" + c.name : a.out;
  scenario::write_outputs(r, dir);
  print_summary(r, dir);
  return r.truncated ? kNumeric : kOk;
}

int cmd_batch(const std::vector<std::string>& files, const std::string& out) {
  // Every config is parsed and validated before any simulation starts.
  std::vector<scenario::ScenarioConfig> cfgs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string text = read_file(files[i]);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(files[i] + ": " + e.what());
    }
    if (!j.contains("system") || !j["system"].is_string()) throw ValidationError(files[i] + ": batch configs need \"system\"");
    const auto kind = scenario::parse_system(j["system"].get<std::string>());
    scenario::ScenarioConfig c = scenario::apply_config_json(scenario::preset(scenario::default_preset(kind)), text);
    if (!j.contains("name")) c.name = c.name + "-" + std::to_string(i);
    scenario::validate(c);
    cfgs.push_back(c);
  }
  std::vector<std::future<scenario::RunResult>> jobs;
  for (const auto& c : cfgs) jobs.push_back(std::async(std::launch::async, [c] { return scenario::run_scenario(c); }));
  int code = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const scenario::RunResult r = jobs[i].get();
    const std::string dir = out + "/" + cfgs[i].name;
    scenario::write_outputs(r, dir);
    print_summary(r, dir);
    if (r.truncated) code = kNumeric;
  }
  return code;
}

int cmd_verify(const std::string& system, const properties::SuiteOptions& opt, const std::string& report, bool as_json) {
  const auto res = properties::run_suite(system, opt);
  const std::string js = properties::report_json(res, opt);
  if (!report.empty()) {
    std::ofstream f(report, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + report);
    f << js << "\n";
  }
  if (as_json)
    std::cout << js << "\n";
  else
    std::cout << properties::report_text(res);
  return properties::all_pass(res) ? kOk : kProperty;
}

int cmd_presets(const std::string& name) {
  if (name.empty()) {
    for (const auto& n : scenario::preset_names()) std::cout << n << "\n";
    return kOk;
  }
  std::cout << scenario::config_to_json(scenario::preset(name)) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant observer scenarios and property checks"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "simulate one system and write trace, summary and plots");
  run->add_option("system", ra.system, "car, reactor or ins")->required();
  run->add_option("--preset", ra.preset, "named preset (car-default, reactor-default, ins-paper)");
  run->add_option("--config", ra.config, "JSON file overlaid on the preset");
  run->add_option("--seed", ra.seed, "noise seed");
  run->add_flag("--no-noise", ra.no_noise, "noiseless sensors (ins)");
  run->add_flag("--paper-defaults", ra.published_defaults, "the published setup for the system (the default preset)");
  run->add_option("--out", ra.out, "output directory (default out/<scenario name>)");

  std::vector<std::string> batch_files;
  std::string batch_out = "out";
  auto* batch = app.add_subcommand("batch", "run several configs in parallel");
  batch->add_option("configs", batch_files, "JSON configs, each with a \"system\" key")->required();
  batch->add_option("--out", batch_out, "parent output directory");

  std::string vsys = "all", vreport;
  properties::SuiteOptions vopt;
  bool vjson = false;
  auto* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("system", vsys, "all, group, quaternion, car, reactor, ins or sim");
  verify->add_option("--samples", vopt.samples, "random samples per symmetry check");
  verify->add_option("--seed", vopt.seed, "suite seed");
  verify->add_option("--report", vreport, "write the JSON report to this file");
  verify->add_flag("--json", vjson, "print the JSON report instead of the table");
  verify->add_flag("--inject-fault", vopt.inject_car_gain_fault, "flip the car heading gain sign in closed-loop runs");

  std::string pname;
  auto* presets = app.add_subcommand("presets", "list presets or print one as JSON");
  presets->add_option("name", pname);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*batch) return cmd_batch(batch_files, batch_out);
    if (*verify) return cmd_verify(vsys, vopt, vreport, vjson);
    if (*presets) return cmd_presets(pname);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kNumeric;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  }
  return kValidation;
}
