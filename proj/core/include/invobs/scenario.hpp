#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invobs/car.hpp"
#include "invobs/ins.hpp"
#include "invobs/noise.hpp"
#include "invobs/reactor.hpp"
#include "invobs/vtol.hpp"

namespace invobs::scenario {

enum class SystemKind { car, reactor, ins };

SystemKind parse_system(const std::string& name);
std::string system_name(SystemKind k);

struct CarSetup {
  car::Gains gains;
  car::InputProfile input;
  Eigen::Vector3d truth0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d estimate0{1.0, -1.0, 1.0};
};

struct ReactorSetup {
  reactor::Params params;
  reactor::Gains gains;
  // constant (c, D, T_in, v)
  Eigen::Vector4d input{2.16e12, 0.0033, 270.0, 0.0};
  double x_in = 1.0;
  // truth starts at the steady state of `input` when true
  bool truth_at_equilibrium = true;
  Eigen::Vector3d truth0{1.0, 0.5, 290.0};
  // multiplicative on concentrations, additive on temperature, relative to truth0
  double conc_factor_in = 10.0, conc_factor = 0.1, temp_offset = 50.0;
};

struct InsSetup {
  ins::Gains gains;
  ins::Environment env;
  VtolTrajectorySpec trajectory;
  bool noise = true;
  SensorNoiseSpec noise_spec = SensorNoiseSpec::reference_defaults();
  Quaternion q_hat0{0.5, 0.5, -0.5, 0.5};
  Eigen::Vector3d v_hat0{10.0, -10.0, 5.0};
};

struct ScenarioConfig {
  std::string name;
  SystemKind system = SystemKind::car;
  double duration = 40.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  int output_stride = 1;
  CarSetup car;
  ReactorSetup reactor;
  InsSetup ins;
};

std::vector<std::string> preset_names();
// "car-default", "reactor-default" or "ins-paper"
ScenarioConfig preset(const std::string& name);
std::string default_preset(SystemKind k);

// Overlay a JSON document on `base`. Unknown keys and ill-typed values are
// rejected with ValidationError.
ScenarioConfig apply_config_json(const ScenarioConfig& base, const std::string& json_text);
std::string config_to_json(const ScenarioConfig& cfg);

void validate(const ScenarioConfig& cfg);

struct RunResult {
  std::string csv;
  std::string summary_json;
  bool truncated = false;
  std::string diagnostic;
  long halvings = 0;
};

// Validates, simulates and renders the trace. Nothing touches the filesystem.
RunResult run_scenario(const ScenarioConfig& cfg);

// Summary numbers computed from the CSV text alone.
std::string summarize_csv(const std::string& csv);

// trace.csv, summary.json, errors.svg and states.svg under dir.
void write_outputs(const RunResult& r, const std::string& dir);

}  // namespace invobs::scenario
