#include "invobs/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "invobs/errors.hpp"
#include "invobs/simulate.hpp"
#include "invobs/svg_plot.hpp"
#include "invobs/trace_csv.hpp"

namespace invobs::scenario {

using nlohmann::json;

SystemKind parse_system(const std::string& name) {
  if (name == "car") return SystemKind::car;
  if (name == "reactor") return SystemKind::reactor;
  if (name == "ins") return SystemKind::ins;
  throw ValidationError("unknown system '" + name + "' (expected car, reactor or ins)");
}

std::string system_name(SystemKind k) {
  switch (k) {
    case SystemKind::car: return "car";
    case SystemKind::reactor: return "reactor";
    case SystemKind::ins: return "ins";
  }
  return "?";
}

std::vector<std::string> preset_names() { return {"car-default", "reactor-default", "ins-paper"}; }

std::string default_preset(SystemKind k) {
  switch (k) {
    case SystemKind::car: return "car-default";
    case SystemKind::reactor: return "reactor-default";
    case SystemKind::ins: return "ins-paper";
  }
  return "";
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "car-default") {
    c.system = SystemKind::car;
    c.duration = 40.0;
    c.dt = 0.01;
  } else if (name == "reactor-default") {
    c.system = SystemKind::reactor;
    c.duration = 12000.0;
    c.dt = 0.1;
    c.output_stride = 10;
  } else if (name == "ins-paper") {
    c.system = SystemKind::ins;
    c.duration = 6.15;
    c.dt = 0.001;
    c.seed = 1;
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  return c;
}

// ---------------------------------------------------------------- config I/O

namespace {

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ValidationError(where + ": unknown key '" + k + "'");
}

double get_num(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> get_vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N))
    throw ValidationError(where + ": expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = get_num(j[i], where);
  return v;
}

void read_num(const json& j, const char* key, double& dst, const std::string& where) {
  if (j.contains(key)) dst = get_num(j[key], where + "." + key);
}

template <int N>
json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v[i]);
  return a;
}

json channel_json(const NoiseChannel& c) { return {{"bias", vec_json<3>(c.bias)}, {"scale", c.scale}}; }

void read_channel(const json& j, NoiseChannel& c, const std::string& where) {
  require_keys(j, where, {"bias", "scale"});
  if (j.contains("bias")) c.bias = get_vec<3>(j["bias"], where + ".bias");
  read_num(j, "scale", c.scale, where);
}

json gains_json(const ScenarioConfig& c) {
  switch (c.system) {
    case SystemKind::car: return {{"a", c.car.gains.a}, {"b", c.car.gains.b}, {"c", c.car.gains.c}};
    case SystemKind::reactor: return {{"beta", c.reactor.gains.beta}, {"kappa", c.reactor.gains.kappa}};
    case SystemKind::ins: {
      const auto& g = c.ins.gains;
      return {{"M12", g.M12}, {"M21", g.M21}, {"N11", g.N11}, {"N22", g.N22}, {"N33", g.N33}, {"lambda", g.lambda}};
    }
  }
  return {};
}

json noise_json(const InsSetup& s) {
  if (!s.noise) return false;
  return {{"accel", channel_json(s.noise_spec.accel)},
          {"gyro", channel_json(s.noise_spec.gyro)},
          {"velocity", channel_json(s.noise_spec.velocity)},
          {"magnetometer", channel_json(s.noise_spec.magnetometer)}};
}

json system_json(const ScenarioConfig& c) {
  json j;
  switch (c.system) {
    case SystemKind::car: {
      const auto& in = c.car.input;
      j["input"] = {{"u0", in.u0}, {"u_amp", in.u_amp}, {"u_freq", in.u_freq}, {"v_amp", in.v_amp}, {"v_freq", in.v_freq}};
      j["initial"] = {{"truth", vec_json<3>(c.car.truth0)}, {"estimate", vec_json<3>(c.car.estimate0)}};
      break;
    }
    case SystemKind::reactor: {
      const auto& r = c.reactor;
      j["params"] = {{"ea_over_r", r.params.ea_over_r}, {"k", r.params.k}};
      j["input"] = {{"c", r.input[0]}, {"D", r.input[1]}, {"T_in", r.input[2]}, {"v", r.input[3]}};
      j["x_in"] = r.x_in;
      j["initial"] = {{"truth", r.truth_at_equilibrium ? json("equilibrium") : vec_json<3>(r.truth0)},
                      {"estimate", {{"conc_factor_in", r.conc_factor_in}, {"conc_factor", r.conc_factor},
                                    {"temp_offset", r.temp_offset}}}};
      break;
    }
    case SystemKind::ins: {
      const auto& s = c.ins;
      j["environment"] = {{"A_grav", vec_json<3>(s.env.A_grav)}, {"B", vec_json<3>(s.env.B)}};
      j["trajectory"] = {{"radius", s.trajectory.radius}, {"t1", s.trajectory.t1}, {"t2", s.trajectory.t2},
                         {"t3", s.trajectory.t3}, {"a_grav", s.trajectory.a_grav}};
      j["noise"] = noise_json(s);
      j["initial"] = {{"estimate", {{"q", vec_json<4>(s.q_hat0.coeffs())}, {"v", vec_json<3>(s.v_hat0)}}}};
      break;
    }
  }
  return j;
}

}  // namespace

std::string config_to_json(const ScenarioConfig& c) {
  json j = system_json(c);
  j["name"] = c.name;
  j["system"] = system_name(c.system);
  j["duration"] = c.duration;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  j["output_stride"] = c.output_stride;
  j["gains"] = gains_json(c);
  return j.dump(2);
}

ScenarioConfig apply_config_json(const ScenarioConfig& base, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  ScenarioConfig c = base;
  require_keys(j, "config", {"name", "system", "duration", "dt", "seed", "output_stride", "gains", "input",
                             "initial", "params", "x_in", "environment", "trajectory", "noise"});
  if (j.contains("system")) {
    if (!j["system"].is_string()) throw ValidationError("config.system: expected a string");
    if (parse_system(j["system"].get<std::string>()) != c.system)
      throw ValidationError("config.system does not match the selected system '" + system_name(c.system) + "'");
  }
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ValidationError("config.name: expected a string");
    c.name = j["name"].get<std::string>();
  }
  read_num(j, "duration", c.duration, "config");
  read_num(j, "dt", c.dt, "config");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ValidationError("config.seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_stride")) {
    if (!j["output_stride"].is_number_integer()) throw ValidationError("config.output_stride: expected an integer");
    c.output_stride = j["output_stride"].get<int>();
  }

  const auto only_for = [&](const char* key, SystemKind k) {
    if (j.contains(key) && c.system != k)
      throw ValidationError(std::string("config.") + key + " does not apply to system '" + system_name(c.system) + "'");
  };
  only_for("params", SystemKind::reactor);
  only_for("x_in", SystemKind::reactor);
  only_for("environment", SystemKind::ins);
  only_for("trajectory", SystemKind::ins);
  only_for("noise", SystemKind::ins);

  switch (c.system) {
    case SystemKind::car: {
      if (j.contains("gains")) {
        const json& g = j["gains"];
        require_keys(g, "config.gains", {"a", "b", "c"});
        read_num(g, "a", c.car.gains.a, "config.gains");
        read_num(g, "b", c.car.gains.b, "config.gains");
        read_num(g, "c", c.car.gains.c, "config.gains");
      }
      if (j.contains("input")) {
        const json& in = j["input"];
        require_keys(in, "config.input", {"u0", "u_amp", "u_freq", "v_amp", "v_freq"});
        read_num(in, "u0", c.car.input.u0, "config.input");
        read_num(in, "u_amp", c.car.input.u_amp, "config.input");
        read_num(in, "u_freq", c.car.input.u_freq, "config.input");
        read_num(in, "v_amp", c.car.input.v_amp, "config.input");
        read_num(in, "v_freq", c.car.input.v_freq, "config.input");
      }
      if (j.contains("initial")) {
        const json& ini = j["initial"];
        require_keys(ini, "config.initial", {"truth", "estimate"});
        if (ini.contains("truth")) c.car.truth0 = get_vec<3>(ini["truth"], "config.initial.truth");
        if (ini.contains("estimate")) c.car.estimate0 = get_vec<3>(ini["estimate"], "config.initial.estimate");
      }
      break;
    }
    case SystemKind::reactor: {
      auto& r = c.reactor;
      if (j.contains("gains")) {
        const json& g = j["gains"];
        require_keys(g, "config.gains", {"beta", "kappa"});
        read_num(g, "beta", r.gains.beta, "config.gains");
        read_num(g, "kappa", r.gains.kappa, "config.gains");
      }
      if (j.contains("params")) {
        const json& p = j["params"];
        require_keys(p, "config.params", {"ea_over_r", "k"});
        read_num(p, "ea_over_r", r.params.ea_over_r, "config.params");
        read_num(p, "k", r.params.k, "config.params");
      }
      if (j.contains("input")) {
        const json& in = j["input"];
        require_keys(in, "config.input", {"c", "D", "T_in", "v"});
        read_num(in, "c", r.input[0], "config.input");
        read_num(in, "D", r.input[1], "config.input");
        read_num(in, "T_in", r.input[2], "config.input");
        read_num(in, "v", r.input[3], "config.input");
      }
      read_num(j, "x_in", r.x_in, "config");
      if (j.contains("initial")) {
        const json& ini = j["initial"];
        require_keys(ini, "config.initial", {"truth", "estimate"});
        if (ini.contains("truth")) {
          if (ini["truth"].is_string()) {
            if (ini["truth"].get<std::string>() != "equilibrium")
              throw ValidationError("config.initial.truth: expected \"equilibrium\" or [X_in, X, T]");
            r.truth_at_equilibrium = true;
          } else {
            r.truth0 = get_vec<3>(ini["truth"], "config.initial.truth");
            r.truth_at_equilibrium = false;
          }
        }
        if (ini.contains("estimate")) {
          const json& e = ini["estimate"];
          require_keys(e, "config.initial.estimate", {"conc_factor_in", "conc_factor", "temp_offset"});
          read_num(e, "conc_factor_in", r.conc_factor_in, "config.initial.estimate");
          read_num(e, "conc_factor", r.conc_factor, "config.initial.estimate");
          read_num(e, "temp_offset", r.temp_offset, "config.initial.estimate");
        }
      }
      break;
    }
    case SystemKind::ins: {
      auto& s = c.ins;
      if (j.contains("gains")) {
        const json& g = j["gains"];
        require_keys(g, "config.gains", {"M12", "M21", "N11", "N22", "N33", "lambda"});
        read_num(g, "M12", s.gains.M12, "config.gains");
        read_num(g, "M21", s.gains.M21, "config.gains");
        read_num(g, "N11", s.gains.N11, "config.gains");
        read_num(g, "N22", s.gains.N22, "config.gains");
        read_num(g, "N33", s.gains.N33, "config.gains");
        read_num(g, "lambda", s.gains.lambda, "config.gains");
      }
      if (j.contains("environment")) {
        const json& e = j["environment"];
        require_keys(e, "config.environment", {"A_grav", "B"});
        if (e.contains("A_grav")) s.env.A_grav = get_vec<3>(e["A_grav"], "config.environment.A_grav");
        if (e.contains("B")) s.env.B = get_vec<3>(e["B"], "config.environment.B");
      }
      if (j.contains("trajectory")) {
        const json& t = j["trajectory"];
        require_keys(t, "config.trajectory", {"radius", "t1", "t2", "t3", "a_grav"});
        read_num(t, "radius", s.trajectory.radius, "config.trajectory");
        read_num(t, "t1", s.trajectory.t1, "config.trajectory");
        read_num(t, "t2", s.trajectory.t2, "config.trajectory");
        read_num(t, "t3", s.trajectory.t3, "config.trajectory");
        read_num(t, "a_grav", s.trajectory.a_grav, "config.trajectory");
      }
      if (j.contains("noise")) {
        const json& n = j["noise"];
        if (n.is_boolean()) {
          s.noise = n.get<bool>();
        } else {
          require_keys(n, "config.noise", {"enabled", "accel", "gyro", "velocity", "magnetometer"});
          s.noise = true;
          if (n.contains("enabled")) {
            if (!n["enabled"].is_boolean()) throw ValidationError("config.noise.enabled: expected a boolean");
            s.noise = n["enabled"].get<bool>();
          }
          if (n.contains("accel")) read_channel(n["accel"], s.noise_spec.accel, "config.noise.accel");
          if (n.contains("gyro")) read_channel(n["gyro"], s.noise_spec.gyro, "config.noise.gyro");
          if (n.contains("velocity")) read_channel(n["velocity"], s.noise_spec.velocity, "config.noise.velocity");
          if (n.contains("magnetometer"))
            read_channel(n["magnetometer"], s.noise_spec.magnetometer, "config.noise.magnetometer");
        }
      }
      if (j.contains("initial")) {
        const json& ini = j["initial"];
        require_keys(ini, "config.initial", {"estimate"});
        if (ini.contains("estimate")) {
          const json& e = ini["estimate"];
          require_keys(e, "config.initial.estimate", {"q", "v"});
          if (e.contains("q")) s.q_hat0 = Quaternion::from_coeffs(get_vec<4>(e["q"], "config.initial.estimate.q"));
          if (e.contains("v")) s.v_hat0 = get_vec<3>(e["v"], "config.initial.estimate.v");
        }
      }
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------- validation

namespace {

void positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(what + " must be positive and finite");
}

void finite(const Eigen::VectorXd& v, const std::string& what) {
  if (!v.allFinite()) throw ValidationError(what + " must be finite");
}

reactor::Reactor::State reactor_truth0(const ReactorSetup& r) {
  if (r.truth_at_equilibrium) return reactor::equilibrium(reactor::Reactor(r.params), r.input, r.x_in);
  return r.truth0;
}

reactor::Reactor::State reactor_estimate0(const ReactorSetup& r, const reactor::Reactor::State& x0) {
  return {x0[0] * r.conc_factor_in, x0[1] * r.conc_factor, x0[2] + r.temp_offset};
}

}  // namespace

void validate(const ScenarioConfig& c) {
  positive(c.dt, "dt");
  if (!(c.duration > 0.0) || !std::isfinite(c.duration)) throw ValidationError("duration must be positive and finite");
  step_count(c.dt, c.duration);
  if (c.output_stride < 1) throw ValidationError("output_stride must be >= 1");
  switch (c.system) {
    case SystemKind::car: {
      positive(c.car.gains.a, "gains.a");
      positive(c.car.gains.b, "gains.b");
      positive(c.car.gains.c, "gains.c");
      const auto& in = c.car.input;
      finite(Eigen::Matrix<double, 5, 1>(in.u0, in.u_amp, in.u_freq, in.v_amp, in.v_freq), "car input profile");
      finite(c.car.truth0, "initial.truth");
      finite(c.car.estimate0, "initial.estimate");
      break;
    }
    case SystemKind::reactor: {
      const auto& r = c.reactor;
      positive(r.params.ea_over_r, "params.ea_over_r");
      positive(r.params.k, "params.k");
      positive(r.gains.beta, "gains.beta");
      positive(r.gains.kappa, "gains.kappa");
      positive(r.input[0], "input.c");
      if (!(r.input[1] >= 0.0) || !std::isfinite(r.input[1])) throw ValidationError("input.D must be >= 0");
      positive(r.input[2], "input.T_in");
      finite(Eigen::Matrix<double, 1, 1>(r.input[3]), "input.v");
      positive(r.x_in, "x_in");
      positive(r.conc_factor_in, "initial.estimate.conc_factor_in");
      positive(r.conc_factor, "initial.estimate.conc_factor");
      if (!std::isfinite(r.temp_offset)) throw ValidationError("initial.estimate.temp_offset must be finite");
      if (r.truth_at_equilibrium && !(r.input[1] > 0.0))
        throw ValidationError("initial.truth = equilibrium needs input.D > 0");
      const reactor::Reactor::State x0 = reactor_truth0(r);
      if (!reactor::Reactor(r.params).in_domain(x0)) throw ValidationError("initial.truth must be positive");
      if (!reactor::Reactor(r.params).in_domain(reactor_estimate0(r, x0)))
        throw ValidationError("initial estimate must be positive (check temp_offset)");
      break;
    }
    case SystemKind::ins: {
      const auto& s = c.ins;
      finite(s.env.A_grav, "environment.A_grav");
      if (!(std::abs(s.env.B.norm() - 1.0) < 1e-9)) throw ValidationError("environment.B must be a unit vector");
      if (!(s.env.B[0] * s.env.B[0] + s.env.B[1] * s.env.B[1] > 0.0))
        throw ValidationError("environment.B must have a horizontal component");
      if (!(std::abs(s.env.A_grav.norm() - s.trajectory.a_grav) < 1e-9 * s.trajectory.a_grav))
        throw ValidationError("trajectory.a_grav must equal |environment.A_grav|");
      s.trajectory.validate();
      const auto& g = s.gains;
      finite(Eigen::Matrix<double, 6, 1>(g.M12, g.M21, g.N11, g.N22, g.N33, g.lambda), "gains");
      if (!(std::abs(norm(s.q_hat0) - 1.0) < 1e-9)) throw ValidationError("initial.estimate.q must be a unit quaternion");
      finite(s.v_hat0, "initial.estimate.v");
      for (const NoiseChannel* ch : {&s.noise_spec.accel, &s.noise_spec.gyro, &s.noise_spec.velocity,
                                     &s.noise_spec.magnetometer}) {
        finite(ch->bias, "noise bias");
        if (!(ch->scale >= 0.0) || !std::isfinite(ch->scale)) throw ValidationError("noise scale must be >= 0");
      }
      break;
    }
  }
}

// ---------------------------------------------------------------- running

namespace {

json header_json(const ScenarioConfig& c, long halvings) {
  json h = system_json(c);
  h.erase("initial");
  h["format"] = "invobs-trace/1";
  h["scenario"] = c.name;
  h["system"] = system_name(c.system);
  h["dt"] = c.dt;
  h["T"] = c.duration;
  h["seed"] = c.seed;
  h["rng"] = Rng::kName;
  h["output_stride"] = c.output_stride;
  h["gains"] = gains_json(c);
  h["halvings"] = halvings;
  return h;
}

SimOptions options(const ScenarioConfig& c) {
  SimOptions o;
  o.dt = c.dt;
  o.duration = c.duration;
  o.seed = c.seed;
  o.output_stride = c.output_stride;
  return o;
}

CsvTable car_table(const Trace<car::Car>& tr) {
  CsvTable t;
  t.columns = {"t", "x", "y", "theta", "xhat", "yhat", "thetahat", "eta_x", "eta_y", "eta_theta", "E_x", "E_y"};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto &x = tr.truth[i], &xh = tr.estimate[i];
    const auto &e = tr.error[i];
    const auto &E = tr.output_error[i];
    t.rows.push_back({tr.t[i], x[0], x[1], x[2], xh[0], xh[1], xh[2], e[0], e[1], e[2], E[0], E[1]});
  }
  return t;
}

CsvTable reactor_table(const ScenarioConfig& c, const Trace<reactor::Reactor>& tr) {
  CsvTable t;
  t.columns = {"t", "Xin", "X", "T", "Xinhat", "Xhat", "That", "Ztilde", "xitilde", "Ttilde", "V"};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto &x = tr.truth[i], &xh = tr.estimate[i];
    const auto &e = tr.error[i];
    t.rows.push_back({tr.t[i], x[0], x[1], x[2], xh[0], xh[1], xh[2], e[0], e[1], e[2],
                      reactor::lyapunov(e[0], e[2], c.reactor.gains.beta)});
  }
  return t;
}

CsvTable ins_table(const Trace<ins::Ins>& tr) {
  CsvTable t;
  t.columns = {"t",     "q0",    "q1",    "q2",    "q3",    "v1",          "v2",          "v3",
               "qhat0", "qhat1", "qhat2", "qhat3", "vhat1", "vhat2",       "vhat3",       "att_err_rad",
               "vel_err_norm", "Ev1", "Ev2", "Ev3", "Eb1", "Eb2", "Eb3"};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::vector<double> row{tr.t[i]};
    for (int k = 0; k < 7; ++k) row.push_back(tr.truth[i][k]);
    for (int k = 0; k < 7; ++k) row.push_back(tr.estimate[i][k]);
    row.push_back(ins::attitude_error(tr.error[i]));
    row.push_back(ins::velocity_error(tr.error[i]));
    for (int k = 0; k < 6; ++k) row.push_back(tr.output_error[i][k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

template <class S>
RunResult finish(const ScenarioConfig& c, const Trace<S>& tr, CsvTable table) {
  table.header = header_json(c, tr.halvings).dump();
  table.diagnostic = tr.diagnostic;
  RunResult r;
  r.csv = write_csv(table);
  r.truncated = tr.truncated;
  r.diagnostic = tr.diagnostic;
  r.halvings = tr.halvings;
  r.summary_json = summarize_csv(r.csv);
  return r;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& c) {
  validate(c);
  switch (c.system) {
    case SystemKind::car: {
      const car::Car sys;
      const car::InputProfile prof = c.car.input;
      auto tr = simulate_pair<car::Car>(sys, car::gain(c.car.gains), sys.project(c.car.truth0),
                                        sys.project(c.car.estimate0), [prof](double t) { return prof(t); },
                                        options(c));
      return finish(c, tr, car_table(tr));
    }
    case SystemKind::reactor: {
      const reactor::Reactor sys(c.reactor.params);
      const reactor::Reactor::State x0 = reactor_truth0(c.reactor);
      const reactor::Reactor::State xh0 = reactor_estimate0(c.reactor, x0);
      const reactor::Reactor::Input u = c.reactor.input;
      const reactor::Gains g = c.reactor.gains;
      const ObserverField<reactor::Reactor> obs = [&sys, g](const auto& xh, const auto& in, const auto& y) {
        return reactor::observer_rhs_global(sys, xh, in, y[0], g);
      };
      auto tr = simulate_with_observer<reactor::Reactor>(sys, obs, x0, xh0, [u](double) { return u; },
                                                         options(c));
      return finish(c, tr, reactor_table(c, tr));
    }
    case SystemKind::ins: {
      const ins::Ins sys(c.ins.env);
      const VtolTrajectorySpec spec = c.ins.trajectory;
      const ins::Environment env = c.ins.env;
      const ins::Ins::State x0 = vtol_reference(spec, 0.0, env).state();
      const ins::Ins::State xh0 = ins::make_state(c.ins.q_hat0, c.ins.v_hat0);
      SimOptions o = options(c);
      if (c.ins.noise) o.noise = c.ins.noise_spec;
      auto tr = simulate_pair<ins::Ins>(sys, constant_gain<ins::Ins>(ins::frame_gain(c.ins.gains, env)), x0, xh0,
                                        [spec, env](double t) { return vtol_reference(spec, t, env).input(); }, o);
      return finish(c, tr, ins_table(tr));
    }
  }
  throw ValidationError("unknown system");
}

// ---------------------------------------------------------------- summary

namespace {

// earliest recorded time after which the metric stays at or below thr
json convergence_time(const std::vector<double>& t, const std::vector<double>& m, double thr) {
  long idx = -1;
  for (long i = static_cast<long>(m.size()) - 1; i >= 0; --i) {
    if (!(m[i] <= thr)) break;
    idx = i;
  }
  if (idx < 0) return nullptr;
  return t[idx];
}

json convergence_block(const std::vector<double>& t, const std::vector<double>& m) {
  return {{"1e-1", convergence_time(t, m, 1e-1)},
          {"1e-2", convergence_time(t, m, 1e-2)},
          {"1e-3", convergence_time(t, m, 1e-3)}};
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string summarize_csv(const std::string& csv) {
  const CsvTable tab = parse_csv(csv);
  json h;
  try {
    h = json::parse(tab.header);
  } catch (const json::parse_error&) {
    throw ValidationError("trace: header line is not a metadata object");
  }
  const std::string system = h.value("system", "");
  json s;
  s["scenario"] = h.value("scenario", "");
  s["system"] = system;
  s["rows"] = tab.rows.size();
  s["truncated"] = !tab.diagnostic.empty();
  if (!tab.diagnostic.empty()) s["diagnostic"] = tab.diagnostic;
  if (tab.rows.empty()) return s.dump(2);
  const std::vector<double> t = tab.series("t");
  s["t_final"] = t.back();

  if (system == "car") {
    const auto ex = tab.series("eta_x"), ey = tab.series("eta_y"), et = tab.series("eta_theta");
    std::vector<double> m(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) m[i] = car::error_norm({ex[i], ey[i], et[i]});
    s["final_error_norm"] = num_or_null(m.back());
    s["convergence_time"] = convergence_block(t, m);
  } else if (system == "reactor") {
    const auto z = tab.series("Ztilde"), xi = tab.series("xitilde"), tt = tab.series("Ttilde"), V = tab.series("V");
    const auto xh = tab.series("Xhat"), xih = tab.series("Xinhat");
    std::vector<double> m(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) m[i] = Eigen::Vector3d(z[i], xi[i], tt[i]).norm();
    s["final_error_norm"] = num_or_null(m.back());
    s["convergence_time"] = convergence_block(t, m);
    s["min_Xhat"] = *std::min_element(xh.begin(), xh.end());
    s["min_Xinhat"] = *std::min_element(xih.begin(), xih.end());
    // V is checked from the first sample after which |xi~| stays below 1e-6
    long from = -1;
    for (long i = static_cast<long>(xi.size()) - 1; i >= 0 && std::abs(xi[i]) < 1e-6; --i) from = i;
    json lv;
    lv["slack"] = 1e-12;
    if (from < 0) {
      lv["checked_from_t"] = nullptr;
      lv["monotone"] = nullptr;
    } else {
      double inc = -INFINITY;
      for (std::size_t i = from + 1; i < V.size(); ++i) inc = std::max(inc, V[i] - V[i - 1]);
      lv["checked_from_t"] = t[from];
      lv["max_increase"] = num_or_null(inc);
      lv["monotone"] = !(inc > 1e-12);
    }
    s["lyapunov"] = lv;
  } else if (system == "ins") {
    const auto att = tab.series("att_err_rad"), vel = tab.series("vel_err_norm");
    s["final_attitude_error_rad"] = num_or_null(att.back());
    s["final_velocity_error"] = num_or_null(vel.back());
    s["convergence_time"] = {{"attitude", convergence_block(t, att)}, {"velocity", convergence_block(t, vel)}};
    ins::Gains g;
    const json& hg = h.at("gains");
    g.M12 = hg.at("M12");
    g.M21 = hg.at("M21");
    g.N11 = hg.at("N11");
    g.N22 = hg.at("N22");
    g.N33 = hg.at("N33");
    g.lambda = hg.at("lambda");
    ins::Environment env;
    for (int i = 0; i < 3; ++i) {
      env.A_grav[i] = h.at("environment").at("A_grav")[i];
      env.B[i] = h.at("environment").at("B")[i];
    }
    const auto ev = ins::spectrum(ins::linearized_blocks(g, env).full);
    json arr = json::array();
    double maxre = -INFINITY;
    for (const auto& e : ev) {
      arr.push_back({e.real(), e.imag()});
      maxre = std::max(maxre, e.real());
    }
    s["linearized_eigenvalues"] = arr;
    s["hurwitz"] = maxre < 0.0;
  } else {
    throw ValidationError("trace: unknown system '" + system + "'");
  }
  return s.dump(2);
}

// ---------------------------------------------------------------- files

namespace {

std::vector<PlotPanel> error_panels(const CsvTable& tab, const std::string& system) {
  const auto t = tab.series("t");
  auto series = [&](const std::string& c) { return PlotSeries{c, t, tab.series(c)}; };
  if (system == "car") return {{"invariant error", {series("eta_x"), series("eta_y"), series("eta_theta")}, true}};
  if (system == "reactor")
    return {{"invariant error", {series("Ztilde"), series("xitilde"), series("Ttilde")}, true},
            {"Lyapunov function", {series("V")}, false}};
  return {{"attitude error [rad]", {series("att_err_rad")}, true},
          {"velocity error [m/s]", {series("vel_err_norm")}, true}};
}

std::vector<PlotPanel> state_panels(const CsvTable& tab, const std::string& system) {
  const auto t = tab.series("t");
  auto series = [&](const std::string& c) { return PlotSeries{c, t, tab.series(c)}; };
  if (system == "car")
    return {{"position", {series("x"), series("xhat"), series("y"), series("yhat")}, false},
            {"heading", {series("theta"), series("thetahat")}, false}};
  if (system == "reactor")
    return {{"concentrations", {series("Xin"), series("Xinhat"), series("X"), series("Xhat")}, false},
            {"temperature", {series("T"), series("That")}, false}};
  return {{"attitude", {series("q0"), series("q1"), series("q2"), series("q3"), series("qhat0"), series("qhat1"),
                        series("qhat2"), series("qhat3")}, false},
          {"velocity", {series("v1"), series("v2"), series("v3"), series("vhat1"), series("vhat2"), series("vhat3")},
           false}};
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << content;
  if (!f) throw ValidationError("failed writing " + p.string());
}

}  // namespace

void write_outputs(const RunResult& r, const std::string& dir) {
  const CsvTable tab = parse_csv(r.csv);
  const std::string system = json::parse(tab.header).value("system", "");
  const std::filesystem::path d(dir);
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir + ": " + ec.message());
  write_file(d / "trace.csv", r.csv);
  write_file(d / "summary.json", r.summary_json + "\n");
  write_file(d / "errors.svg", render_svg(system + " estimation error", error_panels(tab, system)));
  write_file(d / "states.svg", render_svg(system + " truth and estimate", state_panels(tab, system)));
}

}  // namespace invobs::scenario
