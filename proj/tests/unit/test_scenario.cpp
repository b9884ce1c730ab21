#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

#include "invobs/errors.hpp"
#include "invobs/property_suite.hpp"
#include "invobs/scenario.hpp"
#include "invobs/svg_plot.hpp"
#include "invobs/trace_csv.hpp"

using namespace invobs;
using nlohmann::json;

TEST(Csv, DoublesRoundTripAt17Digits) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 285.46512345678912, 0.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Csv, WriteParseRoundTrip) {
  CsvTable t;
  t.header = R"({"a":1})";
  t.columns = {"t", "x"};
  t.rows = {{0.0, 1.0 / 3.0}, {0.5, -7.25}};
  t.diagnostic = "step from t=0.5 failed";
  const std::string text = write_csv(t);
  EXPECT_EQ(text.rfind("# {\"a\":1}\nt,x\n", 0), 0u);
  const CsvTable p = parse_csv(text);
  EXPECT_EQ(p.header, t.header);
  EXPECT_EQ(p.columns, t.columns);
  EXPECT_EQ(p.rows, t.rows);
  EXPECT_EQ(p.diagnostic, t.diagnostic);
  EXPECT_EQ(p.series("x")[1], -7.25);
  EXPECT_THROW(p.column("nope"), ValidationError);
  EXPECT_THROW(parse_csv("t,x\n1,2,3\n"), ValidationError);
}

TEST(Config, PresetsValidate) {
  for (const auto& n : scenario::preset_names()) EXPECT_NO_THROW(scenario::validate(scenario::preset(n)));
  EXPECT_THROW(scenario::preset("nope"), ValidationError);
  const auto ins = scenario::preset("ins-paper");
  EXPECT_EQ(ins.ins.gains.M12, 0.4);
  EXPECT_EQ(ins.ins.gains.N33, 2.0);
  EXPECT_EQ(ins.ins.gains.lambda, 4.0);
  EXPECT_NEAR(ins.ins.q_hat0.q0, std::cos(M_PI / 3), 1e-15);
  EXPECT_NEAR(ins.ins.q_hat0.q1, std::sin(M_PI / 3) / std::sqrt(3.0), 1e-15);
}

TEST(Config, OverlayAndRejections) {
  const auto base = scenario::preset("car-default");
  const auto c = scenario::apply_config_json(base, R"({"duration": 5, "gains": {"b": 2}, "seed": 11})");
  EXPECT_EQ(c.duration, 5.0);
  EXPECT_EQ(c.car.gains.b, 2.0);
  EXPECT_EQ(c.car.gains.a, 1.0);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_THROW(scenario::apply_config_json(base, R"({"durration": 5})"), ValidationError);
  EXPECT_THROW(scenario::apply_config_json(base, R"({"dt": "fast"})"), ValidationError);
  EXPECT_THROW(scenario::apply_config_json(base, R"({"noise": {"enabled": false}})"), ValidationError);
  EXPECT_THROW(scenario::apply_config_json(base, R"({"system": "ins"})"), ValidationError);
  EXPECT_THROW(scenario::apply_config_json(base, "{not json"), ValidationError);
  auto bad = base;
  bad.dt = 0.0;
  EXPECT_THROW(scenario::validate(bad), ValidationError);
  bad.dt = -0.01;
  EXPECT_THROW(scenario::run_scenario(bad), ValidationError);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& n : scenario::preset_names()) {
    const auto c = scenario::preset(n);
    const auto back = scenario::apply_config_json(c, scenario::config_to_json(c));
    EXPECT_EQ(scenario::config_to_json(back), scenario::config_to_json(c));
  }
}

TEST(RunScenario, SummaryRecomputableFromTrace) {
  auto c = scenario::preset("car-default");
  c.duration = 10.0;
  const auto r = scenario::run_scenario(c);
  EXPECT_EQ(r.summary_json, scenario::summarize_csv(r.csv));
  const CsvTable t = parse_csv(r.csv);
  const auto& last = t.rows.back();
  const double e = std::hypot(std::hypot(last[t.column("eta_x")], last[t.column("eta_y")]), last[t.column("eta_theta")]);
  EXPECT_NEAR(json::parse(r.summary_json).at("final_error_norm").get<double>(), e, 1e-15);
  EXPECT_EQ(t.rows.size(), 1001u);
  const json h = json::parse(t.header);
  EXPECT_EQ(h.at("system"), "car");
  EXPECT_EQ(h.at("seed"), 0);
}

TEST(RunScenario, DeterministicPerSeed) {
  auto c = scenario::preset("ins-paper");
  c.duration = 1.0;
  const auto a = scenario::run_scenario(c), b = scenario::run_scenario(c);
  EXPECT_EQ(a.csv, b.csv);
  c.seed = 2;
  EXPECT_NE(scenario::run_scenario(c).csv, a.csv);
}

TEST(RunScenario, ReactorSummaryReportsLyapunov) {
  const auto r = scenario::run_scenario(scenario::preset("reactor-default"));
  const json s = json::parse(r.summary_json);
  EXPECT_FALSE(r.truncated);
  EXPECT_LT(s.at("final_error_norm").get<double>(), 1e-3);
  EXPECT_TRUE(s.at("lyapunov").at("monotone").get<bool>());
  EXPECT_GT(s.at("min_Xhat").get<double>(), 0.0);
}

TEST(RunScenario, InsNoiselessConverges) {
  auto c = scenario::preset("ins-paper");
  c.ins.noise = false;
  const json s = json::parse(scenario::run_scenario(c).summary_json);
  EXPECT_LT(s.at("final_attitude_error_rad").get<double>(), 0.01);
  EXPECT_LT(s.at("final_velocity_error").get<double>(), 0.01);
  EXPECT_TRUE(s.at("hurwitz").get<bool>());
}

TEST(Svg, RendersPanels) {
  PlotPanel p{"err", {{"a", {0, 1, 2}, {1, 0.1, 0.01}}}, true};
  const std::string svg = render_svg("title", {p});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(PropertySuite, ReportShape) {
  properties::SuiteOptions o;
  o.samples = 20;
  const auto r = properties::run_suite("quaternion", o);
  EXPECT_TRUE(properties::all_pass(r));
  const json j = json::parse(properties::report_json(r, o));
  ASSERT_EQ(j.at("properties").size(), r.size());
  for (const auto& p : j.at("properties")) {
    EXPECT_TRUE(p.contains("name"));
    EXPECT_TRUE(p.contains("samples"));
    EXPECT_TRUE(p.contains("value"));
    EXPECT_TRUE(p.contains("threshold"));
    EXPECT_TRUE(p.contains("pass"));
  }
  EXPECT_THROW(properties::run_suite("boat", o), ValidationError);
}

TEST(PropertySuite, AllSystemsPassAndListManyProperties) {
  properties::SuiteOptions o;
  o.samples = 50;
  const auto r = properties::run_suite("all", o);
  EXPECT_GE(r.size(), 15u);
  for (const auto& p : r) EXPECT_TRUE(p.pass) << p.system << "." << p.name << " = " << p.value;
}

TEST(PropertySuite, FlippedHeadingGainBreaksCarConvergence) {
  properties::SuiteOptions o;
  o.samples = 50;
  o.inject_car_gain_fault = true;
  const auto r = properties::run_suite("car", o);
  bool seen = false;
  for (const auto& p : r)
    if (p.name == "car_convergence") {
      seen = true;
      EXPECT_FALSE(p.pass);
    }
  EXPECT_TRUE(seen);
}
