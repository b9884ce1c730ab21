#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "invobs/car.hpp"
#include "invobs/ins.hpp"
#include "invobs/reactor.hpp"
#include "invobs/symmetry_checks.hpp"

// Closed-loop experiments shared by the property suite and the acceptance
// runner, and the suite itself.
namespace invobs::experiments {

// ---- car

struct CarConvergence {
  double max_final_error = 0.0;  // max over runs of |eta(T)|
  double speed_integral = 0.0;   // integral of |u| over [0, T]
  long runs = 0;
};
// Random truths and initial errors with |eta_xy| <= 1, |eta_theta| <= pi - 0.1.
CarConvergence car_convergence(const car::Gains& g, const car::InputProfile& in, long runs, double T,
                               double dt, std::uint64_t seed);

// Max over [0, T] of |eta_A - eta_B| for two truths sharing eta(0) and inputs.
double car_autonomy(const car::Gains& g, const car::InputProfile& in, double T, double dt, std::uint64_t seed);

// Max over the trajectory of |(eta_x, eta_y) - E|.
double car_error_matches_output_error(const car::Gains& g, const car::InputProfile& in, double T, double dt,
                                      std::uint64_t seed);

// Residual of the error field at (2/a, 0, pi) over a range of speeds.
double car_antipodal_residual(const car::Gains& g);

// ---- reactor

struct ReactorCase {
  reactor::Params params;
  reactor::Gains gains;
  Eigen::Vector4d input{2.16e12, 0.0033, 270.0, 0.0};
  double x_in = 1.0;
};

struct ReactorConvergence {
  long runs = 0;
  long truncated = 0;
  double max_final_error = 0.0;
  double min_concentration = INFINITY;   // over X̂ and X̂_in, all runs and times
  double max_lyapunov_increase = -INFINITY;  // once |xi~| < 1e-6
  double max_xi_ratio = 0.0;             // max over t > 0 of |xi~(t)| / |xi~(0)|
  double min_xi_rate = INFINITY;         // min over t of -log(|xi~(t)|/|xi~(0)|)/t
};
// `runs` initial estimates: the 8 corners of (1e±2, 1e±2, ±50 K) then
// log-uniform draws inside that box.
ReactorConvergence reactor_convergence(const ReactorCase& rc, long runs, double T, double dt, std::uint64_t seed);

// Max relative mismatch between g-scaled estimates and the estimates of the
// scaled problem, over g in `scales` and `runs` random initial estimates.
double reactor_unit_invariance(const ReactorCase& rc, const std::vector<double>& scales, long runs, double T,
                               double dt, std::uint64_t seed);

// Local design at the steady state: pole placement on (A, C), invariantization,
// and the max relative gap between finite-difference Jacobians of the
// assembled observer and (A + LC, B + LD, -L).
struct TangentCheck {
  Eigen::Matrix3d A, L_mat;
  double gap_x = 0.0, gap_u = 0.0, gap_y = 0.0;
  double max_gap() const { return std::max({gap_x, gap_u, gap_y}); }
};
TangentCheck reactor_tangent_check(const ReactorCase& rc, const Eigen::Vector3d& poles);

// ---- ins

// Max over [0, T] of |eta_A - eta_B| for the reference manoeuvre against a
// different input history and truth with the same initial error.
double ins_autonomy(const ins::Gains& g, const ins::Environment& env, double T, double dt);

struct InsReproduction {
  double att_at_6 = NAN, vel_at_6 = NAN;   // noiseless run at t = 6 s
  double noisy_max_att_late = NAN;         // max attitude error over [4, 6.15] with noise
  double noisy_mean_att_late = NAN;
  double noisy_max_att = NAN;              // whole run
  bool truncated = false;
};
InsReproduction ins_reproduction(const ins::Gains& g, const ins::Environment& env, std::uint64_t seed);

// |J_fd - full| for the reduced error field at the identity.
double ins_linearization_gap(const ins::Gains& g, const ins::Environment& env);

}  // namespace invobs::experiments

namespace invobs::properties {

struct PropertyResult {
  std::string name;
  std::string system;
  long samples = 0;
  double value = 0.0;
  double threshold = 0.0;
  // "max": pass iff value <= threshold; "min": pass iff value > threshold
  std::string kind = "max";
  bool pass = false;
  std::string note;
};

struct SuiteOptions {
  long samples = 200;
  std::uint64_t seed = 20240607;
  // flips the sign of the car heading gain b in the closed-loop runs
  bool inject_car_gain_fault = false;
};

// system: "all", "group", "quaternion", "car", "reactor", "ins" or "sim"
std::vector<PropertyResult> run_suite(const std::string& system, const SuiteOptions& opt);
bool all_pass(const std::vector<PropertyResult>& r);
std::string report_json(const std::vector<PropertyResult>& r, const SuiteOptions& opt);
std::string report_text(const std::vector<PropertyResult>& r);

}  // namespace invobs::properties
