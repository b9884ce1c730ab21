#include "invobs/group_core.hpp"

#include <cmath>
#include <string>

namespace invobs {

Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& point,
                            const Eigen::VectorXd& steps) {
  if (steps.size() != point.size()) throw ValidationError("fd_jacobian: step vector has wrong size");
  if (!((steps.array() > 0.0).all())) throw ValidationError("fd_jacobian: steps must be positive");
  Eigen::MatrixXd J;
  for (Eigen::Index j = 0; j < point.size(); ++j) {
    Eigen::VectorXd xp = point, xm = point;
    xp[j] += steps[j];
    xm[j] -= steps[j];
    const Eigen::VectorXd fp = map(xp);
    const Eigen::VectorXd fm = map(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw NumericError("fd_jacobian: non-finite map value near coordinate " + std::to_string(j));
    if (j == 0) J.resize(fp.size(), point.size());
    // (xp - xm) rather than 2h, so rounding of the perturbed points is absorbed
    J.col(j) = (fp - fm) / (xp[j] - xm[j]);
  }
  return J;
}

Eigen::MatrixXd fd_jacobian(const VectorMap& map, const Eigen::VectorXd& point, double step) {
  return fd_jacobian(map, point, Eigen::VectorXd::Constant(point.size(), step));
}

Eigen::MatrixXd fd_jacobian_relative(const VectorMap& map, const Eigen::VectorXd& point,
                                     double rel_step) {
  Eigen::VectorXd steps(point.size());
  for (Eigen::Index i = 0; i < point.size(); ++i)
    steps[i] = rel_step * std::max(1.0, std::abs(point[i]));
  return fd_jacobian(map, point, steps);
}

double condition_number(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s[s.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

}  // namespace invobs
