#include "ctid/metrics.hpp"

namespace ctid {

double mse_g(const CtModeld& g_hat, const CtModeld& g0) {
  return l2_distance_sq(g_hat, g0) / l2_norm_sq(g0);
}

double mse_theta(const VectorXd& theta_hat, const VectorXd& theta0) {
  const Eigen::Index len = std::max(theta_hat.size(), theta0.size());
  VectorXd a = VectorXd::Zero(len), b = VectorXd::Zero(len);
  a.tail(theta_hat.size()) = theta_hat;
  b.tail(theta0.size()) = theta0;
  const double ref = b.squaredNorm();
  require(ref > 0.0, Errc::InvalidArgument, "reference parameter vector is zero");
  return (a - b).squaredNorm() / ref;
}

double fit_percent(const VectorXd& y_hat, const VectorXd& y) {
  require(y_hat.size() == y.size(), Errc::InvalidArgument, "fit needs equal lengths");
  const double spread = (y.array() - y.mean()).matrix().norm();
  require(spread > 0.0, Errc::InvalidArgument, "reference output is constant");
  return 100.0 * (1.0 - (y_hat - y).norm() / spread);
}

}  // namespace ctid
