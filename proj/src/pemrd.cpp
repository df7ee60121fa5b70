#include "ctid/pemrd.hpp"

namespace ctid {

namespace {

double condition_number(const MatrixXd& M) {
  Eigen::JacobiSVD<MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

PemrdResult pemrd_from_fit(const EstimationResult& fit, int r, const PemrdOptions& options) {
  const int n = fit.model.order();
  require(fit.orders.nb == n && fit.orders.nf == n, Errc::InvalidArgument,
          "projection needs a full-numerator fit");
  require(r >= 1 && r <= n, Errc::InvalidArgument, "relative degree must be in [1, n]");
  require(fit.covariance.rows() == 2 * n && fit.covariance.cols() == 2 * n,
          Errc::SingularInformation, "fit carries no usable covariance");

  PemrdResult out{};
  out.r = r;
  out.source = fit;

  const CtModeld pem_ct = d2c_zoh(fit.model);
  out.theta_hat_c = pem_ct.theta();

  const VectorXd point = options.jacobian_point == JacobianPoint::Truncated
                             ? naive_truncate(pem_ct, r).theta()
                             : out.theta_hat_c;
  out.map_point = zoh_map_point(point, fit.model.h());
  out.jacobian_condition = condition_number(out.map_point.J);
  require(out.jacobian_condition <= options.max_jacobian_condition,
          Errc::IllConditionedJacobian,
          "sampling-map Jacobian condition " + std::to_string(out.jacobian_condition));

  const MatrixXd info_c = ct_info_matrix(out.map_point.J, fit.covariance);
  ProjectionProblem<double> problem{out.theta_hat_c, info_c, r, options.path_tolerance};
  const Projection<double> projection = project_rd(problem);
  out.theta_tilde_c = projection.theta_tilde_c;
  out.lambda = projection.lambda;
  out.cov_hat_c = projection.cov_c;
  out.path_discrepancy = projection.path_discrepancy;
  out.cov_tilde = projected_covariance(out.cov_hat_c, r);
  return out;
}

PemrdResult pemrd(const SampledDataset& data, int n, int r, const PemrdOptions& options) {
  const OeOrders orders = OeOrders::full(n);
  const DtModeld init =
      options.init ? *options.init : init_multirate(data, orders, options.sm_iterations);
  const EstimationResult fit = oe_fit(data, orders, init, options.oe);
  if (fit.covariance.size() == 0) {
    // surfaces SingularInformation with the measured condition number
    (void)dt_covariance(fit, data.u);
  }
  return pemrd_from_fit(fit, r, options);
}

}  // namespace ctid
