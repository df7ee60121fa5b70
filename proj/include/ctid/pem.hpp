#pragma once

#include "ctid/lti.hpp"

namespace ctid {

/// Output-error orders: `nb` numerator coefficients over a monic degree-`nf`
/// denominator. With nb < nf the free numerator entries are the highest
/// powers (one-sample delay); the remaining ones are fixed to zero.
struct OeOrders {
  int nb = 1;
  int nf = 1;

  static OeOrders full(int n) { return {n, n}; }
  int parameters() const { return nb + nf; }
  void validate() const;
};

struct OeOptions {
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-9;
  double gradient_tolerance = 1e-8;
  int max_damping_doublings = 30;
};

struct EstimationResult {
  DtModeld model;
  OeOrders orders;
  double sigma2_hat = 0.0;
  /// sigma2_hat (Psi^T Psi)^{-1}; empty when the information matrix is
  /// numerically singular.
  MatrixXd covariance;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  VectorXd residuals;

  /// Free parameters [b..., a...] in the layout of `orders`.
  VectorXd theta() const;
};

/// Model output y_hat = H(z) u under zero initial conditions.
VectorXd predict(const DtModeld& model, const VectorXd& u);

/// N x (nb + nf) sensitivity matrix d y_hat / d theta for the free
/// parameters. Throws UnstablePredictor when the denominator is unstable.
MatrixXd prediction_jacobian(const DtModeld& model, const VectorXd& u,
                             const OeOrders& orders);
MatrixXd prediction_jacobian(const DtModeld& model, const VectorXd& u);

/// Levenberg-Marquardt minimization of sum_k (y_k - y_hat_k)^2.
EstimationResult oe_fit(const SampledDataset& data, const OeOrders& orders,
                        const DtModeld& init, const OeOptions& options = {});

/// sigma2_hat (Psi^T Psi)^{-1} at the fitted model, symmetrized.
MatrixXd dt_covariance(const EstimationResult& result, const VectorXd& u);

/// ARX least squares, then an instrumental-variable pass and up to
/// `sm_iterations` prefiltered (Steiglitz-McBride) IV refinements; the
/// result is reflected into the unit disc.
DtModeld init_arx_iv(const SampledDataset& data, const OeOrders& orders,
                     int sm_iterations = 20);

/// init_arx_iv on the record and on copies decimated by 2, 4 and 8, the
/// decimated estimates carried back to the original period through the ZOH
/// equivalence. Returns the candidate with the lowest output-error cost.
/// Full orders only; other orders fall back to init_arx_iv.
DtModeld init_multirate(const SampledDataset& data, const OeOrders& orders,
                        int sm_iterations = 20);

/// Mirrors denominator roots with |z| >= 1 into the open unit disc.
DtModeld reflect_to_stability(const DtModeld& model);

}  // namespace ctid
