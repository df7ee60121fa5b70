#pragma once

#include <optional>
#include <string>

#include "ctid/pem.hpp"
#include "ctid/rdproj.hpp"
#include "ctid/sampling.hpp"

namespace ctid {

enum class JacobianPoint {
  Truncated,  // naive truncation of the inverse-sampled PEM estimate
  Full,       // the inverse-sampled PEM estimate itself
};

struct PemrdOptions {
  JacobianPoint jacobian_point = JacobianPoint::Truncated;
  OeOptions oe;
  int sm_iterations = 20;
  double max_jacobian_condition = 1e12;
  double path_tolerance = 1e-10;
  /// Overrides the multi-rate ARX/IV initializer.
  std::optional<DtModeld> init;
};

/// PEM estimate refined by the covariance-weighted relative-degree projection.
struct PemrdResult {
  VectorXd theta_tilde_c;  // first r-1 entries exactly zero
  MatrixXd cov_tilde;
  VectorXd lambda;
  int r = 1;

  VectorXd theta_hat_c;  // inverse-sampled PEM estimate (full numerator)
  MatrixXd cov_hat_c;    // (J^T Sigma_d^{-1} J)^{-1}
  EstimationResult source;
  ZohMapPoint map_point;
  double jacobian_condition = 0.0;
  double path_discrepancy = 0.0;

  CtModeld model() const { return CtModeld::from_theta(theta_tilde_c, r, true); }
  CtModeld pem_model() const { return CtModeld::from_theta(theta_hat_c); }
};

/// Projection stage only, starting from a converged DT output-error fit
/// whose covariance is available.
PemrdResult pemrd_from_fit(const EstimationResult& fit, int r,
                           const PemrdOptions& options = {});

/// Full pipeline: initializer, OE fit, covariance, inverse sampling,
/// Jacobian, information transform, projection and projected covariance.
PemrdResult pemrd(const SampledDataset& data, int n, int r,
                  const PemrdOptions& options = {});

}  // namespace ctid
