#pragma once

#include <cstdint>

#include "ctid/lti.hpp"

namespace ctid {

/// Additive white Gaussian output noise, seeded for reproducibility.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// The sampling map theta_d = f(theta_c) linearized at theta_c.
struct ZohMapPoint {
  VectorXd theta_c;
  double h = 0.0;
  VectorXd theta_d;
  MatrixXd J;  // d theta_d / d theta_c
};

/// Step-invariant (zero-order hold) equivalent of a strictly proper G(s).
DtModeld c2d_zoh(const CtModeld& model, double h);

/// Inverse ZOH map through the principal matrix logarithm. The result has a
/// full numerator (relative degree flagged as 1).
///
/// Throws NonPrincipalLog when a pole lies at the origin or on the negative
/// real axis, where the logarithm has no real principal branch.
CtModeld d2c_zoh(const DtModeld& model);

/// Zeros the r-1 highest numerator coefficients and flags the result as
/// relative-degree enforced.
CtModeld naive_truncate(const CtModeld& model, int r);

/// theta_d = f(theta_c) for a full-numerator CT parameter vector.
VectorXd zoh_map(const VectorXd& theta_c, double h);

/// Central finite-difference Jacobian of `zoh_map` with per-coordinate steps
/// eps^(1/3) * max(1, |theta_i|).
MatrixXd zoh_jacobian(const VectorXd& theta_c, double h);

ZohMapPoint zoh_map_point(const VectorXd& theta_c, double h);

/// Sampling frequency 2 pi / h exceeds twice the largest pole imaginary part.
bool sampling_condition_holds(const CtModeld& model, double h);

/// Noise-free output samples y(kh) under a ZOH input.
VectorXd zoh_response(const CtModeld& model, const VectorXd& u, double h);

/// White Gaussian sequence of the given length from `noise`.
VectorXd white_noise(const NoiseSpec& noise, Eigen::Index length);

/// y_m(kh) = y(kh) + e(kh) with e drawn from `noise`.
SampledDataset simulate_ct_zoh(const CtModeld& model, const VectorXd& u, double h,
                               const NoiseSpec& noise);

/// Sample variance (denominator N - 1, or N when N == 1).
double sample_variance(const VectorXd& x);

/// sigma such that 10 log10(var(y_clean) / sigma^2) = snr_db.
double sigma_for_snr(const VectorXd& y_clean, double snr_db);

double snr_db(const VectorXd& y_clean, const VectorXd& noise);

}  // namespace ctid
