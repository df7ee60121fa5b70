#pragma once

#include "ctid/lti.hpp"

namespace ctid {

struct Metrics {
  double mse_g = 0.0;
  double mse_theta = 0.0;
  double fit = 0.0;
};

/// ||G_hat - G0||_2^2 / ||G0||_2^2.
double mse_g(const CtModeld& g_hat, const CtModeld& g0);

/// ||theta_hat - theta0||^2 / ||theta0||^2, the shorter vector zero padded
/// at the front (leading numerator positions).
double mse_theta(const VectorXd& theta_hat, const VectorXd& theta0);

/// 100 (1 - ||y_hat - y|| / ||y - mean(y)||); negative for poor models.
double fit_percent(const VectorXd& y_hat, const VectorXd& y);

}  // namespace ctid
