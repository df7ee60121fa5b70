#include "ctid/pem.hpp"

#include "ctid/sampling.hpp"

#include <cmath>
#include <limits>

namespace ctid {

namespace {

// s = x / F(q^{-1}),  F(q^{-1}) = 1 + a_{n-1} q^{-1} + ... + a_0 q^{-n}
VectorXd inverse_filter(const VectorXd& den_tail, const VectorXd& x) {
  const Eigen::Index n = den_tail.size();
  const Eigen::Index len = x.size();
  VectorXd s(len);
  for (Eigen::Index k = 0; k < len; ++k) {
    double acc = x(k);
    const Eigen::Index span = std::min(n, k);
    for (Eigen::Index j = 0; j < span; ++j) acc -= den_tail(j) * s(k - 1 - j);
    s(k) = acc;
  }
  return s;
}

// Column j of the result is x delayed by j + 1 samples, zero filled.
void fill_delayed(Eigen::Ref<MatrixXd> out, const VectorXd& x, double sign) {
  const Eigen::Index len = x.size();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const Eigen::Index lag = j + 1;
    out.col(j).head(std::min(lag, len)).setZero();
    if (lag < len) out.col(j).tail(len - lag) = sign * x.head(len - lag);
  }
}

DtModeld model_from_free(const VectorXd& theta, const OeOrders& orders, double h) {
  VectorXd full = VectorXd::Zero(2 * orders.nf);
  full.head(orders.nb) = theta.head(orders.nb);
  full.tail(orders.nf) = theta.tail(orders.nf);
  return DtModeld::from_theta(full, h);
}

VectorXd free_from_model(const DtModeld& model, const OeOrders& orders) {
  require(model.order() == orders.nf, Errc::InvalidArgument,
          "model order does not match the requested orders");
  VectorXd theta(orders.parameters());
  theta << model.numerator().head(orders.nb), model.denominator_tail();
  return theta;
}

/// Regressor rows phi(k) = [x(k-1..k-nb), -w(k-1..k-nf)].
MatrixXd regressors(const VectorXd& x, const VectorXd& w, const OeOrders& orders) {
  MatrixXd phi(x.size(), orders.parameters());
  fill_delayed(phi.leftCols(orders.nb), x, 1.0);
  fill_delayed(phi.rightCols(orders.nf), w, -1.0);
  return phi;
}

/// Inverse of a symmetric positive semidefinite matrix after Jacobi scaling,
/// together with the 2-norm condition number of the scaled matrix.
struct ScaledInverse {
  MatrixXd inverse;
  double condition = std::numeric_limits<double>::infinity();
};

ScaledInverse scaled_spd_inverse(const MatrixXd& H) {
  const Eigen::Index p = H.rows();
  VectorXd d = H.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(d(i) > 0.0)) return {};
  }
  const VectorXd dinv = d.cwiseInverse();
  const MatrixXd S = dinv.asDiagonal() * H * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  ScaledInverse out;
  if (!(lo > 0.0)) return out;
  out.condition = hi / lo;
  const MatrixXd Sinv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
  out.inverse = dinv.asDiagonal() * Sinv * dinv.asDiagonal();
  out.inverse = (out.inverse + out.inverse.transpose()) / 2.0;
  return out;
}

constexpr double kMaxInformationCondition = 1e12;

}  // namespace

void OeOrders::validate() const {
  require(nf >= 1 && nb >= 1 && nb <= nf, Errc::InvalidArgument,
          "OE orders need 1 <= nb <= nf");
}

VectorXd EstimationResult::theta() const { return free_from_model(model, orders); }

VectorXd predict(const DtModeld& model, const VectorXd& u) { return simulate_dt(model, u); }

MatrixXd prediction_jacobian(const DtModeld& model, const VectorXd& u,
                             const OeOrders& orders) {
  orders.validate();
  require(model.order() == orders.nf, Errc::InvalidArgument,
          "model order does not match the requested orders");
  require(is_stable(model), Errc::UnstablePredictor, "predictor denominator is unstable");
  const VectorXd yhat = predict(model, u);
  const VectorXd& a = model.denominator_tail();
  MatrixXd psi(u.size(), orders.parameters());
  fill_delayed(psi.leftCols(orders.nb), inverse_filter(a, u), 1.0);
  fill_delayed(psi.rightCols(orders.nf), inverse_filter(a, yhat), -1.0);
  return psi;
}

MatrixXd prediction_jacobian(const DtModeld& model, const VectorXd& u) {
  return prediction_jacobian(model, u, OeOrders::full(model.order()));
}

EstimationResult oe_fit(const SampledDataset& data, const OeOrders& orders,
                        const DtModeld& init, const OeOptions& options) {
  orders.validate();
  const Eigen::Index p = orders.parameters();
  require(data.size() > p, Errc::InvalidArgument, "need more samples than parameters");
  require(is_stable(init), Errc::UnstablePredictor, "initial model is unstable");
  const double h = data.h;

  VectorXd theta = free_from_model(init, orders);
  DtModeld model = model_from_free(theta, orders, h);
  VectorXd residuals = data.y - predict(model, data.u);
  double cost = residuals.squaredNorm();
  double mu = 1e-3;  // damping on the Jacobi-scaled normal matrix (trace = p)
  int iterations = 0;
  bool converged = false;

  while (iterations < options.max_iterations) {
    const MatrixXd psi = prediction_jacobian(model, data.u, orders);
    const VectorXd g = psi.transpose() * residuals;
    if ((2.0 * g).lpNorm<Eigen::Infinity>() < options.gradient_tolerance * (1.0 + cost)) {
      converged = true;
      break;
    }
    const MatrixXd H = psi.transpose() * psi;
    VectorXd d = H.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!(d(i) > 0.0)) d(i) = 1.0;
    }
    const MatrixXd Hs = d.cwiseInverse().asDiagonal() * H * d.cwiseInverse().asDiagonal();
    const VectorXd gs = g.cwiseQuotient(d);

    bool accepted = false;
    bool only_unstable = true;
    double relative_decrease = 0.0;
    for (int doubling = 0; doubling <= options.max_damping_doublings; ++doubling) {
      MatrixXd A = Hs;
      A.diagonal().array() += mu;
      const VectorXd step = A.ldlt().solve(gs).cwiseQuotient(d);
      const VectorXd candidate = theta + step;
      if (!candidate.allFinite()) {
        mu *= 2.0;
        continue;
      }
      const DtModeld trial = model_from_free(candidate, orders, h);
      if (!is_stable(trial)) {
        mu *= 2.0;
        continue;
      }
      only_unstable = false;
      VectorXd trial_residuals = data.y - predict(trial, data.u);
      const double trial_cost = trial_residuals.squaredNorm();
      if (trial_cost < cost) {
        relative_decrease = (cost - trial_cost) / std::max(cost, std::numeric_limits<double>::min());
        theta = candidate;
        model = trial;
        residuals = std::move(trial_residuals);
        cost = trial_cost;
        mu *= 0.5;
        accepted = true;
        break;
      }
      mu *= 2.0;
    }
    if (!accepted) {
      require(!only_unstable, Errc::DivergedUnstable,
              "every damped step left the stability region");
      // no descent direction left at any damping level
      converged = true;
      break;
    }
    ++iterations;
    if (relative_decrease < options.relative_cost_tolerance) {
      converged = true;
      break;
    }
  }

  EstimationResult result{model, orders, cost / static_cast<double>(data.size() - p),
                          MatrixXd(), cost, iterations, converged, residuals};
  try {
    result.covariance = dt_covariance(result, data.u);
  } catch (const Error& e) {
    if (e.code() != Errc::SingularInformation) throw;
  }
  return result;
}

MatrixXd dt_covariance(const EstimationResult& result, const VectorXd& u) {
  const MatrixXd psi = prediction_jacobian(result.model, u, result.orders);
  const ScaledInverse inv = scaled_spd_inverse(psi.transpose() * psi);
  require(inv.condition <= kMaxInformationCondition, Errc::SingularInformation,
          "information matrix condition number " + std::to_string(inv.condition));
  return result.sigma2_hat * inv.inverse;
}

DtModeld reflect_to_stability(const DtModeld& model) {
  ComplexVector<double> z = model.poles();
  bool changed = false;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double mag = std::abs(z(k));
    if (mag >= 1.0) {
      // modulus inversion; points on the unit circle are pulled slightly inside
      z(k) = mag > 1.0 + 1e-6 ? z(k) / (mag * mag) : z(k) * (0.999 / mag);
      changed = true;
    }
  }
  if (!changed) return model;
  const Polynomiald den = Polynomiald::from_roots(z);
  return DtModeld(model.num(), den, model.h());
}

DtModeld init_arx_iv(const SampledDataset& data, const OeOrders& orders,
                     int sm_iterations) {
  orders.validate();
  const Eigen::Index p = orders.parameters();
  const Eigen::Index skip = orders.nf;
  require(data.size() > p + skip, Errc::InvalidArgument, "dataset too short for initializer");
  const Eigen::Index rows = data.size() - skip;
  const double h = data.h;

  // (i) ARX least squares
  const MatrixXd phi = regressors(data.u, data.y, orders);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(phi.bottomRows(rows));
  require(qr.rank() == p, Errc::RankDeficientRegression, "ARX regressor matrix is rank deficient");
  VectorXd theta = qr.solve(data.y.tail(rows));
  DtModeld model = reflect_to_stability(model_from_free(theta, orders, h));

  // (ii) instruments from the simulated auxiliary model, then (iii) the same
  // IV step on data prefiltered by the current denominator.
  auto iv_step = [&](const VectorXd& u, const VectorXd& y, const VectorXd& x) {
    const MatrixXd phi_k = regressors(u, y, orders).bottomRows(rows);
    const MatrixXd zeta = regressors(u, x, orders).bottomRows(rows);
    Eigen::ColPivHouseholderQR<MatrixXd> solver(zeta.transpose() * phi_k);
    require(solver.rank() == p, Errc::RankDeficientRegression, "IV normal matrix is rank deficient");
    return VectorXd(solver.solve(zeta.transpose() * y.tail(rows)));
  };

  theta = iv_step(data.u, data.y, predict(model, data.u));
  model = reflect_to_stability(model_from_free(theta, orders, h));

  for (int it = 0; it < sm_iterations; ++it) {
    const VectorXd& a = model.denominator_tail();
    const VectorXd uf = inverse_filter(a, data.u);
    const VectorXd yf = inverse_filter(a, data.y);
    const VectorXd xf = inverse_filter(a, predict(model, data.u));
    VectorXd next;
    try {
      next = iv_step(uf, yf, xf);
    } catch (const Error&) {
      break;
    }
    if (!next.allFinite()) break;
    const double change = (next - theta).norm() / std::max(1e-300, theta.norm());
    theta = next;
    model = reflect_to_stability(model_from_free(theta, orders, h));
    theta = free_from_model(model, orders);
    if (change < 1e-10) break;
  }
  return model;
}

DtModeld init_multirate(const SampledDataset& data, const OeOrders& orders,
                        int sm_iterations) {
  DtModeld best = init_arx_iv(data, orders, sm_iterations);
  if (orders.nb != orders.nf) return best;
  double best_cost = (data.y - predict(best, data.u)).squaredNorm();
  for (Eigen::Index d : {2, 4, 8}) {
    const Eigen::Index n = data.size() / d;
    if (n < 20 * orders.parameters()) break;
    VectorXd u(n), y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      u(k) = data.u(k * d);
      y(k) = data.y(k * d);
    }
    try {
      const DtModeld slow = init_arx_iv(SampledDataset(u, y, data.h * d), orders, sm_iterations);
      const DtModeld lifted = c2d_zoh(d2c_zoh(slow), data.h);
      const double cost = (data.y - predict(lifted, data.u)).squaredNorm();
      if (std::isfinite(cost) && cost < best_cost) {
        best = lifted;
        best_cost = cost;
      }
    } catch (const Error&) {
    }
  }
  return best;
}

}  // namespace ctid
