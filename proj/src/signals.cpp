#include "ctid/signals.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace ctid {

namespace {

// x^n + x^k (+ ...) + 1 with maximal period; positions are 1-based cells.
const std::array<std::vector<int>, 17> kTaps = {{
    {},
    {},
    {2, 1},
    {3, 2},
    {4, 3},
    {5, 3},
    {6, 5},
    {7, 6},
    {8, 6, 5, 4},
    {9, 5},
    {10, 7},
    {11, 9},
    {12, 11, 10, 4},
    {13, 12, 11, 8},
    {14, 13, 12, 2},
    {15, 14},
    {16, 15, 13, 4},
}};

}  // namespace

std::vector<int> prbs_taps(int n_stages) {
  require(n_stages >= 2 && n_stages <= 16, Errc::UnsupportedRegisterLength,
          "register length " + std::to_string(n_stages) + " outside [2, 16]");
  return kTaps[static_cast<std::size_t>(n_stages)];
}

std::vector<std::uint8_t> lfsr_sequence(int n_stages) {
  const std::vector<int> taps = prbs_taps(n_stages);
  const std::size_t period = (std::size_t{1} << n_stages) - 1;
  std::uint32_t state = (std::uint32_t{1} << n_stages) - 1;
  std::vector<std::uint8_t> bits(period);
  for (std::size_t k = 0; k < period; ++k) {
    // cell i (1-based) lives in bit i-1; the output is the last cell
    bits[k] = static_cast<std::uint8_t>((state >> (n_stages - 1)) & 1u);
    std::uint32_t feedback = 0;
    for (int t : taps) feedback ^= (state >> (t - 1)) & 1u;
    state = ((state << 1) | feedback) & ((std::uint32_t{1} << n_stages) - 1);
  }
  return bits;
}

VectorXd gen_prbs(int n_stages, int p, double low, double high) {
  require(p >= 1, Errc::InvalidArgument, "chip length p must be >= 1");
  const std::vector<std::uint8_t> bits = lfsr_sequence(n_stages);
  VectorXd u(static_cast<Eigen::Index>(bits.size()) * p);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    u.segment(static_cast<Eigen::Index>(k) * p, p).setConstant(bits[k] ? high : low);
  }
  return u;
}

VectorXd gen_multisine(const std::vector<double>& omegas, double amplitude,
                       Eigen::Index length, double h) {
  require(!omegas.empty(), Errc::InvalidArgument, "multisine needs at least one frequency");
  require(h > 0.0 && length >= 1, Errc::InvalidArgument, "invalid multisine grid");
  for (double w : omegas) {
    require(w < std::numbers::pi / h, Errc::AliasedFrequency,
            "frequency " + std::to_string(w) + " at or above the Nyquist rate");
  }
  VectorXd u = VectorXd::Zero(length);
  for (Eigen::Index k = 0; k < length; ++k) {
    const double t = static_cast<double>(k) * h;
    for (double w : omegas) u(k) += std::sin(w * t);
  }
  return amplitude * u;
}

VectorXd gen_white_noise(double variance, Eigen::Index length, std::uint64_t seed) {
  require(variance >= 0.0, Errc::InvalidArgument, "variance must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  VectorXd u(length);
  for (Eigen::Index k = 0; k < length; ++k) u(k) = normal(rng);
  return u;
}

CtModeld gen_random_system(const RandomSystemSpec& spec, std::mt19937_64& rng) {
  require(spec.order >= 1 && spec.reldeg >= 1 && spec.reldeg <= spec.order,
          Errc::InvalidArgument, "random system needs 1 <= reldeg <= order");
  require(spec.fastest_pole_bound < spec.slowest_pole_bound && spec.slowest_pole_bound < 0.0,
          Errc::InvalidArgument, "pole bounds must satisfy fastest < slowest < 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double log_lo = std::log(-spec.slowest_pole_bound);
  const double log_hi = std::log(-spec.fastest_pole_bound);
  auto draw_real_part = [&] { return -std::exp(log_lo + (log_hi - log_lo) * unit(rng)); };

  const int pairs = std::uniform_int_distribution<int>(0, spec.order / 2)(rng);
  ComplexVector<double> poles(spec.order);
  Eigen::Index k = 0;
  for (int i = 0; i < pairs; ++i) {
    const double re = draw_real_part();
    const double im = -re * (0.2 + 2.8 * unit(rng));
    poles(k++) = {re, im};
    poles(k++) = {re, -im};
  }
  while (k < spec.order) poles(k++) = {draw_real_part(), 0.0};
  const Polynomiald den = Polynomiald::from_roots(poles);

  const int m = spec.order - spec.reldeg;
  VectorXd num(m + 1);
  while (true) {
    for (Eigen::Index i = 0; i <= m; ++i) num(i) = normal(rng);
    while (std::abs(num(0)) < 0.05) num(0) = normal(rng);
    if (std::abs(num(m)) >= 1e-3 * num.norm()) break;  // nonzero DC gain
  }
  const double dc = num(m) / den.coeffs()(spec.order);
  const double gain = 0.5 + 1.5 * unit(rng);
  num *= gain / std::abs(dc);
  return CtModeld(Polynomiald(num), den, spec.reldeg, true);
}

double max_natural_frequency(const CtModeld& model) {
  double w = model.poles().cwiseAbs().maxCoeff();
  const auto z = model.zeros();
  if (z.size() > 0) w = std::max(w, z.cwiseAbs().maxCoeff());
  return w;
}

}  // namespace ctid
