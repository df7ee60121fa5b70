#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ctid/models.hpp"

namespace ctid {

/// Feedback taps (1-based register positions) of the tabulated primitive
/// polynomial for a register of `n_stages` cells, 2 <= n_stages <= 16.
std::vector<int> prbs_taps(int n_stages);

/// One full period of the maximal-length LFSR sequence as bits {0, 1},
/// starting from the all-ones state.
std::vector<std::uint8_t> lfsr_sequence(int n_stages);

/// Full-period PRBS, each chip held for `p` samples, bits mapped 0 -> low,
/// 1 -> high. Length p (2^n - 1).
VectorXd gen_prbs(int n_stages, int p, double low, double high);

/// u(kh) = amplitude * sum_i sin(omega_i k h), k = 0..N-1.
VectorXd gen_multisine(const std::vector<double>& omegas, double amplitude,
                       Eigen::Index length, double h);

/// Zero-mean Gaussian white sequence with the given variance.
VectorXd gen_white_noise(double variance, Eigen::Index length, std::uint64_t seed);

struct RandomSystemSpec {
  int order = 3;
  int reldeg = 2;
  double slowest_pole_bound = -0.1;  // max pole real part
  double fastest_pole_bound = -50.0;  // min pole real part
};

/// Random stable CtModel with the exact relative degree of `spec`.
CtModeld gen_random_system(const RandomSystemSpec& spec, std::mt19937_64& rng);

/// Largest natural frequency |p| over the poles and zeros of `model`.
double max_natural_frequency(const CtModeld& model);

}  // namespace ctid
