#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctid/metrics.hpp"
#include "ctid/pemrd.hpp"
#include "ctid/signals.hpp"

namespace ctid {

enum class Estimator { PEM, PEMrd };

enum class RunStatus { Ok, NegativeRealPole, NegativeFit, Crash };

std::string to_string(Estimator e);
std::string to_string(RunStatus s);
Estimator parse_estimator(const std::string& name);

struct InputSpec {
  enum class Kind { Prbs, Multisine, WhiteNoise };
  Kind kind = Kind::Prbs;
  // PRBS
  int n_stages = 10;
  int p = 7;
  double low = 0.0;
  double high = 2.0;
  // multisine
  std::vector<double> freqs;
  double amplitude = 1.0;
  // white noise
  double variance = 1.0;
};

struct NoiseLevel {
  enum class Kind { SnrDb, Sigma, MaxFraction };
  Kind kind = Kind::SnrDb;
  double value = 10.0;
};

struct ExperimentConfig {
  /// Fixed true system; when empty a random system is drawn every run.
  std::optional<CtModeld> system;
  RandomSystemSpec random;
  InputSpec input;
  /// Sampling period; <= 0 selects 2 pi / (10 w_max) per system.
  double h = 0.05;
  /// Record length; 0 takes one full PRBS period.
  Eigen::Index N = 0;
  NoiseLevel noise;
  int M = 1;
  /// Enforced relative degree; 0 uses the true system's.
  int r = 0;
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators{Estimator::PEM, Estimator::PEMrd};
  JacobianPoint jacobian_point = JacobianPoint::Truncated;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct RunRecord {
  int run = 0;
  Estimator estimator = Estimator::PEM;
  RunStatus status = RunStatus::Ok;
  Metrics metrics;
  VectorXd theta_c;  // estimate in the full 2n layout
  double h = 0.0;
  std::string detail;
};

struct Aggregate {
  Estimator estimator = Estimator::PEM;
  int successes = 0;
  std::map<RunStatus, int> failures;
  Metrics mean;
  Metrics median;
  VectorXd theta_mean;
  VectorXd theta_std;  // sample standard deviation (N - 1)

  int failure_count() const;
};

struct McReport {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<RunRecord> per_run;  // ordered by (run, estimator)
  std::vector<Aggregate> aggregate;

  const Aggregate& stats(Estimator e) const;
  bool all_failed() const;
};

/// Per-run seed derived from the master seed by SplitMix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Input sequence of the study; `seed` only matters for white noise.
VectorXd make_input(const InputSpec& spec, Eigen::Index length, double h, std::uint64_t seed);

/// Everything a single run draws before estimation.
struct RunData {
  CtModeld system;
  double h = 0.0;
  double sigma = 0.0;
  std::uint64_t noise_seed = 0;
  VectorXd y_clean;
  SampledDataset data;
};

/// True system, input and noisy record of run `run` (0-based).
RunData make_run_data(const ExperimentConfig& config, int run);

McReport run_monte_carlo(const ExperimentConfig& config);

}  // namespace ctid
