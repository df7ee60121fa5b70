#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "ctid/montecarlo.hpp"

namespace ctid {

using Json = nlohmann::json;

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

Json to_json(const VectorXd& v);
Json to_json_row_major(const MatrixXd& m);
VectorXd vector_from_json(const Json& j);
MatrixXd matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);

/// `{num, den}` in descending powers; `relative_degree` is optional.
Json to_json(const CtModeld& model);
CtModeld ct_model_from_json(const Json& j);
/// The `{num, den}` model of the Rao-Garnier benchmark.
CtModeld rao_garnier();

/// CSV with header `k,t,u,y`.
void write_dataset_csv(std::ostream& os, const SampledDataset& data);
/// Reads `k,t,u,y`; h is taken from the t column unless given.
SampledDataset read_dataset_csv(std::istream& is, std::optional<double> h = std::nullopt);

Json dataset_sidecar(const SampledDataset& data, double sigma, std::uint64_t seed,
                     const CtModeld& system);

/// `{theta_d, h, sigma2_hat, covariance, cost, iterations, converged}`.
Json fit_report_to_json(const EstimationResult& result);
EstimationResult fit_report_from_json(const Json& j);

/// `{theta_tilde_c, cov_tilde, lambda, r, diagnostics}`.
Json pemrd_to_json(const PemrdResult& result);
Json pemrd_discarded_json(int r, const std::string& reason);

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical config dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

void write_report_csv(std::ostream& os, const McReport& report);
void write_aggregate_csv(std::ostream& os, const McReport& report);
Json report_to_json(const McReport& report);

/// CSV `omega,mag_db,phase_deg` with unwrapped phase.
void write_bode_csv(std::ostream& os, const VectorXd& omega, const ComplexVector<double>& response);

}  // namespace ctid
