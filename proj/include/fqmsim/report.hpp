#pragma once

#include "fqmsim/measurement.hpp"
#include "fqmsim/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fqmsim {

struct FqmcTable {
    Eigen::VectorXd per_branch;
    double pre_normalization_norm = 0.0;
};

struct RunReport {
    std::string scenario_name;
    std::vector<Eigen::Index> factor_dims;
    Eigen::VectorXcd chain_state;
    std::vector<Eigen::Index> density_dims;  // always [branches, apparatus_dim]
    Eigen::MatrixXcd density;
    std::optional<DecoherenceReport> decoherence;
    std::optional<FqmcTable> fqmc;
    Eigen::VectorXd branch_probabilities;
    std::optional<std::vector<std::int64_t>> outcome_counts;
    std::vector<std::string> correlation_order;
};

/// Run the full pipeline: measurement chain, optional FQMC correction,
/// reduced density and decoherence diagnostics, branch probabilities
/// p_k = |fqmc_k C_k|^2 / sum, optional seeded Born sampling. Deterministic
/// for a fixed (scenario, seed).
RunReport run_scenario(const Scenario& scenario);

enum class ReportFormat { json, csv };

/// Serialize a report. JSON emission is stable-keyed and round-trips
/// binary64 values exactly; CSV emits one table per section behind a
/// `# section` comment line.
std::string emit_report(const RunReport& report, ReportFormat format);

/// Inverse of the JSON emission; emit(parse(emit(r))) is byte-identical
/// to emit(r).
RunReport parse_report(const std::string& json_text);

}  // namespace fqmsim
