#pragma once

#include "fqmsim/hilbert.hpp"

#include <optional>
#include <vector>

namespace fqmsim {

/// Inputs for one measurement chain: system branch coefficients C_k, the
/// apparatus space with its ready state, and (optionally) one environment
/// state per branch plus the environment ready state.
class MeasurementSetup {
public:
    MeasurementSetup(Eigen::VectorXcd system_coeffs, Eigen::Index apparatus_dim,
                     Eigen::Index apparatus_ready_index = 0,
                     std::optional<std::vector<Ket>> environment_states = std::nullopt,
                     std::optional<Ket> environment_ready = std::nullopt);

    Eigen::Index branch_count() const { return system_coeffs_.size(); }
    const Eigen::VectorXcd& system_coeffs() const { return system_coeffs_; }
    Eigen::Index apparatus_dim() const { return apparatus_dim_; }
    Eigen::Index apparatus_ready_index() const { return apparatus_ready_index_; }

    bool has_environment() const { return environment_states_.has_value(); }
    const std::vector<Ket>& environment_states() const;
    Eigen::Index environment_dim() const;
    const std::optional<Ket>& environment_ready() const { return environment_ready_; }

private:
    Eigen::VectorXcd system_coeffs_;
    Eigen::Index apparatus_dim_;
    Eigen::Index apparatus_ready_index_;
    std::optional<std::vector<Ket>> environment_states_;
    std::optional<Ket> environment_ready_;
};

/// Pairwise environment-state overlaps and how well they decohere the
/// branch off-diagonals. `is_ideal` holds when every cross overlap is
/// below 1e-12.
struct DecoherenceReport {
    Eigen::MatrixXcd overlap_matrix;
    double offdiag_suppression = 0.0;
    bool is_ideal = false;
};

/// System-apparatus correlated state sum_k C_k |q_k>|a_k> over
/// dims [branches, apparatus_dim]. Pointer states are the computational
/// basis states of the apparatus factor.
CompositeKet von_neumann_premeasure(const MeasurementSetup& setup);

/// Triple-correlated state sum_k C_k |q_k>|a_k>|e_k> over
/// dims [branches, apparatus_dim, environment_dim]. Requires environment
/// states.
CompositeKet zurek_chain(const MeasurementSetup& setup);

/// Reduced system-apparatus density matrix: the environment factor of
/// |psi><psi| is traced out. Orthonormal environment states leave a
/// diagonal branch mixture; otherwise the (k, k') branch off-diagonal is
/// C_k conj(C_k') <e_k'|e_k>.
DensityMatrix decohered_density(const MeasurementSetup& setup);

DecoherenceReport decoherence_report(const MeasurementSetup& setup);

}  // namespace fqmsim
