#include "fqmsim/measurement.hpp"

#include <stdexcept>
#include <string>

namespace fqmsim {

MeasurementSetup::MeasurementSetup(Eigen::VectorXcd system_coeffs, Eigen::Index apparatus_dim,
                                   Eigen::Index apparatus_ready_index,
                                   std::optional<std::vector<Ket>> environment_states,
                                   std::optional<Ket> environment_ready)
    : system_coeffs_(std::move(system_coeffs)),
      apparatus_dim_(apparatus_dim),
      apparatus_ready_index_(apparatus_ready_index),
      environment_states_(std::move(environment_states)),
      environment_ready_(std::move(environment_ready)) {
    if (system_coeffs_.size() < 1) {
        throw std::invalid_argument("MeasurementSetup: at least one system branch required");
    }
    const double sq = system_coeffs_.squaredNorm();
    if (std::abs(sq - 1.0) > kTol) {
        throw std::invalid_argument("MeasurementSetup: system_coeffs not normalized (squared norm " +
                                    std::to_string(sq) + ")");
    }
    if (system_coeffs_.size() > apparatus_dim_) {
        throw std::invalid_argument("MeasurementSetup: " + std::to_string(system_coeffs_.size()) +
                                    " branches exceed " + std::to_string(apparatus_dim_) +
                                    " apparatus pointer states");
    }
    if (apparatus_ready_index_ < 0 || apparatus_ready_index_ >= apparatus_dim_) {
        throw std::invalid_argument("MeasurementSetup: apparatus ready index out of range");
    }
    if (environment_states_) {
        if (static_cast<Eigen::Index>(environment_states_->size()) != system_coeffs_.size()) {
            throw std::invalid_argument("MeasurementSetup: need one environment state per branch (" +
                                        std::to_string(environment_states_->size()) + " given, " +
                                        std::to_string(system_coeffs_.size()) + " branches)");
        }
        const Eigen::Index env_dim = environment_states_->front().dim();
        for (std::size_t k = 0; k < environment_states_->size(); ++k) {
            const Ket& e = (*environment_states_)[k];
            if (e.dim() != env_dim) {
                throw std::invalid_argument(
                    "MeasurementSetup: environment state " + std::to_string(k) +
                    " has dimension " + std::to_string(e.dim()) + ", expected " +
                    std::to_string(env_dim));
            }
            if (!e.is_normalized()) {
                throw std::invalid_argument("MeasurementSetup: environment state " +
                                            std::to_string(k) + " not normalized");
            }
        }
        if (environment_ready_ && environment_ready_->dim() != env_dim) {
            throw std::invalid_argument("MeasurementSetup: environment ready state dimension " +
                                        std::to_string(environment_ready_->dim()) + ", expected " +
                                        std::to_string(env_dim));
        }
    }
}

const std::vector<Ket>& MeasurementSetup::environment_states() const {
    if (!environment_states_) {
        throw std::invalid_argument("MeasurementSetup: environment states absent");
    }
    return *environment_states_;
}

Eigen::Index MeasurementSetup::environment_dim() const {
    return environment_states().front().dim();
}

CompositeKet von_neumann_premeasure(const MeasurementSetup& setup) {
    const Eigen::Index n = setup.branch_count();
    const Eigen::Index a = setup.apparatus_dim();
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n * a);
    for (Eigen::Index k = 0; k < n; ++k) {
        amps(k * a + k) = setup.system_coeffs()(k);
    }
    return CompositeKet({n, a}, std::move(amps), {"system", "apparatus"});
}

CompositeKet zurek_chain(const MeasurementSetup& setup) {
    const auto& env = setup.environment_states();
    const Eigen::Index n = setup.branch_count();
    const Eigen::Index a = setup.apparatus_dim();
    const Eigen::Index e = setup.environment_dim();
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n * a * e);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex c = setup.system_coeffs()(k);
        for (Eigen::Index m = 0; m < e; ++m) {
            amps((k * a + k) * e + m) = c * env[static_cast<std::size_t>(k)].amplitudes()(m);
        }
    }
    return CompositeKet({n, a, e}, std::move(amps), {"system", "apparatus", "environment"});
}

DensityMatrix decohered_density(const MeasurementSetup& setup) {
    const CompositeKet psi = zurek_chain(setup);
    const DensityMatrix full = density_from_ket(psi);
    return partial_trace(full, psi.factor_dims(), 2);
}

DecoherenceReport decoherence_report(const MeasurementSetup& setup) {
    const auto& env = setup.environment_states();
    const Eigen::Index n = setup.branch_count();
    DecoherenceReport report;
    report.overlap_matrix.resize(n, n);
    double suppression = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index kp = 0; kp < n; ++kp) {
            const Complex o = overlap(env[static_cast<std::size_t>(k)],
                                      env[static_cast<std::size_t>(kp)]);
            report.overlap_matrix(k, kp) = o;
            if (k != kp) {
                suppression = std::max(suppression, std::abs(o));
            }
        }
    }
    report.offdiag_suppression = suppression;
    report.is_ideal = suppression < kTol;
    return report;
}

}  // namespace fqmsim
