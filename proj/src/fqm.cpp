#include "fqmsim/fqm.hpp"

#include "num_format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fqmsim {

namespace {

void check_weight(double w, const std::string& what) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument(what + " must lie in [0, 1], got " + format_double(w));
    }
}

}  // namespace

InteractionProfile::InteractionProfile(std::map<std::string, double> pair_strengths,
                                       std::optional<std::string> reference_pair)
    : pair_strengths_(std::move(pair_strengths)) {
    if (pair_strengths_.empty()) {
        throw std::invalid_argument("InteractionProfile: at least one pair required");
    }
    double max_strength = -1.0;
    std::string max_pair;
    for (const auto& [pair, strength] : pair_strengths_) {
        if (!(strength >= 0.0) || !std::isfinite(strength)) {
            throw std::invalid_argument("InteractionProfile: strength for '" + pair +
                                        "' must be finite and >= 0");
        }
        if (strength > max_strength) {
            max_strength = strength;
            max_pair = pair;
        }
    }
    if (max_strength <= 0.0) {
        throw std::invalid_argument("InteractionProfile: all strengths are zero, no reference");
    }
    if (reference_pair) {
        auto it = pair_strengths_.find(*reference_pair);
        if (it == pair_strengths_.end()) {
            throw std::invalid_argument("InteractionProfile: reference pair '" + *reference_pair +
                                        "' not present");
        }
        if (it->second < max_strength) {
            throw std::invalid_argument("InteractionProfile: reference pair '" + *reference_pair +
                                        "' does not carry the maximum strength");
        }
        reference_pair_ = *reference_pair;
    } else {
        reference_pair_ = max_pair;
    }
}

MembershipWeights::MembershipWeights(std::map<std::string, double> weights,
                                     std::optional<std::string> reference_pair)
    : weights_(std::move(weights)), reference_pair_(std::move(reference_pair)) {
    if (weights_.empty()) {
        throw std::invalid_argument("MembershipWeights: at least one pair required");
    }
    for (const auto& [pair, w] : weights_) {
        check_weight(w, "MembershipWeights: weight for '" + pair + "'");
    }
    if (reference_pair_) {
        auto it = weights_.find(*reference_pair_);
        if (it == weights_.end()) {
            throw std::invalid_argument("MembershipWeights: reference pair '" + *reference_pair_ +
                                        "' not present");
        }
        if (it->second != 1.0) {
            throw std::invalid_argument("MembershipWeights: reference pair '" + *reference_pair_ +
                                        "' must have weight 1");
        }
    }
}

double MembershipWeights::at(const std::string& pair) const {
    auto it = weights_.find(pair);
    if (it == weights_.end()) {
        throw std::invalid_argument("MembershipWeights: unknown pair '" + pair + "'");
    }
    return it->second;
}

MembershipWeights memberships_from_interactions(const InteractionProfile& profile) {
    const double reference = profile.pair_strengths().at(profile.reference_pair());
    std::map<std::string, double> weights;
    for (const auto& [pair, strength] : profile.pair_strengths()) {
        weights[pair] = std::clamp(strength / reference, 0.0, 1.0);
    }
    return MembershipWeights(std::move(weights), profile.reference_pair());
}

DistanceKernel::DistanceKernel(Form form, double scale) : form_(form), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("DistanceKernel: scale must be a positive finite length");
    }
}

MembershipWeights memberships_from_positions(const std::vector<Eigen::Vector3d>& positions,
                                             const Eigen::Vector3d& reference_position,
                                             const DistanceKernel& kernel,
                                             std::vector<std::string> names) {
    if (positions.empty()) {
        throw std::invalid_argument("memberships_from_positions: at least one particle required");
    }
    if (names.empty()) {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            names.push_back("x" + std::to_string(i + 1));
        }
    } else if (names.size() != positions.size()) {
        throw std::invalid_argument("memberships_from_positions: one name per particle");
    }

    std::vector<double> distances(positions.size());
    double d_min = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        distances[i] = (positions[i] - reference_position).norm();
        if (distances[i] < d_min) {
            d_min = distances[i];
            nearest = i;
        }
    }

    std::map<std::string, double> weights;
    std::optional<std::string> reference;
    switch (kernel.form()) {
        case DistanceKernel::Form::reciprocal_normalized:
            if (d_min <= 0.0) {
                throw std::invalid_argument(
                    "memberships_from_positions: particle '" + names[nearest] +
                    "' coincides with the reference point (reciprocal kernel is singular)");
            }
            for (std::size_t i = 0; i < positions.size(); ++i) {
                weights[names[i]] = d_min / distances[i];
            }
            reference = names[nearest];
            break;
        case DistanceKernel::Form::exponential:
            for (std::size_t i = 0; i < positions.size(); ++i) {
                weights[names[i]] = std::exp(-distances[i] / kernel.scale());
            }
            break;
    }
    if (weights.size() != positions.size()) {
        throw std::invalid_argument("memberships_from_positions: particle names must be unique");
    }
    return MembershipWeights(std::move(weights), reference);
}

FqmOperator::FqmOperator(Eigen::VectorXd diagonal_weights) : diagonal_(std::move(diagonal_weights)) {
    if (diagonal_.size() < 1) {
        throw std::invalid_argument("FqmOperator: dimension must be >= 1");
    }
    for (Eigen::Index i = 0; i < diagonal_.size(); ++i) {
        check_weight(diagonal_(i), "FqmOperator: diagonal weight " + std::to_string(i));
    }
}

FqmOperator::FqmOperator(double uniform_weight, Eigen::Index dim)
    : FqmOperator(Eigen::VectorXd::Constant(dim, uniform_weight)) {}

bool FqmOperator::is_uniform() const {
    for (Eigen::Index i = 1; i < diagonal_.size(); ++i) {
        if (diagonal_(i) != diagonal_(0)) {
            return false;
        }
    }
    return true;
}

Operator FqmOperator::as_operator() const {
    Eigen::MatrixXcd entries = Eigen::MatrixXcd::Zero(diagonal_.size(), diagonal_.size());
    for (Eigen::Index i = 0; i < diagonal_.size(); ++i) {
        entries(i, i) = Complex(diagonal_(i), 0.0);
    }
    return Operator(std::move(entries));
}

FqmOperator build_fqm_operator(double uniform_weight, Eigen::Index dim) {
    return FqmOperator(uniform_weight, dim);
}

FqmOperator build_fqm_operator(Eigen::VectorXd diagonal_weights) {
    return FqmOperator(std::move(diagonal_weights));
}

double sg_apparatus_weight(double theta, SgConvention convention) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!(theta >= 0.0 && theta <= half_pi)) {
        throw std::invalid_argument("sg_apparatus_weight: theta must lie in [0, pi/2], got " +
                                    format_double(theta));
    }
    switch (convention) {
        case SgConvention::cos_squared:
            // Half-angle form lands exactly on 1, 1/2, 0 at theta = 0, pi/4, pi/2.
            return 0.5 * (1.0 + std::cos(2.0 * theta));
        case SgConvention::literal_cos:
            return std::cos(theta);
    }
    throw std::invalid_argument("sg_apparatus_weight: unknown convention");
}

FqmcResult apply_fqmc(const CompositeKet& state,
                      const std::vector<Eigen::VectorXd>& weights_per_subsystem,
                      bool renormalize) {
    const auto& dims = state.factor_dims();
    if (weights_per_subsystem.size() != dims.size()) {
        throw std::invalid_argument("apply_fqmc: " + std::to_string(weights_per_subsystem.size()) +
                                    " weight vectors for " + std::to_string(dims.size()) +
                                    " subsystem factors");
    }
    bool identity = true;
    for (std::size_t f = 0; f < dims.size(); ++f) {
        const Eigen::VectorXd& w = weights_per_subsystem[f];
        if (w.size() != dims[f]) {
            throw std::invalid_argument("apply_fqmc: weight vector for factor " +
                                        std::to_string(f) + " has length " +
                                        std::to_string(w.size()) + ", factor dimension is " +
                                        std::to_string(dims[f]));
        }
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            check_weight(w(i), "apply_fqmc: factor " + std::to_string(f) + " weight " +
                                   std::to_string(i));
            if (w(i) != 1.0) {
                identity = false;
            }
        }
    }

    const Eigen::Index branch_count = *std::min_element(dims.begin(), dims.end());
    Eigen::VectorXd fqmc(branch_count);
    for (Eigen::Index k = 0; k < branch_count; ++k) {
        double product = 1.0;
        for (const auto& w : weights_per_subsystem) {
            product *= w(k);
        }
        fqmc(k) = product;
    }

    Eigen::VectorXcd amps = state.amplitudes();
    if (!identity) {
        for (Eigen::Index flat = 0; flat < amps.size(); ++flat) {
            double product = 1.0;
            Eigen::Index rest = flat;
            for (std::size_t f = dims.size(); f-- > 0;) {
                product *= weights_per_subsystem[f](rest % dims[f]);
                rest /= dims[f];
            }
            amps(flat) *= product;
        }
    }

    const double prenorm = amps.norm();
    if (renormalize && !identity) {
        if (prenorm == 0.0) {
            throw std::runtime_error(
                "apply_fqmc: all branch weights vanish, the weighted state is null");
        }
        amps /= prenorm;
    }
    return FqmcResult{CompositeKet(dims, std::move(amps), state.subsystem_names()),
                      std::move(fqmc), prenorm};
}

std::pair<Operator, bool> fqmc_commutation_check(const FqmOperator& m, const Operator& observable) {
    if (m.dim() != observable.dim()) {
        throw std::invalid_argument("fqmc_commutation_check: dimension mismatch (" +
                                    std::to_string(m.dim()) + " vs " +
                                    std::to_string(observable.dim()) + ")");
    }
    Operator comm = commutator(m.as_operator(), observable);
    const bool commutes = comm.entries().cwiseAbs().maxCoeff() < kTol;
    return {std::move(comm), commutes};
}

std::vector<std::string> correlation_ordering(const MembershipWeights& weights) {
    std::vector<std::pair<std::string, double>> pairs(weights.weights().begin(),
                                                      weights.weights().end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    std::vector<std::string> order;
    order.reserve(pairs.size());
    for (const auto& [pair, _] : pairs) {
        order.push_back(pair);
    }
    return order;
}

}  // namespace fqmsim
