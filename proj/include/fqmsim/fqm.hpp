#pragma once

#include "fqmsim/hilbert.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fqmsim {

/// Raw interaction strengths F per subsystem pair. The reference pair is
/// the one whose membership will be 1; it must carry the maximum strength.
class InteractionProfile {
public:
    explicit InteractionProfile(std::map<std::string, double> pair_strengths,
                                std::optional<std::string> reference_pair = std::nullopt);

    const std::map<std::string, double>& pair_strengths() const { return pair_strengths_; }
    const std::string& reference_pair() const { return reference_pair_; }

private:
    std::map<std::string, double> pair_strengths_;
    std::string reference_pair_;
};

/// Membership weights in [0, 1] per subsystem pair. When a reference pair
/// is tracked, its weight is exactly 1.
class MembershipWeights {
public:
    explicit MembershipWeights(std::map<std::string, double> weights,
                               std::optional<std::string> reference_pair = std::nullopt);

    const std::map<std::string, double>& weights() const { return weights_; }
    const std::optional<std::string>& reference_pair() const { return reference_pair_; }
    double at(const std::string& pair) const;

private:
    std::map<std::string, double> weights_;
    std::optional<std::string> reference_pair_;
};

/// weight(p) = F_p / F_reference, clamped to [0, 1].
MembershipWeights memberships_from_interactions(const InteractionProfile& profile);

/// Distance-to-membership map. Both forms land in [0, 1], decrease
/// strictly with distance, and vanish in the far limit.
class DistanceKernel {
public:
    enum class Form {
        reciprocal_normalized,  // m_i = d_min / d_i (nearest particle gets 1)
        exponential,            // m_i = exp(-d_i / scale)
    };

    explicit DistanceKernel(Form form, double scale = 1.0);

    Form form() const { return form_; }
    double scale() const { return scale_; }

private:
    Form form_;
    double scale_;
};

/// Memberships for particles at the given positions, measured from the
/// reference position. Names default to x1, x2, ... in input order.
MembershipWeights memberships_from_positions(const std::vector<Eigen::Vector3d>& positions,
                                             const Eigen::Vector3d& reference_position,
                                             const DistanceKernel& kernel,
                                             std::vector<std::string> names = {});

/// Diagonal nonnegative weight operator on one subsystem factor. Uniform
/// weight 1 is the identity.
class FqmOperator {
public:
    explicit FqmOperator(Eigen::VectorXd diagonal_weights);
    FqmOperator(double uniform_weight, Eigen::Index dim);

    Eigen::Index dim() const { return diagonal_.size(); }
    const Eigen::VectorXd& diagonal() const { return diagonal_; }
    bool is_uniform() const;

    Operator as_operator() const;

private:
    Eigen::VectorXd diagonal_;
};

FqmOperator build_fqm_operator(double uniform_weight, Eigen::Index dim);
FqmOperator build_fqm_operator(Eigen::VectorXd diagonal_weights);

enum class SgConvention {
    cos_squared,  // default; theta = 45 deg gives exactly 1/2
    literal_cos,
};

/// Apparatus correlation weight for a second Stern-Gerlach stage whose
/// field axis is tilted by theta (radians, within [0, pi/2]).
double sg_apparatus_weight(double theta, SgConvention convention = SgConvention::cos_squared);

struct FqmcResult {
    CompositeKet state;
    /// Diagonal per-branch products prod_j w_j[k]; length is the smallest
    /// factor dimension.
    Eigen::VectorXd fqmc_per_branch;
    double pre_normalization_norm = 0.0;
};

/// Weight every amplitude by the per-factor diagonal weights: component
/// (i_0, ..., i_{F-1}) is scaled by prod_j w_j[i_j]. Weights identically 1
/// leave the state bit-identical. With `renormalize` the output is rescaled
/// to unit norm and the pre-normalization norm reported.
FqmcResult apply_fqmc(const CompositeKet& state,
                      const std::vector<Eigen::VectorXd>& weights_per_subsystem,
                      bool renormalize);

/// Commutator [M, observable] and whether its largest entry magnitude is
/// below 1e-12.
std::pair<Operator, bool> fqmc_commutation_check(const FqmOperator& m, const Operator& observable);

/// Pair identifiers sorted by descending weight; ties break
/// lexicographically.
std::vector<std::string> correlation_ordering(const MembershipWeights& weights);

}  // namespace fqmsim
