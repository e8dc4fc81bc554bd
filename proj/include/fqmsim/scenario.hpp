#pragma once

#include "fqmsim/fqm.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fqmsim {

// A scenario file is a JSON document; the concrete schema is documented in
// the README. Complex values are {"re": x, "im": y} objects ("im" may be
// omitted for real entries).

struct FuzzyExplicit {
    std::optional<Eigen::VectorXd> system;
    std::optional<Eigen::VectorXd> apparatus;
    std::optional<Eigen::VectorXd> environment;
};

struct FuzzySternGerlach {
    double theta_radians = 0.0;
    SgConvention convention = SgConvention::cos_squared;
};

struct FuzzyInteractions {
    std::map<std::string, double> pair_strengths;
    std::optional<std::string> reference_pair;
};

struct FuzzyPositions {
    DistanceKernel kernel{DistanceKernel::Form::reciprocal_normalized};
    Eigen::Vector3d reference_position = Eigen::Vector3d::Zero();
    std::vector<std::string> names;
    std::vector<Eigen::Vector3d> positions;
};

using FuzzySpec = std::variant<FuzzyExplicit, FuzzySternGerlach, FuzzyInteractions, FuzzyPositions>;

struct SamplingSpec {
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
};

struct Scenario {
    std::string name;
    Eigen::VectorXcd system_coeffs;
    Eigen::Index apparatus_dim = 0;
    Eigen::Index apparatus_ready_index = 0;
    std::optional<std::vector<Eigen::VectorXcd>> environment_states;
    std::optional<FuzzySpec> fuzzy;
    std::optional<SamplingSpec> sampling;
    bool renormalize = true;
};

/// Parse and validate a scenario document. Throws std::invalid_argument
/// with a field-anchored message on any violation.
Scenario parse_scenario(const std::string& text);

/// Read a scenario file from disk.
Scenario load_scenario(const std::string& path);

}  // namespace fqmsim
