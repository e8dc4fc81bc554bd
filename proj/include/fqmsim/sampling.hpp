#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace fqmsim {

/// Draw `shots` outcomes from the given probability vector.
///
/// PRNG: std::mt19937_64 seeded directly with `seed`; each draw maps the
/// top 53 bits of one output word to [0, 1). Both steps are pinned by the
/// standard, so counts are reproducible across platforms.
std::vector<std::int64_t> sample_outcomes(const Eigen::VectorXd& probabilities,
                                          std::int64_t shots, std::uint64_t seed);

}  // namespace fqmsim
