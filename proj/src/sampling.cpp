#include "fqmsim/sampling.hpp"

#include "fqmsim/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace fqmsim {

std::vector<std::int64_t> sample_outcomes(const Eigen::VectorXd& probabilities,
                                          std::int64_t shots, std::uint64_t seed) {
    const Eigen::Index n = probabilities.size();
    if (n < 1) {
        throw std::invalid_argument("sample_outcomes: empty probability vector");
    }
    if (shots < 0) {
        throw std::invalid_argument("sample_outcomes: shots must be >= 0");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(probabilities(i) >= 0.0) || !std::isfinite(probabilities(i))) {
            throw std::invalid_argument("sample_outcomes: probability " + std::to_string(i) +
                                        " must be finite and >= 0");
        }
        total += probabilities(i);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("sample_outcomes: probabilities sum to " +
                                    std::to_string(total) + ", expected 1");
    }

    std::vector<double> cumulative(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        acc += probabilities(i);
        cumulative[static_cast<std::size_t>(i)] = acc;
    }

    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    std::mt19937_64 rng(seed);
    for (std::int64_t shot = 0; shot < shots; ++shot) {
        const double u = uniform_unit(rng) * total;
        std::size_t outcome = counts.size() - 1;  // rounding guard
        for (std::size_t i = 0; i < cumulative.size(); ++i) {
            if (u < cumulative[i]) {
                outcome = i;
                break;
            }
        }
        ++counts[outcome];
    }
    return counts;
}

}  // namespace fqmsim
