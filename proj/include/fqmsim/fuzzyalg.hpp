#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fqmsim {

// Grades and matrix entries live on [0, 1] with a + b = max{a, b} and
// k * a = min{k, a}. sup/inf never rounds, so algebraic identities are
// checked with exact equality throughout.

/// Membership function over a finite universe of named elements.
class MembershipFunction {
public:
    MembershipFunction(std::vector<std::string> universe, Eigen::VectorXd grades);

    const std::vector<std::string>& universe() const { return universe_; }
    const Eigen::VectorXd& grades() const { return grades_; }
    double grade(const std::string& element) const;

    /// Elements with grade > 0.
    std::vector<std::string> support() const;
    /// Elements with grade exactly 1.
    std::vector<std::string> kernel() const;

private:
    std::vector<std::string> universe_;
    Eigen::VectorXd grades_;
};

/// Two-valued membership: grade 1 on `subset`, 0 elsewhere.
MembershipFunction indicator(const std::vector<std::string>& universe,
                             const std::vector<std::string>& subset);

/// Matrix with entries in [0, 1] under the max/min operations.
class FuzzyMatrix {
public:
    FuzzyMatrix(Eigen::Index rows, Eigen::Index cols);  // all zeros
    explicit FuzzyMatrix(Eigen::MatrixXd entries);

    static FuzzyMatrix identity(Eigen::Index n);

    Eigen::Index rows() const { return entries_.rows(); }
    Eigen::Index cols() const { return entries_.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    const Eigen::MatrixXd& entries() const { return entries_; }

    FuzzyMatrix transpose() const;

    bool operator==(const FuzzyMatrix& other) const;

private:
    Eigen::MatrixXd entries_;
};

/// A + B = entrywise max.
FuzzyMatrix fmat_add(const FuzzyMatrix& a, const FuzzyMatrix& b);

/// kA = entrywise min with k, k in [0, 1].
FuzzyMatrix fmat_scale(double k, const FuzzyMatrix& a);

/// Max-min composition: (AB)_ij = max_k min(a_ik, b_kj).
FuzzyMatrix fmat_mul(const FuzzyMatrix& a, const FuzzyMatrix& b);

/// Max-min action on a fuzzy coordinate vector: (Tx)_i = max_k min(t_ik, x_k).
Eigen::VectorXd fmat_apply(const FuzzyMatrix& t, const Eigen::VectorXd& x);

/// Symmetric matrix of basis-pair inner products a_ij = (e_i, e_j).
class MetricMatrix {
public:
    explicit MetricMatrix(FuzzyMatrix matrix);

    static MetricMatrix identity(Eigen::Index n);

    Eigen::Index dim() const { return matrix_.rows(); }
    const FuzzyMatrix& matrix() const { return matrix_; }

private:
    FuzzyMatrix matrix_;
};

/// (u, v) = max_{i,j} min(x_i, a_ij, y_j) for coordinate vectors x, y.
double fuzzy_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const MetricMatrix& metric);

/// Metric under the new basis: B = C^T A C in the max-min algebra.
MetricMatrix change_of_basis(const MetricMatrix& metric_a, const FuzzyMatrix& c);

inline constexpr std::uint64_t kProbeSeed = 0x5eed5eedull;

/// True iff <T(x), y> = <x, T*(y)> on a full basis-pair sweep plus
/// `probe_count` random fuzzy vector pairs. The metric defaults to the
/// identity; comparisons are exact.
bool adjoint_check(const FuzzyMatrix& t, const FuzzyMatrix& t_star, int probe_count,
                   const std::optional<MetricMatrix>& metric = std::nullopt,
                   std::uint64_t seed = kProbeSeed);

/// True iff T(A + B) = T(A) + T(B) and T(kA) = kT(A) on random matrix
/// probes, with T acting by max-min composition.
bool linearity_check(const FuzzyMatrix& t, int probe_count, std::uint64_t seed = kProbeSeed);

// Plain-text matrix file: first line "rows cols", then row-major
// whitespace-separated decimals in [0, 1].
FuzzyMatrix read_fuzzy_matrix(std::istream& in);
FuzzyMatrix load_fuzzy_matrix(const std::string& path);
void write_fuzzy_matrix(std::ostream& out, const FuzzyMatrix& m);
void save_fuzzy_matrix(const std::string& path, const FuzzyMatrix& m);

}  // namespace fqmsim
