#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fqmsim {

using Complex = std::complex<double>;

// Tolerance for equality-type comparisons on amplitudes and matrix entries.
inline constexpr double kTol = 1e-12;
// Eigenvalue nonnegativity gets extra slack for accumulated rounding.
inline constexpr double kEigenvalueTol = 1e-10;

/// Complex amplitude vector over a finite labeled basis. Amplitudes are
/// stored as given; `normalized()` returns a unit-norm copy.
class Ket {
public:
    explicit Ket(Eigen::VectorXcd amplitudes,
                 std::optional<std::vector<std::string>> labels = std::nullopt);

    /// Computational basis state |index> of the given dimension.
    static Ket basis(Eigen::Index dim, Eigen::Index index);

    Eigen::Index dim() const { return amplitudes_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    const std::optional<std::vector<std::string>>& labels() const { return labels_; }

    double norm() const { return amplitudes_.norm(); }
    double squared_norm() const { return amplitudes_.squaredNorm(); }
    bool is_normalized(double tol = kTol) const;
    Ket normalized() const;

private:
    Eigen::VectorXcd amplitudes_;
    std::optional<std::vector<std::string>> labels_;
};

/// Ket over a tensor-product space with per-subsystem dimensions.
///
/// Index convention (fixed): amplitudes are row-major over the factors in
/// declared order, so the FIRST factor varies SLOWEST. For factor indices
/// (i_0, ..., i_{F-1}) the flat index is ((i_0 * d_1 + i_1) * d_2 + i_2)...
class CompositeKet {
public:
    CompositeKet(std::vector<Eigen::Index> factor_dims, Eigen::VectorXcd amplitudes,
                 std::vector<std::string> subsystem_names = {});

    Eigen::Index dim() const { return amplitudes_.size(); }
    const std::vector<Eigen::Index>& factor_dims() const { return factor_dims_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    const std::vector<std::string>& subsystem_names() const { return subsystem_names_; }

    /// Flat index of a multi-index under the row-major convention above.
    Eigen::Index flatten(std::span<const Eigen::Index> indices) const;

    double norm() const { return amplitudes_.norm(); }
    double squared_norm() const { return amplitudes_.squaredNorm(); }
    bool is_normalized(double tol = kTol) const;
    CompositeKet normalized() const;

private:
    std::vector<Eigen::Index> factor_dims_;
    Eigen::VectorXcd amplitudes_;
    std::vector<std::string> subsystem_names_;
};

/// Square complex matrix acting on a single state space.
class Operator {
public:
    explicit Operator(Eigen::MatrixXcd entries);

    static Operator identity(Eigen::Index dim);

    Eigen::Index dim() const { return entries_.rows(); }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    bool is_hermitian(double tol = kTol) const;

private:
    Eigen::MatrixXcd entries_;
};

/// Hermitian, trace-1, positive-semidefinite matrix. All three conditions
/// are validated on construction (Hermiticity and trace within 1e-12,
/// eigenvalues >= -1e-10).
class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Eigen::MatrixXcd& entries() const { return entries_; }

private:
    Eigen::MatrixXcd entries_;
};

/// Tensor product a (x) b. Bilinear in both arguments; the result is
/// normalized exactly when both inputs are.
CompositeKet tensor(const Ket& a, const Ket& b);

/// <a|b> = sum_k conj(a_k) b_k.
Complex overlap(const Ket& a, const Ket& b);

/// rho = |psi><psi|. Requires a normalized input.
DensityMatrix density_from_ket(const CompositeKet& psi);
DensityMatrix density_from_ket(const Ket& psi);

/// Contract one tensor factor out of rho. `factor_dims` must multiply out
/// to rho's dimension; the result lives on the remaining factors in order.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const Eigen::Index> factor_dims,
                            std::size_t traced_factor);

/// AB - BA.
Operator commutator(const Operator& a, const Operator& b);

}  // namespace fqmsim
