#include "fqmsim/hilbert.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace fqmsim {

namespace {

std::string dim_mismatch(const std::string& what, Eigen::Index a, Eigen::Index b) {
    return what + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")";
}

}  // namespace

Ket::Ket(Eigen::VectorXcd amplitudes, std::optional<std::vector<std::string>> labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(labels)) {
    if (amplitudes_.size() < 1) {
        throw std::invalid_argument("Ket: dimension must be >= 1");
    }
    if (labels_) {
        if (static_cast<Eigen::Index>(labels_->size()) != amplitudes_.size()) {
            throw std::invalid_argument(
                dim_mismatch("Ket labels", static_cast<Eigen::Index>(labels_->size()),
                             amplitudes_.size()));
        }
        std::set<std::string> seen(labels_->begin(), labels_->end());
        if (seen.size() != labels_->size()) {
            throw std::invalid_argument("Ket: basis labels must be unique");
        }
    }
}

Ket Ket::basis(Eigen::Index dim, Eigen::Index index) {
    if (index < 0 || index >= dim) {
        throw std::invalid_argument("Ket::basis: index " + std::to_string(index) +
                                    " outside dimension " + std::to_string(dim));
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
    amps(index) = Complex(1.0, 0.0);
    return Ket(std::move(amps));
}

bool Ket::is_normalized(double tol) const {
    return std::abs(squared_norm() - 1.0) <= tol;
}

Ket Ket::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw std::invalid_argument("Ket::normalized: zero vector");
    }
    return Ket(amplitudes_ / n, labels_);
}

CompositeKet::CompositeKet(std::vector<Eigen::Index> factor_dims, Eigen::VectorXcd amplitudes,
                           std::vector<std::string> subsystem_names)
    : factor_dims_(std::move(factor_dims)),
      amplitudes_(std::move(amplitudes)),
      subsystem_names_(std::move(subsystem_names)) {
    if (factor_dims_.empty()) {
        throw std::invalid_argument("CompositeKet: at least one factor required");
    }
    Eigen::Index product = 1;
    for (Eigen::Index d : factor_dims_) {
        if (d < 1) {
            throw std::invalid_argument("CompositeKet: factor dimensions must be >= 1");
        }
        product *= d;
    }
    if (amplitudes_.size() != product) {
        throw std::invalid_argument(
            dim_mismatch("CompositeKet amplitudes", amplitudes_.size(), product));
    }
    if (!subsystem_names_.empty() && subsystem_names_.size() != factor_dims_.size()) {
        throw std::invalid_argument("CompositeKet: one subsystem name per factor");
    }
}

Eigen::Index CompositeKet::flatten(std::span<const Eigen::Index> indices) const {
    if (indices.size() != factor_dims_.size()) {
        throw std::invalid_argument("CompositeKet::flatten: one index per factor");
    }
    Eigen::Index flat = 0;
    for (std::size_t f = 0; f < factor_dims_.size(); ++f) {
        if (indices[f] < 0 || indices[f] >= factor_dims_[f]) {
            throw std::invalid_argument("CompositeKet::flatten: index out of range for factor " +
                                        std::to_string(f));
        }
        flat = flat * factor_dims_[f] + indices[f];
    }
    return flat;
}

bool CompositeKet::is_normalized(double tol) const {
    return std::abs(squared_norm() - 1.0) <= tol;
}

CompositeKet CompositeKet::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw std::invalid_argument("CompositeKet::normalized: zero vector");
    }
    return CompositeKet(factor_dims_, amplitudes_ / n, subsystem_names_);
}

Operator::Operator(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("Operator: entries must form a nonempty square matrix");
    }
}

Operator Operator::identity(Eigen::Index dim) {
    return Operator(Eigen::MatrixXcd::Identity(dim, dim));
}

bool Operator::is_hermitian(double tol) const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("DensityMatrix: entries must form a nonempty square matrix");
    }
    const double herm_defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > kTol) {
        throw std::invalid_argument("DensityMatrix: not Hermitian (defect " +
                                    std::to_string(herm_defect) + ")");
    }
    const double trace_defect = std::abs(entries_.trace() - Complex(1.0, 0.0));
    if (trace_defect > kTol) {
        throw std::invalid_argument("DensityMatrix: trace differs from 1 by " +
                                    std::to_string(trace_defect));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kEigenvalueTol) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(solver.eigenvalues().minCoeff()));
    }
}

CompositeKet tensor(const Ket& a, const Ket& b) {
    Eigen::VectorXcd amps(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        for (Eigen::Index j = 0; j < b.dim(); ++j) {
            amps(i * b.dim() + j) = a.amplitudes()(i) * b.amplitudes()(j);
        }
    }
    return CompositeKet({a.dim(), b.dim()}, std::move(amps));
}

Complex overlap(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(dim_mismatch("overlap", a.dim(), b.dim()));
    }
    return a.amplitudes().dot(b.amplitudes());
}

namespace {

DensityMatrix pure_density(const Eigen::VectorXcd& amps) {
    if (std::abs(amps.squaredNorm() - 1.0) > kTol) {
        throw std::invalid_argument("density_from_ket: input not normalized (squared norm " +
                                    std::to_string(amps.squaredNorm()) + ")");
    }
    return DensityMatrix(amps * amps.adjoint());
}

}  // namespace

DensityMatrix density_from_ket(const CompositeKet& psi) { return pure_density(psi.amplitudes()); }

DensityMatrix density_from_ket(const Ket& psi) { return pure_density(psi.amplitudes()); }

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const Eigen::Index> factor_dims,
                            std::size_t traced_factor) {
    if (traced_factor >= factor_dims.size()) {
        throw std::invalid_argument("partial_trace: traced factor " +
                                    std::to_string(traced_factor) + " out of range");
    }
    Eigen::Index product = 1;
    for (Eigen::Index d : factor_dims) {
        product *= d;
    }
    if (product != rho.dim()) {
        throw std::invalid_argument("partial_trace: factor dimensions multiply to " +
                                    std::to_string(product) + " but rho has dimension " +
                                    std::to_string(rho.dim()));
    }

    Eigen::Index pre = 1, post = 1;
    for (std::size_t f = 0; f < factor_dims.size(); ++f) {
        if (f < traced_factor) {
            pre *= factor_dims[f];
        } else if (f > traced_factor) {
            post *= factor_dims[f];
        }
    }
    const Eigen::Index traced_dim = factor_dims[traced_factor];
    const Eigen::Index reduced = pre * post;

    // Flat index of (p, t, q) is (p * traced_dim + t) * post + q.
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(reduced, reduced);
    for (Eigen::Index pr = 0; pr < pre; ++pr) {
        for (Eigen::Index qr = 0; qr < post; ++qr) {
            for (Eigen::Index pc = 0; pc < pre; ++pc) {
                for (Eigen::Index qc = 0; qc < post; ++qc) {
                    Complex sum(0.0, 0.0);
                    for (Eigen::Index t = 0; t < traced_dim; ++t) {
                        const Eigen::Index row = (pr * traced_dim + t) * post + qr;
                        const Eigen::Index col = (pc * traced_dim + t) * post + qc;
                        sum += rho.entries()(row, col);
                    }
                    out(pr * post + qr, pc * post + qc) = sum;
                }
            }
        }
    }
    return DensityMatrix(std::move(out));
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(dim_mismatch("commutator", a.dim(), b.dim()));
    }
    return Operator(a.entries() * b.entries() - b.entries() * a.entries());
}

}  // namespace fqmsim
