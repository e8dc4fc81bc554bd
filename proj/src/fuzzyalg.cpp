#include "fqmsim/fuzzyalg.hpp"

#include "fqmsim/random.hpp"
#include "num_format.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fqmsim {

namespace {

void check_unit_interval(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(what + " must lie in [0, 1], got " + format_double(v));
    }
}

void check_unit_vector(const Eigen::VectorXd& v, const std::string& what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        check_unit_interval(v(i), what + " entry " + std::to_string(i));
    }
}

std::string shape(const FuzzyMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

MembershipFunction::MembershipFunction(std::vector<std::string> universe, Eigen::VectorXd grades)
    : universe_(std::move(universe)), grades_(std::move(grades)) {
    if (universe_.empty()) {
        throw std::invalid_argument("MembershipFunction: universe must be nonempty");
    }
    if (static_cast<Eigen::Index>(universe_.size()) != grades_.size()) {
        throw std::invalid_argument("MembershipFunction: one grade per universe element");
    }
    std::set<std::string> seen(universe_.begin(), universe_.end());
    if (seen.size() != universe_.size()) {
        throw std::invalid_argument("MembershipFunction: universe elements must be unique");
    }
    check_unit_vector(grades_, "MembershipFunction grade");
}

double MembershipFunction::grade(const std::string& element) const {
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        if (universe_[i] == element) {
            return grades_(static_cast<Eigen::Index>(i));
        }
    }
    throw std::invalid_argument("MembershipFunction: unknown element '" + element + "'");
}

std::vector<std::string> MembershipFunction::support() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        if (grades_(static_cast<Eigen::Index>(i)) > 0.0) {
            out.push_back(universe_[i]);
        }
    }
    return out;
}

std::vector<std::string> MembershipFunction::kernel() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
        if (grades_(static_cast<Eigen::Index>(i)) == 1.0) {
            out.push_back(universe_[i]);
        }
    }
    return out;
}

MembershipFunction indicator(const std::vector<std::string>& universe,
                             const std::vector<std::string>& subset) {
    Eigen::VectorXd grades = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(universe.size()));
    for (const auto& element : subset) {
        auto it = std::find(universe.begin(), universe.end(), element);
        if (it == universe.end()) {
            throw std::invalid_argument("indicator: element '" + element +
                                        "' not in the universe");
        }
        grades(static_cast<Eigen::Index>(it - universe.begin())) = 1.0;
    }
    return MembershipFunction(universe, std::move(grades));
}

FuzzyMatrix::FuzzyMatrix(Eigen::Index rows, Eigen::Index cols)
    : entries_(Eigen::MatrixXd::Zero(rows, cols)) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("FuzzyMatrix: dimensions must be >= 1");
    }
}

FuzzyMatrix::FuzzyMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
        throw std::invalid_argument("FuzzyMatrix: dimensions must be >= 1");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
            check_unit_interval(entries_(i, j), "FuzzyMatrix entry (" + std::to_string(i) + ", " +
                                                    std::to_string(j) + ")");
        }
    }
}

FuzzyMatrix FuzzyMatrix::identity(Eigen::Index n) {
    return FuzzyMatrix(Eigen::MatrixXd::Identity(n, n));
}

FuzzyMatrix FuzzyMatrix::transpose() const { return FuzzyMatrix(entries_.transpose()); }

bool FuzzyMatrix::operator==(const FuzzyMatrix& other) const {
    return entries_.rows() == other.entries_.rows() &&
           entries_.cols() == other.entries_.cols() && entries_ == other.entries_;
}

FuzzyMatrix fmat_add(const FuzzyMatrix& a, const FuzzyMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("fmat_add: shape mismatch (" + shape(a) + " vs " + shape(b) +
                                    ")");
    }
    return FuzzyMatrix(a.entries().cwiseMax(b.entries()));
}

FuzzyMatrix fmat_scale(double k, const FuzzyMatrix& a) {
    check_unit_interval(k, "fmat_scale: scalar");
    return FuzzyMatrix(a.entries().cwiseMin(k));
}

FuzzyMatrix fmat_mul(const FuzzyMatrix& a, const FuzzyMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("fmat_mul: shape mismatch (" + shape(a) + " times " +
                                    shape(b) + ")");
    }
    Eigen::MatrixXd out(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double acc = std::min(a(i, 0), b(0, j));
            for (Eigen::Index k = 1; k < a.cols(); ++k) {
                acc = std::max(acc, std::min(a(i, k), b(k, j)));
            }
            out(i, j) = acc;
        }
    }
    return FuzzyMatrix(std::move(out));
}

Eigen::VectorXd fmat_apply(const FuzzyMatrix& t, const Eigen::VectorXd& x) {
    if (t.cols() != x.size()) {
        throw std::invalid_argument("fmat_apply: matrix has " + std::to_string(t.cols()) +
                                    " columns but vector has " + std::to_string(x.size()));
    }
    check_unit_vector(x, "fmat_apply: vector");
    Eigen::VectorXd out(t.rows());
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        double acc = std::min(t(i, 0), x(0));
        for (Eigen::Index k = 1; k < t.cols(); ++k) {
            acc = std::max(acc, std::min(t(i, k), x(k)));
        }
        out(i) = acc;
    }
    return out;
}

MetricMatrix::MetricMatrix(FuzzyMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw std::invalid_argument("MetricMatrix: must be square, got " + shape(matrix_));
    }
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j) {
            if (matrix_(i, j) != matrix_(j, i)) {
                throw std::invalid_argument("MetricMatrix: not symmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

MetricMatrix MetricMatrix::identity(Eigen::Index n) {
    return MetricMatrix(FuzzyMatrix::identity(n));
}

double fuzzy_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const MetricMatrix& metric) {
    const Eigen::Index n = metric.dim();
    if (x.size() != n || y.size() != n) {
        throw std::invalid_argument("fuzzy_inner: coordinate lengths " + std::to_string(x.size()) +
                                    ", " + std::to_string(y.size()) + " do not match metric of " +
                                    std::to_string(n));
    }
    check_unit_vector(x, "fuzzy_inner: x");
    check_unit_vector(y, "fuzzy_inner: y");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            acc = std::max(acc, std::min({x(i), metric.matrix()(i, j), y(j)}));
        }
    }
    return acc;
}

MetricMatrix change_of_basis(const MetricMatrix& metric_a, const FuzzyMatrix& c) {
    if (c.rows() != c.cols() || c.rows() != metric_a.dim()) {
        throw std::invalid_argument("change_of_basis: transition matrix must be " +
                                    std::to_string(metric_a.dim()) + " square, got " + shape(c));
    }
    return MetricMatrix(fmat_mul(fmat_mul(c.transpose(), metric_a.matrix()), c));
}

namespace {

Eigen::VectorXd random_fuzzy_vector(std::mt19937_64& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = uniform_unit(rng);
    }
    return v;
}

Eigen::VectorXd basis_vector(Eigen::Index n, Eigen::Index i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(i) = 1.0;
    return v;
}

}  // namespace

bool adjoint_check(const FuzzyMatrix& t, const FuzzyMatrix& t_star, int probe_count,
                   const std::optional<MetricMatrix>& metric, std::uint64_t seed) {
    if (t.rows() != t.cols() || t_star.rows() != t_star.cols() || t.rows() != t_star.rows()) {
        throw std::invalid_argument("adjoint_check: operators must be square of equal dimension");
    }
    const Eigen::Index n = t.rows();
    const MetricMatrix m = metric ? *metric : MetricMatrix::identity(n);
    if (m.dim() != n) {
        throw std::invalid_argument("adjoint_check: metric dimension " + std::to_string(m.dim()) +
                                    " does not match operator dimension " + std::to_string(n));
    }

    auto agrees = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return fuzzy_inner(fmat_apply(t, x), y, m) == fuzzy_inner(x, fmat_apply(t_star, y), m);
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!agrees(basis_vector(n, i), basis_vector(n, j))) {
                return false;
            }
        }
    }
    std::mt19937_64 rng(seed);
    for (int p = 0; p < probe_count; ++p) {
        if (!agrees(random_fuzzy_vector(rng, n), random_fuzzy_vector(rng, n))) {
            return false;
        }
    }
    return true;
}

bool linearity_check(const FuzzyMatrix& t, int probe_count, std::uint64_t seed) {
    if (t.rows() != t.cols()) {
        throw std::invalid_argument("linearity_check: operator must be square");
    }
    const Eigen::Index n = t.rows();
    std::mt19937_64 rng(seed);
    auto random_matrix = [&]() {
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                m(i, j) = uniform_unit(rng);
            }
        }
        return FuzzyMatrix(std::move(m));
    };

    for (int p = 0; p < probe_count; ++p) {
        const FuzzyMatrix a = random_matrix();
        const FuzzyMatrix b = random_matrix();
        const double k = uniform_unit(rng);
        if (!(fmat_mul(t, fmat_add(a, b)) == fmat_add(fmat_mul(t, a), fmat_mul(t, b)))) {
            return false;
        }
        if (!(fmat_mul(t, fmat_scale(k, a)) == fmat_scale(k, fmat_mul(t, a)))) {
            return false;
        }
    }
    return true;
}

FuzzyMatrix read_fuzzy_matrix(std::istream& in) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols)) {
        throw std::invalid_argument("fuzzy matrix file: expected header 'rows cols'");
    }
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("fuzzy matrix file: dimensions must be >= 1");
    }
    Eigen::MatrixXd entries(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> entries(i, j))) {
                throw std::invalid_argument("fuzzy matrix file: expected " +
                                            std::to_string(rows * cols) + " entries");
            }
        }
    }
    return FuzzyMatrix(std::move(entries));
}

FuzzyMatrix load_fuzzy_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file '" + path + "'");
    }
    try {
        return read_fuzzy_matrix(in);
    } catch (const std::invalid_argument& err) {
        throw std::invalid_argument(path + ": " + err.what());
    }
}

void write_fuzzy_matrix(std::ostream& out, const FuzzyMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j > 0 ? " " : "") << format_double(m(i, j));
        }
        out << '\n';
    }
}

void save_fuzzy_matrix(const std::string& path, const FuzzyMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write matrix file '" + path + "'");
    }
    write_fuzzy_matrix(out, m);
}

}  // namespace fqmsim
