#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <complex>
#include <string>

#include "qbrel/error.hpp"

namespace qbrel {

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-10;

/// Upper bound on the number of qubits for dense 2^N x 2^N operators.
struct Limits {
    int max_qubits = 14;
};

inline void check_qubit_count(int n_qubits, const Limits& limits = {}) {
    if (n_qubits < 1) {
        throw ConfigError("number of qubits must be >= 1, got " + std::to_string(n_qubits));
    }
    if (n_qubits > limits.max_qubits) {
        throw ResourceCapError("2^" + std::to_string(n_qubits) + " exceeds the dense dimension cap 2^" +
                               std::to_string(limits.max_qubits));
    }
}

inline double max_abs_entry(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |H_rc - conj(H_cr)|, walked in tiles so neither operand is strided
/// across the whole matrix and no temporary is formed.
inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
    constexpr Index tile = 64;
    const Index d = m.rows();
    double worst = 0.0;
    for (Index c0 = 0; c0 < d; c0 += tile) {
        for (Index r0 = 0; r0 <= c0; r0 += tile) {
            const Index c1 = std::min(d, c0 + tile), r1 = std::min(d, r0 + tile);
            for (Index c = c0; c < c1; ++c) {
                for (Index r = r0; r < std::min(r1, c + 1); ++r) {
                    worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
                }
            }
        }
    }
    return worst;
}

/// Dense Hermitian matrix on the 2^N dimensional space of N qubits.
///
/// Hermiticity is enforced on construction (max-entry deviation <= 1e-10).
/// Basis ordering: site 0 is the most significant bit of the basis index, and
/// bit value 0 is the sigma_z = +1 state |0>.
class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(Eigen::MatrixXcd matrix, double tolerance = kHermitianTolerance)
        : matrix_(std::move(matrix)) {
        const Index d = matrix_.rows();
        if (d != matrix_.cols() || d < 1 || !std::has_single_bit(static_cast<unsigned long long>(d))) {
            throw DimensionError("operator dimension must be a square power of two, got " +
                                 std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()));
        }
        const double deviation = hermiticity_defect(matrix_);
        if (!(deviation <= tolerance)) {
            throw NumericalError("operator is not Hermitian: max |H - H^dag| = " + std::to_string(deviation));
        }
    }

    static HermitianOperator diagonal(const Eigen::VectorXd& diag) {
        if (diag.size() < 1 || !std::has_single_bit(static_cast<unsigned long long>(diag.size()))) {
            throw DimensionError("operator dimension must be a power of two, got " + std::to_string(diag.size()));
        }
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(diag.size(), diag.size());
        m.diagonal() = diag.cast<Complex>();
        return HermitianOperator(trusted{}, std::move(m));
    }

    static HermitianOperator identity(int n_qubits) {
        const Index d = Index{1} << n_qubits;
        return HermitianOperator(Eigen::MatrixXcd::Identity(d, d));
    }

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Index dim() const { return matrix_.rows(); }
    int n_qubits() const { return std::countr_zero(static_cast<unsigned long long>(dim())); }

    bool is_diagonal() const {
        for (Index c = 0; c < dim(); ++c) {
            for (Index r = 0; r < dim(); ++r) {
                if (r != c && matrix_(r, c) != Complex{0.0, 0.0}) return false;
            }
        }
        return true;
    }

    bool is_real() const { return (matrix_.imag().array() == 0.0).all(); }

    Eigen::VectorXd real_diagonal() const { return matrix_.diagonal().real(); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        if (v.size() != dim()) throw DimensionError("operator/vector dimension mismatch");
        return matrix_ * v;
    }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        check_same_dim(a, b);
        return HermitianOperator(trusted{}, a.matrix_ + b.matrix_);
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        check_same_dim(a, b);
        return HermitianOperator(trusted{}, a.matrix_ - b.matrix_);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& a) {
        return HermitianOperator(trusted{}, s * a.matrix_);
    }

private:
    // Sums and real multiples of Hermitian operators need no re-validation.
    struct trusted {};
    HermitianOperator(trusted, Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {}

    static void check_same_dim(const HermitianOperator& a, const HermitianOperator& b) {
        if (a.dim() != b.dim()) throw DimensionError("operator dimension mismatch");
    }

    Eigen::MatrixXcd matrix_;
};

}  // namespace qbrel
