#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "qbrel/hermitian.hpp"

namespace qbrel {

/// Eigenpairs of one invariant subspace spanned by the basis states `support`.
struct SpectralBlock {
    std::vector<Index> support;   // ascending global basis indices
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXcd vectors;     // support.size() x support.size(), orthonormal columns
};

/// Eigendecomposition H = V diag(lambda) V^dag stored block-wise.
///
/// Basis states that are not connected through nonzero matrix elements never
/// mix, so each connected component is diagonalized on its own and all
/// transforms cost sum(b_i^2) instead of d^2. "Modal" coordinates are the
/// eigenbasis coefficients laid out block after block.
class SpectralDecomposition {
public:
    SpectralDecomposition() = default;

    SpectralDecomposition(Index dim, std::vector<SpectralBlock> blocks) : dim_(dim), blocks_(std::move(blocks)) {
        std::vector<char> covered(static_cast<std::size_t>(dim_), 0);
        Index offset = 0;
        modal_eigenvalues_.resize(dim_);
        for (const auto& b : blocks_) {
            const auto n = static_cast<Index>(b.support.size());
            if (b.eigenvalues.size() != n || b.vectors.rows() != n || b.vectors.cols() != n) {
                throw DimensionError("spectral block shape mismatch");
            }
            for (Index i : b.support) {
                if (i < 0 || i >= dim_ || covered[static_cast<std::size_t>(i)]) {
                    throw DimensionError("spectral blocks do not partition the basis");
                }
                covered[static_cast<std::size_t>(i)] = 1;
            }
            offsets_.push_back(offset);
            if (offset + n > dim_) throw DimensionError("spectral blocks exceed dimension");
            modal_eigenvalues_.segment(offset, n) = b.eigenvalues;
            offset += n;
        }
        if (offset != dim_) throw DimensionError("spectral blocks do not cover the basis");
        ascending_.resize(static_cast<std::size_t>(dim_));
        std::iota(ascending_.begin(), ascending_.end(), Index{0});
        std::stable_sort(ascending_.begin(), ascending_.end(),
                         [&](Index a, Index b) { return modal_eigenvalues_(a) < modal_eigenvalues_(b); });
    }

    Index dim() const { return dim_; }
    const std::vector<SpectralBlock>& blocks() const { return blocks_; }
    Index block_offset(std::size_t b) const { return offsets_[b]; }

    /// Eigenvalues in modal (block-concatenated) order.
    const Eigen::VectorXd& modal_eigenvalues() const { return modal_eigenvalues_; }

    /// Modal indices sorted by ascending eigenvalue.
    const std::vector<Index>& ascending_order() const { return ascending_; }

    Eigen::VectorXd eigenvalues() const {
        Eigen::VectorXd out(dim_);
        for (Index i = 0; i < dim_; ++i) out(i) = modal_eigenvalues_(ascending_[static_cast<std::size_t>(i)]);
        return out;
    }

    double min_eigenvalue() const { return modal_eigenvalues_(ascending_.front()); }
    double max_eigenvalue() const { return modal_eigenvalues_(ascending_.back()); }

    /// Dense eigenvector matrix, columns ordered like eigenvalues().
    Eigen::MatrixXcd eigenvectors() const {
        const Eigen::MatrixXcd modal = modal_vectors();
        Eigen::MatrixXcd out(dim_, dim_);
        for (Index i = 0; i < dim_; ++i) out.col(i) = modal.col(ascending_[static_cast<std::size_t>(i)]);
        return out;
    }

    /// Dense eigenvector matrix with columns in modal order.
    Eigen::MatrixXcd modal_vectors() const {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto& blk = blocks_[b];
            const auto n = static_cast<Index>(blk.support.size());
            for (Index r = 0; r < n; ++r) v.row(blk.support[static_cast<std::size_t>(r)]).segment(offsets_[b], n) = blk.vectors.row(r);
        }
        return v;
    }

    /// Columns of x expressed in the eigenbasis: V^dag x.
    Eigen::MatrixXcd to_modal(const Eigen::MatrixXcd& x) const {
        check_rows(x.rows());
        Eigen::MatrixXcd c(dim_, x.cols());
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto& blk = blocks_[b];
            const auto n = static_cast<Index>(blk.support.size());
            if (n == 1) {
                c.row(offsets_[b]) = std::conj(blk.vectors(0, 0)) * x.row(blk.support[0]);
            } else {
                c.middleRows(offsets_[b], n).noalias() = blk.vectors.adjoint() * x(blk.support, Eigen::all);
            }
        }
        return c;
    }

    /// Inverse of to_modal: V c.
    Eigen::MatrixXcd from_modal(const Eigen::MatrixXcd& c) const {
        check_rows(c.rows());
        Eigen::MatrixXcd x(dim_, c.cols());
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto& blk = blocks_[b];
            const auto n = static_cast<Index>(blk.support.size());
            if (n == 1) {
                x.row(blk.support[0]) = blk.vectors(0, 0) * c.row(offsets_[b]);
            } else {
                x(blk.support, Eigen::all) = blk.vectors * c.middleRows(offsets_[b], n);
            }
        }
        return x;
    }

    Eigen::VectorXcd to_modal(const Eigen::VectorXcd& v) const {
        return to_modal(Eigen::MatrixXcd(v)).col(0);
    }
    Eigen::VectorXcd from_modal(const Eigen::VectorXcd& c) const {
        return from_modal(Eigen::MatrixXcd(c)).col(0);
    }

    /// Columns e^{-iHt_j} v, or H e^{-iHt_j} v when `with_generator` is set.
    Eigen::MatrixXcd propagate(const Eigen::VectorXcd& v, std::span<const double> times,
                               bool with_generator = false) const {
        const Eigen::VectorXcd c0 = to_modal(v);
        Eigen::MatrixXcd c(dim_, static_cast<Index>(times.size()));
        for (Index j = 0; j < c.cols(); ++j) {
            const double t = times[static_cast<std::size_t>(j)];
            for (Index m = 0; m < dim_; ++m) {
                const double lam = modal_eigenvalues_(m);
                Complex phase = std::polar(1.0, -lam * t);
                if (with_generator) phase *= lam;
                c(m, j) = phase * c0(m);
            }
        }
        return from_modal(c);
    }

    Eigen::VectorXcd propagate(const Eigen::VectorXcd& v, double t) const {
        const double times[] = {t};
        return propagate(v, times).col(0);
    }

    /// Dense e^{-iHt}.
    Eigen::MatrixXcd unitary(double t) const {
        const Eigen::MatrixXcd v = modal_vectors();
        Eigen::VectorXcd phases(dim_);
        for (Index m = 0; m < dim_; ++m) phases(m) = std::polar(1.0, -modal_eigenvalues_(m) * t);
        return v * phases.asDiagonal() * v.adjoint();
    }

    Eigen::MatrixXcd reconstruct() const {
        const Eigen::MatrixXcd v = modal_vectors();
        return v * modal_eigenvalues_.cast<Complex>().asDiagonal() * v.adjoint();
    }

    /// Spectrum of (H - shift) / scale with the same eigenvectors.
    SpectralDecomposition affine(double shift, double scale) const {
        std::vector<SpectralBlock> blocks = blocks_;
        for (auto& b : blocks) b.eigenvalues = (b.eigenvalues.array() - shift) / scale;
        return SpectralDecomposition(dim_, std::move(blocks));
    }

private:
    void check_rows(Index rows) const {
        if (rows != dim_) throw DimensionError("vector dimension does not match spectral decomposition");
    }

    Index dim_ = 0;
    std::vector<SpectralBlock> blocks_;
    std::vector<Index> offsets_;
    Eigen::VectorXd modal_eigenvalues_;
    std::vector<Index> ascending_;
};

namespace detail {

inline std::string fingerprint(const Eigen::MatrixXcd& a) {
    std::ostringstream os;
    os << "dim=" << a.rows() << " trace=" << a.trace() << " frobenius=" << a.norm();
    return os.str();
}

/// Dense Hermitian eigensolve (LAPACK divide and conquer); real input takes
/// the symmetric real path.
inline void dense_eigensolve(const Eigen::MatrixXcd& a, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    values.resize(n);
    lapack_int info = 0;
    if ((a.imag().array() == 0.0).all()) {
        Eigen::MatrixXd work = a.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, work.data(), n, values.data());
        vectors = work.cast<Complex>();
    } else {
        vectors = a;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, vectors.data(), n, values.data());
    }
    if (info != 0) {
        throw NumericalError("Hermitian eigensolver failed (info=" + std::to_string(info) + ") for " + fingerprint(a));
    }
}

}  // namespace detail

/// Spectral decomposition of a Hermitian operator. The basis is first split
/// into connected components of the nonzero pattern; each component is
/// diagonalized separately.
inline SpectralDecomposition spectral_decompose(const HermitianOperator& h) {
    const Eigen::MatrixXcd& m = h.matrix();
    const Index d = h.dim();

    std::vector<Index> parent(static_cast<std::size_t>(d));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    };
    for (Index c = 0; c < d; ++c) {
        for (Index r = 0; r < d; ++r) {
            if (r != c && m(r, c) != Complex{0.0, 0.0}) {
                const Index a = find(r), b = find(c);
                if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }

    std::vector<std::vector<Index>> components;
    std::vector<Index> slot(static_cast<std::size_t>(d), -1);
    for (Index i = 0; i < d; ++i) {
        const Index root = find(i);
        auto& s = slot[static_cast<std::size_t>(root)];
        if (s < 0) {
            s = static_cast<Index>(components.size());
            components.emplace_back();
        }
        components[static_cast<std::size_t>(s)].push_back(i);
    }

    std::vector<SpectralBlock> blocks;
    blocks.reserve(components.size());
    for (auto& support : components) {
        SpectralBlock blk;
        const auto n = static_cast<Index>(support.size());
        if (n == 1) {
            blk.eigenvalues = Eigen::VectorXd::Constant(1, m(support[0], support[0]).real());
            blk.vectors = Eigen::MatrixXcd::Identity(1, 1);
        } else {
            const Eigen::MatrixXcd sub = m(support, support);
            detail::dense_eigensolve(sub, blk.eigenvalues, blk.vectors);
        }
        blk.support = std::move(support);
        blocks.push_back(std::move(blk));
    }
    return SpectralDecomposition(d, std::move(blocks));
}

}  // namespace qbrel
