#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "qbrel/spectral.hpp"

namespace qbrel {

inline constexpr double kNormTolerance = 1e-10;

/// Normalized pure state on 2^N amplitudes.
class StateVector {
public:
    StateVector() = default;

    explicit StateVector(Eigen::VectorXcd amplitudes, double tolerance = kNormTolerance)
        : amplitudes_(std::move(amplitudes)) {
        const double n = amplitudes_.norm();
        if (!(std::abs(n - 1.0) <= tolerance)) {
            throw NumericalError("state vector is not normalized: |psi| = " + std::to_string(n));
        }
    }

    /// Computational basis state |index>.
    static StateVector basis(Index dim, Index index) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(index) = 1.0;
        return StateVector(std::move(v));
    }

    /// |0>^N, the discharged battery.
    static StateVector ground(int n_qubits) { return basis(Index{1} << n_qubits, 0); }

    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    Index dim() const { return amplitudes_.size(); }

private:
    Eigen::VectorXcd amplitudes_;
};

/// Uniform samples t_j = t_final * j / (steps - 1), j = 0 .. steps-1.
class TimeGrid {
public:
    TimeGrid(double t_final, int steps) : t_final_(t_final), steps_(steps) {
        if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("time grid needs t_final > 0");
        if (steps < 2) throw ConfigError("time grid needs at least 2 points");
    }

    double t_final() const { return t_final_; }
    int steps() const { return steps_; }
    double spacing() const { return t_final_ / (steps_ - 1); }
    double at(int j) const { return j == steps_ - 1 ? t_final_ : spacing() * j; }

    std::vector<double> points() const {
        std::vector<double> p(static_cast<std::size_t>(steps_));
        for (int j = 0; j < steps_; ++j) p[static_cast<std::size_t>(j)] = at(j);
        return p;
    }

    /// Same interval with `factor` sub-intervals per original interval.
    TimeGrid refined(int factor) const { return TimeGrid(t_final_, (steps_ - 1) * factor + 1); }

private:
    double t_final_;
    int steps_;
};

inline constexpr double kDegeneracyTolerance = 1e-9;

/// Spectral projectors Pi_i of an observable O = sum_i o_i Pi_i, one per
/// distinct eigenvalue. Each projector is kept implicitly as the group of
/// eigenvectors (modal indices of `spectrum`) spanning its range.
class ProjectorFamily {
public:
    ProjectorFamily() = default;

    /// `groups` must partition the modal indices of `spectrum`; otherwise the
    /// projectors do not sum to the identity.
    ProjectorFamily(std::shared_ptr<const SpectralDecomposition> spectrum, std::vector<double> values,
                    std::vector<std::vector<Index>> groups)
        : spectrum_(std::move(spectrum)), values_(std::move(values)), groups_(std::move(groups)) {
        if (values_.size() != groups_.size()) throw DimensionError("projector family: values/groups size mismatch");
        std::vector<char> used(static_cast<std::size_t>(spectrum_->dim()), 0);
        Index count = 0;
        for (const auto& g : groups_) {
            if (g.empty()) throw NumericalError("projector family: empty projector");
            for (Index m : g) {
                if (m < 0 || m >= spectrum_->dim() || used[static_cast<std::size_t>(m)]) {
                    throw NumericalError("projector family: projectors overlap or are out of range");
                }
                used[static_cast<std::size_t>(m)] = 1;
                ++count;
            }
        }
        if (count != spectrum_->dim()) throw NumericalError("incomplete projector family: ranks sum to " +
                                                            std::to_string(count) + " of " +
                                                            std::to_string(spectrum_->dim()));
    }

    std::size_t size() const { return groups_.size(); }
    Index dim() const { return spectrum_->dim(); }
    const std::vector<double>& distinct_values() const { return values_; }
    const std::vector<std::vector<Index>>& groups() const { return groups_; }
    const SpectralDecomposition& spectrum() const { return *spectrum_; }

    /// Dense Pi_i.
    Eigen::MatrixXcd projector(std::size_t i) const {
        const Eigen::MatrixXcd v = spectrum_->modal_vectors();
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim(), dim());
        for (Index m : groups_.at(i)) p.noalias() += v.col(m) * v.col(m).adjoint();
        return p;
    }

    /// Sums |c_m|^2 of modal coefficients over each projector.
    Eigen::VectorXd group_weights(const Eigen::VectorXcd& modal) const {
        Eigen::VectorXd p(static_cast<Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 0.0;
            for (Index m : groups_[i]) s += std::norm(modal(m));
            p(static_cast<Index>(i)) = s;
        }
        return p;
    }

private:
    std::shared_ptr<const SpectralDecomposition> spectrum_;
    std::vector<double> values_;
    std::vector<std::vector<Index>> groups_;
};

/// Groups eigenvalues of `spectrum` that agree within `relative_tolerance`
/// times the spectral range (chained along the sorted spectrum).
inline ProjectorFamily make_projector_family(SpectralDecomposition spectrum,
                                             double relative_tolerance = kDegeneracyTolerance) {
    auto shared = std::make_shared<const SpectralDecomposition>(std::move(spectrum));
    const auto& order = shared->ascending_order();
    const auto& lam = shared->modal_eigenvalues();
    const double range = shared->max_eigenvalue() - shared->min_eigenvalue();
    const double tol = relative_tolerance * std::max(range, std::abs(shared->max_eigenvalue()) + 1e-300);

    std::vector<double> values;
    std::vector<std::vector<Index>> groups;
    double last = 0.0;
    for (Index m : order) {
        if (groups.empty() || lam(m) - last > tol) {
            groups.emplace_back();
            values.push_back(0.0);
        }
        groups.back().push_back(m);
        last = lam(m);
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double s = 0.0;
        for (Index m : groups[i]) s += lam(m);
        values[i] = s / static_cast<double>(groups[i].size());
    }
    return ProjectorFamily(std::move(shared), std::move(values), std::move(groups));
}

inline ProjectorFamily make_projector_family(const HermitianOperator& observable,
                                             double relative_tolerance = kDegeneracyTolerance) {
    return make_projector_family(spectral_decompose(observable), relative_tolerance);
}

/// psi_t = V e^{-i Lambda t} V^dag psi_0.
inline StateVector evolve_state(const SpectralDecomposition& spec, const StateVector& psi0, double t) {
    if (psi0.dim() != spec.dim()) throw DimensionError("evolve_state: dimension mismatch");
    if (!(t >= 0.0)) throw ConfigError("evolve_state: t must be >= 0");
    return StateVector(spec.propagate(psi0.amplitudes(), t));
}

/// O_t = U_t^dag O_0 U_t.
inline HermitianOperator heisenberg_observable(const SpectralDecomposition& spec, const HermitianOperator& o0,
                                               double t) {
    if (o0.dim() != spec.dim()) throw DimensionError("heisenberg_observable: dimension mismatch");
    const Eigen::MatrixXcd u = spec.unitary(t);
    Eigen::MatrixXcd ot = u.adjoint() * o0.matrix() * u;
    ot = 0.5 * (ot + ot.adjoint()).eval();
    return HermitianOperator(std::move(ot));
}

inline constexpr double kProbabilityTolerance = 1e-9;

/// p_i = <psi|Pi_i|psi>, one entry per distinct eigenvalue.
inline Eigen::VectorXd projective_probabilities(const ProjectorFamily& family, const StateVector& psi) {
    if (psi.dim() != family.dim()) throw DimensionError("projective_probabilities: dimension mismatch");
    Eigen::VectorXd p = family.group_weights(family.spectrum().to_modal(psi.amplitudes()));
    if (!(std::abs(p.sum() - 1.0) <= kProbabilityTolerance)) {
        throw NumericalError("projective probabilities do not sum to one: " + std::to_string(p.sum()));
    }
    return p;
}

/// |<psi0|psi_t>|^2.
inline double fidelity(const StateVector& psi0, const StateVector& psi_t) {
    if (psi0.dim() != psi_t.dim()) throw DimensionError("fidelity: dimension mismatch");
    return std::min(1.0, std::norm(psi0.amplitudes().dot(psi_t.amplitudes())));
}

}  // namespace qbrel
