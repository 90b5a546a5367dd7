#pragma once

#include <cmath>
#include <complex>

#include "qbrel/dynamics.hpp"
#include "qbrel/flagged.hpp"

namespace qbrel {

inline constexpr double kImaginaryResidueTolerance = 1e-10;
inline constexpr double kVarianceClampTolerance = 1e-9;
inline constexpr double kZeroMeanRatio = 1e-12;

/// Mean and variance of a counted quantity (work or power) at one time.
struct MomentPair {
    double mean = 0.0;
    double variance = 0.0;
};

namespace detail {

inline double real_expectation(Complex value, double scale, const char* what) {
    if (!(std::abs(value.imag()) <= kImaginaryResidueTolerance * std::max(1.0, scale))) {
        throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(value.imag()) +
                             " (non-Hermitian input?)");
    }
    return value.real();
}

inline double clamp_variance(double variance, double second_moment) {
    if (variance >= 0.0) return variance;
    if (variance >= -kVarianceClampTolerance * std::max(1.0, second_moment)) return 0.0;
    throw NumericalError("negative variance " + std::to_string(variance));
}

inline void check_dims(const HermitianOperator& a, const HermitianOperator& b, const StateVector& psi) {
    if (a.dim() != b.dim() || a.dim() != psi.dim()) throw DimensionError("statistics: dimension mismatch");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dense (Heisenberg-operator) route

/// <O_t - O_0> in psi0.
inline double fcs_mean(const HermitianOperator& o0, const HermitianOperator& o_t, const StateVector& psi0) {
    detail::check_dims(o0, o_t, psi0);
    const Eigen::VectorXcd a = (o_t.matrix() - o0.matrix()) * psi0.amplitudes();
    return detail::real_expectation(psi0.amplitudes().dot(a), a.norm(), "fcs_mean");
}

/// <(O_t - O_0)^2> - <O_t - O_0>^2 in psi0.
inline double fcs_variance(const HermitianOperator& o0, const HermitianOperator& o_t, const StateVector& psi0) {
    detail::check_dims(o0, o_t, psi0);
    const Eigen::VectorXcd a = (o_t.matrix() - o0.matrix()) * psi0.amplitudes();
    const double mean = detail::real_expectation(psi0.amplitudes().dot(a), a.norm(), "fcs_variance");
    const double second = a.squaredNorm();
    return detail::clamp_variance(second - mean * mean, second);
}

inline MomentPair fcs_moments(const HermitianOperator& o0, const HermitianOperator& o_t, const StateVector& psi0) {
    return {fcs_mean(o0, o_t, psi0), fcs_variance(o0, o_t, psi0)};
}

/// Noise-to-signal ratio variance / mean^2; undefined when the mean vanishes.
inline Flagged<double> nsr(const MomentPair& m) {
    if (std::abs(m.mean) < kZeroMeanRatio * std::sqrt(m.variance + 1.0)) return Flagged<double>::flagged(Flag::undefined);
    return Flagged<double>::defined(m.variance / (m.mean * m.mean));
}

namespace detail {

inline Flagged<double> correlation_from(double mean_diff, double ot_mean, double ot_second, double o0_mean,
                                        double o0_second, double cross) {
    if (std::abs(mean_diff) < kZeroMeanRatio * std::sqrt(std::abs(ot_second) + 1.0)) {
        return Flagged<double>::flagged(Flag::undefined);
    }
    const double cov = cross - ot_mean * o0_mean;
    const double sd_t = std::sqrt(std::max(0.0, ot_second - ot_mean * ot_mean));
    const double sd_0 = std::sqrt(std::max(0.0, o0_second - o0_mean * o0_mean));
    return Flagged<double>::defined(2.0 * (cov + sd_t * sd_0) / (mean_diff * mean_diff));
}

}  // namespace detail

/// Temporal correlation f(O_0, O_t) = 2 (cov(O_t, O_0) + dO_t dO_0) / <O_t - O_0>^2,
/// with the symmetrized covariance (1/2)<{O_t, O_0}> - <O_t><O_0>.
inline Flagged<double> correlation_f(const HermitianOperator& o0, const HermitianOperator& o_t,
                                     const StateVector& psi0) {
    detail::check_dims(o0, o_t, psi0);
    const Eigen::VectorXcd& psi = psi0.amplitudes();
    const Eigen::VectorXcd a0 = o0.matrix() * psi;
    const Eigen::VectorXcd at = o_t.matrix() * psi;
    const double m0 = psi.dot(a0).real();
    const double mt = psi.dot(at).real();
    return detail::correlation_from(mt - m0, mt, at.squaredNorm(), m0, a0.squaredNorm(), at.dot(a0).real());
}

/// Terms of the work-power trade-off N_W N_P >= rhs.
struct TradeoffTerms {
    double commutator_term = 0.0;      // |<[P~, W~]>|^2
    double anticommutator_term = 0.0;  // |<{P~, W~}> - 2|^2
    double rhs = 0.0;                  // (commutator_term + anticommutator_term) / 4
    double lhs = 0.0;                  // N_W * N_P
    Flag flag = Flag::ok;

    bool ok() const { return flag == Flag::ok; }
    double slack() const { return lhs - rhs; }
};

namespace detail {

/// cross = <P psi0, W psi0> for the counting operators P = P_t - P_0, W = W_t - W_0.
inline TradeoffTerms tradeoff_from(const MomentPair& power, const MomentPair& work, Complex cross) {
    TradeoffTerms out;
    const auto np = nsr(power);
    const auto nw = nsr(work);
    if (!np.ok() || !nw.ok()) {
        out.flag = Flag::undefined;
        out.lhs = out.rhs = out.commutator_term = out.anticommutator_term = std::numeric_limits<double>::infinity();
        return out;
    }
    const Complex z = cross / (power.mean * work.mean);
    out.commutator_term = 4.0 * z.imag() * z.imag();
    const double anti = 2.0 * z.real() - 2.0;
    out.anticommutator_term = anti * anti;
    out.rhs = 0.25 * (out.commutator_term + out.anticommutator_term);
    out.lhs = np.value * nw.value;
    return out;
}

}  // namespace detail

inline TradeoffTerms tradeoff_terms(const HermitianOperator& p_heis, const HermitianOperator& w_heis,
                                    const HermitianOperator& p0, const HermitianOperator& w0,
                                    const StateVector& psi0) {
    detail::check_dims(p_heis, p0, psi0);
    detail::check_dims(w_heis, w0, psi0);
    const Eigen::VectorXcd& psi = psi0.amplitudes();
    const Eigen::VectorXcd ap = (p_heis.matrix() - p0.matrix()) * psi;
    const Eigen::VectorXcd aw = (w_heis.matrix() - w0.matrix()) * psi;
    const MomentPair power{fcs_mean(p0, p_heis, psi0), fcs_variance(p0, p_heis, psi0)};
    const MomentPair work{fcs_mean(w0, w_heis, psi0), fcs_variance(w0, w_heis, psi0)};
    return detail::tradeoff_from(power, work, ap.dot(aw));
}

// ---------------------------------------------------------------------------
// Pure-state route: everything at time t follows from three vectors, so no
// Heisenberg operator is ever formed.

/// psi_t = U psi0, forward = O_0 psi_t, carried = U O_0 psi0; o0_mean and
/// o0_second are <O_0> and <O_0^2> in psi0.
struct CountingFrame {
    Eigen::Ref<const Eigen::VectorXcd> psi_t;
    Eigen::Ref<const Eigen::VectorXcd> forward;
    Eigen::Ref<const Eigen::VectorXcd> carried;
    double o0_mean;
    double o0_second;

    /// U (O_t - O_0) psi0.
    Eigen::VectorXcd action() const { return forward - carried; }
};

inline MomentPair fcs_moments(const CountingFrame& f) {
    const Eigen::VectorXcd a = f.action();
    const double mean = detail::real_expectation(f.psi_t.dot(a), a.norm(), "fcs_moments");
    const double second = a.squaredNorm();
    return {mean, detail::clamp_variance(second - mean * mean, second)};
}

inline Flagged<double> correlation_f(const CountingFrame& f) {
    const double mt = f.psi_t.dot(f.forward).real();
    const double mean_diff = mt - f.o0_mean;
    return detail::correlation_from(mean_diff, mt, f.forward.squaredNorm(), f.o0_mean, f.o0_second,
                                    f.forward.dot(f.carried).real());
}

inline TradeoffTerms tradeoff_terms(const CountingFrame& power, const CountingFrame& work) {
    return detail::tradeoff_from(fcs_moments(power), fcs_moments(work), power.action().dot(work.action()));
}

// ---------------------------------------------------------------------------

/// Z(chi, t) = ln <psi0| e^{-i chi O_0/2} e^{i chi O_t} e^{-i chi O_0/2} |psi0>,
/// the full-counting-statistics cumulant generating function. `evolution` is
/// the spectrum of the generator of U_t.
inline Flagged<Complex> generating_function(const HermitianOperator& o0, const SpectralDecomposition& evolution,
                                            const StateVector& psi0, double chi, double t) {
    if (o0.dim() != evolution.dim() || psi0.dim() != o0.dim()) {
        throw DimensionError("generating_function: dimension mismatch");
    }
    const SpectralDecomposition obs = spectral_decompose(o0);
    auto exp_obs = [&](const Eigen::VectorXcd& v, double angle) {
        Eigen::VectorXcd c = obs.to_modal(v);
        for (Index m = 0; m < c.size(); ++m) c(m) *= std::polar(1.0, angle * obs.modal_eigenvalues()(m));
        return obs.from_modal(c);
    };
    const Eigen::VectorXcd& psi = psi0.amplitudes();
    // e^{i chi O_t} = U^dag e^{i chi O_0} U
    const Eigen::VectorXcd right = exp_obs(psi, -0.5 * chi);
    Eigen::VectorXcd mid = evolution.propagate(right, t);
    mid = exp_obs(mid, chi);
    mid = evolution.propagate(mid, -t);
    const Eigen::VectorXcd left = exp_obs(psi, 0.5 * chi);  // (e^{-i chi O_0/2})^dag psi
    const Complex trace = left.dot(mid);
    if (!(std::abs(trace) > 1e-300) || !std::isfinite(std::abs(trace))) return Flagged<Complex>::flagged(Flag::singular);
    return Flagged<Complex>::defined(std::log(trace));
}

}  // namespace qbrel
