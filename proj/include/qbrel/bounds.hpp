#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qbrel/dynamics.hpp"
#include "qbrel/flagged.hpp"

namespace qbrel {

/// Below this weight a projector's term (dp/dt)^2 / p is replaced by its
/// continuous limit 4 |Pi H psi|^2 (p has a double zero wherever it vanishes).
inline constexpr double kVanishingProbability = 1e-12;

/// 1 - sum_i sqrt(p_i q_i), evaluated without cancellation as
/// (1/2) sum_i (sqrt p_i - sqrt q_i)^2 plus the normalization defect.
inline double hellinger_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    const Eigen::ArrayXd a = p.array().max(0.0).sqrt();
    const Eigen::ArrayXd b = q.array().max(0.0).sqrt();
    return 0.5 * (a - b).square().sum() + (1.0 - 0.5 * p.sum() - 0.5 * q.sum());
}

/// arccos(sum_i sqrt(p_i q_i)) via the half-angle form 2 asin(sqrt(H/2)),
/// accurate for nearly identical distributions. Both inputs are renormalized
/// first so that round-off in their sums does not register as distance.
inline double overlap_angle(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    const Eigen::ArrayXd a = (p.array().max(0.0) / p.sum()).sqrt();
    const Eigen::ArrayXd b = (q.array().max(0.0) / q.sum()).sqrt();
    const double h = std::clamp(0.5 * (a - b).square().sum(), 0.0, 2.0);
    return 2.0 * std::asin(std::sqrt(0.5 * h));
}

namespace detail {

/// Classical Fisher information from modal coefficients of psi and H psi in
/// the observable's eigenbasis. dp_i/dt = 2 Im <psi|Pi_i H|psi>.
inline double fisher_from_modal(const ProjectorFamily& family, const Eigen::Ref<const Eigen::VectorXcd>& c,
                                const Eigen::Ref<const Eigen::VectorXcd>& hc) {
    double total = 0.0;
    for (const auto& group : family.groups()) {
        double p = 0.0, im = 0.0, h2 = 0.0;
        for (Index m : group) {
            p += std::norm(c(m));
            im += (std::conj(c(m)) * hc(m)).imag();
            h2 += std::norm(hc(m));
        }
        if (p >= kVanishingProbability) {
            const double dp = 2.0 * im;
            total += dp * dp / p;
        } else {
            total += 4.0 * h2;
        }
    }
    return total;
}

}  // namespace detail

/// I_t = sum_i (dp_i/dt)^2 / p_i for the projectors of `family`, with the
/// probability derivatives taken exactly from the generator.
inline Flagged<double> fisher_information(const ProjectorFamily& family, const SpectralDecomposition& generator,
                                          const StateVector& psi_t) {
    if (family.dim() != psi_t.dim() || generator.dim() != psi_t.dim()) {
        throw DimensionError("fisher_information: dimension mismatch");
    }
    Eigen::VectorXcd hpsi = generator.to_modal(psi_t.amplitudes());
    hpsi = generator.from_modal(Eigen::VectorXcd(generator.modal_eigenvalues().cast<Complex>().cwiseProduct(hpsi)));
    const auto& obs = family.spectrum();
    const double value = detail::fisher_from_modal(family, obs.to_modal(psi_t.amplitudes()), obs.to_modal(hpsi));
    if (!std::isfinite(value)) return Flagged<double>::flagged(Flag::singular);
    return Flagged<double>::defined(value);
}

inline Flagged<double> fisher_information(const ProjectorFamily& family, const StateVector& psi_t,
                                          const HermitianOperator& generator) {
    if (family.dim() != psi_t.dim() || generator.dim() != psi_t.dim()) {
        throw DimensionError("fisher_information: dimension mismatch");
    }
    const auto& obs = family.spectrum();
    const Eigen::VectorXcd hpsi = generator.matrix() * psi_t.amplitudes();
    const double value = detail::fisher_from_modal(family, obs.to_modal(psi_t.amplitudes()), obs.to_modal(hpsi));
    if (!std::isfinite(value)) return Flagged<double>::flagged(Flag::singular);
    return Flagged<double>::defined(value);
}

/// Fisher information of one counting observable along a trajectory.
struct FisherSeries {
    TimeGrid grid{1.0, 2};
    std::vector<double> values;            // I_t at grid points (1/time^2)
    std::vector<double> cumulative_angle;  // int_0^t sqrt(I/4) dt' (radians)
    std::vector<double> overlap_angle;     // arccos(sum_i sqrt(p_i(t) p_i(0)))
    std::vector<Eigen::VectorXd> probabilities;  // p_i(t) at grid points
    int refinement = 1;                    // sub-intervals per grid interval used for the integral
};

/// Cumulative trapezoid of sqrt(I/4) over the series grid.
inline std::vector<double> bhattacharyya_angle(const FisherSeries& fisher) {
    const std::size_t n = fisher.values.size();
    if (n != static_cast<std::size_t>(fisher.grid.steps())) throw DimensionError("Fisher series/grid size mismatch");
    std::vector<double> angle(n, 0.0);
    const double h = fisher.grid.spacing();
    for (std::size_t j = 1; j < n; ++j) {
        const double a = std::sqrt(std::max(0.0, fisher.values[j - 1]) / 4.0);
        const double b = std::sqrt(std::max(0.0, fisher.values[j]) / 4.0);
        angle[j] = angle[j - 1] + 0.5 * h * (a + b);
    }
    return angle;
}

/// Evaluates the Fisher information of `family` along psi_t = e^{-iHt} psi0
/// on `grid` refined `refinement` times; the cumulative angle is integrated on
/// the refined grid and sampled back onto `grid`.
inline FisherSeries fisher_series(const SpectralDecomposition& generator, const ProjectorFamily& family,
                                  const StateVector& psi0, const TimeGrid& grid, int refinement = 1) {
    if (refinement < 1) throw ConfigError("refinement must be >= 1");
    const TimeGrid fine = grid.refined(refinement);
    const std::vector<double> times = fine.points();
    const auto& obs = family.spectrum();

    FisherSeries fine_series{fine, std::vector<double>(times.size()), {}, {}, {}, 1};
    FisherSeries out{grid, {}, {}, {}, {}, refinement};
    out.values.reserve(static_cast<std::size_t>(grid.steps()));

    Eigen::VectorXd p_initial;
    constexpr std::size_t chunk = 128;
    for (std::size_t start = 0; start < times.size(); start += chunk) {
        const std::size_t count = std::min(chunk, times.size() - start);
        const std::span<const double> window(times.data() + start, count);
        const Eigen::MatrixXcd c = obs.to_modal(generator.propagate(psi0.amplitudes(), window));
        const Eigen::MatrixXcd hc = obs.to_modal(generator.propagate(psi0.amplitudes(), window, true));
        for (std::size_t j = 0; j < count; ++j) {
            const auto col = static_cast<Index>(j);
            fine_series.values[start + j] = detail::fisher_from_modal(family, c.col(col), hc.col(col));
            const std::size_t global = start + j;
            if (global % static_cast<std::size_t>(refinement) == 0) {
                Eigen::VectorXd p = family.group_weights(c.col(col));
                if (global == 0) p_initial = p;
                out.overlap_angle.push_back(overlap_angle(p, p_initial));
                out.values.push_back(fine_series.values[start + j]);
                out.probabilities.push_back(std::move(p));
            }
        }
    }
    const std::vector<double> fine_angle = bhattacharyya_angle(fine_series);
    out.cumulative_angle.resize(static_cast<std::size_t>(grid.steps()));
    for (int j = 0; j < grid.steps(); ++j) {
        out.cumulative_angle[static_cast<std::size_t>(j)] = fine_angle[static_cast<std::size_t>(j * refinement)];
    }
    return out;
}

/// Doubles the refinement until the cumulative angle changes by less than
/// `tolerance` at every grid point.
inline FisherSeries converged_fisher_series(const SpectralDecomposition& generator, const ProjectorFamily& family,
                                            const StateVector& psi0, const TimeGrid& grid,
                                            double tolerance = 1e-7, int max_refinement = 64) {
    FisherSeries coarse = fisher_series(generator, family, psi0, grid, 1);
    for (int r = 2; r <= max_refinement; r *= 2) {
        FisherSeries fine = fisher_series(generator, family, psi0, grid, r);
        double change = 0.0;
        for (std::size_t j = 0; j < fine.cumulative_angle.size(); ++j) {
            change = std::max(change, std::abs(fine.cumulative_angle[j] - coarse.cumulative_angle[j]));
        }
        coarse = std::move(fine);
        if (change < tolerance) break;
    }
    return coarse;
}

/// Lower bound cot^2(angle) - f on the NSR. Negative values are reported as is.
inline Flagged<double> nsr_lower_bound(double angle, const Flagged<double>& f) {
    if (!(angle > 0.0) || !f.ok()) return Flagged<double>::flagged(Flag::undefined);
    const double t = std::tan(angle);
    const double value = 1.0 / (t * t) - f.value;
    if (!std::isfinite(value)) return Flagged<double>::flagged(Flag::singular);
    return Flagged<double>::defined(value);
}

inline Flagged<double> nsr_lower_bound(double angle, double f) {
    return nsr_lower_bound(angle, Flagged<double>::defined(f));
}

/// Bound and NSR of one counted quantity along a grid.
struct BoundSeries {
    TimeGrid grid{1.0, 2};
    std::vector<Flagged<double>> bound;
    std::vector<Flagged<double>> nsr;
    std::vector<Flagged<double>> slack;  // nsr - bound where both are defined
};

inline BoundSeries make_bound_series(const TimeGrid& grid, std::vector<Flagged<double>> bound,
                                     std::vector<Flagged<double>> nsr_values) {
    if (bound.size() != nsr_values.size() || bound.size() != static_cast<std::size_t>(grid.steps())) {
        throw DimensionError("bound series size mismatch");
    }
    BoundSeries out{grid, std::move(bound), std::move(nsr_values), {}};
    out.slack.reserve(out.bound.size());
    for (std::size_t j = 0; j < out.bound.size(); ++j) {
        if (out.bound[j].ok() && out.nsr[j].ok()) {
            out.slack.push_back(Flagged<double>::defined(out.nsr[j].value - out.bound[j].value));
        } else {
            out.slack.push_back(Flagged<double>::flagged(Flag::undefined));
        }
    }
    return out;
}

struct HellingerCheck {
    double lhs = 0.0;  // 1 - sum_i sqrt(p_i q_i)
    double rhs = 0.0;  // 1 - [((mu_p - mu_q)/(sigma_p + sigma_q))^2 + 1]^{-1/2}
    bool holds = true;
};

inline constexpr double kHellingerTolerance = 1e-9;

/// Squared Hellinger distance against its mean/standard-deviation lower bound.
inline HellingerCheck hellinger_check(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double mu_p, double mu_q,
                                      double sigma_p, double sigma_q) {
    if (p.size() != q.size() || p.size() == 0) throw DimensionError("hellinger_check: distribution size mismatch");
    for (const auto* dist : {&p, &q}) {
        if ((dist->array() < -1e-12).any() || std::abs(dist->sum() - 1.0) > 1e-9) {
            throw NumericalError("hellinger_check: not a probability distribution");
        }
    }
    if (sigma_p < 0.0 || sigma_q < 0.0) throw NumericalError("hellinger_check: negative standard deviation");
    HellingerCheck out;
    out.lhs = hellinger_distance(p, q);
    const double spread = sigma_p + sigma_q;
    const double diff = mu_p - mu_q;
    if (spread > 0.0) {
        const double ratio = diff / spread;
        out.rhs = 1.0 - 1.0 / std::sqrt(ratio * ratio + 1.0);
    } else {
        out.rhs = diff == 0.0 ? 0.0 : 1.0;
    }
    out.holds = out.lhs >= out.rhs - kHellingerTolerance;
    return out;
}

}  // namespace qbrel
