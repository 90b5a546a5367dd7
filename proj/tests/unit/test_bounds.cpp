#include <gtest/gtest.h>

#include <memory>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbrel/pipeline.hpp"

using namespace qbrel;
using std::numbers::pi;

namespace {

// Sum_i (dp_i/dt)^2 / p_i with central differences of the exact evolution.
double fisher_by_differences(const Eigen::MatrixXcd& h, const ProjectorFamily& family, const Eigen::VectorXcd& psi0,
                             double t, double step) {
    auto probs = [&](double s) {
        return projective_probabilities(family, StateVector(oracle::expm_minus_i(h, s) * psi0, 1e-8));
    };
    const Eigen::VectorXd p = probs(t), plus = probs(t + step), minus = probs(t - step);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double dp = (plus(i) - minus(i)) / (2 * step);
        total += dp * dp / p(i);
    }
    return total;
}

}  // namespace

TEST(Fisher, SingleQubitWorkBasisIsConstant) {
    const double drive = 0.7;
    const auto spec = spectral_decompose(HermitianOperator(drive * oracle::pauli('X')));
    const auto family = make_projector_family(HermitianOperator(oracle::battery(1, 1.0)));
    for (double t : {0.0, 0.3, 1.1, 2.2}) {
        const auto fi = fisher_information(family, spec, evolve_state(spec, StateVector::ground(1), t));
        ASSERT_TRUE(fi.ok());
        EXPECT_NEAR(fi.value, 4 * drive * drive, 1e-12) << t;
    }
}

TEST(Fisher, StationaryStateGivesZero) {
    std::mt19937_64 rng(41);
    const Eigen::MatrixXcd h = oracle::random_hermitian(rng, 8);
    const auto spec = spectral_decompose(HermitianOperator(h));
    const StateVector eigen(spec.eigenvectors().col(3));
    const auto family = make_projector_family(HermitianOperator(oracle::random_hermitian(rng, 8)));
    EXPECT_NEAR(fisher_information(family, spec, eigen).value, 0.0, 1e-12);
}

TEST(Fisher, ExactDerivativeMatchesFiniteDifferences) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXcd h = oracle::random_hermitian(rng, 8);
        const auto spec = spectral_decompose(HermitianOperator(h));
        const auto family = make_projector_family(HermitianOperator(oracle::random_hermitian(rng, 8)));
        const Eigen::VectorXcd psi0 = oracle::random_state(rng, 8);
        const double t = 0.4 + 0.3 * trial;
        const auto exact = fisher_information(family, spec, StateVector(spec.propagate(psi0, t)));
        ASSERT_TRUE(exact.ok());
        const double fd = fisher_by_differences(h, family, psi0, t, 1e-5);
        EXPECT_NEAR(exact.value, fd, 1e-6 * std::max(1.0, fd));
        const auto dense = fisher_information(family, StateVector(spec.propagate(psi0, t)), HermitianOperator(h));
        EXPECT_NEAR(dense.value, exact.value, 1e-9 * std::max(1.0, exact.value));
    }
}

TEST(Fisher, SingleQubitFiniteDifferences) {
    const Eigen::MatrixXcd h = oracle::pauli('X');
    const auto spec = spectral_decompose(HermitianOperator(h));
    const auto family = make_projector_family(HermitianOperator(oracle::battery(1, 1.0)));
    for (double t : {0.2, 0.9, 1.3}) {
        const double fd = fisher_by_differences(h, family, oracle::ground(1), t, 1e-5);
        EXPECT_NEAR(fisher_information(family, spec, evolve_state(spec, StateVector::ground(1), t)).value, fd, 1e-6);
    }
}

TEST(Fisher, GlobalPhaseAndLabelPermutation) {
    std::mt19937_64 rng(43);
    const auto spec = spectral_decompose(HermitianOperator(oracle::random_hermitian(rng, 16)));
    const auto family = make_projector_family(HermitianOperator(oracle::battery(4, 1.0)));
    const Eigen::VectorXcd psi = oracle::random_state(rng, 16);
    const double base = fisher_information(family, spec, StateVector(psi)).value;
    const double phased = fisher_information(family, spec, StateVector(std::polar(1.0, 1.234) * psi)).value;
    EXPECT_NEAR(base, phased, 1e-12 * std::max(1.0, base));

    auto groups = family.groups();
    auto values = family.distinct_values();
    std::reverse(groups.begin(), groups.end());
    std::reverse(values.begin(), values.end());
    for (auto& g : groups) std::reverse(g.begin(), g.end());
    const ProjectorFamily permuted(std::make_shared<const SpectralDecomposition>(family.spectrum()), values, groups);
    EXPECT_NEAR(fisher_information(permuted, spec, StateVector(psi)).value, base, 1e-12 * std::max(1.0, base));
}

TEST(Fisher, IncompleteFamilyIsRejected) {
    const auto spectrum = std::make_shared<const SpectralDecomposition>(
        spectral_decompose(HermitianOperator(oracle::battery(2, 1.0))));
    EXPECT_THROW(ProjectorFamily(spectrum, {0.0}, {{0, 1}}), NumericalError);
    EXPECT_THROW(ProjectorFamily(spectrum, {0.0, 1.0}, {{0, 1, 2}, {2, 3}}), NumericalError);
}

TEST(Bhattacharyya, ZeroAndConstantInformation) {
    FisherSeries zero{TimeGrid(3.0, 31), std::vector<double>(31, 0.0), {}, {}, {}, 1};
    for (double a : bhattacharyya_angle(zero)) EXPECT_EQ(a, 0.0);
    const TimeGrid grid(pi / 2, 2000);
    FisherSeries constant{grid, std::vector<double>(2000, 4.0), {}, {}, {}, 1};
    const auto angle = bhattacharyya_angle(constant);
    const auto t = grid.points();
    for (std::size_t j = 0; j < t.size(); ++j) EXPECT_NEAR(angle[j], t[j], 1e-8);
    for (std::size_t j = 1; j < t.size(); ++j) EXPECT_GE(angle[j], angle[j - 1]);
}

TEST(Bhattacharyya, AngleDominatesOverlap) {
    for (const auto& model : {BatteryModel{4, 1.0, IsingS{2, 1.0}, true}, BatteryModel{4, 1.0, KBody{2, 1.0}, false},
                              BatteryModel{3, 1.0, IsingS{3, 1.0}, false}}) {
        const auto ops = build_scenario_operators(model);
        const auto family = make_projector_family(ops.power);
        const auto series =
            converged_fisher_series(ops.total.spectrum, family, StateVector::ground(model.n_qubits), TimeGrid(8.0, 161));
        for (std::size_t j = 0; j < series.values.size(); ++j) {
            EXPECT_GE(series.cumulative_angle[j], series.overlap_angle[j] - 1e-6) << j;
        }
    }
}

TEST(OverlapAngle, HalfAngleFormMatchesArccos) {
    const Eigen::Vector3d p(0.2, 0.5, 0.3), q(0.6, 0.1, 0.3);
    const double bc = (p.array() * q.array()).sqrt().sum();
    EXPECT_NEAR(overlap_angle(p, q), std::acos(bc), 1e-14);
    EXPECT_EQ(overlap_angle(p, p), 0.0);
    EXPECT_NEAR(overlap_angle(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), pi / 2, 1e-15);
}

TEST(NsrLowerBound, Examples) {
    EXPECT_NEAR(nsr_lower_bound(pi / 4, 0.0).value, 1.0, 1e-15);
    EXPECT_EQ(nsr_lower_bound(0.0, 0.0).flag, Flag::undefined);
    EXPECT_EQ(nsr_lower_bound(0.3, Flagged<double>::flagged(Flag::undefined)).flag, Flag::undefined);
    EXPECT_LT(nsr_lower_bound(0.3, 100.0).value, 0.0);
    for (double t : {0.1, 0.4, 0.7}) {
        const double f = 4.0 / std::tan(2 * t) / std::sin(2 * t);
        EXPECT_NEAR(nsr_lower_bound(t, f).value, std::tan(t) * std::tan(t), 1e-12);
    }
}

TEST(NsrLowerBound, SingleQubitWorkSaturates) {
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.0, SingleQubit{1.0}, false};
    cfg.t_final = pi / 2;
    cfg.steps = 401;
    for (const auto& r : run_scenario(cfg)) {
        if (!r.nsr_work.ok() || !r.bound_work.ok()) continue;
        EXPECT_NEAR(r.nsr_work.value, r.bound_work.value, 1e-6 * std::max(1.0, r.nsr_work.value)) << r.t;
        EXPECT_NEAR(r.angle_work.value, r.t, 1e-9);
    }
}

TEST(NsrLowerBound, HoldsWhileAngleBelowRightAngle) {
    for (const auto& model : {BatteryModel{4, 1.0, KBody{1, 1.0}, false}, BatteryModel{6, 1.0, KBody{3, 1.0}, false},
                              BatteryModel{6, 2.0, IsingS{2, 1.0}, true}, BatteryModel{6, 2.0, IsingS{3, 1.0}, true}}) {
        ScenarioConfig cfg;
        cfg.model = model;
        cfg.t_final = 20.0;
        cfg.steps = 301;
        for (const auto& r : run_scenario(cfg)) {
            if (r.bound_work.ok() && r.nsr_work.ok() && r.angle_work.value <= pi / 2) {
                EXPECT_GE(r.nsr_work.value - r.bound_work.value, -1e-6) << r.t;
            }
            if (r.bound_power.ok() && r.nsr_power.ok() && r.angle_power.value <= pi / 2) {
                EXPECT_GE(r.nsr_power.value - r.bound_power.value, -1e-6) << r.t;
            }
        }
    }
}

TEST(NsrLowerBound, SingleQubitPowerNotSaturatedPastQuarterPeriod) {
    // With f >= 0 the power correlation term vanishes after t = pi/4, leaving
    // cot^2(t) below the exact tan^2(t).
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.0, SingleQubit{1.0}, false};
    cfg.t_final = pi / 2;
    cfg.steps = 2001;
    for (const auto& r : run_scenario(cfg)) {
        if (!r.bound_power.ok() || !r.nsr_power.ok()) continue;
        if (r.t < pi / 4 - 1e-3) {
            EXPECT_NEAR(r.nsr_power.value, r.bound_power.value, 1e-6 * std::max(1.0, r.nsr_power.value)) << r.t;
        } else if (r.t > pi / 4 + 1e-3) {
            EXPECT_NEAR(r.bound_power.value, 1.0 / std::pow(std::tan(r.t), 2), 1e-6 * std::max(1.0, r.bound_power.value));
            EXPECT_GT(r.nsr_power.value, r.bound_power.value);
        }
    }
}

TEST(NsrLowerBound, LiteralFormFailsPastRightAngle) {
    // cot^2 is not monotone beyond pi/2: once the cumulative angle wraps past
    // it the bound can exceed the NSR.
    ScenarioConfig cfg;
    cfg.model = BatteryModel{4, 1.0, KBody{1, 1.0}, false};
    cfg.t_final = 20.0;
    cfg.steps = 301;
    double worst = 0.0, angle_at_worst = 0.0;
    for (const auto& r : run_scenario(cfg)) {
        if (r.bound_work.ok() && r.nsr_work.ok() && r.nsr_work.value - r.bound_work.value < worst) {
            worst = r.nsr_work.value - r.bound_work.value;
            angle_at_worst = r.angle_work.value;
        }
    }
    EXPECT_LT(worst, -1.0);
    EXPECT_GT(angle_at_worst, pi / 2);
}

TEST(Hellinger, Examples) {
    const Eigen::Vector3d p(0.2, 0.5, 0.3);
    const auto same = hellinger_check(p, p, 1.0, 1.0, 0.5, 0.5);
    EXPECT_NEAR(same.lhs, 0.0, 1e-15);
    EXPECT_EQ(same.rhs, 0.0);
    EXPECT_TRUE(same.holds);
    const auto disjoint = hellinger_check(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 0.0, 1.0, 0.0, 0.0);
    EXPECT_NEAR(disjoint.lhs, 1.0, 1e-15);
    EXPECT_TRUE(disjoint.holds);
    EXPECT_THROW(hellinger_check(Eigen::Vector2d(0.7, 0.7), Eigen::Vector2d(0.5, 0.5), 0, 0, 1, 1), NumericalError);
    EXPECT_THROW(hellinger_check(p, Eigen::Vector2d(0.5, 0.5), 0, 0, 1, 1), DimensionError);
}

TEST(Hellinger, DistanceMatchesDefinition) {
    const Eigen::Vector4d p(0.1, 0.2, 0.3, 0.4), q(0.25, 0.25, 0.25, 0.25);
    EXPECT_NEAR(hellinger_distance(p, q), 1.0 - (p.array() * q.array()).sqrt().sum(), 1e-15);
}

TEST(Hellinger, RandomTwoTimeMeasurements) {
    std::mt19937_64 rng(44);
    const Eigen::VectorXd values = Eigen::VectorXd::LinSpaced(8, -1.0, 2.5);
    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::MatrixXcd u = oracle::expm_minus_i(oracle::random_hermitian(rng, 8), 1.0);
        const Eigen::VectorXcd psi = oracle::random_state(rng, 8);
        const Eigen::VectorXd p = psi.cwiseAbs2();
        const Eigen::VectorXd q = (u * psi).cwiseAbs2();
        const double mp = p.dot(values), mq = q.dot(values);
        const double sp = std::sqrt(std::max(0.0, p.dot(values.cwiseAbs2()) - mp * mp));
        const double sq = std::sqrt(std::max(0.0, q.dot(values.cwiseAbs2()) - mq * mq));
        EXPECT_TRUE(hellinger_check(p, q, mp, mq, sp, sq).holds) << trial;
    }
}
