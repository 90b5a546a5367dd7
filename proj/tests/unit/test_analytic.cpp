#include <gtest/gtest.h>

#include <numbers>

#include "qbrel/analytic.hpp"
#include "qbrel/pipeline.hpp"

using namespace qbrel;
using namespace qbrel::analytic;
using std::numbers::pi;

TEST(SingleQubitClosedForm, QuarterPeriod) {
    const auto r = single_qubit_closed_form(1.0, 1.0, pi / 4);
    EXPECT_NEAR(r.nsr_work.value, 1.0, 1e-15);
    EXPECT_NEAR(r.nsr_power.value, 1.0, 1e-15);
    EXPECT_NEAR(r.nsr_product.value, 1.0, 1e-15);
}

TEST(SingleQubitClosedForm, ProductIsOneAndTurningPointsFlagged) {
    for (double t = 0.01; t < 1.5; t += 0.07) EXPECT_NEAR(single_qubit_closed_form(1.3, 0.9, t).nsr_product.value, 1.0, 1e-12);
    EXPECT_EQ(single_qubit_closed_form(1.0, 1.0, 0.0).nsr_work.flag, Flag::undefined);
    EXPECT_EQ(single_qubit_closed_form(1.0, 1.0, pi / 2).nsr_power.flag, Flag::undefined);
}

TEST(SingleQubitClosedForm, MatchesPipeline) {
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.4, SingleQubit{0.8}, false};
    cfg.t_final = pi / 2 / 0.8;
    cfg.steps = 500;
    cfg.emit_bounds = false;
    const auto records = run_scenario(cfg);
    for (std::size_t j = 1; j + 1 < records.size(); ++j) {
        const auto& n = records[j];
        const auto c = single_qubit_closed_form(1.4, 0.8, n.t);
        EXPECT_NEAR(n.mean_work, c.mean_work, 1e-9 * std::abs(c.mean_work));
        EXPECT_NEAR(n.var_work, c.var_work, 1e-9 * std::abs(c.var_work));
        EXPECT_NEAR(n.mean_power, c.mean_power, 1e-9 * std::abs(c.mean_power));
        EXPECT_NEAR(n.var_power, c.var_power, 1e-9 * std::abs(c.var_power));
    }
}

TEST(KBodyClosedForm, Endpoints) {
    for (int n : {2, 4, 6, 12}) {
        EXPECT_NEAR(kbody_closed_form(n, 1, 1.0, 1.0, 0.37).nsr_product.value, 1.0 / (n * n), 1e-14);
        EXPECT_NEAR(kbody_closed_form(n, n, 1.0, 1.0, 0.37).nsr_product.value, 1.0, 1e-12);
    }
    for (double t = 0.1; t < 6.2; t += 0.3) {
        EXPECT_NEAR(kbody_closed_form(12, 3, 1.0, 1.0, t).nsr_product.value, 1.0 / 16.0, 1e-12);
    }
    EXPECT_THROW(kbody_closed_form(12, 5, 1.0, 1.0, 1.0), ConfigError);
}

TEST(KBodyClosedForm, ProductIsTimeIndependent) {
    double lo = 1e300, hi = -1e300;
    for (double t = 0.05; t < 6.0; t += 0.01) {
        const auto r = kbody_closed_form(12, 4, 1.0, 2.0, t);
        if (!r.nsr_product.ok()) continue;
        lo = std::min(lo, r.nsr_product.value);
        hi = std::max(hi, r.nsr_product.value);
    }
    EXPECT_LE(hi - lo, 1e-10);
}

TEST(KBodyClosedForm, MatchesPipelineForSmallMatrix) {
    for (int n : {2, 4, 6}) {
        for (int k = 1; k <= n; ++k) {
            if (n % k) continue;
            ScenarioConfig cfg;
            cfg.model = BatteryModel{n, 1.0, KBody{k, 1.0}, false};
            cfg.t_final = pi * n / (2.0 * k);
            cfg.steps = 61;
            cfg.emit_bounds = false;
            for (const auto& r : run_scenario(cfg)) {
                const auto c = kbody_closed_form(n, k, 1.0, 1.0, r.t);
                const double scale = 1e-8;
                EXPECT_NEAR(r.mean_work, c.mean_work, scale * std::max(1e-3, std::abs(c.mean_work)));
                EXPECT_NEAR(r.var_work, c.var_work, scale * std::max(1e-3, std::abs(c.var_work)));
                EXPECT_NEAR(r.mean_power, c.mean_power, scale * std::max(1e-3, std::abs(c.mean_power)));
                EXPECT_NEAR(r.var_power, c.var_power, scale * std::max(1e-3, std::abs(c.var_power)));
            }
        }
    }
}

TEST(KBodyClosedForm, ReliabilityOrderingInK) {
    // At equal charging time larger clusters trade work noise for power noise.
    // At equal Omega_k t both ratios carry the same k/N prefactor instead.
    const int n = 12;
    for (double t : {0.2, 0.5, 0.9}) {
        double prev_power = 0.0, prev_work = 1e300;
        for (int k : {1, 2, 3, 4, 6, 12}) {
            const auto r = kbody_closed_form(n, k, 1.0, 1.0, t);
            EXPECT_GT(r.nsr_power.value, prev_power) << t << " " << k;
            EXPECT_LT(r.nsr_work.value, prev_work) << t << " " << k;
            prev_power = r.nsr_power.value;
            prev_work = r.nsr_work.value;
        }
    }
    for (double x : {0.1, 0.4, 0.7}) {
        const auto a = kbody_closed_form(n, 2, 1.0, 1.0, x * n / 2);
        const auto b = kbody_closed_form(n, 4, 1.0, 1.0, x * n / 4);
        EXPECT_NEAR(b.nsr_work.value / a.nsr_work.value, 2.0, 1e-12);
        EXPECT_NEAR(b.nsr_power.value / a.nsr_power.value, 2.0, 1e-12);
    }
}

TEST(KBodyScaling, LargeParallelBattery) {
    const auto a = kbody_scaling(1000, 1, 1.0, 1.0);
    ASSERT_TRUE(a.nsr_work.ok());
    EXPECT_NEAR(a.nsr_work.value, 1000.0, 1e-12);
    const auto exact = kbody_closed_form(1000, 1, 1.0, 1.0, 1.0);
    EXPECT_LT(std::abs(a.nsr_work.value - exact.nsr_work.value) / exact.nsr_work.value, 1e-4);
}

TEST(KBodyScaling, ProductAndGuard) {
    const auto a = kbody_scaling(100, 2, 1.0, 0.5);
    ASSERT_TRUE(a.nsr_work.ok() && a.nsr_power.ok());
    EXPECT_NEAR(a.nsr_work.value * a.nsr_power.value, 4.0 / 10000.0, 1e-16);
    const auto exact = kbody_closed_form(100, 2, 1.0, 1.0, 0.5);
    EXPECT_LT(std::abs(a.nsr_work.value / exact.nsr_work.value - 1.0), 0.05);
    EXPECT_LT(std::abs(a.nsr_power.value / exact.nsr_power.value - 1.0), 0.05);
    const auto outside = kbody_scaling(10, 2, 1.0, 1.0);
    EXPECT_EQ(outside.nsr_work.flag, Flag::out_of_regime);
    EXPECT_EQ(outside.nsr_power.flag, Flag::out_of_regime);
}
