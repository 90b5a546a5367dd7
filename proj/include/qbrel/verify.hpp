#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qbrel/analytic.hpp"
#include "qbrel/figures.hpp"

namespace qbrel {

enum class VerifyLevel { fast, full };

inline VerifyLevel parse_verify_level(const std::string& s) {
    if (s == "fast") return VerifyLevel::fast;
    if (s == "full") return VerifyLevel::full;
    throw ConfigError("verify level must be fast or full, got '" + s + "'");
}

inline std::string to_string(VerifyLevel l) { return l == VerifyLevel::fast ? "fast" : "full"; }

struct Measurement {
    std::string name;
    double value = 0.0;
    double limit = 0.0;  // threshold the value was compared against (0 if informational)
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = true;
    std::vector<Measurement> measurements;
    std::vector<std::string> notes;
    double seconds = 0.0;

    CriterionResult() = default;
    CriterionResult(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    void require(bool ok, std::string note) {
        if (!ok) {
            passed = false;
            notes.push_back(std::move(note));
        }
    }
    void measure(std::string name, double value, double limit = 0.0) {
        measurements.push_back({std::move(name), value, limit});
    }
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::fast;
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;

    bool passed() const {
        for (const auto& c : criteria) {
            if (!c.passed) return false;
        }
        return true;
    }
};

/// One-line summary: "[PASS] 3 title: name=value (<= limit), ...".
inline std::string summary_line(const CriterionResult& c) {
    std::ostringstream os;
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.title << ":";
    os.precision(3);
    for (std::size_t i = 0; i < c.measurements.size(); ++i) {
        const auto& m = c.measurements[i];
        os << (i ? ", " : " ") << m.name << "=" << m.value;
        if (m.limit != 0.0) os << " (limit " << m.limit << ")";
    }
    os << " [" << c.seconds << " s]";
    return os.str();
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Tracks the largest value seen and where it occurred.
struct WorstCase {
    double value = 0.0;
    double at = std::numeric_limits<double>::quiet_NaN();
    void update(double v, double t) {
        if (!(v <= value)) {
            value = v;
            at = t;
        }
    }
};

inline double rel_err(double num, double ref) {
    const double denom = std::abs(ref);
    return denom > 0.0 ? std::abs(num - ref) / denom : std::abs(num);
}

/// Mean and standard deviation of `values` under distribution `p`.
inline std::pair<double, double> distribution_moments(const Eigen::VectorXd& p, const std::vector<double>& values) {
    double mu = 0.0, second = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        mu += p(i) * values[static_cast<std::size_t>(i)];
        second += p(i) * values[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)];
    }
    return {mu, std::sqrt(std::max(0.0, second - mu * mu))};
}

struct ChainTally {
    long long hellinger_checks = 0;
    long long hellinger_violations = 0;
    double hellinger_worst = 0.0;  // max(rhs - lhs)
    long long angle_checks = 0;
    long long angle_violations = 0;
    double angle_worst = 0.0;  // max(overlap - cumulative)
};

/// Hellinger inequality and the angle-overlap inequality along one simulated
/// trajectory, with q the initial distribution.
inline void tally_trajectory(ChainTally& tally, const FisherSeries& series, const std::vector<double>& values,
                             double tolerance) {
    if (series.probabilities.empty()) return;
    const Eigen::VectorXd& q = series.probabilities.front();
    const auto [mu_q, sd_q] = distribution_moments(q, values);
    for (std::size_t j = 0; j < series.probabilities.size(); ++j) {
        const Eigen::VectorXd& p = series.probabilities[j];
        const auto [mu_p, sd_p] = distribution_moments(p, values);
        const Eigen::VectorXd pn = p / p.sum();
        const Eigen::VectorXd qn = q / q.sum();
        const HellingerCheck h = hellinger_check(pn, qn, mu_p, mu_q, sd_p, sd_q);
        ++tally.hellinger_checks;
        tally.hellinger_worst = std::max(tally.hellinger_worst, h.rhs - h.lhs);
        if (h.rhs - h.lhs > tolerance) ++tally.hellinger_violations;
        ++tally.angle_checks;
        const double gap = series.overlap_angle[j] - series.cumulative_angle[j];
        tally.angle_worst = std::max(tally.angle_worst, gap);
        if (gap > tolerance) ++tally.angle_violations;
    }
}

inline std::vector<int> divisors(int n) {
    std::vector<int> out;
    for (int k = 1; k <= n; ++k) {
        if (n % k == 0) out.push_back(k);
    }
    return out;
}

/// Shared by criteria 4-6: moments of every k-body model on one period.
struct KBodyRun {
    int n = 0, k = 0;
    std::vector<StatisticsRecord> records;
};

inline constexpr int kKBodySteps = 201;

struct IsingRun {
    int s = 0;
    ScenarioResult result;
};

/// State shared between criteria: simulations are run once and reused.
struct Context {
    VerifyLevel level = VerifyLevel::fast;
    std::vector<int> kbody_sizes;
    int ising_qubits = 0;
    ChainTally chain;  // filled by every criterion that simulates with bounds
    std::optional<std::vector<KBodyRun>> kbody;
    double kbody_seconds = 0.0;
    std::optional<std::vector<IsingRun>> ising;
    double ising_seconds = 0.0;
};

inline const std::vector<KBodyRun>& kbody_runs(Context& ctx) {
    if (!ctx.kbody) {
        const auto start = Clock::now();
        std::vector<KBodyRun> runs;
        for (int n : ctx.kbody_sizes) {
            for (int k : divisors(n)) {
                const auto cfg = kbody_scenario(n, k, kbody_period(n, k, 1.0), kKBodySteps, false);
                runs.push_back({n, k, run_scenario(cfg)});
            }
        }
        ctx.kbody = std::move(runs);
        ctx.kbody_seconds = seconds_since(start);
    }
    return *ctx.kbody;
}

inline const std::vector<IsingRun>& ising_runs(Context& ctx) {
    if (!ctx.ising) {
        const auto start = Clock::now();
        std::vector<IsingRun> runs;
        for (int s : kIsingOrders) runs.push_back({s, simulate(ising_scenario(ctx.ising_qubits, s))});
        ctx.ising = std::move(runs);
        ctx.ising_seconds = seconds_since(start);
    }
    return *ctx.ising;
}

// ---------------------------------------------------------------------------

inline CriterionResult single_qubit_closed_forms(Context&) {
    CriterionResult c{1, "single-qubit closed forms"};
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.0, SingleQubit{1.0}, false};
    cfg.t_final = std::numbers::pi / 2.0;
    cfg.steps = 502;  // 500 interior points
    cfg.emit_bounds = false;
    const auto start = Clock::now();
    const auto records = run_scenario(cfg);
    const double runtime = seconds_since(start);
    WorstCase worst;
    for (std::size_t j = 1; j + 1 < records.size(); ++j) {
        const auto& r = records[j];
        const auto cf = analytic::single_qubit_closed_form(1.0, 1.0, r.t);
        worst.update(rel_err(r.mean_work, cf.mean_work), r.t);
        worst.update(rel_err(r.var_work, cf.var_work), r.t);
        worst.update(rel_err(r.mean_power, cf.mean_power), r.t);
        worst.update(rel_err(r.var_power, cf.var_power), r.t);
    }
    c.measure("max_rel_err", worst.value, 1e-9);
    c.measure("runtime_s", runtime, 1.0);
    c.require(worst.value <= 1e-9, "moment mismatch at t=" + std::to_string(worst.at));
    c.require(runtime < 1.0, "runtime above 1 s");
    return c;
}

inline CriterionResult single_qubit_saturation(Context& ctx) {
    CriterionResult c{2, "single-qubit bound saturation"};
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.0, SingleQubit{1.0}, false};
    cfg.t_final = std::numbers::pi / 2.0;
    cfg.steps = 2002;  // 2000 interior points
    const ScenarioResult res = simulate(cfg);
    WorstCase work, power, power_first_half, fisher;
    double first_power_break = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 1; j + 1 < res.records.size(); ++j) {
        const auto& r = res.records[j];
        fisher.update(std::abs(r.fisher_work.value - 4.0), r.t);
        fisher.update(std::abs(r.fisher_power.value - 4.0), r.t);
        if (r.nsr_work.ok() && r.bound_work.ok()) work.update(std::abs(r.nsr_work.value - r.bound_work.value), r.t);
        if (r.nsr_power.ok() && r.bound_power.ok()) {
            const double dev = std::abs(r.nsr_power.value - r.bound_power.value);
            power.update(dev, r.t);
            if (r.t <= std::numbers::pi / 4.0) power_first_half.update(dev, r.t);
            if (dev > 1e-6 && std::isnan(first_power_break)) first_power_break = r.t;
        }
    }
    c.measure("work_max_dev", work.value, 1e-6);
    c.measure("power_max_dev", power.value, 1e-6);
    c.measure("power_max_dev_t<=pi/4", power_first_half.value);
    c.measure("fisher_max_dev", fisher.value, 1e-8);
    c.require(work.value <= 1e-6, "work bound not saturated at t=" + std::to_string(work.at));
    c.require(power.value <= 1e-6, "power bound not saturated from t=" + std::to_string(first_power_break) +
                                       " on (largest deviation " + std::to_string(power.value) + " at t=" +
                                       std::to_string(power.at) + ")");
    c.require(fisher.value <= 1e-8, "Fisher information not constant");
    tally_trajectory(ctx.chain, res.work_fisher, res.work_values, kHellingerTolerance);
    tally_trajectory(ctx.chain, res.power_fisher, res.power_values, kHellingerTolerance);
    return c;
}

inline CriterionResult single_qubit_tradeoff(Context&) {
    CriterionResult c{3, "single-qubit trade-off saturation"};
    ScenarioConfig cfg;
    cfg.model = BatteryModel{1, 1.0, SingleQubit{1.0}, false};
    cfg.t_final = std::numbers::pi / 2.0;
    cfg.steps = 502;
    cfg.emit_bounds = false;
    const auto records = run_scenario(cfg);
    WorstCase lhs, rhs;
    int defined = 0;
    for (const auto& r : records) {
        if (!r.tradeoff.ok()) continue;
        ++defined;
        lhs.update(std::abs(r.tradeoff.lhs - 1.0), r.t);
        rhs.update(std::abs(r.tradeoff.rhs - 1.0), r.t);
    }
    c.measure("lhs_max_dev", lhs.value, 1e-8);
    c.measure("rhs_max_dev", rhs.value, 1e-8);
    c.measure("defined_points", defined);
    c.require(lhs.value <= 1e-8 && rhs.value <= 1e-8, "trade-off not saturated at t=" + std::to_string(std::max(lhs.at, rhs.at)));
    c.require(defined >= 490, "too few defined trade-off points");
    return c;
}

inline CriterionResult kbody_equivalence(Context& ctx) {
    CriterionResult c{4, "k-body brute force vs closed forms"};
    const auto& runs = kbody_runs(ctx);
    const double runtime = ctx.kbody_seconds;
    WorstCase worst;
    std::string where;
    for (const auto& run : runs) {
        for (std::size_t j = 1; j + 1 < run.records.size(); ++j) {
            const auto& r = run.records[j];
            const auto cf = analytic::kbody_closed_form(run.n, run.k, 1.0, 1.0, r.t);
            const double e = std::max({rel_err(r.mean_work, cf.mean_work), rel_err(r.var_work, cf.var_work),
                                       rel_err(r.mean_power, cf.mean_power), rel_err(r.var_power, cf.var_power)});
            if (e > worst.value) where = "N=" + std::to_string(run.n) + " k=" + std::to_string(run.k);
            worst.update(e, r.t);
        }
    }
    c.measure("models", static_cast<double>(runs.size()));
    c.measure("max_rel_err", worst.value, 1e-8);
    c.measure("runtime_s", runtime, 120.0);
    c.require(worst.value <= 1e-8, "closed-form mismatch for " + where + " at t=" + std::to_string(worst.at));
    c.require(runtime < 120.0, "runtime above 2 min");
    return c;
}

inline CriterionResult cluster_scaling(Context& ctx) {
    CriterionResult c{5, "universal cluster scaling"};
    const auto& runs = kbody_runs(ctx);
    double worst_dev = 0.0, worst_spread = 0.0, parallel_dev = 0.0, collective_dev = 0.0;
    std::string where;
    for (const auto& run : runs) {
        const double target = static_cast<double>(run.k * run.k) / static_cast<double>(run.n * run.n);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, dev = 0.0;
        for (const auto& r : run.records) {
            if (!r.nsr_work.ok() || !r.nsr_power.ok()) continue;
            const double prod = r.nsr_work.value * r.nsr_power.value;
            lo = std::min(lo, prod);
            hi = std::max(hi, prod);
            dev = std::max(dev, std::abs(prod - target));
        }
        if (!(hi >= lo)) {
            c.require(false, "no defined NSR product for N=" + std::to_string(run.n) + " k=" + std::to_string(run.k));
            continue;
        }
        if (dev > worst_dev) where = "N=" + std::to_string(run.n) + " k=" + std::to_string(run.k);
        worst_dev = std::max(worst_dev, dev);
        worst_spread = std::max(worst_spread, hi - lo);
        if (run.k == 1) parallel_dev = std::max(parallel_dev, dev);
        if (run.k == run.n) collective_dev = std::max(collective_dev, dev);
    }
    c.measure("max_dev_from_k2/N2", worst_dev, 1e-8);
    c.measure("max_spread", worst_spread, 1e-8);
    c.measure("parallel_dev_from_1/N2", parallel_dev, 1e-8);
    c.measure("collective_dev_from_1", collective_dev, 1e-8);
    c.require(worst_dev <= 1e-8, "NSR product off k^2/N^2 for " + where);
    c.require(worst_spread <= 1e-8, "NSR product depends on t");
    return c;
}

inline CriterionResult kbody_tradeoff(Context& ctx) {
    CriterionResult c{6, "k-body trade-off saturation"};
    const auto& runs = kbody_runs(ctx);
    double worst = 0.0, most_negative = 0.0;
    long long defined = 0;
    for (const auto& run : runs) {
        for (const auto& r : run.records) {
            if (!r.tradeoff.ok()) continue;
            ++defined;
            worst = std::max(worst, r.tradeoff.slack());
            most_negative = std::min(most_negative, r.tradeoff.slack());
        }
    }
    c.measure("max(lhs-rhs)", worst, 1e-8);
    c.measure("min(lhs-rhs)", most_negative, -1e-8);
    c.measure("defined_points", static_cast<double>(defined));
    c.require(worst <= 1e-8, "trade-off not saturated");
    c.require(most_negative >= -1e-8, "trade-off violated");
    return c;
}


inline CriterionResult ising_validity(Context& ctx) {
    CriterionResult c{7, "Ising bound and trade-off validity"};
    const auto& runs = ising_runs(ctx);
    const double runtime = ctx.ising_seconds;
    double bound_slack = std::numeric_limits<double>::infinity(), bound_short = bound_slack, tradeoff_slack = bound_slack, angle_gap = bound_slack;
    std::string bound_where;
    for (const auto& run : runs) {
        const auto& res = run.result;
        for (std::size_t j = 0; j < res.records.size(); ++j) {
            const auto& r = res.records[j];
            auto check_bound = [&](const Flagged<double>& n, const Flagged<double>& b, double angle, const char* what) {
                if (!n.ok() || !b.ok()) return;
                const double slack = n.value - b.value;
                if (slack < bound_slack) {
                    bound_slack = slack;
                    std::ostringstream os;
                    os << what << " s=" << run.s << " t=" << r.t << " angle=" << angle;
                    bound_where = os.str();
                }
                if (angle <= std::numbers::pi / 2.0) bound_short = std::min(bound_short, slack);
            };
            check_bound(r.nsr_work, r.bound_work, res.work_fisher.cumulative_angle[j], "work");
            check_bound(r.nsr_power, r.bound_power, res.power_fisher.cumulative_angle[j], "power");
            if (r.tradeoff.ok()) tradeoff_slack = std::min(tradeoff_slack, r.tradeoff.slack());
            angle_gap = std::min(angle_gap, res.work_fisher.cumulative_angle[j] - res.work_fisher.overlap_angle[j]);
            angle_gap = std::min(angle_gap, res.power_fisher.cumulative_angle[j] - res.power_fisher.overlap_angle[j]);
        }
        tally_trajectory(ctx.chain, res.work_fisher, res.work_values, kHellingerTolerance);
        tally_trajectory(ctx.chain, res.power_fisher, res.power_values, kHellingerTolerance);
    }
    c.measure("N", ctx.ising_qubits);
    c.measure("min_bound_slack", bound_slack, -1e-6);
    c.measure("min_bound_slack_angle<=pi/2", bound_short);
    c.measure("min_tradeoff_slack", tradeoff_slack, -1e-8);
    c.measure("min_angle_minus_overlap", angle_gap, -1e-6);
    c.measure("runtime_s", runtime, 300.0);
    c.require(bound_slack >= -1e-6, "NSR bound violated (" + bound_where + ")");
    c.require(tradeoff_slack >= -1e-8, "trade-off violated");
    c.require(angle_gap >= -1e-6, "angle-overlap inequality violated");
    c.require(runtime < 300.0, "runtime above 5 min");
    return c;
}

/// Largest initial window (0, t_w] on which all four s-orderings hold.
struct OrderingWindow {
    double t_end = 0.0;
    std::size_t points = 0;
};

inline OrderingWindow find_ordering_window(const std::vector<IsingRun>& runs) {
    const std::size_t n = runs.front().result.records.size();
    auto rec = [&](std::size_t s_index, std::size_t j) -> const StatisticsRecord& {
        return runs[s_index].result.records[j];
    };
    OrderingWindow best;
    std::vector<double> peak(runs.size(), -std::numeric_limits<double>::infinity());
    bool pointwise_ok = true;
    std::size_t defined_points = 0;
    for (std::size_t j = 1; j < n && pointwise_ok; ++j) {
        bool all_defined = true;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            peak[i] = std::max(peak[i], rec(i, j).mean_power);
            all_defined = all_defined && rec(i, j).nsr_work.ok() && rec(i, j).nsr_power.ok();
        }
        if (all_defined) {
            ++defined_points;
            for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
                const auto& a = rec(i, j);
                const auto& b = rec(i + 1, j);
                const bool power_up = a.nsr_power.value < b.nsr_power.value;
                const bool work_down = a.nsr_work.value > b.nsr_work.value;
                const bool product_up = a.nsr_work.value * a.nsr_power.value < b.nsr_work.value * b.nsr_power.value;
                pointwise_ok = pointwise_ok && power_up && work_down && product_up;
            }
        }
        if (!pointwise_ok) break;
        bool peaks_up = true;
        for (std::size_t i = 0; i + 1 < runs.size(); ++i) peaks_up = peaks_up && peak[i] < peak[i + 1];
        if (peaks_up) best = {rec(0, j).t, defined_points};
    }
    return best;
}

inline constexpr std::size_t kMinOrderingPoints = 10;

inline CriterionResult ising_orderings(Context& ctx) {
    CriterionResult c{8, "Ising orderings in s"};
    const auto& runs = ising_runs(ctx);
    const OrderingWindow w = find_ordering_window(runs);
    c.measure("window_end_t", w.t_end);
    c.measure("window_points", static_cast<double>(w.points), static_cast<double>(kMinOrderingPoints));
    c.require(w.points >= kMinOrderingPoints, "no initial window with all orderings found");
    return c;
}

inline Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Index d) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return 0.25 * (a + a.adjoint());
}

inline Eigen::VectorXcd random_state(std::mt19937_64& rng, Index d) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(d);
    for (Index i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}

inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, Index d) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < d; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
    return q;
}

inline CriterionResult generating_function_oracle(Context&) {
    CriterionResult c{9, "generating-function derivatives"};
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> time(0.1, 2.0);
    constexpr double h = 1e-4;
    double mean_err = 0.0, var_err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Index d = trial % 2 == 0 ? 4 : 8;
        const HermitianOperator h_total(random_hermitian(rng, d));
        const HermitianOperator o0(random_hermitian(rng, d));
        const StateVector psi0(random_state(rng, d));
        const double t = time(rng);
        const SpectralDecomposition spec = spectral_decompose(h_total);
        const HermitianOperator ot = heisenberg_observable(spec, o0, t);
        const double mean = fcs_mean(o0, ot, psi0);
        const double var = fcs_variance(o0, ot, psi0);
        const Complex zp = generating_function(o0, spec, psi0, h, t).value;
        const Complex zm = generating_function(o0, spec, psi0, -h, t).value;
        const Complex z0 = generating_function(o0, spec, psi0, 0.0, t).value;
        const double fd_mean = (Complex(0.0, -1.0) * (zp - zm) / (2.0 * h)).real();
        const double fd_var = -((zp - 2.0 * z0 + zm) / (h * h)).real();
        mean_err = std::max(mean_err, std::abs(fd_mean - mean));
        var_err = std::max(var_err, std::abs(fd_var - var));
    }
    c.measure("instances", 50);
    c.measure("max_mean_err", mean_err, 1e-6);
    c.measure("max_var_err", var_err, 1e-5);
    c.require(mean_err <= 1e-6, "first derivative mismatch");
    c.require(var_err <= 1e-5, "second derivative mismatch");
    return c;
}

/// Runs the k-body trajectories with bounds so that the inequality chain is
/// checked on them too (criterion 10).
inline void tally_kbody_bounds(Context& ctx) {
    for (int n : ctx.kbody_sizes) {
        for (int k : divisors(n)) {
            // The power eigenbasis of the fully parallel N = 12 model is one
            // dense complex 4096 block; it is left to the unit-test matrix.
            if (n >= 12 && k == 1) continue;
            const ScenarioResult res = simulate(kbody_scenario(n, k, kbody_period(n, k, 1.0), 101, true));
            tally_trajectory(ctx.chain, res.work_fisher, res.work_values, kHellingerTolerance);
            tally_trajectory(ctx.chain, res.power_fisher, res.power_values, kHellingerTolerance);
        }
    }
}

inline CriterionResult inequality_chain(Context& ctx) {
    CriterionResult c{10, "Hellinger and Bhattacharyya chain"};
    tally_kbody_bounds(ctx);
    std::mt19937_64 rng(777);
    std::normal_distribution<double> g;
    constexpr int trials = 100000;
    constexpr Index d = 8;
    long long violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> values(d);
    for (int trial = 0; trial < trials; ++trial) {
        const Eigen::MatrixXcd basis = random_unitary(rng, d);
        const Eigen::MatrixXcd evolution = random_unitary(rng, d);
        const Eigen::VectorXcd psi = random_state(rng, d);
        for (auto& v : values) v = g(rng);
        const Eigen::VectorXd p = (basis.adjoint() * psi).cwiseAbs2();
        const Eigen::VectorXd q = (basis.adjoint() * (evolution * psi)).cwiseAbs2();
        const auto [mu_p, sd_p] = distribution_moments(p, values);
        const auto [mu_q, sd_q] = distribution_moments(q, values);
        const HellingerCheck h = hellinger_check(p / p.sum(), q / q.sum(), mu_p, mu_q, sd_p, sd_q);
        worst = std::max(worst, h.rhs - h.lhs);
        if (!h.holds) ++violations;
    }
    const auto& t = ctx.chain;
    c.measure("random_pairs", trials);
    c.measure("random_violations", static_cast<double>(violations));
    c.measure("random_max(rhs-lhs)", worst, 1e-9);
    c.measure("trajectory_points", static_cast<double>(t.hellinger_checks));
    c.measure("trajectory_hellinger_violations", static_cast<double>(t.hellinger_violations));
    c.measure("trajectory_max(rhs-lhs)", t.hellinger_worst, 1e-9);
    c.measure("trajectory_angle_violations", static_cast<double>(t.angle_violations));
    c.measure("trajectory_max(overlap-angle)", t.angle_worst, 1e-9);
    c.require(violations == 0, "Hellinger bound violated on random pairs");
    c.require(t.hellinger_violations == 0, "Hellinger bound violated on a trajectory");
    c.require(t.angle_violations == 0, "angle-overlap inequality violated on a trajectory");
    c.require(t.hellinger_checks > 0, "no trajectories were checked");
    return c;
}

inline CriterionResult large_n_scaling(Context&) {
    CriterionResult c{11, "large-N approximations"};
    struct Sample {
        int n, k;
        double fraction;  // of the guard limit N / (20 k Omega0)
    };
    const Sample samples[] = {{100, 1, 0.2},  {100, 1, 0.9},  {100, 2, 0.5},  {100, 5, 0.7},  {200, 1, 0.1},
                              {200, 4, 0.6},  {200, 8, 0.95}, {500, 1, 0.3},  {500, 5, 0.8},  {500, 10, 0.4},
                              {1000, 1, 0.01}, {1000, 1, 0.5}, {1000, 2, 0.9}, {1000, 10, 0.2}, {1000, 25, 0.7},
                              {2000, 1, 0.6}, {2000, 4, 0.25}, {5000, 5, 0.85}, {5000, 50, 0.5}, {10000, 100, 0.99}};
    double worst = 0.0, product_dev = 0.0;
    int inside = 0;
    for (const auto& s : samples) {
        const double t = s.fraction * s.n / (20.0 * s.k);
        const auto approx = analytic::kbody_scaling(s.n, s.k, 1.0, t);
        const auto exact = analytic::kbody_closed_form(s.n, s.k, 1.0, 1.0, t);
        if (!approx.nsr_work.ok() || !approx.nsr_power.ok()) continue;
        ++inside;
        worst = std::max(worst, rel_err(approx.nsr_work.value, exact.nsr_work.value));
        worst = std::max(worst, rel_err(approx.nsr_power.value, exact.nsr_power.value));
        const double target = static_cast<double>(s.k) * s.k / (static_cast<double>(s.n) * s.n);
        product_dev = std::max(product_dev, rel_err(approx.nsr_work.value * approx.nsr_power.value, target));
    }
    const auto outside = analytic::kbody_scaling(100, 1, 1.0, 10.0);
    c.measure("samples_inside_guard", inside, 20);
    c.measure("max_rel_err", worst, 0.05);
    c.measure("product_rel_dev", product_dev);
    c.require(inside == 20, "sample left the regime guard");
    c.require(worst < 0.05, "approximation off by more than 5%");
    c.require(outside.nsr_work.flag == Flag::out_of_regime, "guard violation not flagged");
    return c;
}

}  // namespace detail

using ProgressCallback = std::function<void(const CriterionResult&)>;

/// Runs all acceptance criteria. `fast` restricts the k-body matrix to N <= 8
/// and the Ising chain to N = 8; `full` uses N <= 12 and N = 10.
inline VerifyReport verify_suite(VerifyLevel level, const ProgressCallback& progress = {}) {
    detail::Context ctx;
    ctx.level = level;
    ctx.kbody_sizes = level == VerifyLevel::fast ? std::vector<int>{2, 4, 6, 8} : std::vector<int>{2, 4, 6, 8, 12};
    ctx.ising_qubits = level == VerifyLevel::fast ? 8 : kIsingQubits;
    using Check = CriterionResult (*)(detail::Context&);
    const Check checks[] = {detail::single_qubit_closed_forms, detail::single_qubit_saturation,
                            detail::single_qubit_tradeoff,     detail::kbody_equivalence,
                            detail::cluster_scaling,           detail::kbody_tradeoff,
                            detail::ising_validity,            detail::ising_orderings,
                            detail::generating_function_oracle, detail::inequality_chain,
                            detail::large_n_scaling};
    VerifyReport report;
    report.level = level;
    const auto start = detail::Clock::now();
    for (Check check : checks) {
        const auto t0 = detail::Clock::now();
        CriterionResult r;
        try {
            r = check(ctx);
        } catch (const std::exception& e) {
            r.title = "criterion " + std::to_string(report.criteria.size() + 1);
            r.passed = false;
            r.notes.push_back(std::string("exception: ") + e.what());
        }
        if (r.id == 0) r.id = static_cast<int>(report.criteria.size()) + 1;
        r.seconds = detail::seconds_since(t0);
        if (progress) progress(r);
        report.criteria.push_back(std::move(r));
    }
    report.seconds = detail::seconds_since(start);
    return report;
}

}  // namespace qbrel
