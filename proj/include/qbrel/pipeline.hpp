#pragma once

#include <Eigen/SparseCore>

#include <span>
#include <string>
#include <vector>

#include "qbrel/bounds.hpp"
#include "qbrel/operators.hpp"
#include "qbrel/statistics.hpp"

namespace qbrel {

inline constexpr const char* kVersion = "qbrel 1.0.0";

struct ScenarioConfig {
    BatteryModel model;
    double t_final = 1.0;
    int steps = 2;
    std::string out_dir = ".";
    std::string dataset = "scenario";
    bool emit_bounds = true;
    bool emit_tradeoff = true;
    bool emit_fidelity = true;
    int max_qubits = Limits{}.max_qubits;

    Limits limits() const { return Limits{max_qubits}; }

    void validate() const {
        model.validate(limits());
        TimeGrid(t_final, steps);
        if (dataset.empty()) throw ConfigError("dataset name must not be empty");
    }
};

/// Everything reported for one grid point.
struct StatisticsRecord {
    double t = 0.0;
    double mean_work = 0.0, var_work = 0.0;
    Flagged<double> nsr_work;
    double mean_power = 0.0, var_power = 0.0;
    Flagged<double> nsr_power;
    Flagged<double> fisher_work, angle_work, bound_work;
    Flagged<double> fisher_power, angle_power, bound_power;
    TradeoffTerms tradeoff;
    Flagged<double> fidelity;
    Flagged<double> f_work, f_power;  // temporal correlation terms of the bounds
};

/// Records plus the intermediate series the verification checks need.
struct ScenarioResult {
    std::vector<StatisticsRecord> records;
    FisherSeries work_fisher;
    FisherSeries power_fisher;
    std::vector<double> work_values;   // distinct eigenvalues of W_0
    std::vector<double> power_values;  // distinct eigenvalues of P_0
    double e_min = 0.0, e_max = 0.0, scale = 1.0, power_scale = 1.0;
    bool has_bounds = false;
};

/// Operators of a scenario, built once.
struct ScenarioOperators {
    NormalizedTotal total;
    HermitianOperator battery;  // W_0 = H_B
    HermitianOperator charge;   // H_C
    HermitianOperator power;    // P_0
    double power_scale = 1.0;
};

inline ScenarioOperators build_scenario_operators(const BatteryModel& model, const Limits& limits = {}) {
    model.validate(limits);
    ScenarioOperators ops;
    ops.battery = build_battery_hamiltonian(model.n_qubits, model.omega0, limits);
    ops.charge = build_charging_hamiltonian(model, limits);
    ops.total = total_hamiltonian(model, ops.battery, ops.charge);
    ops.power_scale = power_observable_scale(model, ops.total);
    ops.power = power_counting_observable(ops.battery, ops.charge, ops.power_scale);
    return ops;
}

namespace detail {

inline double mean_of(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& o_psi) { return psi.dot(o_psi).real(); }

}  // namespace detail

/// Full pipeline: one diagonalization of the evolution generator, then every
/// grid point via pure-state quadratic forms.
inline ScenarioResult simulate(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto& model = cfg.model;
    const ScenarioOperators ops = build_scenario_operators(model, cfg.limits());
    const SpectralDecomposition& gen = ops.total.spectrum;
    const TimeGrid grid(cfg.t_final, cfg.steps);
    const std::vector<double> times = grid.points();
    const StateVector psi0 = StateVector::ground(model.n_qubits);
    const Eigen::VectorXcd& psi = psi0.amplitudes();

    // Every statistic depends on O_t - O_0 only, so both observables are
    // shifted by their initial mean; this keeps small early-time means free of
    // cancellation between O(1) expectation values.
    const Eigen::VectorXd w_raw = ops.battery.real_diagonal();
    const Eigen::SparseMatrix<Complex> p_sparse = ops.power.matrix().sparseView();
    const double w_shift = detail::mean_of(psi, w_raw.cast<Complex>().cwiseProduct(psi));
    const double p_shift = detail::mean_of(psi, p_sparse * psi);
    const Eigen::VectorXcd w_diag = (w_raw.array() - w_shift).matrix().cast<Complex>();
    const Eigen::VectorXcd w_psi0 = w_diag.cwiseProduct(psi);
    const Eigen::VectorXcd p_psi0 = p_sparse * psi - p_shift * psi;
    const double w0_mean = 0.0, w0_second = w_psi0.squaredNorm();
    const double p0_mean = 0.0, p0_second = p_psi0.squaredNorm();

    ScenarioResult result;
    result.e_min = ops.total.e_min;
    result.e_max = ops.total.e_max;
    result.scale = ops.total.scale;
    result.power_scale = ops.power_scale;
    result.records.resize(times.size());

    constexpr std::size_t chunk = 128;
    for (std::size_t start = 0; start < times.size(); start += chunk) {
        const std::size_t count = std::min(chunk, times.size() - start);
        const std::span<const double> window(times.data() + start, count);
        const Eigen::MatrixXcd states = gen.propagate(psi, window);
        const Eigen::MatrixXcd carried_w = gen.propagate(w_psi0, window);
        const Eigen::MatrixXcd carried_p = gen.propagate(p_psi0, window);
        const Eigen::MatrixXcd forward_w = w_diag.asDiagonal() * states;
        const Eigen::MatrixXcd forward_p = p_sparse * states - p_shift * states;
        for (std::size_t j = 0; j < count; ++j) {
            const auto c = static_cast<Index>(j);
            const CountingFrame work{states.col(c), forward_w.col(c), carried_w.col(c), w0_mean, w0_second};
            const CountingFrame power{states.col(c), forward_p.col(c), carried_p.col(c), p0_mean, p0_second};
            StatisticsRecord& r = result.records[start + j];
            r.t = times[start + j];
            const MomentPair mw = fcs_moments(work);
            const MomentPair mp = fcs_moments(power);
            r.mean_work = mw.mean;
            r.var_work = mw.variance;
            r.nsr_work = nsr(mw);
            r.mean_power = mp.mean;
            r.var_power = mp.variance;
            r.nsr_power = nsr(mp);
            r.f_work = correlation_f(work);
            r.f_power = correlation_f(power);
            if (cfg.emit_tradeoff) {
                r.tradeoff = tradeoff_terms(power, work);
            } else {
                r.tradeoff.flag = Flag::undefined;
            }
            r.fidelity = cfg.emit_fidelity
                             ? Flagged<double>::defined(std::min(1.0, std::norm(psi.dot(states.col(c)))))
                             : Flagged<double>::flagged(Flag::undefined);
            r.fisher_work = r.angle_work = r.bound_work = Flagged<double>::flagged(Flag::undefined);
            r.fisher_power = r.angle_power = r.bound_power = Flagged<double>::flagged(Flag::undefined);
        }
    }

    if (cfg.emit_bounds) {
        const ProjectorFamily work_family = make_projector_family(ops.battery);
        const ProjectorFamily power_family = make_projector_family(ops.power);
        result.work_values = work_family.distinct_values();
        result.power_values = power_family.distinct_values();
        result.work_fisher = converged_fisher_series(gen, work_family, psi0, grid);
        result.power_fisher = converged_fisher_series(gen, power_family, psi0, grid);
        result.has_bounds = true;
        for (std::size_t j = 0; j < times.size(); ++j) {
            StatisticsRecord& r = result.records[j];
            r.fisher_work = Flagged<double>::defined(result.work_fisher.values[j]);
            r.angle_work = Flagged<double>::defined(result.work_fisher.cumulative_angle[j]);
            r.bound_work = nsr_lower_bound(r.angle_work.value, r.f_work);
            r.fisher_power = Flagged<double>::defined(result.power_fisher.values[j]);
            r.angle_power = Flagged<double>::defined(result.power_fisher.cumulative_angle[j]);
            r.bound_power = nsr_lower_bound(r.angle_power.value, r.f_power);
        }
    }
    return result;
}

inline std::vector<StatisticsRecord> run_scenario(const ScenarioConfig& cfg) { return simulate(cfg).records; }

}  // namespace qbrel
