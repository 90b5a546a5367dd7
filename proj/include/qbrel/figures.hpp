#pragma once

#include <array>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "qbrel/analytic.hpp"
#include "qbrel/dataset.hpp"

namespace qbrel {

enum class Figure { fig1, fig2, fig3 };

inline Figure parse_figure(const std::string& tag) {
    if (tag == "fig1") return Figure::fig1;
    if (tag == "fig2") return Figure::fig2;
    if (tag == "fig3") return Figure::fig3;
    throw ConfigError("unknown figure '" + tag + "' (expected fig1, fig2 or fig3)");
}

inline constexpr int kFigureSteps = 600;

// k-body panel: N = 12, omega0 = Omega0 = 1, one charging period per k.
inline constexpr int kFig1Qubits = 12;
inline constexpr std::array<int, 3> kFig1Orders = {2, 3, 4};

// Ising panels: N = 10, omega0 = 2, Omega_s = 1, normalized evolution on [0, 20].
inline constexpr int kIsingQubits = 10;
inline constexpr double kIsingOmega0 = 2.0;
inline constexpr double kIsingCoupling = 1.0;
inline constexpr double kIsingTFinal = 20.0;
inline constexpr std::array<int, 3> kIsingOrders = {2, 3, 4};

/// Period pi N / (2 k Omega0) after which the k-body battery is fully charged.
inline double kbody_period(int n_qubits, int k, double drive) {
    return std::numbers::pi * n_qubits / (2.0 * k * drive);
}

inline ScenarioConfig kbody_scenario(int n_qubits, int k, double t_final, int steps, bool bounds = true) {
    ScenarioConfig cfg;
    cfg.model = BatteryModel{n_qubits, 1.0, KBody{k, 1.0}, false};
    cfg.t_final = t_final;
    cfg.steps = steps;
    cfg.emit_bounds = bounds;
    cfg.dataset = "kbody_n" + std::to_string(n_qubits) + "_k" + std::to_string(k);
    return cfg;
}

inline ScenarioConfig ising_scenario(int n_qubits, int s, int steps = kFigureSteps, bool bounds = true) {
    ScenarioConfig cfg;
    cfg.model = BatteryModel{n_qubits, kIsingOmega0, IsingS{s, kIsingCoupling}, true};
    cfg.t_final = kIsingTFinal;
    cfg.steps = steps;
    cfg.emit_bounds = bounds;
    cfg.dataset = "ising_n" + std::to_string(n_qubits) + "_s" + std::to_string(s);
    return cfg;
}

struct FigureRow {
    StatisticsRecord num;
    analytic::ClosedFormRecord cf;
    Flagged<double> nsr_product;
};

inline Flagged<double> product_of(const Flagged<double>& a, const Flagged<double>& b) {
    if (!a.ok() || !b.ok()) return Flagged<double>::flagged(Flag::undefined);
    return Flagged<double>::defined(a.value * b.value);
}

namespace detail {

using FigureColumns = std::vector<Column<FigureRow>>;

inline Column<FigureRow> num_value(std::string name, double StatisticsRecord::*m) {
    return {std::move(name), [m](const FigureRow& r) { return format_number(r.num.*m); }};
}
inline Column<FigureRow> num_flagged(std::string name, Flagged<double> StatisticsRecord::*m) {
    return {std::move(name), [m](const FigureRow& r) { return format_cell(r.num.*m); }};
}
inline Column<FigureRow> num_flag(std::string name, Flagged<double> StatisticsRecord::*m) {
    return {std::move(name), [m](const FigureRow& r) { return format_flag((r.num.*m).flag); }};
}
inline Column<FigureRow> cf_value(std::string name, double analytic::ClosedFormRecord::*m) {
    return {std::move(name), [m](const FigureRow& r) { return format_number(r.cf.*m); }};
}
inline Column<FigureRow> cf_flagged(std::string name, Flagged<double> analytic::ClosedFormRecord::*m) {
    return {std::move(name), [m](const FigureRow& r) { return format_cell(r.cf.*m); }};
}

inline FigureColumns fig1_columns() {
    FigureColumns cols;
    for (auto& c : statistics_columns()) {
        cols.push_back({c.name, [cell = c.cell](const FigureRow& r) { return cell(r.num); }});
    }
    cols.push_back({"nsr_product", [](const FigureRow& r) { return format_cell(r.nsr_product); }});
    cols.push_back({"nsr_product_flag", [](const FigureRow& r) { return format_flag(r.nsr_product.flag); }});
    using C = analytic::ClosedFormRecord;
    cols.push_back(cf_value("cf_mean_work", &C::mean_work));
    cols.push_back(cf_value("cf_var_work", &C::var_work));
    cols.push_back(cf_flagged("cf_nsr_work", &C::nsr_work));
    cols.push_back(cf_value("cf_mean_power", &C::mean_power));
    cols.push_back(cf_value("cf_var_power", &C::var_power));
    cols.push_back(cf_flagged("cf_nsr_power", &C::nsr_power));
    cols.push_back(cf_flagged("cf_nsr_product", &C::nsr_product));
    return cols;
}

inline FigureColumns ising_columns(bool with_fluctuations) {
    using R = StatisticsRecord;
    FigureColumns cols = {
        num_value("t", &R::t),
        num_value("mean_power", &R::mean_power),
        num_value("mean_work", &R::mean_work),
        num_flagged("nsr_power", &R::nsr_power),
        num_flag("nsr_power_flag", &R::nsr_power),
        num_flagged("nsr_work", &R::nsr_work),
        num_flag("nsr_work_flag", &R::nsr_work),
    };
    cols.push_back({"nsr_product", [](const FigureRow& r) { return format_cell(r.nsr_product); }});
    cols.push_back({"nsr_product_flag", [](const FigureRow& r) { return format_flag(r.nsr_product.flag); }});
    if (with_fluctuations) {
        cols.push_back(num_value("var_work", &R::var_work));
        cols.push_back(num_value("var_power", &R::var_power));
        cols.push_back(num_flagged("fidelity", &R::fidelity));
    }
    return cols;
}

inline std::vector<FigureRow> to_rows(const std::vector<StatisticsRecord>& records) {
    std::vector<FigureRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back({r, {}, product_of(r.nsr_work, r.nsr_power)});
    return rows;
}

}  // namespace detail

/// Rows of one k-body curve family: numeric pipeline next to the closed forms.
inline std::vector<FigureRow> fig1_rows(int k, int steps = kFigureSteps) {
    const ScenarioConfig cfg = kbody_scenario(kFig1Qubits, k, kbody_period(kFig1Qubits, k, 1.0), steps);
    auto rows = detail::to_rows(run_scenario(cfg));
    for (auto& row : rows) row.cf = analytic::kbody_closed_form(kFig1Qubits, k, 1.0, 1.0, row.num.t);
    return rows;
}

inline std::vector<FigureRow> ising_rows(int s, int steps = kFigureSteps) {
    return detail::to_rows(run_scenario(ising_scenario(kIsingQubits, s, steps, false)));
}

struct FigureOutput {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
};

/// Writes one CSV per curve family plus `<figure>_manifest.txt` into out_dir.
inline FigureOutput emit_figure_dataset(Figure figure, const std::filesystem::path& out_dir, int steps = kFigureSteps) {
    std::filesystem::create_directories(out_dir);
    FigureOutput out;
    ManifestEntries manifest;
    std::string tag;
    if (figure == Figure::fig1) {
        tag = "fig1";
        manifest = {{"figure", tag},
                    {"scheme", "kbody"},
                    {"n_qubits", std::to_string(kFig1Qubits)},
                    {"omega0", "1"},
                    {"drive", "1"},
                    {"normalize_total", "false"},
                    {"steps", std::to_string(steps)}};
        for (int k : kFig1Orders) {
            const auto path = out_dir / ("fig1_k" + std::to_string(k) + ".csv");
            write_table_file(path, detail::fig1_columns(), fig1_rows(k, steps));
            out.files.push_back(path);
            manifest.emplace_back("t_final.k" + std::to_string(k), format_number(kbody_period(kFig1Qubits, k, 1.0)));
            manifest.emplace_back("file.k" + std::to_string(k), path.filename().string());
        }
    } else {
        const bool fluct = figure == Figure::fig3;
        tag = fluct ? "fig3" : "fig2";
        manifest = {{"figure", tag},
                    {"scheme", "ising"},
                    {"n_qubits", std::to_string(kIsingQubits)},
                    {"omega0", format_number(kIsingOmega0)},
                    {"drive", format_number(kIsingCoupling)},
                    {"normalize_total", "true"},
                    {"power_scale", "range"},
                    {"t_final", format_number(kIsingTFinal)},
                    {"steps", std::to_string(steps)}};
        for (int s : kIsingOrders) {
            const auto path = out_dir / (tag + "_s" + std::to_string(s) + ".csv");
            write_table_file(path, detail::ising_columns(fluct), ising_rows(s, steps));
            out.files.push_back(path);
            manifest.emplace_back("file.s" + std::to_string(s), path.filename().string());
        }
    }
    out.manifest = out_dir / (tag + "_manifest.txt");
    write_manifest(out.manifest, manifest);
    return out;
}

}  // namespace qbrel
