#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qbrel/figures.hpp"

using namespace qbrel;
using std::numbers::pi;

namespace {

ConfigEntries parse(const std::string& text) {
    std::istringstream in(text);
    return read_config_entries(in);
}

const char* kSingleConfig = R"(
# qubit battery
[model]
n_qubits = 1
omega0 = 1
scheme = single
drive = 1

[grid]
t_final = 1.5707963267948966
steps = 501

[output]
dataset = qubit
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("qbrel_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Config, ParsesSections) {
    const auto cfg = scenario_from_entries(parse(kSingleConfig));
    EXPECT_EQ(cfg.model.n_qubits, 1);
    EXPECT_TRUE(std::holds_alternative<SingleQubit>(cfg.model.scheme));
    EXPECT_EQ(cfg.steps, 501);
    EXPECT_EQ(cfg.dataset, "qubit");
    EXPECT_TRUE(cfg.emit_bounds);
}

TEST(Config, OverridesWin) {
    auto entries = parse(kSingleConfig);
    apply_override(entries, "grid.steps = 11");
    apply_override(entries, "OPTIONS.emit_bounds=false");
    const auto cfg = scenario_from_entries(entries);
    EXPECT_EQ(cfg.steps, 11);
    EXPECT_FALSE(cfg.emit_bounds);
    EXPECT_THROW(apply_override(entries, "steps=3"), ConfigError);
    EXPECT_THROW(apply_override(entries, "grid.steps"), ConfigError);
}

TEST(Config, Errors) {
    EXPECT_THROW(scenario_from_entries(parse("[model]\nn_qubits=1\nscheme=single\ncolour=red\n[grid]\nt_final=1\nsteps=3\n")),
                 ConfigError);
    EXPECT_THROW(scenario_from_entries(parse("[model]\nscheme=single\n[grid]\nt_final=1\nsteps=3\n")), ConfigError);
    EXPECT_THROW(scenario_from_entries(parse("[model]\nn_qubits=x\nscheme=single\n[grid]\nt_final=1\nsteps=3\n")),
                 ConfigError);
    EXPECT_THROW(scenario_from_entries(parse("[model]\nn_qubits=4\nscheme=kbody\norder=3\n[grid]\nt_final=1\nsteps=3\n")),
                 ConfigError);
    EXPECT_THROW(scenario_from_entries(parse("[model]\nn_qubits=1\nscheme=single\n[grid]\nt_final=0\nsteps=3\n")),
                 ConfigError);
    EXPECT_THROW(parse("n_qubits = 1\n"), ConfigError);
    EXPECT_THROW(parse("[model\n"), ConfigError);
    EXPECT_THROW(scenario_from_entries(parse("[model]\nn_qubits=16\nscheme=kbody\norder=1\n[grid]\nt_final=1\nsteps=3\n")),
                 ResourceCapError);
}

TEST(Config, CustomTermsRoundTrip) {
    const auto terms = parse_pauli_terms("0.5 X0 X1, -1 z2, 0.25 Y1");
    ASSERT_EQ(terms.size(), 3u);
    EXPECT_EQ(terms[1].factors[0].second, Axis::Z);
    EXPECT_EQ(format_pauli_terms(terms), "0.5 X0 X1, -1 Z2, 0.25 Y1");
    EXPECT_THROW(parse_pauli_terms("0.5 Q0"), ConfigError);
    EXPECT_THROW(parse_pauli_terms(""), ConfigError);
}

TEST(Config, ResolvedEntriesParseBack) {
    const auto cfg = scenario_from_entries(parse(
        "[model]\nn_qubits=4\nomega0=2\nscheme=ising\norder=3\nnormalize_total=yes\npower_scale=spectral_norm\n"
        "[grid]\nt_final=3\nsteps=7\n"));
    ConfigEntries again;
    for (const auto& [k, v] : resolved_entries(cfg)) again[k] = v;
    const auto back = scenario_from_entries(again);
    EXPECT_EQ(back.model.power_scale, PowerScale::spectral_norm);
    EXPECT_TRUE(back.model.normalize_total);
    EXPECT_EQ(std::get<IsingS>(back.model.scheme).s, 3);
    EXPECT_EQ(back.t_final, 3.0);
}

TEST(Scenario, SingleQubitQuarterPeriod) {
    const auto records = run_scenario(scenario_from_entries(parse(kSingleConfig)));
    ASSERT_EQ(records.size(), 501u);
    const auto& mid = records[250];
    EXPECT_NEAR(mid.t, pi / 4, 1e-15);
    ASSERT_TRUE(mid.nsr_work.ok());
    EXPECT_NEAR(mid.nsr_work.value, 1.0, 1e-9);
    EXPECT_EQ(records.front().nsr_work.flag, Flag::undefined);
    EXPECT_EQ(records.front().tradeoff.flag, Flag::undefined);
}

TEST(Scenario, KBodyTwelveTwoTradeoff) {
    ScenarioConfig cfg;
    cfg.model = BatteryModel{12, 1.0, KBody{2, 1.0}, false};
    cfg.t_final = kbody_period(12, 2, 1.0);
    cfg.steps = 31;
    cfg.emit_bounds = false;
    for (const auto& r : run_scenario(cfg)) {
        if (!r.tradeoff.ok()) continue;
        EXPECT_NEAR(r.tradeoff.lhs, 1.0 / 36.0, 1e-8);
        EXPECT_NEAR(r.tradeoff.rhs, 1.0 / 36.0, 1e-8);
    }
}

TEST(Scenario, IsingTenTwoSelfConsistency) {
    const auto result = simulate(ising_scenario(10, 2, 121));
    ASSERT_TRUE(result.has_bounds);
    EXPECT_NEAR(result.records.front().fidelity.value, 1.0, 1e-15);
    for (std::size_t j = 0; j < result.records.size(); ++j) {
        const auto& r = result.records[j];
        EXPECT_GE(result.work_fisher.cumulative_angle[j], result.work_fisher.overlap_angle[j] - 1e-6);
        EXPECT_GE(result.power_fisher.cumulative_angle[j], result.power_fisher.overlap_angle[j] - 1e-6);
        if (r.tradeoff.ok()) {
            EXPECT_GE(r.tradeoff.slack(), -1e-8);
        }
        if (r.bound_work.ok() && r.nsr_work.ok() && r.angle_work.value <= pi / 2) {
            EXPECT_GE(r.nsr_work.value - r.bound_work.value, -1e-6);
        }
        if (r.bound_power.ok() && r.nsr_power.ok() && r.angle_power.value <= pi / 2) {
            EXPECT_GE(r.nsr_power.value - r.bound_power.value, -1e-6);
        }
    }
}

TEST(Scenario, OptionalColumnsCanBeSwitchedOff) {
    auto cfg = scenario_from_entries(parse(kSingleConfig));
    cfg.steps = 5;
    cfg.emit_bounds = cfg.emit_tradeoff = cfg.emit_fidelity = false;
    for (const auto& r : run_scenario(cfg)) {
        EXPECT_FALSE(r.fisher_work.ok());
        EXPECT_FALSE(r.fidelity.ok());
        EXPECT_FALSE(r.tradeoff.ok());
    }
}

TEST(Scenario, MisSignedPowerObservableIsDetectable) {
    // Flipping P0 leaves every ratio unchanged; only the sign of the mean power
    // separates it from the closed form.
    const BatteryModel m{1, 1.0, SingleQubit{1.0}, false};
    const auto ops = build_scenario_operators(m);
    const HermitianOperator flipped = -1.0 * ops.power;
    const StateVector up = StateVector::ground(1);
    for (double t : {0.3, 0.6, 1.2}) {
        const auto good = fcs_moments(ops.power, heisenberg_observable(ops.total.spectrum, ops.power, t), up);
        const auto bad = fcs_moments(flipped, heisenberg_observable(ops.total.spectrum, flipped, t), up);
        const auto cf = analytic::single_qubit_closed_form(1.0, 1.0, t);
        EXPECT_NEAR(good.mean, cf.mean_power, 1e-12);
        EXPECT_NEAR(bad.mean, -cf.mean_power, 1e-12);
        EXPECT_NEAR(nsr(good).value, nsr(bad).value, 1e-12);
    }
}

TEST(Dataset, HeaderAndUndefTokens) {
    auto cfg = scenario_from_entries(parse(kSingleConfig));
    cfg.steps = 5;
    std::ostringstream out;
    write_statistics_csv(out, run_scenario(cfg));
    std::istringstream lines(out.str());
    std::string header, row0;
    std::getline(lines, header);
    std::getline(lines, row0);
    EXPECT_EQ(header,
              "t,mean_work,var_work,nsr_work,nsr_work_flag,mean_power,var_power,nsr_power,nsr_power_flag,"
              "fisher_work,angle_work,bound_work,fisher_power,angle_power,bound_power,tradeoff_lhs,tradeoff_rhs,"
              "tradeoff_flag,fidelity");
    const auto cells = split(row0);
    ASSERT_EQ(cells.size(), 19u);
    EXPECT_EQ(cells[3], "undef");
    EXPECT_EQ(cells[4], "undef");
    EXPECT_EQ(cells[15], "undef");
    EXPECT_EQ(cells[17], "undef");
    std::string row;
    while (std::getline(lines, row)) {
        const auto c = split(row);
        EXPECT_EQ(c.size(), 19u);
        for (const auto& cell : c) EXPECT_FALSE(cell.empty());
    }
}

TEST(Dataset, SeventeenDigitRoundTrip) {
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_number(v)), v);
    EXPECT_EQ(format_cell(Flagged<double>::flagged(Flag::singular)), "undef");
}

TEST(Dataset, ScenarioFilesAreDeterministic) {
    const auto dir = scratch_dir("determinism");
    auto entries = parse(kSingleConfig);
    entries["output.directory"] = dir.string();
    entries["grid.steps"] = "41";
    const auto cfg = scenario_from_entries(entries);
    const auto first = write_scenario(cfg);
    const std::string csv = slurp(first.csv), manifest = slurp(first.manifest);
    write_scenario(cfg);
    EXPECT_EQ(slurp(first.csv), csv);
    EXPECT_EQ(manifest, slurp(first.manifest));
    EXPECT_EQ(first.rows, 41u);
    EXPECT_NE(manifest.find("version = qbrel"), std::string::npos);
    EXPECT_NE(manifest.find("grid.steps = 41"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Figures, Fig1NumericMatchesClosedForm) {
    const auto dir = scratch_dir("fig1");
    const auto out = emit_figure_dataset(Figure::fig1, dir, 21);
    ASSERT_EQ(out.files.size(), 3u);
    EXPECT_EQ(out.files[0].filename(), "fig1_k2.csv");
    EXPECT_TRUE(std::filesystem::exists(dir / "fig1_manifest.txt"));
    for (int k : kFig1Orders) {
        for (const auto& row : fig1_rows(k, 21)) {
            const double tol = 1e-8;
            EXPECT_NEAR(row.num.mean_work, row.cf.mean_work, tol * std::max(1.0, std::abs(row.cf.mean_work)));
            EXPECT_NEAR(row.num.var_power, row.cf.var_power, tol * std::max(1.0, std::abs(row.cf.var_power)));
        }
    }
    std::ifstream in(out.files[1]);
    std::string header;
    std::getline(in, header);
    EXPECT_NE(header.find("cf_nsr_product"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Figures, IsingColumns) {
    const auto dir = scratch_dir("fig3");
    const auto out = emit_figure_dataset(Figure::fig3, dir, 11);
    ASSERT_EQ(out.files.size(), 3u);
    EXPECT_EQ(out.files[2].filename(), "fig3_s4.csv");
    std::ifstream in(out.files[0]);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "t,mean_power,mean_work,nsr_power,nsr_power_flag,nsr_work,nsr_work_flag,nsr_product,nsr_product_flag,"
              "var_work,var_power,fidelity");
    EXPECT_EQ(detail::ising_columns(false).size(), 9u);
    EXPECT_THROW(parse_figure("fig4"), ConfigError);
    std::filesystem::remove_all(dir);
}
