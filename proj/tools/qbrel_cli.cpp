#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qbrel/verify.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kVerifyFailed = 2, kResourceCap = 3 };

nlohmann::json report_json(const qbrel::VerifyReport& report) {
    nlohmann::json out;
    out["version"] = qbrel::kVersion;
    out["level"] = qbrel::to_string(report.level);
    out["passed"] = report.passed();
    out["seconds"] = report.seconds;
    for (const auto& c : report.criteria) {
        nlohmann::json item{{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"seconds", c.seconds}};
        for (const auto& m : c.measurements) {
            nlohmann::json entry{{"name", m.name}, {"value", m.value}};
            if (m.limit != 0.0) entry["limit"] = m.limit;
            item["measurements"].push_back(entry);
        }
        item["notes"] = c.notes;
        out["criteria"].push_back(item);
    }
    return out;
}

void print_closed_form_header() {
    std::cout << "t,mean_work,var_work,nsr_work,mean_power,var_power,nsr_power,nsr_product\n";
}

void print_closed_form(const qbrel::analytic::ClosedFormRecord& r) {
    using qbrel::format_cell;
    using qbrel::format_number;
    std::cout << format_number(r.t) << ',' << format_number(r.mean_work) << ',' << format_number(r.var_work) << ','
              << format_cell(r.nsr_work) << ',' << format_number(r.mean_power) << ',' << format_number(r.var_power)
              << ',' << format_cell(r.nsr_power) << ',' << format_cell(r.nsr_product) << '\n';
}

std::vector<double> analytic_times(const std::vector<double>& explicit_times, double t_final, int steps) {
    if (!explicit_times.empty()) return explicit_times;
    return qbrel::TimeGrid(t_final, steps).points();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reliability of quantum batteries: simulation, figure datasets and verification"};
    app.set_version_flag("--version", qbrel::kVersion);
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a scenario file and write its CSV dataset and manifest");
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_override;
    simulate->add_option("config", config_path, "Scenario file (INI sections [model] [grid] [output] [options])")
        ->required();
    simulate->add_option("--set", overrides, "Override a config entry, e.g. --set grid.steps=1000");
    simulate->add_option("--out", out_override, "Output directory (overrides output.directory)");

    // figure
    auto* figure = app.add_subcommand("figure", "Emit the CSV datasets of one figure");
    std::string figure_tag;
    std::string figure_dir;
    int figure_steps = qbrel::kFigureSteps;
    figure->add_option("name", figure_tag, "fig1, fig2 or fig3")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    figure->add_option("--out", figure_dir, "Output directory")->required();
    figure->add_option("--steps", figure_steps, "Grid points per curve")->check(CLI::Range(2, 1000000));

    // verify
    auto* verify = app.add_subcommand("verify", "Run the acceptance checks and write a JSON report");
    std::string level = "fast";
    std::string report_path;
    verify->add_option("--level", level, "fast (N <= 8) or full (N <= 12)")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--report", report_path, "Report file (default verify_<level>.json)");

    // analytic
    auto* analytic = app.add_subcommand("analytic", "Print closed-form statistics");
    analytic->require_subcommand(1);
    double omega0 = 1.0, drive = 1.0, t_final = 1.0;
    int steps = 11, n_qubits = 12, order = 1;
    bool scaling = false;
    std::vector<double> times;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--omega0", omega0, "Level splitting omega0");
        cmd->add_option("--drive", drive, "Drive amplitude Omega0");
        cmd->add_option("--t", times, "Explicit time points");
        cmd->add_option("--t-final", t_final, "Grid end when --t is not given");
        cmd->add_option("--steps", steps, "Grid points when --t is not given");
    };
    auto* single = analytic->add_subcommand("single", "Qubit battery");
    add_common(single);
    auto* kbody = analytic->add_subcommand("kbody", "k-body battery of N qubits");
    add_common(kbody);
    kbody->add_option("--n", n_qubits, "Number of qubits N");
    kbody->add_option("--k", order, "Block size k (must divide N)");
    kbody->add_flag("--scaling", scaling, "Print the small-angle approximations instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) {
            qbrel::ConfigEntries entries = qbrel::read_config_file(config_path);
            for (const auto& o : overrides) qbrel::apply_override(entries, o);
            if (!out_override.empty()) entries["output.directory"] = out_override;
            const qbrel::ScenarioConfig cfg = qbrel::scenario_from_entries(entries);
            const auto out = qbrel::write_scenario(cfg);
            std::cout << "wrote " << out.rows << " rows to " << out.csv.string() << "\n"
                      << "manifest " << out.manifest.string() << "\n";
        } else if (*figure) {
            const auto out = qbrel::emit_figure_dataset(qbrel::parse_figure(figure_tag), figure_dir, figure_steps);
            for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
            std::cout << "manifest " << out.manifest.string() << "\n";
        } else if (*verify) {
            const auto lvl = qbrel::parse_verify_level(level);
            const auto report = qbrel::verify_suite(lvl, [](const qbrel::CriterionResult& c) {
                std::cout << qbrel::summary_line(c) << "\n";
                for (const auto& n : c.notes) std::cout << "    " << n << "\n";
                std::cout.flush();
            });
            if (report_path.empty()) report_path = "verify_" + level + ".json";
            std::ofstream out(report_path);
            if (!out) throw qbrel::Error("cannot write report '" + report_path + "'");
            out << report_json(report).dump(2) << "\n";
            std::cout << (report.passed() ? "all criteria passed" : "verification FAILED") << " (" << report.seconds
                      << " s), report " << report_path << "\n";
            return report.passed() ? kOk : kVerifyFailed;
        } else if (*single) {
            print_closed_form_header();
            for (double t : analytic_times(times, t_final, steps)) {
                print_closed_form(qbrel::analytic::single_qubit_closed_form(omega0, drive, t));
            }
        } else if (*kbody) {
            const auto ts = analytic_times(times, t_final, steps);
            if (scaling) {
                std::cout << "t,nsr_work_approx,nsr_work_flag,nsr_power_approx,nsr_power_flag\n";
                for (double t : ts) {
                    const auto a = qbrel::analytic::kbody_scaling(n_qubits, order, drive, t);
                    std::cout << qbrel::format_number(t) << ',' << qbrel::format_number(a.nsr_work.value) << ','
                              << qbrel::to_string(a.nsr_work.flag) << ',' << qbrel::format_number(a.nsr_power.value)
                              << ',' << qbrel::to_string(a.nsr_power.flag) << '\n';
                }
            } else {
                print_closed_form_header();
                for (double t : ts) {
                    print_closed_form(qbrel::analytic::kbody_closed_form(n_qubits, order, drive, omega0, t));
                }
            }
        }
    } catch (const qbrel::ResourceCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kResourceCap;
    } catch (const qbrel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
