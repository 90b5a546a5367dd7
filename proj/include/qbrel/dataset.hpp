#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qbrel/config.hpp"

namespace qbrel {

inline constexpr const char* kUndefinedToken = "undef";

inline std::string format_number(double v) { return detail::format_double(v); }

inline std::string format_cell(const Flagged<double>& v) {
    return v.ok() ? format_number(v.value) : std::string(kUndefinedToken);
}

inline std::string format_flag(Flag f) { return std::string(to_string(f)); }

/// One CSV column: a header and how to render it from a row.
template <class Row>
struct Column {
    std::string name;
    std::function<std::string(const Row&)> cell;
};

template <class Row>
void write_table(std::ostream& out, const std::vector<Column<Row>>& columns, const std::vector<Row>& rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c].name;
    out << '\n';
    for (const Row& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c].cell(row);
        out << '\n';
    }
    if (!out) throw Error("write failure while emitting CSV");
}

template <class Row>
void write_table_file(const std::filesystem::path& path, const std::vector<Column<Row>>& columns,
                      const std::vector<Row>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    write_table(out, columns, rows);
}

/// Value column of a plain double member.
template <class Row>
Column<Row> number_column(std::string name, double Row::*member) {
    return {std::move(name), [member](const Row& r) { return format_number(r.*member); }};
}

template <class Row>
Column<Row> flagged_column(std::string name, Flagged<double> Row::*member) {
    return {std::move(name), [member](const Row& r) { return format_cell(r.*member); }};
}

template <class Row>
Column<Row> flag_column(std::string name, Flagged<double> Row::*member) {
    return {std::move(name), [member](const Row& r) { return format_flag((r.*member).flag); }};
}

/// Columns of the `simulate` dataset, in their fixed order.
inline std::vector<Column<StatisticsRecord>> statistics_columns() {
    using R = StatisticsRecord;
    std::vector<Column<R>> cols = {
        number_column<R>("t", &R::t),
        number_column<R>("mean_work", &R::mean_work),
        number_column<R>("var_work", &R::var_work),
        flagged_column<R>("nsr_work", &R::nsr_work),
        flag_column<R>("nsr_work_flag", &R::nsr_work),
        number_column<R>("mean_power", &R::mean_power),
        number_column<R>("var_power", &R::var_power),
        flagged_column<R>("nsr_power", &R::nsr_power),
        flag_column<R>("nsr_power_flag", &R::nsr_power),
        flagged_column<R>("fisher_work", &R::fisher_work),
        flagged_column<R>("angle_work", &R::angle_work),
        flagged_column<R>("bound_work", &R::bound_work),
        flagged_column<R>("fisher_power", &R::fisher_power),
        flagged_column<R>("angle_power", &R::angle_power),
        flagged_column<R>("bound_power", &R::bound_power),
    };
    cols.push_back({"tradeoff_lhs", [](const R& r) { return r.tradeoff.ok() ? format_number(r.tradeoff.lhs) : kUndefinedToken; }});
    cols.push_back({"tradeoff_rhs", [](const R& r) { return r.tradeoff.ok() ? format_number(r.tradeoff.rhs) : kUndefinedToken; }});
    cols.push_back({"tradeoff_flag", [](const R& r) { return format_flag(r.tradeoff.flag); }});
    cols.push_back(flagged_column<R>("fidelity", &R::fidelity));
    return cols;
}

inline void write_statistics_csv(std::ostream& out, const std::vector<StatisticsRecord>& records) {
    write_table(out, statistics_columns(), records);
}

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

inline void write_manifest(const std::filesystem::path& path, const ManifestEntries& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "version = " << kVersion << '\n';
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
    if (!out) throw Error("write failure while emitting manifest");
}

struct ScenarioOutput {
    std::filesystem::path csv;
    std::filesystem::path manifest;
    std::size_t rows = 0;
};

/// Runs a scenario and writes <directory>/<dataset>.csv plus its manifest.
inline ScenarioOutput write_scenario(const ScenarioConfig& cfg) {
    const auto records = run_scenario(cfg);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    ScenarioOutput out{dir / (cfg.dataset + ".csv"), dir / (cfg.dataset + ".manifest"), records.size()};
    write_table_file(out.csv, statistics_columns(), records);
    write_manifest(out.manifest, resolved_entries(cfg));
    return out;
}

}  // namespace qbrel
