#pragma once

// Scenario files are INI-style: one `key = value` per line grouped in
// [model], [grid], [output] and [options] sections.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qbrel/pipeline.hpp"

namespace qbrel {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline double parse_double(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return out;
}

inline int parse_int(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string v = lower(trim(text));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parses "0.5 X0 X1, -1 Z2": comma-separated terms, each a coefficient
/// followed by axis+site factors.
inline std::vector<PauliTerm> parse_pauli_terms(const std::string& text) {
    std::vector<PauliTerm> terms;
    std::stringstream all(text);
    std::string chunk;
    while (std::getline(all, chunk, ',')) {
        std::istringstream in(chunk);
        std::string word;
        if (!(in >> word)) continue;
        PauliTerm term;
        term.coefficient = detail::parse_double("model.terms", word);
        while (in >> word) {
            const char a = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            if (word.size() < 2 || (a != 'X' && a != 'Y' && a != 'Z')) {
                throw ConfigError("model.terms: bad factor '" + word + "' (expected e.g. X0)");
            }
            const Axis axis = a == 'X' ? Axis::X : (a == 'Y' ? Axis::Y : Axis::Z);
            term.factors.emplace_back(detail::parse_int("model.terms", word.substr(1)), axis);
        }
        terms.push_back(std::move(term));
    }
    if (terms.empty()) throw ConfigError("model.terms: custom scheme needs at least one term");
    return terms;
}

inline std::string format_pauli_terms(const std::vector<PauliTerm>& terms) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += ", ";
        out += detail::format_double(terms[i].coefficient);
        for (const auto& [site, axis] : terms[i].factors) {
            out += ' ';
            out += axis_name(axis);
            out += std::to_string(site);
        }
    }
    return out;
}

/// Flat (section.key -> value) view of a scenario file.
using ConfigEntries = std::map<std::string, std::string>;

inline ConfigEntries read_config_entries(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ConfigEntries out;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config key '" + section + "' must live inside a [section]");
        }
        for (const auto& [key, value] : body) out[detail::lower(section) + "." + detail::lower(key)] = value.data();
    }
    return out;
}

inline ConfigEntries read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return read_config_entries(in);
}

/// Applies a "section.key=value" override.
inline void apply_override(ConfigEntries& entries, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    const std::string key = detail::lower(detail::trim(assignment.substr(0, eq)));
    if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' lacks a section");
    entries[key] = detail::trim(assignment.substr(eq + 1));
}

inline ScenarioConfig scenario_from_entries(const ConfigEntries& entries) {
    static const std::set<std::string> known = {
        "model.n_qubits", "model.omega0",       "model.scheme",        "model.order",
        "model.drive",    "model.normalize_total", "model.power_scale", "model.terms",
        "model.max_qubits", "grid.t_final",     "grid.steps",          "output.directory",
        "output.dataset", "options.emit_bounds", "options.emit_tradeoff", "options.emit_fidelity"};
    for (const auto& [key, value] : entries) {
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto require = [&](const std::string& key) -> const std::string& {
        const std::string* v = get(key);
        if (!v) throw ConfigError("missing required config key '" + key + "'");
        return *v;
    };

    ScenarioConfig cfg;
    BatteryModel& m = cfg.model;
    m.n_qubits = detail::parse_int("model.n_qubits", require("model.n_qubits"));
    if (const auto* v = get("model.omega0")) m.omega0 = detail::parse_double("model.omega0", *v);
    const double drive = get("model.drive") ? detail::parse_double("model.drive", *get("model.drive")) : 1.0;
    const std::string scheme = detail::lower(detail::trim(require("model.scheme")));
    if (scheme == "single") {
        m.scheme = SingleQubit{drive};
    } else if (scheme == "kbody") {
        m.scheme = KBody{detail::parse_int("model.order", require("model.order")), drive};
    } else if (scheme == "ising") {
        m.scheme = IsingS{detail::parse_int("model.order", require("model.order")), drive};
    } else if (scheme == "custom") {
        m.scheme = Custom{parse_pauli_terms(require("model.terms"))};
    } else {
        throw ConfigError("model.scheme must be one of single, kbody, ising, custom; got '" + scheme + "'");
    }
    if (const auto* v = get("model.normalize_total")) m.normalize_total = detail::parse_bool("model.normalize_total", *v);
    if (const auto* v = get("model.power_scale")) {
        const std::string ps = detail::lower(detail::trim(*v));
        if (ps == "range") m.power_scale = PowerScale::eigenvalue_range;
        else if (ps == "spectral_norm") m.power_scale = PowerScale::spectral_norm;
        else throw ConfigError("model.power_scale must be range or spectral_norm");
    }
    if (const auto* v = get("model.max_qubits")) cfg.max_qubits = detail::parse_int("model.max_qubits", *v);

    cfg.t_final = detail::parse_double("grid.t_final", require("grid.t_final"));
    cfg.steps = detail::parse_int("grid.steps", require("grid.steps"));
    if (const auto* v = get("output.directory")) cfg.out_dir = detail::trim(*v);
    if (const auto* v = get("output.dataset")) cfg.dataset = detail::trim(*v);
    if (const auto* v = get("options.emit_bounds")) cfg.emit_bounds = detail::parse_bool("options.emit_bounds", *v);
    if (const auto* v = get("options.emit_tradeoff")) cfg.emit_tradeoff = detail::parse_bool("options.emit_tradeoff", *v);
    if (const auto* v = get("options.emit_fidelity")) cfg.emit_fidelity = detail::parse_bool("options.emit_fidelity", *v);
    cfg.validate();
    return cfg;
}

/// The resolved configuration as ordered (section.key, value) pairs.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(const ScenarioConfig& cfg) {
    const BatteryModel& m = cfg.model;
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("model.n_qubits", std::to_string(m.n_qubits));
    out.emplace_back("model.omega0", detail::format_double(m.omega0));
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SingleQubit>) {
                out.emplace_back("model.scheme", "single");
                out.emplace_back("model.drive", detail::format_double(s.drive));
            } else if constexpr (std::is_same_v<S, KBody>) {
                out.emplace_back("model.scheme", "kbody");
                out.emplace_back("model.order", std::to_string(s.k));
                out.emplace_back("model.drive", detail::format_double(s.drive));
            } else if constexpr (std::is_same_v<S, IsingS>) {
                out.emplace_back("model.scheme", "ising");
                out.emplace_back("model.order", std::to_string(s.s));
                out.emplace_back("model.drive", detail::format_double(s.coupling));
            } else {
                out.emplace_back("model.scheme", "custom");
                out.emplace_back("model.terms", format_pauli_terms(s.terms));
            }
        },
        m.scheme);
    out.emplace_back("model.normalize_total", m.normalize_total ? "true" : "false");
    out.emplace_back("model.power_scale", m.power_scale == PowerScale::spectral_norm ? "spectral_norm" : "range");
    out.emplace_back("model.max_qubits", std::to_string(cfg.max_qubits));
    out.emplace_back("grid.t_final", detail::format_double(cfg.t_final));
    out.emplace_back("grid.steps", std::to_string(cfg.steps));
    out.emplace_back("output.directory", cfg.out_dir);
    out.emplace_back("output.dataset", cfg.dataset);
    out.emplace_back("options.emit_bounds", cfg.emit_bounds ? "true" : "false");
    out.emplace_back("options.emit_tradeoff", cfg.emit_tradeoff ? "true" : "false");
    out.emplace_back("options.emit_fidelity", cfg.emit_fidelity ? "true" : "false");
    return out;
}

}  // namespace qbrel
