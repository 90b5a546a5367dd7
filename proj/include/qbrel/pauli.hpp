#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbrel/hermitian.hpp"

namespace qbrel {

enum class Axis { X, Y, Z };

/// coefficient * (product of single-site Pauli factors), sites 0-based.
struct PauliTerm {
    double coefficient = 1.0;
    std::vector<std::pair<int, Axis>> factors;

    void validate(int n_qubits) const {
        if (!std::isfinite(coefficient)) throw ConfigError("Pauli term coefficient is not finite");
        std::uint64_t seen = 0;
        for (const auto& [site, axis] : factors) {
            if (site < 0 || site >= n_qubits) {
                throw ConfigError("Pauli factor site " + std::to_string(site) + " outside 0.." +
                                  std::to_string(n_qubits - 1));
            }
            const std::uint64_t bit = std::uint64_t{1} << site;
            if (seen & bit) throw ConfigError("Pauli term repeats site " + std::to_string(site));
            seen |= bit;
        }
    }
};

/// Term acting with one axis on a list of sites.
inline PauliTerm pauli_string(double coefficient, Axis axis, std::span<const int> sites) {
    PauliTerm term{coefficient, {}};
    term.factors.reserve(sites.size());
    for (int s : sites) term.factors.emplace_back(s, axis);
    return term;
}

inline char axis_name(Axis a) { return a == Axis::X ? 'X' : (a == Axis::Y ? 'Y' : 'Z'); }

namespace detail {

inline Index site_bit(int n_qubits, int site) { return Index{1} << (n_qubits - 1 - site); }

}  // namespace detail

/// Adds coefficient * term into `out` column by column: each basis state maps
/// to exactly one basis state, so the cost is O(2^N * |factors|).
inline void accumulate_term(Eigen::MatrixXcd& out, int n_qubits, const PauliTerm& term) {
    term.validate(n_qubits);
    const Index d = Index{1} << n_qubits;
    Index flip = 0;
    for (const auto& [site, axis] : term.factors) {
        if (axis != Axis::Z) flip |= detail::site_bit(n_qubits, site);
    }
    for (Index col = 0; col < d; ++col) {
        Complex phase{term.coefficient, 0.0};
        for (const auto& [site, axis] : term.factors) {
            const bool one = (col & detail::site_bit(n_qubits, site)) != 0;
            switch (axis) {
                case Axis::X: break;
                case Axis::Y: phase *= one ? Complex{0.0, -1.0} : Complex{0.0, 1.0}; break;
                case Axis::Z: if (one) phase = -phase; break;
            }
        }
        out(col ^ flip, col) += phase;
    }
}

inline HermitianOperator pauli_sum(int n_qubits, std::span<const PauliTerm> terms, const Limits& limits = {}) {
    check_qubit_count(n_qubits, limits);
    const Index d = Index{1} << n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& t : terms) accumulate_term(m, n_qubits, t);
    return HermitianOperator(std::move(m));
}

inline HermitianOperator pauli_operator(int n_qubits, const PauliTerm& term, const Limits& limits = {}) {
    return pauli_sum(n_qubits, std::span<const PauliTerm>(&term, 1), limits);
}

}  // namespace qbrel
