#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "qbrel/pauli.hpp"
#include "qbrel/spectral.hpp"

namespace qbrel {

/// Omega0 sigma_x - H_B on a single qubit.
struct SingleQubit {
    double drive = 1.0;  // Omega0
};

/// Block drive Omega_k sum_j X_j - H_B, X_j the sigma_x string on sites
/// kj .. kj+k-1, with Omega_k = (k/N) Omega0 so that ||H_T|| = Omega0.
struct KBody {
    int k = 1;
    double drive = 1.0;  // Omega0
};

/// -Omega_s sum_i sigma_x^(i) ... sigma_x^(i+s-1) - H_B over the N-s+1
/// windows of s consecutive sites (open chain).
struct IsingS {
    int s = 2;
    double coupling = 1.0;  // Omega_s
};

/// Charging Hamiltonian given directly as a sum of Pauli terms.
struct Custom {
    std::vector<PauliTerm> terms;
};

using ChargingScheme = std::variant<SingleQubit, KBody, IsingS, Custom>;

/// Which norm divides the charging part inside the power observable when the
/// total Hamiltonian is normalized.
enum class PowerScale {
    eigenvalue_range,  // E_max - E_min (default; matches the normalized evolution)
    spectral_norm,     // max(|E_min|, |E_max|) of the unnormalized total Hamiltonian
};

struct BatteryModel {
    int n_qubits = 1;
    double omega0 = 1.0;
    ChargingScheme scheme = SingleQubit{};
    bool normalize_total = false;
    PowerScale power_scale = PowerScale::eigenvalue_range;

    void validate(const Limits& limits = {}) const {
        check_qubit_count(n_qubits, limits);
        if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0 must be a positive finite number");
        std::visit(
            [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, SingleQubit>) {
                    if (n_qubits != 1) throw ConfigError("single-qubit scheme requires n_qubits = 1");
                    check_finite(s.drive, "drive");
                } else if constexpr (std::is_same_v<S, KBody>) {
                    if (s.k < 1 || s.k > n_qubits) throw ConfigError("k-body scheme requires 1 <= k <= N");
                    if (n_qubits % s.k != 0) throw ConfigError("k-body scheme requires k to divide N");
                    check_finite(s.drive, "drive");
                } else if constexpr (std::is_same_v<S, IsingS>) {
                    if (s.s < 2 || s.s > n_qubits) throw ConfigError("Ising scheme requires 2 <= s <= N");
                    check_finite(s.coupling, "coupling");
                } else {
                    for (const auto& t : s.terms) t.validate(n_qubits);
                }
            },
            scheme);
    }

private:
    static void check_finite(double v, const char* what) {
        if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
    }
};

/// Omega_k = (k/N) Omega0.
inline double kbody_coupling(int n_qubits, int k, double drive) {
    return static_cast<double>(k) / static_cast<double>(n_qubits) * drive;
}

/// H_B = -(omega0/2) sum_i sigma_z^(i); |0...0> is the ground state.
inline HermitianOperator build_battery_hamiltonian(int n_qubits, double omega0, const Limits& limits = {}) {
    check_qubit_count(n_qubits, limits);
    if (!(omega0 > 0.0)) throw ConfigError("omega0 must be positive");
    const Index d = Index{1} << n_qubits;
    Eigen::VectorXd diag(d);
    for (Index b = 0; b < d; ++b) {
        const int ones = std::popcount(static_cast<unsigned long long>(b));
        diag(b) = -0.5 * omega0 * static_cast<double>(n_qubits - 2 * ones);
    }
    return HermitianOperator::diagonal(diag);
}

/// Pauli terms of the drive, i.e. the charging Hamiltonian without its -H_B part
/// (for Custom: all terms).
inline std::vector<PauliTerm> drive_terms(const BatteryModel& model) {
    const int n = model.n_qubits;
    return std::visit(
        [&](const auto& s) -> std::vector<PauliTerm> {
            using S = std::decay_t<decltype(s)>;
            std::vector<PauliTerm> terms;
            if constexpr (std::is_same_v<S, SingleQubit>) {
                terms.push_back(PauliTerm{s.drive, {{0, Axis::X}}});
            } else if constexpr (std::is_same_v<S, KBody>) {
                const double c = kbody_coupling(n, s.k, s.drive);
                std::vector<int> sites(static_cast<std::size_t>(s.k));
                for (int j = 0; j < n / s.k; ++j) {
                    std::iota(sites.begin(), sites.end(), j * s.k);
                    terms.push_back(pauli_string(c, Axis::X, sites));
                }
            } else if constexpr (std::is_same_v<S, IsingS>) {
                std::vector<int> sites(static_cast<std::size_t>(s.s));
                for (int i = 0; i + s.s <= n; ++i) {
                    std::iota(sites.begin(), sites.end(), i);
                    terms.push_back(pauli_string(-s.coupling, Axis::X, sites));
                }
            } else {
                terms = s.terms;
            }
            return terms;
        },
        model.scheme);
}

inline bool drive_replaces_battery(const BatteryModel& model) {
    return !std::holds_alternative<Custom>(model.scheme);
}

/// Charging Hamiltonian H_C. Built-in schemes subtract H_B so that the total
/// Hamiltonian is the bare drive.
inline HermitianOperator build_charging_hamiltonian(const BatteryModel& model, const Limits& limits = {}) {
    model.validate(limits);
    const auto terms = drive_terms(model);
    HermitianOperator drive = pauli_sum(model.n_qubits, terms, limits);
    if (!drive_replaces_battery(model)) return drive;
    return drive - build_battery_hamiltonian(model.n_qubits, model.omega0, limits);
}

struct NormalizedTotal {
    HermitianOperator h_norm;        // generator of the evolution
    double e_min = 0.0;              // extremal eigenvalues of the raw total Hamiltonian
    double e_max = 0.0;
    double scale = 1.0;              // e_max - e_min when normalized, else 1
    SpectralDecomposition spectrum;  // eigendecomposition of h_norm
};

inline constexpr double kMinSpectralWidth = 1e-12;

/// Total Hamiltonian H_T = H_B + H_C, optionally mapped onto spectrum [0, 1]
/// via (H_T - E_min) / (E_max - E_min).
inline NormalizedTotal total_hamiltonian(const BatteryModel& model, const HermitianOperator& h_battery,
                                         const HermitianOperator& h_charge) {
    if (h_battery.dim() != h_charge.dim() || h_battery.dim() != (Index{1} << model.n_qubits)) {
        throw DimensionError("total_hamiltonian: operand dimension mismatch");
    }
    const HermitianOperator h_total = h_battery + h_charge;
    SpectralDecomposition spec = spectral_decompose(h_total);
    NormalizedTotal out;
    out.e_min = spec.min_eigenvalue();
    out.e_max = spec.max_eigenvalue();
    if (!model.normalize_total) {
        out.h_norm = h_total;
        out.scale = 1.0;
        out.spectrum = std::move(spec);
        return out;
    }
    const double width = out.e_max - out.e_min;
    if (!(width >= kMinSpectralWidth)) {
        throw NumericalError("cannot normalize total Hamiltonian: spectral width " + std::to_string(width));
    }
    out.scale = width;
    const Index d = h_total.dim();
    out.h_norm = HermitianOperator((h_total.matrix() - out.e_min * Eigen::MatrixXcd::Identity(d, d)) / width);
    out.spectrum = spec.affine(out.e_min, width);
    return out;
}

inline NormalizedTotal total_hamiltonian(const BatteryModel& model, const Limits& limits = {}) {
    return total_hamiltonian(model, build_battery_hamiltonian(model.n_qubits, model.omega0, limits),
                             build_charging_hamiltonian(model, limits));
}

/// Divisor applied to the charging Hamiltonian inside the power observable.
inline double power_observable_scale(const BatteryModel& model, const NormalizedTotal& total) {
    if (!model.normalize_total) return 1.0;
    if (model.power_scale == PowerScale::spectral_norm) return std::max(std::abs(total.e_min), std::abs(total.e_max));
    return total.scale;
}

/// P_0 = -(i/scale) [H_B, H_C]  (hbar = 1).
inline HermitianOperator power_counting_observable(const HermitianOperator& h_battery,
                                                   const HermitianOperator& h_charge, double scale = 1.0) {
    if (h_battery.dim() != h_charge.dim()) throw DimensionError("power observable: operand dimension mismatch");
    if (!(scale > 0.0)) throw ConfigError("power observable scale must be positive");
    const Complex factor{0.0, -1.0 / scale};
    Eigen::MatrixXcd commutator;
    if (h_battery.is_diagonal()) {
        // [D, C]_{ij} = (d_i - d_j) C_{ij}
        const Eigen::VectorXcd diag = h_battery.matrix().diagonal();
        commutator = h_charge.matrix();
        for (Index c = 0; c < commutator.cols(); ++c) {
            commutator.col(c).array() *= (diag.array() - diag(c));
        }
    } else {
        commutator = h_battery.matrix() * h_charge.matrix() - h_charge.matrix() * h_battery.matrix();
    }
    return HermitianOperator(factor * commutator);
}

}  // namespace qbrel
