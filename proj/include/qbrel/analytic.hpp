#pragma once

#include <cmath>

#include "qbrel/error.hpp"
#include "qbrel/flagged.hpp"

namespace qbrel::analytic {

/// Closed-form work and power statistics at one time.
struct ClosedFormRecord {
    double t = 0.0;
    double mean_work = 0.0;
    double var_work = 0.0;
    Flagged<double> nsr_work;
    double mean_power = 0.0;
    double var_power = 0.0;
    Flagged<double> nsr_power;
    Flagged<double> nsr_product;
};

inline constexpr double kTurningPointTolerance = 1e-12;

namespace detail {

// Shared by both models: an effective qubit rotating at angle x = rate * t.
inline void fill_nsrs(ClosedFormRecord& r, double x, double ratio) {
    const double s = std::sin(x), c = std::cos(x);
    r.nsr_work = std::abs(s) < kTurningPointTolerance ? Flagged<double>::flagged(Flag::undefined)
                                                     : Flagged<double>::defined(ratio * c * c / (s * s));
    r.nsr_power = std::abs(s * c) < kTurningPointTolerance ? Flagged<double>::flagged(Flag::undefined)
                                                          : Flagged<double>::defined(ratio * s * s / (c * c));
    r.nsr_product = r.nsr_work.ok() && r.nsr_power.ok()
                        ? Flagged<double>::defined(r.nsr_work.value * r.nsr_power.value)
                        : Flagged<double>::flagged(Flag::undefined);
}

}  // namespace detail

/// Qubit battery -(omega0/2) sigma_z charged by Omega0 sigma_x from |0>.
inline ClosedFormRecord single_qubit_closed_form(double omega0, double drive, double t) {
    const double x = drive * t;
    const double s = std::sin(x);
    const double s2 = std::sin(2.0 * x);
    ClosedFormRecord r;
    r.t = t;
    r.mean_work = omega0 * s * s;
    r.var_work = 0.25 * omega0 * omega0 * s2 * s2;
    r.mean_power = drive * omega0 * s2;
    r.var_power = 4.0 * drive * drive * omega0 * omega0 * s * s * s * s;
    detail::fill_nsrs(r, x, 1.0);
    return r;
}

/// N qubits charged in N/k independent blocks of k-body sigma_x strings with
/// Omega_k = (k/N) Omega0; beta = omega0 Omega0.
inline ClosedFormRecord kbody_closed_form(int n_qubits, int k, double drive, double omega0, double t) {
    if (k < 1 || n_qubits < 1 || n_qubits % k != 0) throw ConfigError("kbody_closed_form: k must divide N");
    const double n = n_qubits, kk = k;
    const double rate = kk / n * drive;
    const double beta = omega0 * drive;
    const double x = rate * t;
    const double s = std::sin(x);
    const double s2 = std::sin(2.0 * x);
    ClosedFormRecord r;
    r.t = t;
    r.mean_work = n * omega0 * s * s;
    r.var_work = n * kk * omega0 * omega0 / 4.0 * s2 * s2;
    r.mean_power = kk * beta * s2;
    r.var_power = 4.0 * kk * kk * kk / n * beta * beta * s * s * s * s;
    detail::fill_nsrs(r, x, kk / n);
    return r;
}

struct ScalingApprox {
    Flagged<double> nsr_work;
    Flagged<double> nsr_power;
};

/// Regime guard for the small-angle approximations: N/k > 20 Omega0 t.
inline bool in_small_angle_regime(int n_qubits, int k, double drive, double t) {
    return static_cast<double>(n_qubits) / k > 20.0 * std::abs(drive * t);
}

/// Small-angle forms N_W ~ (N/k) / (Omega0 t)^2 and N_P ~ (k/N)^3 (Omega0 t)^2,
/// valid while N/k >> Omega0 t. Outside the guard both carry out_of_regime.
inline ScalingApprox kbody_scaling(int n_qubits, int k, double drive, double t) {
    if (k < 1 || n_qubits < 1) throw ConfigError("kbody_scaling: invalid N or k");
    const double ratio = static_cast<double>(n_qubits) / k;
    const double x2 = drive * drive * t * t;
    ScalingApprox out;
    if (x2 == 0.0) {
        out.nsr_work = Flagged<double>::flagged(Flag::undefined);
        out.nsr_power = Flagged<double>::defined(0.0);
    } else {
        out.nsr_work = Flagged<double>::defined(ratio / x2);
        out.nsr_power = Flagged<double>::defined(x2 / (ratio * ratio * ratio));
    }
    if (!in_small_angle_regime(n_qubits, k, drive, t)) {
        out.nsr_work.flag = Flag::out_of_regime;
        out.nsr_power.flag = Flag::out_of_regime;
    }
    return out;
}

}  // namespace qbrel::analytic
