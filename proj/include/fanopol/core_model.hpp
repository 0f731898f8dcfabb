#pragma once

// Device parameters and bare dispersions in natural units:
// hbar = 1, energies in units of omega_12, wavevectors in units of k_F.

#include <cmath>
#include <cstdint>
#include <string>

#include "fanopol/error.hpp"
#include "fanopol/fingerprint.hpp"

namespace fanopol {

enum class Subband : int { lower = 1, upper = 2 };

struct DeviceParams {
    double omega12 = 1.0;       // fixed unit
    double omega_c0 = 0.9;      // cavity cutoff omega_c(0)
    double rabi_res = 0.1;      // Omega_R(q_res)
    double mass_scale = 0.3;    // hbar k_F^2 / (2 m* omega_12)
    double qres_over_kf = 0.01;
    double kf = 1.0;            // fixed unit

    /// Throws ParameterError (NoResonanceError for the cutoff) on the
    /// first violated invariant.
    void validate() const {
        if (omega12 != 1.0 || kf != 1.0)
            throw ParameterError("core-model", "omega12 and kf are the units and must equal 1");
        if (!std::isfinite(omega_c0) || omega_c0 <= 0.0)
            throw ParameterError("core-model", "omega_c0 must be positive and finite");
        if (omega_c0 >= 1.0)
            throw NoResonanceError("core-model",
                                   "omega_c0 = " + std::to_string(omega_c0) +
                                       " >= omega_12: cavity never crosses the intersubband transition");
        if (!std::isfinite(rabi_res) || rabi_res < 0.0)
            throw ParameterError("core-model", "rabi_res must be >= 0");
        if (!std::isfinite(mass_scale) || mass_scale <= 0.0)
            throw ParameterError("core-model", "mass_scale must be > 0");
        if (!std::isfinite(qres_over_kf) || qres_over_kf <= 0.0)
            throw ParameterError("core-model", "qres_over_kf must be > 0");
    }

    std::uint64_t fingerprint() const noexcept {
        return Fingerprint{}
            .add(omega12)
            .add(omega_c0)
            .add(rabi_res)
            .add(mass_scale)
            .add(qres_over_kf)
            .add(kf)
            .value();
    }

    friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

/// omega_1(k) = mass_scale k^2, omega_2(k) = 1 + mass_scale k^2.
inline double subband_dispersion(int subband, double k, const DeviceParams& p) {
    if (subband != 1 && subband != 2)
        throw ParameterError("core-model", "subband index must be 1 or 2, got " + std::to_string(subband));
    if (!(k >= 0.0)) throw ParameterError("core-model", "wavevector must be >= 0");
    const double kinetic = p.mass_scale * k * k;
    return subband == 1 ? kinetic : p.omega12 + kinetic;
}

inline double subband_dispersion(Subband j, double k, const DeviceParams& p) {
    return subband_dispersion(static_cast<int>(j), k, p);
}

/// Growth-direction cavity wavevector pi/L_cav, fixed by omega_c(q_res) = 1.
inline double cavity_kz(const DeviceParams& p) {
    const double inv = p.omega12 / p.omega_c0;
    return p.qres_over_kf / std::sqrt(inv * inv - 1.0);
}

/// lambda/2 cavity: omega_c0 sqrt(1 + (q/kz)^2).
inline double cavity_dispersion(double q, const DeviceParams& p) {
    if (!(q >= 0.0)) throw ParameterError("core-model", "wavevector must be >= 0");
    const double r = q / cavity_kz(p);
    return p.omega_c0 * std::sqrt(1.0 + r * r);
}

/// q_res in k_F units. Equals qres_over_kf by construction; the resonance
/// condition is re-checked so a broken parameter set cannot slip through.
inline double resonant_wavevector(const DeviceParams& p) {
    if (!(p.omega_c0 < p.omega12))
        throw NoResonanceError("core-model", "omega_c0 >= omega_12: no resonant wavevector");
    const double q_res = p.qres_over_kf;
    const double mismatch = std::abs(cavity_dispersion(q_res, p) - p.omega12);
    if (!(mismatch < 1e-12))
        throw NoResonanceError("core-model",
                               "omega_c(q_res) deviates from omega_12 by " + std::to_string(mismatch));
    return q_res;
}

/// Collective vacuum Rabi frequency Omega_R(q) = |chi(q)| sqrt(N), normalized
/// so that Omega_R(q_res) = rabi_res. Vanishes linearly at q = 0 (TM factor).
inline double collective_coupling(double q, const DeviceParams& p) {
    if (!(q >= 0.0)) throw ParameterError("core-model", "wavevector must be >= 0");
    if (q == 0.0) return 0.0;
    const double kz = cavity_kz(p);
    const double q_res = p.qres_over_kf;
    const double kz2 = kz * kz;
    // omega_c(q_res) = omega_12 = 1
    return p.rabi_res * std::sqrt(p.omega12 / cavity_dispersion(q, p)) * (q / q_res) *
           std::sqrt((kz2 + q_res * q_res) / (kz2 + q * q));
}

}  // namespace fanopol
