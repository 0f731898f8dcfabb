#pragma once

// Electron spectral functions A_j^+(k, omega) for both subbands.
//
// Subband 1 is a single bare line above the Fermi sea and nothing inside it.
// Subband 2 below k_F cannot emit (the final state is occupied) and stays a
// bare line; above k_F it is the dressed Fano spectrum shifted by omega_1(k).

#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fanopol/arrowhead.hpp"
#include "fanopol/core_model.hpp"
#include "fanopol/error.hpp"
#include "fanopol/fingerprint.hpp"
#include "fanopol/io.hpp"

namespace fanopol {

struct SpectralLine {
    double omega = 0.0;
    double weight = 0.0;
};

struct SpectralCurve {
    std::vector<double> omega_samples;
    std::vector<double> values;
    std::uint64_t fingerprint = 0;

    std::size_t size() const noexcept { return values.size(); }
};

inline constexpr double default_display_width = 0.005;

/// k = k_F counts as outside the sea.
inline bool outside_fermi_sea(double k, const DeviceParams& p) noexcept { return k >= p.kf; }

inline void require_consistent(const EigenSystem& eig, const DeviceParams& p, const char* module) {
    if (eig.source_fingerprint != p.fingerprint())
        throw ConsistencyError(module, "eigensystem was computed for parameters " +
                                           Fingerprint::to_hex(eig.source_fingerprint) + ", not " +
                                           Fingerprint::to_hex(p.fingerprint()));
}

inline std::vector<SpectralLine> spectral_function_subband1(double k, const DeviceParams& p) {
    if (!(k >= 0.0)) throw ParameterError("spectral", "k must be >= 0");
    if (!outside_fermi_sea(k, p)) return {};
    return {{subband_dispersion(Subband::lower, k, p), 1.0}};
}

/// Lines on the reduced axis omega - omega_1(k), valid for every k >= k_F.
inline std::vector<SpectralLine> reduced_spectrum(const EigenSystem& eig) {
    std::vector<SpectralLine> out(eig.size());
    for (std::size_t z = 0; z < eig.size(); ++z) out[z] = {eig.omega[z], eig.mu[z] * eig.mu[z]};
    return out;
}

inline std::vector<SpectralLine> spectral_function_subband2(double k, const EigenSystem& eig,
                                                            const DeviceParams& p) {
    if (!(k >= 0.0)) throw ParameterError("spectral", "k must be >= 0");
    require_consistent(eig, p, "spectral");
    if (!outside_fermi_sea(k, p)) return {{subband_dispersion(Subband::upper, k, p), 1.0}};
    auto lines = reduced_spectrum(eig);
    const double shift = subband_dispersion(Subband::lower, k, p);
    for (auto& l : lines) l.omega += shift;
    return lines;
}

inline double total_weight(std::span<const SpectralLine> lines) {
    double s = 0.0;
    for (const auto& l : lines) s += l.weight;
    return s;
}

inline std::vector<double> uniform_axis(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ParameterError("spectral", "axis needs hi > lo and at least 2 points");
    std::vector<double> x(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
    x.back() = hi;
    return x;
}

inline SpectralCurve broaden(std::span<const SpectralLine> lines, double gamma, std::span<const double> omega,
                             std::uint64_t fingerprint = 0) {
    if (!(gamma > 0.0)) throw ParameterError("spectral", "display width must be > 0");
    SpectralCurve c;
    c.fingerprint = fingerprint;
    c.omega_samples.assign(omega.begin(), omega.end());
    c.values.assign(omega.size(), 0.0);
    const double g2 = gamma * gamma;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        double s = 0.0;
        for (const auto& l : lines) {
            const double d = omega[i] - l.omega;
            s += l.weight / (d * d + g2);
        }
        c.values[i] = s * gamma / std::numbers::pi;
    }
    return c;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

/// Indices of strict interior local maxima (plateaus count once, at their left end).
inline std::vector<std::size_t> local_maxima(std::span<const double> y) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1])) continue;
        std::size_t j = i;
        while (j + 1 < y.size() && y[j + 1] == y[i]) ++j;
        if (j + 1 < y.size() && y[j + 1] < y[i]) out.push_back(i);
    }
    return out;
}

/// Same, for minima.
inline std::vector<std::size_t> local_minima(std::span<const double> y) {
    std::vector<double> neg(y.begin(), y.end());
    for (auto& v : neg) v = -v;
    return local_maxima(neg);
}

inline void write_csv(std::ostream& out, const SpectralCurve& c) {
    out << "# fingerprint " << Fingerprint::to_hex(c.fingerprint) << '\n';
    out << "omega,value\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double row[2] = {c.omega_samples[i], c.values[i]};
        write_csv_row(out, row);
    }
}

}  // namespace fanopol
