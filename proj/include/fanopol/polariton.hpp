#pragma once

// Intersubband cavity polariton branches and the Fano couplings of the bare
// second-subband electron to them. Dark states never appear here: only the
// two bright combinations per wavevector couple to the electron.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fanopol/core_model.hpp"
#include "fanopol/error.hpp"

namespace fanopol {

enum class Branch : int { lower = -1, upper = +1 };

inline const char* to_string(Branch b) { return b == Branch::lower ? "-" : "+"; }

struct BranchPoint {
    double q = 0.0;
    double omega_minus = 0.0;
    double omega_plus = 0.0;
    double photon_frac_minus = 0.0;
    double photon_frac_plus = 0.0;
};

/// Ring radii of the discretized in-plane photon continuum plus their
/// trapezoidal cell widths.
class QGrid {
public:
    QGrid() = default;

    /// Trapezoidal widths from arbitrary strictly increasing points (>= 2).
    static QGrid from_points(std::vector<double> q) {
        if (q.size() < 2) throw ParameterError("polariton", "need at least two ring radii");
        std::vector<double> dq(q.size(), 0.0);
        for (std::size_t i = 0; i + 1 < q.size(); ++i) {
            const double h = q[i + 1] - q[i];
            dq[i] += 0.5 * h;
            dq[i + 1] += 0.5 * h;
        }
        return QGrid(std::move(q), std::move(dq));
    }

    static QGrid uniform(double q_min, double q_max, std::size_t n) {
        if (n == 0) throw ParameterError("polariton", "grid needs at least one ring");
        if (!(q_min > 0.0) || !(q_max > q_min))
            throw ParameterError("polariton", "grid needs 0 < q_min < q_max");
        if (n == 1) return single(0.5 * (q_min + q_max), q_max - q_min);
        std::vector<double> q(n);
        const double h = (q_max - q_min) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) q[i] = q_min + h * static_cast<double>(i);
        q.back() = q_max;
        return from_points(std::move(q));
    }

    static QGrid single(double q, double dq) { return QGrid({q}, {dq}); }

    /// Explicit rings and widths; validated.
    QGrid(std::vector<double> q, std::vector<double> dq) : q_(std::move(q)), dq_(std::move(dq)) {
        if (q_.empty()) throw ParameterError("polariton", "empty q grid");
        if (q_.size() != dq_.size()) throw ParameterError("polariton", "ring and width counts differ");
        if (!(q_.front() > 0.0)) throw ParameterError("polariton", "first ring radius must be > 0");
        for (std::size_t i = 0; i < q_.size(); ++i) {
            if (!std::isfinite(q_[i]) || !(dq_[i] > 0.0))
                throw ParameterError("polariton", "ring widths must be positive and finite");
            if (i > 0 && !(q_[i] > q_[i - 1]))
                throw ParameterError("polariton", "ring radii must be strictly increasing");
        }
    }

    std::size_t size() const noexcept { return q_.size(); }
    bool empty() const noexcept { return q_.empty(); }
    const std::vector<double>& q_values() const noexcept { return q_; }
    const std::vector<double>& spacings() const noexcept { return dq_; }
    double q(std::size_t i) const { return q_[i]; }
    double dq(std::size_t i) const { return dq_[i]; }

private:
    std::vector<double> q_;
    std::vector<double> dq_;
};

/// Ring grid in units of q_res: [q_min, q_max] * q_res with n rings.
struct GridSpec {
    std::size_t n_rings = 400;
    double q_min_over_qres = 0.05;
    double q_max_over_qres = 4.0;

    QGrid make(const DeviceParams& p) const {
        const double q_res = p.qres_over_kf;
        return QGrid::uniform(q_min_over_qres * q_res, q_max_over_qres * q_res, n_rings);
    }

    GridSpec refined() const { return {2 * n_rings, q_min_over_qres, q_max_over_qres}; }
};

/// Branch energies (omega_-, omega_+) at wavevector q.
inline std::pair<double, double> polariton_frequencies(double q, const DeviceParams& p) {
    if (!(q > 0.0)) throw ParameterError("polariton", "polariton branches need q > 0");
    const double wc = cavity_dispersion(q, p);
    const double rabi = collective_coupling(q, p);
    const double mean = 0.5 * (wc + p.omega12);
    const double half_detuning = 0.5 * (wc - p.omega12);
    const double root = std::hypot(half_detuning, rabi);
    return {mean - root, mean + root};
}

/// Photon amplitude of the bright state at branch energy `omega`:
/// (omega - 1) / sqrt((omega - 1)^2 + Omega_R^2). Zero for a purely matter state.
inline double photon_amplitude(double omega, double rabi, const DeviceParams& p) {
    const double detuning = omega - p.omega12;
    const double norm = std::hypot(detuning, rabi);
    return norm == 0.0 ? 0.0 : detuning / norm;
}

inline double branch_frequency(double q, Branch b, const DeviceParams& p) {
    const auto [lo, hi] = polariton_frequencies(q, p);
    return b == Branch::lower ? lo : hi;
}

inline BranchPoint branch_point(double q, const DeviceParams& p) {
    const auto [lo, hi] = polariton_frequencies(q, p);
    const double rabi = collective_coupling(q, p);
    const double gm = photon_amplitude(lo, rabi, p);
    const double gp = photon_amplitude(hi, rabi, p);
    return {q, lo, hi, gm * gm, gp * gp};
}

/// Coupling J_sigma(q) of the bare electron to bright state sigma, in the
/// composite convention (carries the sqrt(N) of Omega_R). Real, with the
/// sign of omega_sigma - omega_12.
inline double bright_coupling(double q, Branch b, const DeviceParams& p) {
    const double rabi = collective_coupling(q, p);
    return rabi * photon_amplitude(branch_frequency(q, b, p), rabi, p);
}

/// Coarse-grained coupling of the annular state of a ring of width dq:
/// J_sigma(q) sqrt(q dq w). Its square is additive in dq.
inline double ring_coupling(double q, double dq, Branch b, double density_w, const DeviceParams& p) {
    if (!(dq >= 0.0)) throw ParameterError("polariton", "ring width must be >= 0");
    return bright_coupling(q, b, p) * std::sqrt(q * dq * density_w);
}

/// Continuum density w fixing sum_rings (J_+^2 + J_-^2) = Omega_R(q_res)^2,
/// i.e. the second central moment of the electron spectral function.
inline double continuum_density(const QGrid& grid, const DeviceParams& p) {
    double integral = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rabi = collective_coupling(grid.q(i), p);
        integral += rabi * rabi * grid.q(i) * grid.dq(i);
    }
    if (integral == 0.0) return 0.0;
    return p.rabi_res * p.rabi_res / integral;
}

/// Per-ring branch data shared by the Fano matrix and the emission model.
struct PolaritonTable {
    QGrid grid;
    std::vector<BranchPoint> points;
    std::vector<double> rabi;        // Omega_R(q_i)
    std::vector<double> amp_minus;   // photon amplitude g_-(q_i)
    std::vector<double> amp_plus;    // photon amplitude g_+(q_i)
    double density_w = 0.0;

    std::size_t size() const noexcept { return points.size(); }

    double amplitude(Branch b, std::size_t ring) const {
        return b == Branch::lower ? amp_minus[ring] : amp_plus[ring];
    }
    double frequency(Branch b, std::size_t ring) const {
        return b == Branch::lower ? points[ring].omega_minus : points[ring].omega_plus;
    }
    double coupling(Branch b, std::size_t ring) const {
        return rabi[ring] * amplitude(b, ring) * std::sqrt(grid.q(ring) * grid.dq(ring) * density_w);
    }
};

inline PolaritonTable make_polariton_table(QGrid grid, const DeviceParams& p) {
    PolaritonTable t;
    t.density_w = continuum_density(grid, p);
    const std::size_t n = grid.size();
    t.points.reserve(n);
    t.rabi.reserve(n);
    t.amp_minus.reserve(n);
    t.amp_plus.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = grid.q(i);
        const double rabi = collective_coupling(q, p);
        const auto [lo, hi] = polariton_frequencies(q, p);
        const double gm = photon_amplitude(lo, rabi, p);
        const double gp = photon_amplitude(hi, rabi, p);
        t.points.push_back({q, lo, hi, gm * gm, gp * gp});
        t.rabi.push_back(rabi);
        t.amp_minus.push_back(gm);
        t.amp_plus.push_back(gp);
    }
    t.grid = std::move(grid);
    return t;
}

}  // namespace fanopol
