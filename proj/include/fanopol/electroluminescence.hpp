#pragma once

// Electroluminescence under resonant tunneling injection.
//
// A dressed state zeta is fed at Gamma_inj ~ mu^2 * shape(E), decays
// radiatively through its photon content (quasi-mode loss kappa) and
// non-radiatively at a flat rate. Its photons leave on the rings where it
// has photon amplitude, with a Lorentzian line of half-width r + nr.
//
// The photon carries the reduced energy omega_zeta: the electron drops to
// omega_1(|k - q|), which equals omega_1(k) up to q/k_F ~ 1e-2. Because of
// that, rates, L and the line shape are k-independent and the map is built
// per state with the injection summed over the k grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fanopol/arrowhead.hpp"
#include "fanopol/core_model.hpp"
#include "fanopol/error.hpp"
#include "fanopol/fano_model.hpp"
#include "fanopol/fingerprint.hpp"
#include "fanopol/io.hpp"
#include "fanopol/polariton.hpp"
#include "fanopol/spectral.hpp"

namespace fanopol {

struct InjectorSpec {
    enum class Shape { box, gaussian };
    // Energy at which the contact spectrum is read: the dressed-state energy
    // above the in-plane kinetic energy (kinetic, k-conserving tunneling) or
    // the total electron energy omega_1(k) + omega_zeta (absolute).
    enum class Frame { kinetic, absolute };

    Shape shape = Shape::box;
    double center = 1.0;
    double width = 1.0;  // full bandwidth (FWHM for gaussian)
    double strength = 1.0;
    Frame frame = Frame::kinetic;

    void validate() const {
        if (!(width > 0.0) || !std::isfinite(width))
            throw ParameterError("electroluminescence", "injector width must be > 0");
        if (!(center > 0.0) || !std::isfinite(center))
            throw ParameterError("electroluminescence", "injector center must be > 0");
        if (!(strength >= 0.0) || !std::isfinite(strength))
            throw ParameterError("electroluminescence", "injector strength must be >= 0");
    }

    std::uint64_t fingerprint() const noexcept {
        return Fingerprint{}
            .add(static_cast<std::uint64_t>(shape))
            .add(center)
            .add(width)
            .add(strength)
            .add(static_cast<std::uint64_t>(frame))
            .value();
    }
};

inline const char* to_string(InjectorSpec::Shape s) { return s == InjectorSpec::Shape::box ? "box" : "gaussian"; }
inline const char* to_string(InjectorSpec::Frame f) {
    return f == InjectorSpec::Frame::kinetic ? "kinetic" : "absolute";
}

struct Rates {
    double gamma_inj = 0.0;
    double rate_r = 0.0;
    double rate_nr = 0.0;
};

inline constexpr double default_kappa = 0.01;
inline constexpr double default_rate_nr = 0.005;

inline double injector_shape(double omega, const InjectorSpec& inj) {
    const double d = omega - inj.center;
    if (inj.shape == InjectorSpec::Shape::box) return std::abs(d) <= 0.5 * inj.width ? 1.0 : 0.0;
    const double s = inj.width / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    return std::exp(-d * d / (2.0 * s * s));
}

/// Photon weights W_zeta(q_i) = (lam_{zeta,+,i} g_+ + lam_{zeta,-,i} g_-)^2,
/// tabulated once per model: row-major states x rings, plus per-state sums.
struct PhotonWeights {
    std::size_t rings = 0;
    std::vector<double> w;
    std::vector<double> total;

    double at(std::size_t z, std::size_t ring) const { return w[z * rings + ring]; }
    std::span<const double> row(std::size_t z) const { return {w.data() + z * rings, rings}; }
};

inline double photon_ring_weight(std::size_t z, std::size_t ring, const EigenSystem& eig, const PolaritonTable& t) {
    if (z >= eig.size() || ring >= t.size()) throw ParameterError("electroluminescence", "state or ring index out of range");
    const double a = eig.lambda(z, continuum_position(Branch::upper, ring)) * t.amplitude(Branch::upper, ring) +
                     eig.lambda(z, continuum_position(Branch::lower, ring)) * t.amplitude(Branch::lower, ring);
    return a * a;
}

inline PhotonWeights photon_weights(const FanoModel& m) {
    PhotonWeights pw;
    pw.rings = m.rings();
    pw.w.resize(m.states() * pw.rings);
    pw.total.assign(m.states(), 0.0);
    for (std::size_t z = 0; z < m.states(); ++z) {
        double s = 0.0;
        for (std::size_t i = 0; i < pw.rings; ++i) {
            const double v = photon_ring_weight(z, i, m.eig, m.table);
            pw.w[z * pw.rings + i] = v;
            s += v;
        }
        pw.total[z] = s;
    }
    return pw;
}

/// Injection into dressed state z at wavevector k. Inside the Fermi sea the
/// only state is the bare second-subband electron; pass z = 0 for it.
inline double injection_rate(double k, std::size_t z, const FanoModel& m, const InjectorSpec& inj) {
    const auto& p = m.params;
    if (!(k >= 0.0)) throw ParameterError("electroluminescence", "k must be >= 0");
    if (!outside_fermi_sea(k, p)) {
        if (z != 0) throw ParameterError("electroluminescence", "only the bare state exists inside the Fermi sea");
        const double e = inj.frame == InjectorSpec::Frame::kinetic ? p.omega12 : subband_dispersion(2, k, p);
        return inj.strength * injector_shape(e, inj);
    }
    if (z >= m.states()) throw ParameterError("electroluminescence", "state index out of range");
    const double mu2 = m.eig.mu[z] * m.eig.mu[z];
    const double e = inj.frame == InjectorSpec::Frame::kinetic ? m.eig.omega[z]
                                                                : subband_dispersion(1, k, p) + m.eig.omega[z];
    return inj.strength * mu2 * injector_shape(e, inj);
}

inline double radiative_rate(double k, std::size_t z, const PhotonWeights& pw, const DeviceParams& p, double kappa) {
    if (!(kappa >= 0.0)) throw ParameterError("electroluminescence", "kappa must be >= 0");
    if (!outside_fermi_sea(k, p)) return 0.0;
    return kappa * pw.total.at(z);
}

inline std::vector<double> emission_distribution(std::size_t z, const PhotonWeights& pw) {
    const double s = pw.total.at(z);
    if (!(s > 0.0)) throw UndefinedResultError("electroluminescence", "dark state " + std::to_string(z) + " has no photon weight");
    auto row = pw.row(z);
    std::vector<double> l(row.begin(), row.end());
    for (auto& v : l) v /= s;
    return l;
}

inline double quantum_efficiency(const Rates& r) {
    if (r.rate_r < 0.0 || r.rate_nr < 0.0) throw ParameterError("electroluminescence", "rates must be >= 0");
    if (r.rate_r == 0.0 && r.rate_nr == 0.0)
        throw UndefinedResultError("electroluminescence", "efficiency undefined with no decay channel");
    return r.rate_r / (r.rate_r + r.rate_nr);
}

struct KGrid {
    std::vector<double> k;
    std::size_t blocked = 0;  // leading points with k < k_F
};

/// Wavevectors uniform in omega_1(k). Only omega_1 enters, so equal energy
/// steps weigh every shift alike. In the absolute frame the window is the
/// set of shifts that put some dressed state inside the injector band
/// (+-5 linewidths); in the kinetic frame the injector does not see the
/// shift and the window is E_F .. E_F + width.
inline KGrid make_k_grid(const InjectorSpec& inj, const FanoModel& m, double kappa, double rate_nr, std::size_t n = 200,
                         bool include_blocked = false) {
    if (n < 2) throw ParameterError("electroluminescence", "k grid needs at least 2 points");
    const auto& p = m.params;
    const double ef = subband_dispersion(1, p.kf, p);
    double lo = ef;
    double hi = ef + inj.width;
    if (inj.frame == InjectorSpec::Frame::absolute) {
        const double pad = 5.0 * (kappa + rate_nr);
        lo = std::max(ef, inj.center - 0.5 * inj.width - pad - m.eig.omega.back());
        hi = std::max(lo + inj.width, inj.center + 0.5 * inj.width + pad - m.eig.omega.front());
    }
    KGrid g;
    if (include_blocked) {
        for (std::size_t i = 0; i < n; ++i) {
            const double e = ef * static_cast<double>(i) / static_cast<double>(n);
            g.k.push_back(std::sqrt(e / p.mass_scale));
        }
        g.blocked = n;
    }
    for (double e : uniform_axis(lo, hi, n)) g.k.push_back(std::max(p.kf, std::sqrt(e / p.mass_scale)));
    return g;
}

struct ELMap {
    std::vector<double> q_axis;
    std::vector<double> omega_axis;
    std::vector<double> intensity;  // row-major: q index major, omega minor
    std::vector<double> overlay_minus;
    std::vector<double> overlay_plus;
    std::uint64_t fingerprint = 0;

    double at(std::size_t iq, std::size_t iw) const { return intensity[iq * omega_axis.size() + iw]; }
    std::span<const double> column(std::size_t iq) const {
        return {intensity.data() + iq * omega_axis.size(), omega_axis.size()};
    }
    double total() const {
        double s = 0.0;
        for (double v : intensity) s += v;
        return s;
    }
};

struct ELOptions {
    double kappa = default_kappa;
    double rate_nr = default_rate_nr;
    unsigned threads = 1;
};

namespace detail {

inline void require_uniform_axis(std::span<const double> x, const char* name) {
    if (x.size() < 2) throw ParameterError("electroluminescence", std::string(name) + " axis needs at least 2 points");
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    if (!(h > 0.0)) throw ParameterError("electroluminescence", std::string(name) + " axis must be increasing");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i] - x[i - 1] - h) > 1e-9 * h)
            throw ParameterError("electroluminescence", std::string(name) + " axis must be uniform");
}

// Ring weights become a density in q (L_i / dq_i, linear between rings,
// zero outside them) that is integrated over each axis cell. Its integral is
// sum_i L_i, because the trapezoid widths integrate a piecewise-linear
// function exactly, so the emission of a state is kept however narrow it is.
inline void project_rings(std::span<const double> l, const QGrid& grid, std::span<const double> q_axis,
                          std::span<double> out) {
    const double h = (q_axis.back() - q_axis.front()) / static_cast<double>(q_axis.size() - 1);
    const std::size_t n = grid.size();
    std::fill(out.begin(), out.end(), 0.0);
    auto cell_of = [&](double q) {
        const double t = std::floor((q - q_axis.front()) / h + 0.5);
        return static_cast<std::ptrdiff_t>(t);
    };
    const auto last_cell = static_cast<std::ptrdiff_t>(q_axis.size()) - 1;
    if (n == 1) {
        const auto j = cell_of(grid.q(0));
        if (j >= 0 && j <= last_cell) out[static_cast<std::size_t>(j)] = l[0];
        return;
    }
    for (std::size_t s = 0; s + 1 < n; ++s) {
        const double q0 = grid.q(s);
        const double q1 = grid.q(s + 1);
        const double f0 = l[s] / grid.dq(s);
        const double f1 = l[s + 1] / grid.dq(s + 1);
        if (f0 == 0.0 && f1 == 0.0) continue;
        const double slope = (f1 - f0) / (q1 - q0);
        auto lo = std::max<std::ptrdiff_t>(cell_of(q0), 0);
        const auto hi = std::min(cell_of(q1), last_cell);
        for (auto j = lo; j <= hi; ++j) {
            const double c = q_axis.front() + h * static_cast<double>(j);
            const double a = std::max(q0, c - 0.5 * h);
            const double b = std::min(q1, c + 0.5 * h);
            if (!(b > a)) continue;
            const double fa = f0 + slope * (a - q0);
            const double fb = f0 + slope * (b - q0);
            out[static_cast<std::size_t>(j)] += 0.5 * (fa + fb) * (b - a);
        }
    }
}

}  // namespace detail

/// Per-state contribution parameters (exposed for diagnostics and tests).
struct StateEmission {
    std::size_t z = 0;
    double injected = 0.0;  // sum over the k grid of Gamma_inj
    Rates rates;
    double efficiency = 0.0;
};

inline std::vector<StateEmission> state_emission(std::span<const double> k_grid, const InjectorSpec& inj,
                                                 const FanoModel& m, const PhotonWeights& pw, const ELOptions& opt) {
    inj.validate();
    if (!(opt.kappa >= 0.0) || !(opt.rate_nr >= 0.0)) throw ParameterError("electroluminescence", "rates must be >= 0");
    std::vector<StateEmission> out;
    for (std::size_t z = 0; z < m.states(); ++z) {
        StateEmission s;
        s.z = z;
        s.rates.rate_nr = opt.rate_nr;
        s.rates.rate_r = opt.kappa * pw.total[z];
        for (double k : k_grid) {
            // inside the sea: injected into the bare state, which cannot emit
            // (rate_r = 0), so it adds exactly nothing to the photon count
            if (!outside_fermi_sea(k, m.params)) continue;
            s.injected += injection_rate(k, z, m, inj);
        }
        s.rates.gamma_inj = s.injected;
        if (s.injected == 0.0 || s.rates.rate_r == 0.0) continue;
        s.efficiency = quantum_efficiency(s.rates);
        out.push_back(s);
    }
    return out;
}

inline ELMap electroluminescence_map(std::span<const double> k_grid, const InjectorSpec& inj, const FanoModel& m,
                                     const PhotonWeights& pw, std::span<const double> q_axis,
                                     std::span<const double> omega_axis, const ELOptions& opt = {}) {
    detail::require_uniform_axis(q_axis, "q");
    detail::require_uniform_axis(omega_axis, "omega");
    if (pw.total.size() != m.states() || pw.rings != m.rings())
        throw ConsistencyError("electroluminescence", "photon weights do not belong to this model");

    ELMap map;
    map.q_axis.assign(q_axis.begin(), q_axis.end());
    map.omega_axis.assign(omega_axis.begin(), omega_axis.end());
    map.fingerprint = Fingerprint{}.add(m.params.fingerprint()).add(inj.fingerprint()).add(opt.kappa).add(opt.rate_nr).value();
    for (double q : q_axis) {
        const auto [lo, hi] = polariton_frequencies(q, m.params);
        map.overlay_minus.push_back(lo);
        map.overlay_plus.push_back(hi);
    }

    const auto states = state_emission(k_grid, inj, m, pw, opt);
    const std::size_t nq = q_axis.size();
    const std::size_t nw = omega_axis.size();

    // fixed partition, merged in block order: the result does not depend on
    // the thread count
    constexpr std::size_t blocks = 16;
    std::vector<std::vector<double>> partial(blocks);
    detail::parallel_for(blocks, opt.threads, [&](std::size_t b) {
        auto& acc = partial[b];
        acc.assign(nq * nw, 0.0);
        std::vector<double> lq(nq);
        std::vector<double> lw(nw);
        const std::size_t begin = states.size() * b / blocks;
        const std::size_t end = states.size() * (b + 1) / blocks;
        for (std::size_t s = begin; s < end; ++s) {
            const auto& st = states[s];
            const double gt = st.rates.rate_r + st.rates.rate_nr;
            const double amp = st.injected * st.rates.rate_r / std::numbers::pi;
            const double w0 = m.eig.omega[st.z];
            for (std::size_t j = 0; j < nw; ++j) {
                const double d = omega_axis[j] - w0;
                lw[j] = amp / (d * d + gt * gt);
            }
            const auto l = emission_distribution(st.z, pw);
            detail::project_rings(l, m.table.grid, q_axis, lq);
            for (std::size_t i = 0; i < nq; ++i) {
                if (lq[i] == 0.0) continue;
                double* row = acc.data() + i * nw;
                for (std::size_t j = 0; j < nw; ++j) row[j] += lq[i] * lw[j];
            }
        }
    });
    map.intensity.assign(nq * nw, 0.0);
    for (const auto& acc : partial)
        for (std::size_t i = 0; i < acc.size(); ++i) map.intensity[i] += acc[i];
    return map;
}

inline ELMap electroluminescence_map(std::span<const double> k_grid, const InjectorSpec& inj, const FanoModel& m,
                                     std::span<const double> q_axis, std::span<const double> omega_axis,
                                     const ELOptions& opt = {}) {
    return electroluminescence_map(k_grid, inj, m, photon_weights(m), q_axis, omega_axis, opt);
}

/// Long format: q, omega, intensity.
inline void write_csv(std::ostream& out, const ELMap& map) {
    out << "# fingerprint " << Fingerprint::to_hex(map.fingerprint) << '\n';
    out << "q,omega,intensity\n";
    for (std::size_t i = 0; i < map.q_axis.size(); ++i)
        for (std::size_t j = 0; j < map.omega_axis.size(); ++j) {
            const double row[3] = {map.q_axis[i], map.omega_axis[j], map.at(i, j)};
            write_csv_row(out, row);
        }
}

}  // namespace fanopol
