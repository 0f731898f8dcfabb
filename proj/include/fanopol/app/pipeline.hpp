#pragma once

// parameters -> grid -> matrix -> eigensystem -> products, plus the
// invariant suite behind `validate`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fanopol/app/config.hpp"
#include "fanopol/arrowhead.hpp"
#include "fanopol/electroluminescence.hpp"
#include "fanopol/fano_model.hpp"
#include "fanopol/io.hpp"
#include "fanopol/spectral.hpp"

namespace fanopol::app {

enum ExitCode : int { ok = 0, config_error = 2, invariant_violation = 3, numerical_failure = 4, io_failure = 5 };

/// Maps a failure to the documented exit status.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return config_error;
    if (dynamic_cast<const ParameterError*>(&e)) return invariant_violation;
    if (dynamic_cast<const ConsistencyError*>(&e)) return invariant_violation;
    if (dynamic_cast<const SolverError*>(&e)) return numerical_failure;
    if (dynamic_cast<const UndefinedResultError*>(&e)) return numerical_failure;
    if (dynamic_cast<const DimensionRefusedError*>(&e)) return numerical_failure;
    return io_failure;
}

inline std::string describe(const std::exception& e) {
    return e.what();
}

struct Check {
    std::string name;
    std::string module;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    void add(std::string name, std::string module, double value, double tol) {
        checks.push_back({std::move(name), std::move(module), value, tol, std::isfinite(value) && value <= tol});
    }
    json to_json() const {
        json out = json::array();
        for (const auto& c : checks)
            out.push_back({{"check", c.name}, {"module", c.module}, {"value", c.value}, {"tolerance", c.tolerance},
                           {"passed", c.passed}});
        return out;
    }
    void print(std::ostream& os) const {
        for (const auto& c : checks) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e <= %.1e", c.value, c.tolerance);
            os << (c.passed ? "PASS " : "FAIL ") << c.module << '/' << c.name << "  " << buf << '\n';
        }
    }
};

/// |second central moment of the apex spectrum - Omega_R(q_res)^2| / Omega_R(q_res)^2
inline double calibration_residual(const FanoModel& m) {
    const auto& e = m.eig;
    double mean = 0.0;
    for (std::size_t z = 0; z < e.size(); ++z) mean += e.mu[z] * e.mu[z] * e.omega[z];
    double var = 0.0;
    for (std::size_t z = 0; z < e.size(); ++z) var += e.mu[z] * e.mu[z] * (e.omega[z] - mean) * (e.omega[z] - mean);
    const double target = m.params.rabi_res * m.params.rabi_res;
    return target > 0.0 ? std::abs(var - target) / target : std::abs(var);
}

/// Display width used for refinement comparisons: twice the mean level
/// spacing of the coarse spectrum, capped at the default display width so a
/// very coarse grid cannot hide behind its own blur.
inline double refinement_width(const EigenSystem& e) {
    const double spacing = (e.omega.back() - e.omega.front()) / static_cast<double>(e.size() - 1);
    return std::min(2.0 * spacing, default_display_width);
}

/// Sup-norm change of the broadened reduced spectrum when the ring count is
/// doubled, relative to the coarse curve's maximum.
inline double refinement_delta(const FanoModel& coarse, const FanoModel& fine) {
    const double g = refinement_width(coarse.eig);
    const double lo = coarse.eig.omega.front() - 20 * g;
    const double hi = coarse.eig.omega.back() + 20 * g;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * g))) + 1;
    const auto x = uniform_axis(lo, hi, std::min<std::size_t>(n, 20001));
    const auto a = broaden(reduced_spectrum(coarse.eig), g, x);
    const auto b = broaden(reduced_spectrum(fine.eig), g, x);
    double diff = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        peak = std::max(peak, a.values[i]);
    }
    return diff / peak;
}

inline ValidationReport validate_model(const RunConfig& cfg, const FanoModel& m, const FanoModel& refined) {
    ValidationReport r;
    const auto& a = m.matrix;
    const auto& e = m.eig;
    r.add("apex_completeness", "arrowhead-solver", checks::apex_completeness(e), 1e-10);
    r.add("normalization", "arrowhead-solver", checks::normalization(e), 1e-10);
    r.add("interlacing", "arrowhead-solver", checks::interlacing(a, e), 1e-12);
    r.add("trace", "arrowhead-solver", checks::trace(a, e), 1e-9);
    r.add("second_moment", "arrowhead-solver", checks::second_moment(a, e), 1e-9);
    r.add("first_moment", "arrowhead-solver", checks::first_moment(a, e), 1e-9);
    r.add("residual", "arrowhead-solver", checks::residual(a, e), 1e-9);

    const ValidateOutput v = cfg.validate.value_or(ValidateOutput{});
    GridSpec small = cfg.grid;
    small.n_rings = std::min(cfg.grid.n_rings, v.oracle_rings);
    const auto sm = FanoModel::build(cfg.device, small);
    const auto dense = eigendecompose_dense(sm.matrix);
    double dw = 0.0;
    double dmu = 0.0;
    for (std::size_t z = 0; z < dense.size(); ++z) {
        dw = std::max(dw, std::abs(dense.omega[z] - sm.eig.omega[z]));
        dmu = std::max(dmu, std::abs(std::abs(dense.mu[z]) - std::abs(sm.eig.mu[z])));
    }
    r.add("oracle_eigenvalues", "arrowhead-solver", dw, 1e-10);
    r.add("oracle_apex_weights", "arrowhead-solver", dmu, 1e-8);

    r.add("calibration", "polariton", calibration_residual(m), 0.05);

    double sum_rule = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double k = 0.1 * i;
        sum_rule = std::max(sum_rule, std::abs(total_weight(spectral_function_subband2(k, e, m.params)) - 1.0));
        sum_rule = std::max(sum_rule, std::abs(total_weight(spectral_function_subband1(k, m.params)) -
                                               (outside_fermi_sea(k, m.params) ? 1.0 : 0.0)));
    }
    r.add("sum_rule", "spectral", sum_rule, 1e-10);
    r.add("refinement_convergence", "spectral", refinement_delta(m, refined), v.refinement_tol);
    return r;
}

struct RunOptions {
    std::filesystem::path output_dir = ".";
    unsigned threads = 1;
    bool validate_only = false;
    bool write_report = true;  // validate_only: also write the report file
};

struct RunResult {
    int exit_code = ok;
    json manifest;
    ValidationReport report;
    std::vector<std::filesystem::path> written;
};

namespace detail {

class Stopwatch {
public:
    template <class F>
    auto time(json& timings, const std::string& stage, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings[stage] = seconds_since(t0);
        } else {
            auto out = f();
            timings[stage] = seconds_since(t0);
            return out;
        }
    }

private:
    static double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline std::string header(std::uint64_t fp) { return "# fingerprint " + Fingerprint::to_hex(fp) + "\n"; }

inline void write_dispersion(std::ostream& out, const DispersionOutput& d, const DeviceParams& p, std::uint64_t fp) {
    const double qres = resonant_wavevector(p);
    out << header(fp) << "q,q_over_qres,omega_minus,omega_plus,photon_frac_minus,photon_frac_plus\n";
    for (double q : d.q.values(qres)) {
        const auto b = branch_point(q, p);
        const double row[6] = {q, q / qres, b.omega_minus, b.omega_plus, b.photon_frac_minus, b.photon_frac_plus};
        write_csv_row(out, row);
    }
}

inline SpectralCurve spectral_curve(const SpectralOutput& s, const FanoModel& m) {
    auto lines = spectral_function_subband2(s.k, m.eig, m.params);
    const double shift = subband_dispersion(1, s.k, m.params);
    if (s.reduced)
        for (auto& l : lines) l.omega -= shift;
    std::vector<double> x;
    if (s.omega) {
        x = s.omega->values();
    } else {
        double lo = lines.front().omega;
        double hi = lines.front().omega;
        for (const auto& l : lines) {
            lo = std::min(lo, l.omega);
            hi = std::max(hi, l.omega);
        }
        lo -= 20 * s.display_width;
        hi += 20 * s.display_width;
        const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * s.display_width))) + 1;
        x = uniform_axis(lo, hi, n);
    }
    return broaden(lines, s.display_width, x);
}

inline json el_json(const ELOutput& e, const ELMap& map, const RunConfig& cfg, std::uint64_t fp) {
    json j;
    j["fingerprint"] = Fingerprint::to_hex(fp);
    j["name"] = e.name;
    j["q_res"] = resonant_wavevector(cfg.device);
    j["q_axis"] = map.q_axis;
    j["omega_axis"] = map.omega_axis;
    j["layout"] = "row-major, q index major";
    j["intensity"] = map.intensity;
    j["overlays"] = {{"omega_minus", map.overlay_minus}, {"omega_plus", map.overlay_plus}};
    j["injector"] = detail::injector_json(e.injector);
    j["config"] = cfg.source;
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) throw Error("io", "write failed: " + path.string());
}

}  // namespace detail

/// Runs every requested product. Exceptions from the model propagate; an
/// invariant failure inside `validate` is reported through exit_code.
inline RunResult run(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    RunResult res;
    const std::uint64_t fp = cfg.fingerprint();
    json timings = json::object();
    detail::Stopwatch sw;
    SecularOptions so;
    so.threads = opt.threads;

    const auto model = sw.time(timings, "eigensystem", [&] { return FanoModel::build(cfg.device, cfg.grid, so); });
    const auto refined =
        sw.time(timings, "refinement", [&] { return FanoModel::build(cfg.device, cfg.grid.refined(), so); });

    auto emit = [&](const std::string& rel, const std::function<void(std::ostream&)>& body) {
        const auto path = opt.output_dir / rel;
        auto out = open_output(path);
        body(out);
        if (!out) throw Error("io", "write failed: " + path.string());
        res.written.push_back(path);
    };

    if (!opt.validate_only) {
        if (cfg.dispersion)
            sw.time(timings, "dispersion", [&] {
                emit(cfg.dispersion->file, [&](std::ostream& o) { detail::write_dispersion(o, *cfg.dispersion, cfg.device, fp); });
            });
        if (!cfg.spectral.empty())
            sw.time(timings, "spectral", [&] {
                for (const auto& s : cfg.spectral) {
                    auto curve = detail::spectral_curve(s, model);
                    curve.fingerprint = fp;
                    emit(s.file, [&](std::ostream& o) { write_csv(o, curve); });
                }
            });
        if (!cfg.el.empty())
            sw.time(timings, "el", [&] {
                const auto pw = photon_weights(model);
                const double qres = resonant_wavevector(cfg.device);
                ELOptions eo;
                eo.kappa = cfg.kappa;
                eo.rate_nr = cfg.rate_nr;
                eo.threads = opt.threads;
                for (const auto& e : cfg.el) {
                    const auto kg = make_k_grid(e.injector, model, cfg.kappa, cfg.rate_nr, e.k_points);
                    auto map = electroluminescence_map(kg.k, e.injector, model, pw, e.q.values(qres), e.omega.values(), eo);
                    map.fingerprint = fp;
                    emit(e.file, [&](std::ostream& o) { o << detail::el_json(e, map, cfg, fp).dump() << '\n'; });
                    if (!e.csv.empty()) emit(e.csv, [&](std::ostream& o) { write_csv(o, map); });
                    log << "el " << e.name << ": total intensity " << format_number(map.total()) << '\n';
                }
            });
    }

    if (cfg.validate || opt.validate_only) {
        res.report = sw.time(timings, "validate", [&] { return validate_model(cfg, model, refined); });
        res.report.print(log);
        if (cfg.validate && (!opt.validate_only || opt.write_report)) {
            json v = {{"fingerprint", Fingerprint::to_hex(fp)}, {"passed", res.report.ok()}, {"checks", res.report.to_json()}};
            emit(cfg.validate->file, [&](std::ostream& o) { o << v.dump(2) << '\n'; });
        }
        if (!res.report.ok()) res.exit_code = invariant_violation;
    }

    json& mf = res.manifest;
    mf["fingerprint"] = Fingerprint::to_hex(fp);
    mf["parameter_fingerprint"] = Fingerprint::to_hex(cfg.device.fingerprint());
    mf["config"] = cfg.source;
    mf["states"] = model.states();
    mf["continuum_density_w"] = model.table.density_w;
    mf["convergence"] = {{"calibration_residual", calibration_residual(model)},
                         {"refinement_delta", refinement_delta(model, refined)},
                         {"refinement_n_rings", cfg.grid.refined().n_rings}};
    mf["timings_s"] = timings;
    json files = json::array();
    for (const auto& p : res.written) files.push_back(std::filesystem::relative(p, opt.output_dir).generic_string());
    mf["outputs"] = files;
    mf["exit_code"] = res.exit_code;
    if (!opt.validate_only) detail::write_text(opt.output_dir / cfg.manifest, mf.dump(2) + "\n");
    return res;
}

}  // namespace fanopol::app
