#pragma once

// Run configuration: one JSON document with nested sections. Unknown keys
// are rejected so that a typo cannot silently fall back to a default.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fanopol/core_model.hpp"
#include "fanopol/electroluminescence.hpp"
#include "fanopol/error.hpp"
#include "fanopol/fingerprint.hpp"
#include "fanopol/polariton.hpp"
#include "fanopol/spectral.hpp"

namespace fanopol::app {

using json = nlohmann::json;

/// Malformed or unreadable configuration (exit 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("cli", what) {}
};

struct AxisSpec {
    double min = 0.0;
    double max = 1.0;
    std::size_t points = 2;

    std::vector<double> values(double scale = 1.0) const { return uniform_axis(min * scale, max * scale, points); }
};

struct DispersionOutput {
    std::string file = "dispersion.csv";
    AxisSpec q{0.05, 4.0, 400};  // in units of q_res
};

struct SpectralOutput {
    std::string file = "spectral.csv";
    double k = 1.2;
    bool reduced = false;  // axis omega - omega_1(k) instead of omega
    std::optional<AxisSpec> omega;  // default: around the lines
    double display_width = default_display_width;
};

struct ELOutput {
    std::string name = "el";
    std::string file;  // JSON; defaults to <name>.json
    std::string csv;   // optional long-format CSV
    InjectorSpec injector;
    AxisSpec q{0.05, 2.5, 200};  // in units of q_res
    AxisSpec omega{0.6, 1.6, 501};
    std::size_t k_points = 200;
};

struct ValidateOutput {
    std::string file = "validate.json";
    std::size_t oracle_rings = 100;
    double refinement_tol = 0.02;
};

struct RunConfig {
    DeviceParams device;
    GridSpec grid;
    InjectorSpec injector;  // default for el entries without their own block
    double kappa = default_kappa;
    double rate_nr = default_rate_nr;
    std::string manifest = "manifest.json";

    std::optional<DispersionOutput> dispersion;
    std::vector<SpectralOutput> spectral;
    std::vector<ELOutput> el;
    std::optional<ValidateOutput> validate;

    json source;  // the parsed document, defaults filled in

    std::uint64_t fingerprint() const { return Fingerprint{}.add_bytes(source.dump()).value(); }
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline AxisSpec read_axis(const json& j, const std::string& where, AxisSpec a) {
    only_keys(j, where, {"min", "max", "points"});
    read(j, "min", a.min, where);
    read(j, "max", a.max, where);
    read(j, "points", a.points, where);
    if (a.points < 2 || !(a.max > a.min)) throw ConfigError(where + " must be strictly increasing with >= 2 points");
    return a;
}

inline InjectorSpec read_injector(const json& j, const std::string& where, InjectorSpec s) {
    only_keys(j, where, {"shape", "center", "width", "strength", "frame"});
    std::string shape = to_string(s.shape);
    std::string frame = to_string(s.frame);
    read(j, "shape", shape, where);
    read(j, "frame", frame, where);
    read(j, "center", s.center, where);
    read(j, "width", s.width, where);
    read(j, "strength", s.strength, where);
    if (shape == "box") s.shape = InjectorSpec::Shape::box;
    else if (shape == "gaussian") s.shape = InjectorSpec::Shape::gaussian;
    else throw ConfigError(where + ".shape must be box or gaussian");
    if (frame == "kinetic") s.frame = InjectorSpec::Frame::kinetic;
    else if (frame == "absolute") s.frame = InjectorSpec::Frame::absolute;
    else throw ConfigError(where + ".frame must be kinetic or absolute");
    return s;
}

inline json axis_json(const AxisSpec& a) { return {{"min", a.min}, {"max", a.max}, {"points", a.points}}; }

inline json injector_json(const InjectorSpec& s) {
    return {{"shape", to_string(s.shape)}, {"center", s.center}, {"width", s.width},
            {"strength", s.strength}, {"frame", to_string(s.frame)}};
}

template <class F>
void one_or_many(const json& j, F&& f) {
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) f(j[i], i);
    else
        f(j, 0);
}

}  // namespace detail

/// Parses and normalizes; physics-level validation (resonance etc.) is left
/// to the model so that it surfaces as a parameter error.
inline RunConfig parse_config(const json& doc) {
    using namespace detail;
    RunConfig c;
    only_keys(doc, "config", {"device", "grid", "injector", "rates", "outputs", "manifest"});
    if (doc.contains("device")) {
        const auto& d = doc["device"];
        only_keys(d, "device", {"omega_c0", "rabi_res", "mass_scale", "qres_over_kf"});
        read(d, "omega_c0", c.device.omega_c0, "device");
        read(d, "rabi_res", c.device.rabi_res, "device");
        read(d, "mass_scale", c.device.mass_scale, "device");
        read(d, "qres_over_kf", c.device.qres_over_kf, "device");
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        only_keys(g, "grid", {"n_rings", "q_min_over_qres", "q_max_over_qres"});
        read(g, "n_rings", c.grid.n_rings, "grid");
        read(g, "q_min_over_qres", c.grid.q_min_over_qres, "grid");
        read(g, "q_max_over_qres", c.grid.q_max_over_qres, "grid");
    }
    if (doc.contains("injector")) c.injector = read_injector(doc["injector"], "injector", c.injector);
    if (doc.contains("rates")) {
        const auto& r = doc["rates"];
        only_keys(r, "rates", {"kappa", "rate_nr"});
        read(r, "kappa", c.kappa, "rates");
        read(r, "rate_nr", c.rate_nr, "rates");
    }
    read(doc, "manifest", c.manifest, "config");

    if (doc.contains("outputs")) {
        const auto& o = doc["outputs"];
        only_keys(o, "outputs", {"dispersion", "spectral", "el", "validate"});
        if (o.contains("dispersion")) {
            DispersionOutput d;
            only_keys(o["dispersion"], "outputs.dispersion", {"file", "q_axis"});
            read(o["dispersion"], "file", d.file, "outputs.dispersion");
            if (o["dispersion"].contains("q_axis"))
                d.q = read_axis(o["dispersion"]["q_axis"], "outputs.dispersion.q_axis", d.q);
            c.dispersion = d;
        }
        if (o.contains("spectral")) {
            one_or_many(o["spectral"], [&](const json& j, std::size_t i) {
                const std::string where = "outputs.spectral[" + std::to_string(i) + "]";
                only_keys(j, where, {"file", "k", "reduced", "omega_axis", "display_width"});
                SpectralOutput s;
                read(j, "file", s.file, where);
                read(j, "k", s.k, where);
                read(j, "reduced", s.reduced, where);
                read(j, "display_width", s.display_width, where);
                if (j.contains("omega_axis")) s.omega = read_axis(j["omega_axis"], where + ".omega_axis", AxisSpec{});
                c.spectral.push_back(s);
            });
        }
        if (o.contains("el")) {
            one_or_many(o["el"], [&](const json& j, std::size_t i) {
                const std::string where = "outputs.el[" + std::to_string(i) + "]";
                only_keys(j, where, {"name", "file", "csv", "injector", "q_axis", "omega_axis", "k_points"});
                ELOutput e;
                e.name = "el" + std::to_string(i);
                e.injector = c.injector;
                read(j, "name", e.name, where);
                read(j, "file", e.file, where);
                read(j, "csv", e.csv, where);
                read(j, "k_points", e.k_points, where);
                if (j.contains("injector")) e.injector = read_injector(j["injector"], where + ".injector", e.injector);
                if (j.contains("q_axis")) e.q = read_axis(j["q_axis"], where + ".q_axis", e.q);
                if (j.contains("omega_axis")) e.omega = read_axis(j["omega_axis"], where + ".omega_axis", e.omega);
                if (e.file.empty()) e.file = e.name + ".json";
                if (e.k_points < 2) throw ConfigError(where + ".k_points must be >= 2");
                c.el.push_back(e);
            });
        }
        if (o.contains("validate")) {
            ValidateOutput v;
            only_keys(o["validate"], "outputs.validate", {"file", "oracle_rings", "refinement_tol"});
            read(o["validate"], "file", v.file, "outputs.validate");
            read(o["validate"], "oracle_rings", v.oracle_rings, "outputs.validate");
            read(o["validate"], "refinement_tol", v.refinement_tol, "outputs.validate");
            c.validate = v;
        }
    }

    // canonical echo with every default spelled out
    json s;
    s["device"] = {{"omega_c0", c.device.omega_c0}, {"rabi_res", c.device.rabi_res},
                   {"mass_scale", c.device.mass_scale}, {"qres_over_kf", c.device.qres_over_kf}};
    s["grid"] = {{"n_rings", c.grid.n_rings}, {"q_min_over_qres", c.grid.q_min_over_qres},
                 {"q_max_over_qres", c.grid.q_max_over_qres}};
    s["injector"] = injector_json(c.injector);
    s["rates"] = {{"kappa", c.kappa}, {"rate_nr", c.rate_nr}};
    s["manifest"] = c.manifest;
    json outs = json::object();
    if (c.dispersion) outs["dispersion"] = {{"file", c.dispersion->file}, {"q_axis", axis_json(c.dispersion->q)}};
    for (const auto& sp : c.spectral) {
        json j = {{"file", sp.file}, {"k", sp.k}, {"reduced", sp.reduced}, {"display_width", sp.display_width}};
        if (sp.omega) j["omega_axis"] = axis_json(*sp.omega);
        outs["spectral"].push_back(j);
    }
    for (const auto& e : c.el)
        outs["el"].push_back({{"name", e.name}, {"file", e.file}, {"csv", e.csv}, {"injector", injector_json(e.injector)},
                              {"q_axis", axis_json(e.q)}, {"omega_axis", axis_json(e.omega)}, {"k_points", e.k_points}});
    if (c.validate)
        outs["validate"] = {{"file", c.validate->file}, {"oracle_rings", c.validate->oracle_rings},
                            {"refinement_tol", c.validate->refinement_tol}};
    s["outputs"] = outs;
    c.source = s;
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace fanopol::app
