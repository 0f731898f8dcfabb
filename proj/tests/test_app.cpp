#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fanopol/app/pipeline.hpp"

namespace fanopol::app {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("fanopol_test_" + name);
    fs::remove_all(d);
    return d;
}

const char* small_config = R"({
  "grid": { "n_rings": 120 },
  "outputs": {
    "dispersion": { "file": "disp.csv", "q_axis": { "min": 0.1, "max": 3.0, "points": 30 } },
    "spectral": { "file": "spec.csv", "k": 1.2 },
    "el": [
      { "name": "broad", "csv": "broad.csv", "injector": { "center": 1.0, "width": 1.0 },
        "q_axis": { "min": 0.05, "max": 2.5, "points": 40 },
        "omega_axis": { "min": 0.6, "max": 1.6, "points": 101 }, "k_points": 10 }
    ],
    "validate": {}
  }
})";

TEST(Config, DefaultsWhenSectionsMissing) {
    const auto c = parse_config_text("{}");
    EXPECT_EQ(c.device, DeviceParams{});
    EXPECT_EQ(c.grid.n_rings, 400U);
    EXPECT_EQ(c.kappa, 0.01);
    EXPECT_EQ(c.rate_nr, 0.005);
    EXPECT_FALSE(c.dispersion.has_value());
    EXPECT_TRUE(c.el.empty());
}

TEST(Config, ReadsEveryBlock) {
    const auto c = parse_config_text(small_config);
    EXPECT_EQ(c.grid.n_rings, 120U);
    ASSERT_TRUE(c.dispersion.has_value());
    EXPECT_EQ(c.dispersion->q.points, 30U);
    ASSERT_EQ(c.spectral.size(), 1U);
    EXPECT_EQ(c.spectral[0].k, 1.2);
    ASSERT_EQ(c.el.size(), 1U);
    EXPECT_EQ(c.el[0].file, "broad.json");
    EXPECT_EQ(c.el[0].injector.width, 1.0);
    EXPECT_EQ(c.el[0].omega.points, 101U);
    EXPECT_TRUE(c.validate.has_value());
}

TEST(Config, ElEntriesInheritTopLevelInjector) {
    const auto c = parse_config_text(R"({"injector": {"shape": "gaussian", "width": 0.1, "frame": "absolute"},
                                         "outputs": {"el": [{"injector": {"center": 1.2}}]}})");
    ASSERT_EQ(c.el.size(), 1U);
    EXPECT_EQ(c.el[0].injector.shape, InjectorSpec::Shape::gaussian);
    EXPECT_EQ(c.el[0].injector.frame, InjectorSpec::Frame::absolute);
    EXPECT_EQ(c.el[0].injector.width, 0.1);
    EXPECT_EQ(c.el[0].injector.center, 1.2);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(parse_config_text("{ \"device\": "), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"devise": {}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"device": {"omega_c0": "high"}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"injector": {"shape": "triangle"}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"outputs": {"el": {"omega_axis": {"min": 1, "max": 0.5}}}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"outputs": {"el": {"q_axis": {"points": 1}}}})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, FingerprintIgnoresFormattingButNotValues) {
    const auto a = parse_config_text(R"({"device": {"rabi_res": 0.1}})");
    const auto b = parse_config_text("{\n  \"device\" : { \"rabi_res\" : 0.10 }\n}");
    const auto c = parse_config_text(R"({"device": {"rabi_res": 0.2}})");
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(ExitCodes, MapErrorKinds) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
    EXPECT_EQ(exit_code_for(NoResonanceError("core-model", "x")), 3);
    EXPECT_EQ(exit_code_for(ParameterError("polariton", "x")), 3);
    EXPECT_EQ(exit_code_for(SolverError("arrowhead-solver", "x")), 4);
    EXPECT_EQ(exit_code_for(UndefinedResultError("electroluminescence", "x")), 4);
}

TEST(Run, WritesProductsAndManifest) {
    const auto cfg = parse_config_text(small_config);
    const auto dir = fresh_dir("products");
    std::ostringstream log;
    const auto res = run(cfg, {dir, 1, false}, log);
    EXPECT_EQ(res.exit_code, 0) << log.str();
    const std::string fp = Fingerprint::to_hex(cfg.fingerprint());

    const auto disp = slurp(dir / "disp.csv");
    EXPECT_EQ(disp.rfind("# fingerprint " + fp + "\nq,q_over_qres,omega_minus,omega_plus,", 0), 0U);
    EXPECT_EQ(std::count(disp.begin(), disp.end(), '\n'), 32);
    EXPECT_EQ(disp.find('\r'), std::string::npos);

    EXPECT_EQ(slurp(dir / "spec.csv").rfind("# fingerprint " + fp + "\nomega,value\n", 0), 0U);
    EXPECT_EQ(slurp(dir / "broad.csv").rfind("# fingerprint " + fp + "\nq,omega,intensity\n", 0), 0U);

    const auto el = json::parse(slurp(dir / "broad.json"));
    EXPECT_EQ(el["fingerprint"], fp);
    EXPECT_EQ(el["intensity"].size(), 40U * 101U);
    EXPECT_EQ(el["overlays"]["omega_plus"].size(), 40U);
    EXPECT_EQ(el["config"], cfg.source);

    const auto v = json::parse(slurp(dir / "validate.json"));
    EXPECT_TRUE(v["passed"].get<bool>());

    const auto m = json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(m["fingerprint"], fp);
    EXPECT_LT(m["convergence"]["calibration_residual"].get<double>(), 0.05);
    EXPECT_LT(m["convergence"]["refinement_delta"].get<double>(), 0.02);
    EXPECT_TRUE(m["timings_s"].contains("eigensystem"));
    EXPECT_TRUE(m["timings_s"].contains("el"));
    EXPECT_EQ(m["outputs"].size(), 5U);
}

TEST(Run, OutputsAreBitIdenticalAcrossRunsAndThreads) {
    const auto cfg = parse_config_text(small_config);
    const auto a = fresh_dir("det_a");
    const auto b = fresh_dir("det_b");
    std::ostringstream log;
    run(cfg, {a, 1, false}, log);
    run(cfg, {b, 3, false}, log);
    for (const char* f : {"disp.csv", "spec.csv", "broad.csv", "broad.json", "validate.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Validate, CoarseGridFailsRefinement) {
    const auto cfg = parse_config_text(R"({"grid": {"n_rings": 3}})");
    std::ostringstream log;
    const auto res = run(cfg, {fresh_dir("coarse"), 1, true}, log);
    EXPECT_EQ(res.exit_code, 3);
    std::size_t failed = 0;
    for (const auto& c : res.report.checks)
        if (!c.passed) {
            ++failed;
            EXPECT_EQ(c.name, "refinement_convergence");
        }
    EXPECT_EQ(failed, 1U);
    EXPECT_NE(log.str().find("FAIL spectral/refinement_convergence"), std::string::npos);
}

TEST(Validate, DefaultConfigPasses) {
    std::ostringstream log;
    const auto res = run(parse_config_text("{}"), {fresh_dir("default"), 1, true}, log);
    EXPECT_EQ(res.exit_code, 0) << log.str();
    EXPECT_EQ(res.report.checks.size(), 12U);
    EXPECT_TRUE(res.report.ok());
}

TEST(Validate, NoResonanceSurfacesAsParameterError) {
    const auto cfg = parse_config_text(R"({"device": {"omega_c0": 1.2}})");
    std::ostringstream log;
    try {
        run(cfg, {fresh_dir("noreso"), 1, true}, log);
        FAIL() << "expected NoResonanceError";
    } catch (const std::exception& e) {
        EXPECT_NE(dynamic_cast<const NoResonanceError*>(&e), nullptr);
        EXPECT_EQ(exit_code_for(e), 3);
    }
}

}  // namespace
}  // namespace fanopol::app
