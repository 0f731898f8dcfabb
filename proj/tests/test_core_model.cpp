#include <gtest/gtest.h>

#include <cmath>

#include "fanopol/core_model.hpp"

namespace fanopol {
namespace {

TEST(SubbandDispersion, BandBottoms) {
    const DeviceParams p;
    EXPECT_EQ(subband_dispersion(1, 0.0, p), 0.0);
    EXPECT_EQ(subband_dispersion(2, 0.0, p), 1.0);
}

TEST(SubbandDispersion, UpperSubbandAtFermiWavevector) {
    DeviceParams p;
    p.mass_scale = 0.3;
    EXPECT_DOUBLE_EQ(subband_dispersion(Subband::upper, 1.0, p), 1.3);
    EXPECT_DOUBLE_EQ(subband_dispersion(Subband::lower, 1.5, p), 0.675);
}

TEST(SubbandDispersion, RejectsBadInput) {
    const DeviceParams p;
    EXPECT_THROW(subband_dispersion(3, 0.5, p), ParameterError);
    EXPECT_THROW(subband_dispersion(0, 0.5, p), ParameterError);
    EXPECT_THROW(subband_dispersion(1, -0.1, p), ParameterError);
}

TEST(CavityDispersion, CutoffAndResonance) {
    DeviceParams p;
    p.omega_c0 = 0.9;
    EXPECT_EQ(cavity_dispersion(0.0, p), 0.9);
    EXPECT_NEAR(cavity_dispersion(p.qres_over_kf, p), 1.0, 1e-12);
}

TEST(CavityDispersion, MatchesExtendedPrecisionAtTwiceResonance) {
    DeviceParams p;
    p.omega_c0 = 0.9;
    p.qres_over_kf = 0.01;
    // tests/oracles/closed_forms.py
    EXPECT_NEAR(cavity_dispersion(0.02, p), 1.2529964086141667788, 2e-15);
}

TEST(CavityDispersion, StrictlyIncreasingAboveCutoff) {
    for (double wc0 : {0.3, 0.7, 0.9, 0.999}) {
        DeviceParams p;
        p.omega_c0 = wc0;
        double prev = cavity_dispersion(0.0, p);
        for (int i = 1; i <= 500; ++i) {
            const double w = cavity_dispersion(0.0002 * i, p);
            EXPECT_GT(w, prev);
            EXPECT_GE(w, wc0);
            prev = w;
        }
    }
}

TEST(ResonantWavevector, DefinitionalValue) {
    DeviceParams p;
    p.qres_over_kf = 0.01;
    EXPECT_EQ(resonant_wavevector(p), 0.01);
    p.omega_c0 = 0.99;
    EXPECT_NO_THROW(resonant_wavevector(p));
}

TEST(ResonantWavevector, CutoffAboveTransitionHasNoResonance) {
    DeviceParams p;
    p.omega_c0 = 1.2;
    EXPECT_THROW(resonant_wavevector(p), NoResonanceError);
    EXPECT_THROW(p.validate(), NoResonanceError);
}

TEST(CollectiveCoupling, NormalizedAtResonance) {
    DeviceParams p;
    p.rabi_res = 0.1;
    EXPECT_NEAR(collective_coupling(p.qres_over_kf, p), 0.1, 1e-15);
}

TEST(CollectiveCoupling, VanishesLinearlyAtSmallWavevector) {
    const DeviceParams p;
    EXPECT_EQ(collective_coupling(0.0, p), 0.0);
    const double kz = cavity_kz(p);
    const double q_res = p.qres_over_kf;
    const double slope = p.rabi_res / std::sqrt(p.omega_c0) * std::sqrt(kz * kz + q_res * q_res) / (kz * q_res);
    for (double q : {1e-6, 1e-7, 1e-8}) EXPECT_NEAR(collective_coupling(q, p) / q, slope, slope * 1e-6);
}

TEST(CollectiveCoupling, MatchesExtendedPrecision) {
    DeviceParams p;  // omega_c0 0.9, rabi 0.1, q_res 0.01
    // tests/oracles/closed_forms.py
    EXPECT_NEAR(collective_coupling(0.03, p), 0.14999295082825821696, 2e-16);
    EXPECT_NEAR(collective_coupling(0.005, p), 0.05611053476573734992, 2e-16);
}

TEST(CollectiveCoupling, RejectsNegativeWavevector) {
    const DeviceParams p;
    EXPECT_THROW(collective_coupling(-1e-3, p), ParameterError);
}

TEST(DeviceParams, ValidationAndFiniteness) {
    DeviceParams p;
    EXPECT_NO_THROW(p.validate());
    p.rabi_res = 0.0;  // decoupled limit is allowed
    EXPECT_NO_THROW(p.validate());
    p.rabi_res = -0.1;
    EXPECT_THROW(p.validate(), ParameterError);
    p = DeviceParams{};
    p.mass_scale = 0.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = DeviceParams{};
    p.qres_over_kf = -1;
    EXPECT_THROW(p.validate(), ParameterError);
    p = DeviceParams{};
    p.omega12 = 2.0;
    EXPECT_THROW(p.validate(), ParameterError);

    // sweep the valid region: nothing produces NaN
    for (double wc0 = 0.05; wc0 < 1.0; wc0 += 0.05) {
        DeviceParams s;
        s.omega_c0 = wc0;
        for (double q = 0.0; q < 0.2; q += 0.001) {
            EXPECT_TRUE(std::isfinite(cavity_dispersion(q, s)));
            EXPECT_TRUE(std::isfinite(collective_coupling(q, s)));
        }
    }
}

TEST(DeviceParams, FingerprintTracksEveryField) {
    const DeviceParams base;
    DeviceParams other = base;
    EXPECT_EQ(base.fingerprint(), other.fingerprint());
    other.mass_scale += 1e-12;
    EXPECT_NE(base.fingerprint(), other.fingerprint());
}

}  // namespace
}  // namespace fanopol
