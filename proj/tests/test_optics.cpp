#include "oamsim/optics.hpp"

#include <gtest/gtest.h>

using namespace oamsim;

TEST(BeamSplitter, BalancedMatrix) {
    const double r = 1.0 / std::sqrt(2.0);
    const auto m = bs_transfer_matrix(r);
    EXPECT_NEAR(std::abs(m(0, 0)), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(m(0, 1)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(m(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(m(1, 1)), std::sqrt(2.0), 1e-14);
    EXPECT_LT(std::abs(m.determinant() - 1.0), 1e-14);
}

TEST(BeamSplitter, WeakReflectionDiverges) {
    EXPECT_GT(std::abs(bs_transfer_matrix(1e-3)(0, 0)), 999.0);
    EXPECT_THROW(bs_transfer_matrix(0.0), std::invalid_argument);
    EXPECT_THROW(bs_transfer_matrix(1.0), std::invalid_argument);
}

TEST(FieldTransfer, UnitModulusDeterminant) {
    for (double phi : {0.0, 0.17, 0.5}) {
        const auto p = OpticalParams::resonant(0.2, 1000, 3, 1.0, phi);
        for (double dk : {0.0, 0.01, -0.3})
            EXPECT_NEAR(std::abs(field_transfer(p, p.k_wave + dk, phi).determinant()), 1.0, 1e-12);
    }
}

TEST(Dispersion, CosineBandWithinSquaredReflection) {
    for (double r : {0.05, 0.1, 0.2}) {
        const auto p = OpticalParams::resonant(r, 1000, 3);
        const auto c = dispersion_check(p, 8);
        EXPECT_LT(c.max_relative_error, r * r) << r;
        EXPECT_NEAR(c.kappa_fit, c.kappa, r * r * c.kappa) << r;
    }
}

TEST(Dispersion, BandBottomAtZeroMomentum) {
    const auto p = OpticalParams::resonant(0.1, 1000, 3);
    const double kap = coupling_strength(p);
    EXPECT_NEAR(bloch_dispersion(p, 0.0, 0.0), -4.0 * kap, 0.05 * kap);
    EXPECT_NEAR(bloch_dispersion(p, std::numbers::pi, std::numbers::pi), 4.0 * kap, 0.05 * kap);
}

TEST(Dispersion, OddModeIndexFlipsBand) {
    const auto p = OpticalParams::resonant(0.1, 1001, 3);
    const double kap = coupling_strength(p);
    EXPECT_NEAR(bloch_dispersion(p, 0.0, 0.0), 4.0 * kap, 0.05 * kap);
}

TEST(Dispersion, HalfCycleArmPhaseShiftsBand) {
    const auto a = OpticalParams::resonant(0.1, 1000, 3);
    const auto b = OpticalParams::resonant(0.1, 1000, 3, 1.0, 0.5);
    const double kap = coupling_strength(a);
    for (double kx : {0.0, 0.7, -2.0})
        EXPECT_NEAR(bloch_dispersion(b, kx + std::numbers::pi, 0.3), bloch_dispersion(a, kx, 0.3), 1e-6 * kap);
}

TEST(Coupling, ScalesWithSquaredReflection) {
    OpticalParams p;
    p.Omega0 = two_pi * 1e8;
    p.r_mag = 0.1;
    EXPECT_NEAR(coupling_strength(p), 5e5, 1e-6);
    const double k1 = coupling_strength(p);
    p.r_mag = 0.2;
    EXPECT_NEAR(coupling_strength(p) / k1, 4.0, 1e-12);
}

TEST(DegenerateCavity, FlatRayMatrixIsOamIndependent) {
    const RayMatrix id{};
    const double base = degenerate_mode_detuning(0, 0, 1.0, 7.0, id);
    for (int l : {-5, 1, 12}) EXPECT_NEAR(degenerate_mode_detuning(0, l, 1.0, 7.0, id), base, 1e-12);
}

TEST(DegenerateCavity, InvertingRayMatrixHasPeriodTwo) {
    const RayMatrix inv{-1.0, 0.0, 0.0, -1.0};
    const double a = degenerate_mode_detuning(0, 2, 1.0, 7.0, inv);
    EXPECT_NEAR(degenerate_mode_detuning(0, 4, 1.0, 7.0, inv), a, 1e-12);
    EXPECT_NEAR(std::abs(degenerate_mode_detuning(0, 3, 1.0, 7.0, inv) - a), std::numbers::pi, 1e-12);
}

TEST(DegenerateCavity, QuarterTurnHasPeriodFour) {
    const RayMatrix rot{0.0, 1.0, -1.0, 0.0};
    const double a = degenerate_mode_detuning(1, 0, 1.0, 3.0, rot);
    EXPECT_NEAR(degenerate_mode_detuning(1, 4, 1.0, 3.0, rot), a, 1e-12);
    EXPECT_GT(std::abs(degenerate_mode_detuning(1, 1, 1.0, 3.0, rot) - a), 1.0);
}

TEST(DegenerateCavity, UnstableOrSingularRejected) {
    EXPECT_THROW(degenerate_mode_detuning(0, 0, 1.0, 1.0, RayMatrix{2.0, 3.0, 1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(degenerate_mode_detuning(0, 0, 1.0, 1.0, RayMatrix{1.0, 1.0, 1.0, 1.0}), std::invalid_argument);
}
