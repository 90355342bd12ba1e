#include "oamsim/disorder.hpp"

#include <gtest/gtest.h>

using namespace oamsim;

namespace {

const LatticeSpec small{6, -8, 8, 1};

DisorderModel full_model(DisorderScope scope) {
    DisorderModel m;
    m.sigma_detuning = 0.1;
    m.sigma_coupling_mag = 0.05;
    m.sigma_coupling_phase = 0.05;
    m.sigma_loss = 0.1;
    m.scope = scope;
    if (scope != DisorderScope::PerCavityLink) m.envelope = OamEnvelope{};
    return m;
}

}  // namespace

TEST(Disorder, ZeroSigmaReproducesBase) {
    const auto h = build_landau_hofstadter(small, {1, 4});
    for (auto scope : {DisorderScope::PerCavityLink, DisorderScope::PerOAMLink, DisorderScope::PerSite}) {
        DisorderModel m;
        m.scope = scope;
        EXPECT_EQ((sample_disordered_hamiltonian(h, m, 5).dense() - h.dense()).norm(), 0.0);
    }
}

TEST(Disorder, SeededSamplesDeterministic) {
    const auto h = build_landau_hofstadter(small, {1, 4});
    const auto m = full_model(DisorderScope::PerSite);
    EXPECT_EQ((sample_disordered_hamiltonian(h, m, 11, 3).dense() - sample_disordered_hamiltonian(h, m, 11, 3).dense()).norm(), 0.0);
    EXPECT_GT((sample_disordered_hamiltonian(h, m, 11, 3).dense() - sample_disordered_hamiltonian(h, m, 12, 3).dense()).norm(), 0.0);
    EXPECT_GT((sample_disordered_hamiltonian(h, m, 11, 3).dense() - sample_disordered_hamiltonian(h, m, 11, 4).dense()).norm(), 0.0);
}

TEST(Disorder, SamplesStayHermitian) {
    const LatticeSpec s{6, -8, 8, 2, Boundary::Periodic, Boundary::Periodic};
    GaugeConfig g;
    g.phi0 = {1, 4};
    g.alpha = 0.1;
    const auto h = build_non_abelian(s, g);
    for (auto scope : {DisorderScope::PerCavityLink, DisorderScope::PerOAMLink, DisorderScope::PerSite})
        EXPECT_LT(hermiticity_error(sample_disordered_hamiltonian(h, full_model(scope), 1, 0)), 1e-14);
}

TEST(Disorder, PerCavityScopeShiftsWholeCavity) {
    const auto h = build_landau_hofstadter(small, {1, 4});
    DisorderModel m;
    m.sigma_detuning = 0.3;
    const auto d = sample_disordered_hamiltonian(h, m, 2);
    for (int j = 0; j < small.n_x; ++j) {
        const auto i0 = static_cast<Eigen::Index>(flat_index(small, {j, small.l_min, 0}));
        for (int l = small.l_min; l <= small.l_max; ++l) {
            const auto i = static_cast<Eigen::Index>(flat_index(small, {j, l, 0}));
            EXPECT_EQ(d.entries.coeff(i, i), d.entries.coeff(i0, i0));
        }
    }
}

TEST(Disorder, EnvelopeValues) {
    const OamEnvelope f{};
    EXPECT_NEAR(f(0.5), 2.8e-4, 1e-5);
    EXPECT_NEAR(f(45.0), 0.895, 1e-3);
    EXPECT_NEAR(f(30.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_EQ(f(0.0), 0.0);
}

TEST(Disorder, EnvelopeSuppressesLowOamLinks) {
    const LatticeSpec s{4, -60, 60, 1};
    const auto h = build_landau_hofstadter(s, {0, 1});
    DisorderModel m;
    m.sigma_coupling_mag = 0.2;
    m.scope = DisorderScope::PerOAMLink;
    m.envelope = OamEnvelope{};
    const auto d = sample_disordered_hamiltonian(h, m, 9);
    auto hop = [&](int l) {
        return std::abs(d.entries.coeff(static_cast<Eigen::Index>(flat_index(s, {1, l + 1, 0})),
                                        static_cast<Eigen::Index>(flat_index(s, {1, l, 0}))) + 1.0);
    };
    EXPECT_LT(hop(0), 1e-3);
    double far = 0.0;
    for (int l = 40; l < 59; ++l) far = std::max(far, hop(l));
    EXPECT_GT(far, 0.05);
}

TEST(Disorder, LossWithoutSpreadIsUniform) {
    DisorderModel m;
    m.sigma_detuning = 0.2;
    const auto d = loss_perturbed_decay(0.2, small, m, 1);
    EXPECT_TRUE(d.is_uniform());
}

TEST(Disorder, LossRatesPositiveAndSeeded) {
    const auto m = full_model(DisorderScope::PerCavityLink);
    const auto a = loss_perturbed_decay(0.2, small, m, 4, 1).as_vector(small.dim());
    const auto b = loss_perturbed_decay(0.2, small, m, 4, 1).as_vector(small.dim());
    EXPECT_EQ(a, b);
    EXPECT_GT(a.minCoeff(), 0.0);
    EXPECT_GT(a.maxCoeff() - a.minCoeff(), 0.0);
}

TEST(Disorder, TrialRngStreamsIndependent) {
    TrialRng a(1, 0, TrialRng::Detuning), b(1, 0, TrialRng::Coupling), c(1, 0, TrialRng::Detuning);
    const double x = a.normal();
    EXPECT_NE(x, b.normal());
    EXPECT_EQ(x, c.normal());
}

TEST(MonteCarlo, ZeroDisorderHasNoSpread) {
    const auto h = build_landau_hofstadter(small, {1, 4});
    const std::vector<double> w{-2.0, -0.5};
    const auto s = displacement_robustness(h, DisorderModel{}, 0.2, w, EdgeRegion{EdgeSide::Right, 2}, 4, 1);
    GreensSolver solver(h, DecaySpec::uniform(0.2));
    for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_EQ(s.std_dev[i], 0.0);
        EXPECT_NEAR(s.mean[i], oam_displacement(solver, w[i], EdgeRegion{EdgeSide::Right, 2}), 1e-12);
    }
}

TEST(MonteCarlo, DeterministicForFixedSeed) {
    const auto h = build_landau_hofstadter(small, {1, 4});
    const auto m = full_model(DisorderScope::PerSite);
    const std::vector<double> w{-2.0};
    const auto a = displacement_robustness(h, m, 0.2, w, EdgeRegion{EdgeSide::Right, 2}, 5, 77, 1);
    const auto b = displacement_robustness(h, m, 0.2, w, EdgeRegion{EdgeSide::Right, 2}, 5, 77, 1);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_dev, b.std_dev);
    EXPECT_THROW(displacement_robustness(h, m, 0.2, w, EdgeRegion{EdgeSide::Right, 2}, 1, 77), std::invalid_argument);
}

TEST(MonteCarlo, GapPlateauMoreRobustThanBand) {
    const LatticeSpec s{10, -50, 50, 1};
    const auto h = build_landau_hofstadter(s, {1, 6});
    DisorderModel m;
    m.sigma_detuning = 0.1;
    const auto r = displacement_robustness(h, m, 0.2, {-2.2, -1.5}, EdgeRegion{}, 20, 3);
    EXPECT_NEAR(r.mean[0], 1.0, 0.1);
    EXPECT_LT(r.std_dev[0], 0.05);
    EXPECT_GT(r.std_dev[1], 2.0 * r.std_dev[0]);
}
