// Acceptance suite: one pass/fail line per criterion.
#include "property_checks.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace oamsim;

namespace {

const LatticeSpec desk{10, -50, 50, 1};
const LatticeSpec desk_spin{10, -50, 50, 2};

struct Verdict {
    bool pass = true;
    std::ostringstream note;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        note << (ok ? "" : "[x] ") << what << "; ";
    }
};

std::string fmt(double v, int prec = 4) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*f", prec, v);
    return b;
}

std::string sci(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.2e", v);
    return b;
}

double grid_step(const std::vector<double>& g) { return g.size() > 1 ? g[1] - g[0] : 0.0; }

// Butterfly support against broadened cylinder spectra.
Verdict criterion1() {
    Verdict v;
    const double gamma = 0.1, tau = 0.01;
    const auto fluxes = farey_fluxes(12);
    const auto grid = default_omega_grid(451, -4.5, 4.5);
    const auto t = butterfly_scan(desk, fluxes, grid, DecaySpec::uniform(gamma));
    const int ny = desk.window();
    double worst = 2.0, worst_cov = 1.0, worst_strict = 1.0;
    std::string worst_flux;
    for (std::size_t r = 0; r < fluxes.size(); ++r) {
        // Oracle: Harper eigenvalues on the open-x, periodic-l cylinder.
        std::vector<double> e;
        for (int m = 0; m < ny; ++m) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(harper_matrix(fluxes[r], desk.n_x, two_pi * m / ny),
                                                              Eigen::EigenvaluesOnly);
            for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) e.push_back(es.eigenvalues()[k]);
        }
        std::vector<double> b(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (double x : e) b[i] += gamma * gamma / ((grid[i] - x) * (grid[i] - x) + gamma * gamma / 4.0) / ny;
        const double bmax = *std::max_element(b.begin(), b.end());
        const double tmax = t.row(static_cast<Eigen::Index>(r)).maxCoeff();
        auto overlap = [&](double thr) {
            int both = 0, either = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const bool in_t = t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) >= thr * tmax;
                const bool in_b = b[i] >= thr * bmax;
                both += in_t && in_b;
                either += in_t || in_b;
            }
            return either ? static_cast<double>(both) / either : 1.0;
        };
        const double jac = overlap(tau);
        worst_strict = std::min(worst_strict, overlap(0.1));
        // Fraction of eigenvalues with transmission support within gamma.
        int covered = 0;
        for (double x : e) {
            bool hit = false;
            for (std::size_t i = 0; i < grid.size() && !hit; ++i)
                hit = std::abs(grid[i] - x) <= gamma &&
                      t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) >= tau * tmax;
            covered += hit;
        }
        worst_cov = std::min(worst_cov, static_cast<double>(covered) / static_cast<double>(e.size()));
        if (jac < worst) {
            worst = jac;
            worst_flux = std::to_string(fluxes[r].p()) + "/" + std::to_string(fluxes[r].q());
        }
    }
    v.check(worst >= 0.95, "min support overlap " + fmt(worst, 3) + " at phi0=" + worst_flux + " (need >= 0.95)");
    v.note << "min eigenvalue coverage within gamma " << fmt(worst_cov, 3) << "; overlap at a 10% threshold "
           << fmt(worst_strict, 3) << "; " << fluxes.size() << " fluxes";
    return v;
}

// Dirac point minimum and van Hove maxima.
Verdict criterion2() {
    Verdict v;
    const auto h = build_dirac(desk_spin, {0, 1});
    const auto grid = default_omega_grid(901, -4.5, 4.5);
    const auto t = total_transmission_spectrum(h, DecaySpec::uniform(0.1), column_inputs(desk_spin, 0), grid);
    const auto at = [&](double w) {
        return static_cast<std::size_t>(std::lround((w - grid.front()) / grid_step(grid)));
    };
    const std::size_t z = at(0.0);
    v.check(t[z] < t[z - 1] && t[z] < t[z + 1], "local minimum at omega=0 (T=" + fmt(t[z]) + ")");
    for (double side : {-2.0, 2.0}) {
        // Largest local maximum in the half-band around +-2.
        std::size_t best = 0;
        double val = -1.0;
        for (std::size_t i = at(side - 1.0); i <= at(side + 1.0); ++i)
            if (t[i] > t[i - 1] && t[i] >= t[i + 1] && t[i] > val) {
                val = t[i];
                best = i;
            }
        v.check(val > 0 && std::abs(grid[best] - side) <= 0.2,
                "maximum near " + fmt(side, 1) + " at " + fmt(grid[best], 3));
    }
    return v;
}

// Displacement plateaus for flux 1/6.
Verdict criterion3() {
    Verdict v;
    const auto h = build_landau_hofstadter(desk, {1, 6});
    GreensSolver solver(h, DecaySpec::uniform(0.2));
    const double a = oam_displacement(solver, -2.2, EdgeRegion{});
    const double b = oam_displacement(solver, -1.0, EdgeRegion{});
    v.check(std::abs(a - 1.0) <= 0.2, "l_e(-2.2)=" + fmt(a));
    v.check(std::abs(b - 2.0) <= 0.3, "l_e(-1.0)=" + fmt(b));
    double spread = 0.0;
    for (const auto& g : bulk_gaps(band_structure({Rational(1, 6), 64, 64}))) {
        std::vector<double> w;
        for (int i = 0; i <= 10; ++i) w.push_back(g.lo + (g.hi - g.lo) * (0.25 + 0.05 * i));
        const auto l = displacement_spectrum(solver, w, EdgeRegion{});
        spread = std::max(spread, *std::max_element(l.begin(), l.end()) - *std::min_element(l.begin(), l.end()));
    }
    v.check(spread < 0.1, "max plateau variation " + fmt(spread));
    return v;
}

// Relativistic double step across the Dirac point.
Verdict criterion4() {
    Verdict v;
    const auto h = build_dirac(desk_spin, {1, 20});
    GreensSolver solver(h, DecaySpec::uniform(0.2));
    const std::vector<double> below{-1.0, -0.8, -0.6}, above{0.6, 0.8, 1.0};
    const auto lb = displacement_spectrum(solver, below, EdgeRegion{});
    const auto la = displacement_spectrum(solver, above, EdgeRegion{});
    for (std::size_t i = 0; i < below.size(); ++i) {
        v.check(std::abs(lb[i] - 2.0) <= 0.3, "l_e(" + fmt(below[i], 1) + ")=" + fmt(lb[i]) + " want 2");
        v.check(std::abs(la[i] + 2.0) <= 0.3, "l_e(" + fmt(above[i], 1) + ")=" + fmt(la[i]) + " want -2");
    }
    return v;
}

// Chern numbers by both estimators and from transmission data.
Verdict criterion5() {
    Verdict v;
    const auto d6 = band_structure({Rational(1, 6), 64, 64});
    const int fhs = fukui_hatsugai_chern(d6, 0);
    const int pm = phase_mismatch_chern(d6, 0, auto_partition(d6, 0));
    v.check(fhs == 1 && pm == 1, "first band at 1/6: FHS " + std::to_string(fhs) + ", phase mismatch " + std::to_string(pm));
    for (long long q : {3, 4, 6}) {
        const auto d = band_structure({Rational(1, q), 64, 64});
        int s = 0;
        for (const auto& g : grouped_chern_numbers(d)) s += g.chern;
        v.check(s == 0, "sum at q=" + std::to_string(q) + " is " + std::to_string(s));
    }
    const LatticeSpec torus{10, -51, 50, 1, Boundary::Periodic, Boundary::Periodic};
    const auto r = transmission(build_oam_gauge_hofstadter(torus, {1, 6}), DecaySpec::uniform(0.1), -3.09, {0, 0, 0});
    const auto tc = transmission_chern(r.amplitudes, torus, {1, 6}, -3.09, 0.1);
    v.check(tc.chern == 1, "from transmission: chi winding " + std::to_string(tc.chern));
    return v;
}

// Bulk-boundary correspondence at every mid-gap.
Verdict criterion6() {
    Verdict v;
    for (Rational f : {Rational(1, 3), Rational(1, 4), Rational(1, 6)}) {
        const auto d = band_structure({f, 64, 64});
        const auto groups = grouped_chern_numbers(d);
        const auto h = build_landau_hofstadter(desk, f);
        GreensSolver solver(h, DecaySpec::uniform(0.2));
        for (const auto& g : bulk_gaps(d)) {
            const double w = 0.5 * (g.lo + g.hi);
            int below = 0;
            for (const auto& grp : groups)
                if (grp.first < g.bands_below) below += grp.chern;
            const double l = oam_displacement(solver, w, EdgeRegion{});
            v.check(std::abs(l - below) < 0.25, "q=" + std::to_string(f.q()) + " omega=" + fmt(w, 3) + ": l_e=" + fmt(l) +
                                                    " sum C=" + std::to_string(below));
        }
    }
    return v;
}

// Monte Carlo robustness of the plateau.
Verdict criterion7() {
    Verdict v;
    const auto h = build_landau_hofstadter(desk, {1, 6});
    const std::uint64_t seed = 20240601;
    const double gap = -2.2, band = -1.5;
    const double clean = oam_displacement(h, DecaySpec::uniform(0.2), gap, EdgeRegion{});

    DisorderModel fig3c;
    fig3c.sigma_detuning = 0.1;
    const auto a = displacement_robustness(h, fig3c, 0.2, {gap, band}, EdgeRegion{}, 100, seed);
    v.check(a.std_dev[0] < 0.1, "detuning model mid-gap std " + fmt(a.std_dev[0]));
    v.check(std::abs(a.mean[0] - clean) <= 0.15, "mid-gap mean " + fmt(a.mean[0]) + " vs clean " + fmt(clean));
    v.check(a.std_dev[1] >= 3.0 * a.std_dev[0], "in-band std " + fmt(a.std_dev[1]) + " vs 3x mid-gap");

    DisorderModel oam;
    oam.sigma_coupling_mag = 0.05;
    oam.sigma_coupling_phase = 0.05;
    oam.sigma_loss = 0.02;
    oam.envelope = OamEnvelope{30.0};
    oam.scope = DisorderScope::PerOAMLink;
    const auto b = displacement_robustness(h, oam, 0.2, {gap}, EdgeRegion{}, 100, seed);
    v.check(std::abs(b.mean[0] - clean) <= 0.2, "OAM-dependent model mid-gap mean " + fmt(b.mean[0]));
    return v;
}

// Spin Hall gap closing and polarized edge transport.
Verdict criterion8() {
    Verdict v;
    const double w0 = qsh_gap(0.0, 0.6).width, w1 = qsh_gap(0.075, 0.6).width, w2 = qsh_gap(0.125, 0.6).width;
    v.check(w0 > 0.3, "gap(0)=" + fmt(w0));
    v.check(w1 < 0.05, "gap(0.075)=" + fmt(w1));
    v.check(w2 > 0.2, "gap(0.125)=" + fmt(w2));
    const auto m0 = polarized_edge_maps(desk_spin, 0.0, 0.6, DecaySpec::uniform(0.1), -1.6);
    const auto m2 = polarized_edge_maps(desk_spin, 0.125, 0.6, DecaySpec::uniform(0.1), -1.6);
    v.check(m0.displacement[0] * m0.displacement[1] < 0,
            "polarized displacements " + fmt(m0.displacement[0]) + ", " + fmt(m0.displacement[1]));
    const double e0 = m0.edge_weight[0] + m0.edge_weight[1], e2 = m2.edge_weight[0] + m2.edge_weight[1];
    v.check(e2 < 0.2 * e0, "edge weight ratio " + fmt(e2 / e0, 3) + " (need < 0.2)");
    return v;
}

// Transfer-matrix dispersion against the tight-binding band.
Verdict criterion9() {
    Verdict v;
    for (double r : {0.05, 0.1, 0.2}) {
        const auto c = dispersion_check(OpticalParams::resonant(r, 1000, 3), 16);
        v.check(c.max_relative_error < r * r,
                "|r|=" + fmt(r, 2) + ": error " + fmt(c.max_relative_error, 6) + " < " + fmt(r * r, 4) +
                    ", kappa_fit/kappa " + fmt(c.kappa_fit / c.kappa, 4));
    }
    return v;
}

// Always-on invariants.
Verdict criterion10() {
    Verdict v;
    const auto h = props::hermiticity(1001, 120);
    v.check(h.pass, "hermiticity worst " + sci(h.worst) + " (tol 1e-12)");
    const auto u = props::s_row_unitarity(1002, 100);
    v.check(u.pass, "S-row unitarity worst " + sci(u.worst) + " (tol 1e-9)");
    const auto g = props::gauge_equivalence();
    v.check(g.pass, "gauge equivalence worst " + sci(g.worst) + " (tol 1e-10)");
    const auto c = props::chern_gauge_invariance(1003);
    v.check(c.pass, "chern gauge invariance " + c.detail);
    const auto b = props::byte_identical_rerun(1004);
    v.check(b.pass, "byte-identical rerun " + b.detail);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9, criterion10};
    bool all = true;
    for (int n = 1; n <= 10; ++n) {
        if (only && n != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = false;
        std::string note;
        try {
            auto v = criteria[static_cast<std::size_t>(n - 1)]();
            pass = v.pass;
            note = v.note.str();
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what() + ";";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << "  " << note << " (" << fmt(secs, 1) << " s)"
                  << std::endl;
        all = all && pass;
    }
    return all ? 0 : 1;
}
