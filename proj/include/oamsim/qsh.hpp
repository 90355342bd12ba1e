// qsh.hpp - band-gap tracking and polarization-resolved edge transport for the spin Hall lattice
#pragma once

#include "oamsim/edge.hpp"

#include <string>

namespace oamsim {

// 8 x 8 Bloch matrix on the 4-cavity cell, basis (j, s); Kx is the phase per cell.
inline Eigen::MatrixXcd qsh_bloch_hamiltonian(double beta0, double lambda0, double Kx, double ky) {
    const auto cfg = qsh_gauge(4, beta0, lambda0);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(8, 8);
    const Eigen::Matrix2cd ux = -std::exp(I * (two_pi * cfg.phi_x)) * jones_exp(cfg.alpha, cfg.axis1);
    for (int j = 0; j < 4; ++j) {
        const Eigen::Matrix2cd uy = -jones_exp(cfg.beta(j), cfg.axis2) * std::exp(-I * ky);
        h.block(2 * j, 2 * j, 2, 2) += uy + uy.adjoint();
        h.block(2 * j, 2 * j, 2, 2) += cfg.lambda(j) * Eigen::Matrix2cd::Identity();
        const int jn = (j + 1) % 4;
        const Eigen::Matrix2cd hop = j == 3 ? Eigen::Matrix2cd(ux * std::exp(-I * Kx)) : ux;
        h.block(2 * jn, 2 * j, 2, 2) += hop;
        h.block(2 * j, 2 * jn, 2, 2) += hop.adjoint();
    }
    return h;
}

struct GapReport {
    double beta0 = 0.0;
    double e_low = 0.0;   // top of the bands below the target
    double e_high = 0.0;  // bottom of the bands above
    double width = 0.0;   // max(0, e_high - e_low)
    std::string method = "torus Bloch band extrema over k and band index";
};

// Bands are split at the target by their k-averaged energy; the gap is the indirect gap between them.
inline GapReport qsh_gap(double beta0, double lambda0, double target = -1.6, int nk = 48) {
    std::vector<Eigen::VectorXd> es(static_cast<std::size_t>(nk * nk));
    parallel_for(es.size(), [&](std::size_t idx) {
        const double Kx = -std::numbers::pi + two_pi * static_cast<double>(idx / static_cast<std::size_t>(nk)) / nk;
        const double ky = -std::numbers::pi + two_pi * static_cast<double>(idx % static_cast<std::size_t>(nk)) / nk;
        es[idx] = eigvalsh(qsh_bloch_hamiltonian(beta0, lambda0, Kx, ky));
    });
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(8);
    for (const auto& e : es) mean += e;
    mean /= static_cast<double>(es.size());
    int b = 0;
    while (b < 8 && mean[b] < target) ++b;
    GapReport r;
    r.beta0 = beta0;
    if (b == 0 || b == 8) return r;
    r.e_low = -1e300;
    r.e_high = 1e300;
    for (const auto& e : es) {
        r.e_low = std::max(r.e_low, e[b - 1]);
        r.e_high = std::min(r.e_high, e[b]);
    }
    r.width = std::max(0.0, r.e_high - r.e_low);
    return r;
}

inline std::vector<GapReport> qsh_gap_scan(const LatticeSpec& spec, double lambda0, const std::vector<double>& beta0_list,
                                           double energy_target = -1.6, int nk = 48) {
    if (spec.bc_x == Boundary::Periodic && spec.n_x % 4 != 0)
        throw std::invalid_argument("qsh_gap_scan: n_x must be a multiple of 4 on a torus");
    std::vector<GapReport> out;
    for (double b : beta0_list) out.push_back(qsh_gap(b, lambda0, energy_target, nk));
    return out;
}

struct PolarizedEdgeMaps {
    TransmissionMap map[2];     // input (0, 0, s) for s = 0, 1
    double displacement[2]{};   // sum |T|^2 l_o per input polarization
    double edge_weight[2]{};    // weight within 2 sites of an open boundary
};

inline constexpr int qsh_edge_width = 2;

inline PolarizedEdgeMaps polarized_edge_maps(const LatticeSpec& spec, double beta0, double lambda0,
                                             const DecaySpec& decay, double omega = -1.6) {
    const auto h = build_qsh(spec, beta0, lambda0);
    GreensSolver solver(h, decay);
    PolarizedEdgeMaps out;
    for (int s = 0; s < 2; ++s) {
        out.map[s] = transmission_map(solver, omega, {0, 0, s});
        out.displacement[s] = out.map[s].oam_moment();
        out.edge_weight[s] = out.map[s].boundary_weight(qsh_edge_width);
    }
    return out;
}

struct TransitionEstimate {
    double beta_c = 0.0;
    double uncertainty = 0.0;  // grid step at the minimizer
    std::vector<GapReport> scan;
};

inline TransitionEstimate transition_detector(const LatticeSpec& spec, double lambda0, const std::vector<double>& beta0_grid,
                                              double energy_target = -1.6) {
    if (beta0_grid.size() < 3) throw std::invalid_argument("transition_detector: need at least 3 grid points");
    auto scan = qsh_gap_scan(spec, lambda0, beta0_grid, energy_target);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scan.size(); ++i)
        if (scan[i].width < scan[best].width) best = i;
    if (best == 0 || best + 1 == scan.size())
        throw NumericalError("transition_detector: no interior minimum of the gap in range");
    const double step = std::max(beta0_grid[best] - beta0_grid[best - 1], beta0_grid[best + 1] - beta0_grid[best]);
    return {beta0_grid[best], step, std::move(scan)};
}

}  // namespace oamsim
