// edge.hpp - edge transport maps, OAM displacement, Harper edge modes
#pragma once

#include "oamsim/scattering.hpp"

#include <optional>
#include <vector>

namespace oamsim {

enum class EdgeSide { Left, Right };

struct EdgeRegion {
    EdgeSide side = EdgeSide::Right;
    int depth = 4;

    void validate(const LatticeSpec& spec) const {
        if (depth < 1 || 2 * depth > spec.n_x)
            throw std::invalid_argument("EdgeRegion: depth must lie in [1, n_x/2]");
    }
    [[nodiscard]] std::vector<int> cavities(const LatticeSpec& spec) const {
        validate(spec);
        std::vector<int> js;
        for (int d = 0; d < depth; ++d) js.push_back(side == EdgeSide::Left ? d : spec.n_x - 1 - d);
        return js;
    }
};

// Drive sites: l_in in every region cavity, one or all input polarizations.
inline std::vector<SiteIndex> region_inputs(const LatticeSpec& spec, const EdgeRegion& region, int l_in = 0,
                                            std::optional<int> polarization = std::nullopt) {
    std::vector<SiteIndex> v;
    for (int j : region.cavities(spec)) {
        if (polarization) {
            v.push_back({j, l_in, *polarization});
        } else {
            for (int s = 0; s < spec.spin_dim; ++s) v.push_back({j, l_in, s});
        }
    }
    return v;
}

struct TransmissionMap {
    LatticeSpec spec;
    SiteIndex input;
    Eigen::VectorXd intensity;  // |T|^2 in flat-index order

    [[nodiscard]] double at(const SiteIndex& s) const {
        return intensity[static_cast<Eigen::Index>(flat_index(spec, s))];
    }
    [[nodiscard]] double total() const { return intensity.sum(); }
    // Summed over polarization; rows = OAM l, cols = cavity j.
    [[nodiscard]] Eigen::MatrixXd grid() const {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(spec.window(), spec.n_x);
        for (std::size_t i = 0; i < spec.dim(); ++i) {
            const auto s = site_at(spec, i);
            g(s.l - spec.l_min, s.j) += intensity[static_cast<Eigen::Index>(i)];
        }
        return g;
    }
    // Weight on sites closer than `within` to an open boundary.
    [[nodiscard]] double boundary_weight(int within) const {
        double w = 0.0;
        for (std::size_t i = 0; i < spec.dim(); ++i)
            if (boundary_distance(spec, site_at(spec, i)) < within) w += intensity[static_cast<Eigen::Index>(i)];
        return w;
    }
    // OAM-weighted sum, sum |T|^2 l_o.
    [[nodiscard]] double oam_moment() const {
        double m = 0.0;
        for (std::size_t i = 0; i < spec.dim(); ++i) m += intensity[static_cast<Eigen::Index>(i)] * site_at(spec, i).l;
        return m;
    }
};

inline TransmissionMap transmission_map(const GreensSolver& solver, double omega, const SiteIndex& input) {
    const auto t = transmission_columns(solver, omega, {input});
    return {solver.hamiltonian().spec, input, t.col(0).cwiseAbs2()};
}

inline TransmissionMap transmission_map(const HamiltonianMatrix& h, const DecaySpec& decay, double omega,
                                        const SiteIndex& input = {0, 0, 0}) {
    GreensSolver solver(h, decay);
    return transmission_map(solver, omega, input);
}

namespace detail {
inline Eigen::VectorXd oam_column(const LatticeSpec& spec) {
    Eigen::VectorXd l(static_cast<Eigen::Index>(spec.dim()));
    for (std::size_t i = 0; i < spec.dim(); ++i) l[static_cast<Eigen::Index>(i)] = site_at(spec, i).l;
    return l;
}
}  // namespace detail

// l_e = sum over region inputs (j, l_in) and all outputs of |T|^2 l_o.
inline double oam_displacement(const GreensSolver& solver, double omega, const EdgeRegion& region,
                               std::optional<int> polarization = std::nullopt, int l_in = 0) {
    const auto& spec = solver.hamiltonian().spec;
    const auto t = transmission_columns(solver, omega, region_inputs(spec, region, l_in, polarization));
    return t.cwiseAbs2().rowwise().sum().dot(detail::oam_column(spec));
}

inline double oam_displacement(const HamiltonianMatrix& h, const DecaySpec& decay, double omega,
                               const EdgeRegion& region, std::optional<int> polarization = std::nullopt) {
    GreensSolver solver(h, decay);
    return oam_displacement(solver, omega, region, polarization);
}

inline std::vector<double> displacement_spectrum(const GreensSolver& solver, const std::vector<double>& omega_grid,
                                                 const EdgeRegion& region,
                                                 std::optional<int> polarization = std::nullopt) {
    std::vector<double> out(omega_grid.size());
    parallel_for(omega_grid.size(),
                 [&](std::size_t i) { out[i] = oam_displacement(solver, omega_grid[i], region, polarization); });
    return out;
}

inline std::vector<double> displacement_spectrum(const HamiltonianMatrix& h, const DecaySpec& decay,
                                                 const std::vector<double>& omega_grid, const EdgeRegion& region,
                                                 std::optional<int> polarization = std::nullopt) {
    GreensSolver solver(h, decay, SolverKind::Auto, omega_grid.size());
    return displacement_spectrum(solver, omega_grid, region, polarization);
}

// ---- Harper analysis on the cylinder (open x, periodic y, Landau gauge) ----

inline Eigen::MatrixXd harper_matrix(Rational phi0, int n_x, double ky) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_x, n_x);
    for (int j = 0; j < n_x; ++j) {
        h(j, j) = -2.0 * std::cos(ky - two_pi * j * phi0.value());
        if (j + 1 < n_x) h(j, j + 1) = h(j + 1, j) = -1.0;
    }
    return h;
}

struct EdgeMode {
    double ky = 0.0;        // resonant momentum
    double velocity = 0.0;  // dE/dky
    EdgeSide side = EdgeSide::Left;
    double weight = 0.0;    // weight on the outer 20% of columns of that side
    int band = 0;
    Eigen::VectorXd psi;    // Harper eigenvector over j
};

struct EdgeModeSet {
    Rational phi0;
    int n_x = 0;
    double omega = 0.0;
    double gamma = 0.0;
    std::vector<EdgeMode> modes;

    [[nodiscard]] int predicted_displacement(EdgeSide side) const {
        int s = 0;
        for (const auto& m : modes)
            if (m.side == side) s += m.velocity > 0 ? 1 : -1;
        return s;
    }
    [[nodiscard]] std::size_t count(EdgeSide side) const {
        return static_cast<std::size_t>(
            std::count_if(modes.begin(), modes.end(), [side](const EdgeMode& m) { return m.side == side; }));
    }
};

inline constexpr double harper_velocity_step = two_pi / 512.0;

inline std::vector<double> uniform_ky_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = -std::numbers::pi + two_pi * i / n;
    return g;
}

inline EdgeModeSet harper_edge_modes(Rational phi0, int n_x, const std::vector<double>& ky_grid, double omega,
                                     double gamma) {
    if (ky_grid.size() < 2) throw std::invalid_argument("harper_edge_modes: ky grid too small");
    auto energies = [&](double ky) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(harper_matrix(phi0, n_x, ky), Eigen::EigenvaluesOnly);
        return Eigen::VectorXd(es.eigenvalues());
    };
    EdgeModeSet out{phi0, n_x, omega, gamma, {}};
    const int outer = std::max(1, static_cast<int>(std::ceil(0.2 * n_x)));
    std::vector<Eigen::VectorXd> e(ky_grid.size());
    for (std::size_t i = 0; i < ky_grid.size(); ++i) e[i] = energies(ky_grid[i]);
    const std::size_t nk = ky_grid.size();
    for (std::size_t i = 0; i < nk; ++i) {
        const std::size_t i2 = (i + 1) % nk;
        const double k1 = ky_grid[i];
        double k2 = ky_grid[i2];
        if (i2 == 0) k2 += two_pi;
        for (int b = 0; b < n_x; ++b) {
            double f1 = e[i][b] - omega;
            const double f2 = e[i2][b] - omega;
            if (!(f1 < 0.0 && f2 >= 0.0) && !(f1 >= 0.0 && f2 < 0.0)) continue;
            double lo = k1, hi = k2;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = energies(mid)[b] - omega;
                if ((fm < 0.0) == (f1 < 0.0)) {
                    lo = mid;
                    f1 = fm;
                } else {
                    hi = mid;
                }
            }
            EdgeMode m;
            m.ky = wrap_angle(0.5 * (lo + hi));
            m.band = b;
            const double hstep = harper_velocity_step;
            m.velocity = (energies(m.ky + hstep)[b] - energies(m.ky - hstep)[b]) / (2.0 * hstep);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(harper_matrix(phi0, n_x, m.ky));
            m.psi = es.eigenvectors().col(b);
            const double wl = m.psi.head(outer).squaredNorm();
            const double wr = m.psi.tail(outer).squaredNorm();
            if (wl > 0.5) {
                m.side = EdgeSide::Left;
                m.weight = wl;
            } else if (wr > 0.5) {
                m.side = EdgeSide::Right;
                m.weight = wr;
            } else {
                continue;
            }
            out.modes.push_back(std::move(m));
        }
    }
    return out;
}

// T(l_o) = -sum_m psi_m(j_out) psi_m(j_in)^* (gamma/|v_m|) Theta(l_o/v_m) e^{-(gamma/2) l_o/v_m} e^{i ky_m l_o}
inline std::vector<cplx> analytic_gap_transmission(const EdgeModeSet& set, double gamma,
                                                   const std::vector<int>& l_o_range, int j_out, int j_in,
                                                   std::optional<EdgeSide> side = std::nullopt) {
    std::vector<cplx> out(l_o_range.size(), cplx{});
    for (const auto& m : set.modes) {
        if (side && m.side != *side) continue;
        if (std::abs(m.velocity) < 1e-12) throw NumericalError("analytic_gap_transmission: zero group velocity");
        const double amp = m.psi[j_out] * m.psi[j_in] * gamma / std::abs(m.velocity);
        for (std::size_t i = 0; i < l_o_range.size(); ++i) {
            const double x = l_o_range[i] / m.velocity;
            if (x < 0.0) continue;
            out[i] -= amp * std::exp(-0.5 * gamma * x) * std::exp(I * (m.ky * l_o_range[i]));
        }
    }
    return out;
}

}  // namespace oamsim
