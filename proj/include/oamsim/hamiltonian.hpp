// hamiltonian.hpp - gauge-field lattice Hamiltonians in units of the hopping kappa
#pragma once

#include "oamsim/lattice.hpp"
#include "oamsim/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oamsim {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Reduced fraction p/q, flux quanta per plaquette.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(long long p, long long q) : p_(p), q_(q) {
        if (q_ == 0) throw std::invalid_argument("Rational: zero denominator");
        if (q_ < 0) {
            p_ = -p_;
            q_ = -q_;
        }
        const long long g = std::gcd(p_ < 0 ? -p_ : p_, q_);
        if (g > 1) {
            p_ /= g;
            q_ /= g;
        }
    }
    [[nodiscard]] constexpr long long p() const { return p_; }
    [[nodiscard]] constexpr long long q() const { return q_; }
    [[nodiscard]] double value() const { return static_cast<double>(p_) / static_cast<double>(q_); }
    friend bool operator==(const Rational&, const Rational&) = default;

  private:
    long long p_ = 0;
    long long q_ = 1;
};

// Unit 3-vector for the sigma.n coupling.
class SpinAxis {
  public:
    SpinAxis(double x, double y, double z) : n_(x, y, z) {
        if (std::abs(n_.norm() - 1.0) > 1e-12) throw std::invalid_argument("SpinAxis: axis not unit norm");
    }
    static SpinAxis x() { return {1, 0, 0}; }
    static SpinAxis y() { return {0, 1, 0}; }
    static SpinAxis z() { return {0, 0, 1}; }
    [[nodiscard]] const Eigen::Vector3d& vec() const { return n_; }

  private:
    Eigen::Vector3d n_;
};

namespace pauli {
inline Eigen::Matrix2cd x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
inline Eigen::Matrix2cd y() { return (Eigen::Matrix2cd() << 0, -I, I, 0).finished(); }
inline Eigen::Matrix2cd z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }
}  // namespace pauli

// exp(i 2 pi phi sigma.n)
inline Eigen::Matrix2cd jones_exp(double phi, const SpinAxis& axis) {
    const auto& n = axis.vec();
    const Eigen::Matrix2cd sn = n.x() * pauli::x() + n.y() * pauli::y() + n.z() * pauli::z();
    return std::cos(two_pi * phi) * Eigen::Matrix2cd::Identity() + I * std::sin(two_pi * phi) * sn;
}

struct GaugeConfig {
    double phi_x = 0.0;
    std::vector<double> phi_y_per_cavity;  // empty: phi_j = j * phi0
    Rational phi0{0, 1};
    double alpha = 0.0;
    std::vector<double> beta_per_cavity;    // empty: zero
    SpinAxis axis1 = SpinAxis::x();
    SpinAxis axis2 = SpinAxis::z();
    std::vector<double> lambda_per_cavity;  // empty: zero

    [[nodiscard]] double phi_y(int j) const {
        return phi_y_per_cavity.empty() ? j * phi0.value() : phi_y_per_cavity.at(static_cast<std::size_t>(j));
    }
    [[nodiscard]] double beta(int j) const {
        return beta_per_cavity.empty() ? 0.0 : beta_per_cavity.at(static_cast<std::size_t>(j));
    }
    [[nodiscard]] double lambda(int j) const {
        return lambda_per_cavity.empty() ? 0.0 : lambda_per_cavity.at(static_cast<std::size_t>(j));
    }
};

struct HamiltonianMatrix {
    LatticeSpec spec;
    SparseMatrix entries;  // entries(target, source), units of kappa

    [[nodiscard]] Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries); }
    [[nodiscard]] std::size_t dim() const { return spec.dim(); }
};

inline double hermiticity_error(const HamiltonianMatrix& h) {
    const SparseMatrix d = h.entries - SparseMatrix(h.entries.adjoint());
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

// Hop generators: coefficient of a^dag_{target} a_{source} for (j,l)->(j+1,l) and (j,l)->(j,l+1).
using HopFn = std::function<Eigen::Matrix2cd(int j, int l)>;
using OnsiteFn = std::function<Eigen::Matrix2cd(int j, int l)>;

inline HamiltonianMatrix build_from_hops(const LatticeSpec& spec, const HopFn& x_hop, const HopFn& y_hop,
                                         const OnsiteFn& onsite = {}) {
    spec.validate();
    const int sd = spec.spin_dim;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(spec.dim() * static_cast<std::size_t>(5 * sd));

    auto add_block = [&](const SiteIndex& tgt, const SiteIndex& src, const Eigen::Matrix2cd& m) {
        for (int a = 0; a < sd; ++a)
            for (int b = 0; b < sd; ++b) {
                const cplx v = m(a, b);
                if (v == cplx{}) continue;
                const auto t = static_cast<int>(flat_index(spec, {tgt.j, tgt.l, a}));
                const auto s = static_cast<int>(flat_index(spec, {src.j, src.l, b}));
                trip.emplace_back(t, s, v);
                trip.emplace_back(s, t, std::conj(v));
            }
    };

    for (int j = 0; j < spec.n_x; ++j) {
        for (int l = spec.l_min; l <= spec.l_max; ++l) {
            if (j + 1 < spec.n_x || spec.bc_x == Boundary::Periodic) {
                add_block({(j + 1) % spec.n_x, l, 0}, {j, l, 0}, x_hop(j, l));
            }
            if (l < spec.l_max || spec.bc_y == Boundary::Periodic) {
                const int lt = l < spec.l_max ? l + 1 : spec.l_min;
                add_block({j, lt, 0}, {j, l, 0}, y_hop(j, l));
            }
            if (onsite) {
                const Eigen::Matrix2cd m = onsite(j, l);
                for (int a = 0; a < sd; ++a)
                    for (int b = 0; b < sd; ++b)
                        if (m(a, b) != cplx{})
                            trip.emplace_back(static_cast<int>(flat_index(spec, {j, l, a})),
                                              static_cast<int>(flat_index(spec, {j, l, b})), m(a, b));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(spec.dim());
    HamiltonianMatrix h{spec, SparseMatrix(n, n)};
    h.entries.setFromTriplets(trip.begin(), trip.end());
    h.entries.prune(cplx{});
    h.entries.makeCompressed();
    return h;
}

namespace detail {
inline Eigen::Matrix2cd scalar(cplx v) { return v * Eigen::Matrix2cd::Identity(); }

inline void require_spin(const LatticeSpec& spec, int sd, const char* who) {
    if (spec.spin_dim != sd)
        throw std::invalid_argument(std::string(who) + ": requires spin_dim = " + std::to_string(sd));
}
}  // namespace detail

// H = -sum (e^{i 2 pi j phi0} a+_{j,l+1} a_{j,l} + a+_{j+1,l} a_{j,l} + h.c.)
inline HamiltonianMatrix build_landau_hofstadter(const LatticeSpec& spec, Rational phi0) {
    detail::require_spin(spec, 1, "build_landau_hofstadter");
    const double f = phi0.value();
    return build_from_hops(
        spec, [](int, int) { return detail::scalar(-1.0); },
        [f](int j, int) { return detail::scalar(-std::exp(I * (two_pi * j * f))); });
}

// H = -sum (a+_{j,l+1} a_{j,l} + e^{-i 2 pi l phi0} a+_{j+1,l} a_{j,l} + h.c.)
inline HamiltonianMatrix build_oam_gauge_hofstadter(const LatticeSpec& spec, Rational phi0) {
    detail::require_spin(spec, 1, "build_oam_gauge_hofstadter");
    const double f = phi0.value();
    return build_from_hops(
        spec, [f](int, int l) { return detail::scalar(-std::exp(-I * (two_pi * l * f))); },
        [](int, int) { return detail::scalar(-1.0); });
}

// Spinful hops: x carries e^{i2pi(phi_x + alpha sigma.n1)}, y in cavity j carries
// e^{i2pi(phi_j + beta_j sigma.n2)}; lambda_j on site.
inline HamiltonianMatrix build_non_abelian(const LatticeSpec& spec, const GaugeConfig& cfg) {
    detail::require_spin(spec, 2, "build_non_abelian");
    const Eigen::Matrix2cd ux = -std::exp(I * (two_pi * cfg.phi_x)) * jones_exp(cfg.alpha, cfg.axis1);
    return build_from_hops(
        spec, [ux](int, int) { return ux; },
        [&cfg](int j, int) -> Eigen::Matrix2cd {
            return -std::exp(I * (two_pi * cfg.phi_y(j))) * jones_exp(cfg.beta(j), cfg.axis2);
        },
        [&cfg](int j, int) { return detail::scalar(cfg.lambda(j)); });
}

inline HamiltonianMatrix build_dirac(const LatticeSpec& spec, Rational phi0) {
    GaugeConfig cfg;
    cfg.phi0 = phi0;
    cfg.alpha = 0.25;
    cfg.axis1 = SpinAxis::y();
    cfg.beta_per_cavity.assign(static_cast<std::size_t>(spec.n_x), 0.25);
    cfg.axis2 = SpinAxis::x();
    return build_non_abelian(spec, cfg);
}

inline double qsh_lambda(int j, double lambda0) { return lambda0 * (((j % 4) + 4) % 4 - 1.5); }

inline GaugeConfig qsh_gauge(int n_x, double beta0, double lambda0) {
    GaugeConfig cfg;
    cfg.phi_y_per_cavity.assign(static_cast<std::size_t>(n_x), 0.0);
    cfg.alpha = 0.25;
    cfg.axis1 = SpinAxis::x();
    cfg.axis2 = SpinAxis::z();
    for (int j = 0; j < n_x; ++j) {
        cfg.beta_per_cavity.push_back(j / 4.0 + beta0);
        cfg.lambda_per_cavity.push_back(qsh_lambda(j, lambda0));
    }
    return cfg;
}

inline HamiltonianMatrix build_qsh(const LatticeSpec& spec, double beta0, double lambda0) {
    return build_non_abelian(spec, qsh_gauge(spec.n_x, beta0, lambda0));
}

inline HamiltonianMatrix apply_onsite_disorder(const HamiltonianMatrix& h, const std::vector<double>& deltas) {
    if (deltas.size() != static_cast<std::size_t>(h.spec.n_x))
        throw std::invalid_argument("apply_onsite_disorder: one shift per cavity required");
    HamiltonianMatrix out = h;
    const auto n = static_cast<Eigen::Index>(h.dim());
    SparseMatrix d(n, n);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = deltas[static_cast<std::size_t>(site_at(h.spec, static_cast<std::size_t>(i)).j)];
        if (v != 0.0) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), v);
    }
    d.setFromTriplets(trip.begin(), trip.end());
    out.entries = h.entries + d;
    out.entries.makeCompressed();
    return out;
}

}  // namespace oamsim
