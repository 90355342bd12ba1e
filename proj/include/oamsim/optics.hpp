// optics.hpp - transfer-matrix model of the coupled-cavity network and the kappa(r) bridge
#pragma once

#include "oamsim/linalg.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oamsim {

struct OpticalParams {
    double r_mag = 0.1;   // |r|, beam-splitter reflection magnitude
    double k_wave = 0.0;  // reference wave number, resonant with omega_0
    double S_c = 1.0;     // main-cavity round trip
    double S_a = 1.0;     // coupling-cavity round trip
    double phi_x = 0.0;   // arm phase imbalance, cycles
    double phi_y = 0.0;
    double Omega0 = 0.0;  // free spectral range of the main cavity, 2 pi c / S_c

    [[nodiscard]] double t_mag() const { return std::sqrt(1.0 - r_mag * r_mag); }
    // Speed of light implied by Omega0 and S_c.
    [[nodiscard]] double c_light() const { return Omega0 * S_c / two_pi; }

    void validate() const {
        if (!(r_mag > 0.0 && r_mag < 1.0)) throw std::invalid_argument("r_mag must lie in (0, 1)");
        if (!(S_c > 0.0 && S_a > 0.0)) throw std::invalid_argument("path lengths must be positive");
        if (!(Omega0 > 0.0)) throw std::invalid_argument("Omega0 must be positive");
    }

    // c = 1, k_0 = 2 pi n / S_c, S_a = (2m + 1) pi / k_0 (destructive coupling-cavity length).
    // n must be even for the plain cosine band: odd n shifts both Bloch phases by pi.
    static OpticalParams resonant(double r_mag, int n, int m, double S_c = 1.0, double phi_x = 0.0,
                                  double phi_y = 0.0) {
        OpticalParams p;
        p.r_mag = r_mag;
        p.S_c = S_c;
        p.k_wave = two_pi * n / S_c;
        p.S_a = (2 * m + 1) * std::numbers::pi / p.k_wave;
        p.phi_x = phi_x;
        p.phi_y = phi_y;
        p.Omega0 = two_pi / S_c;
        return p;
    }
};

struct RayMatrix {
    double A = 1.0, B = 0.0, C = 0.0, D = 1.0;

    void validate() const {
        if (std::abs(A * D - B * C - 1.0) > 1e-12) throw std::invalid_argument("RayMatrix: determinant must be 1");
    }
};

inline Eigen::Matrix2cd bs_transfer_matrix(double r_mag) {
    if (!(r_mag > 0.0 && r_mag < 1.0)) throw std::invalid_argument("bs_transfer_matrix: r_mag must lie in (0, 1)");
    const double t = std::sqrt(1.0 - r_mag * r_mag);
    Eigen::Matrix2cd m;
    m << 1.0 / (-I * r_mag), t / (I * r_mag), t / (-I * r_mag), 1.0 / (I * r_mag);
    return m;
}

// P M_BS Q M_BS P with P = diag(e^{-ik S_c/8}, e^{ik S_c/8}),
// Q = diag(e^{-i(k S_a/2 + 2 pi phi)}, e^{i(k S_a/2 - 2 pi phi)}).
inline Eigen::Matrix2cd field_transfer(const OpticalParams& p, double k, double phi) {
    const Eigen::Matrix2cd bs = bs_transfer_matrix(p.r_mag);
    const Eigen::Matrix2cd pp = Eigen::Vector2cd(std::exp(-I * (k * p.S_c / 8.0)), std::exp(I * (k * p.S_c / 8.0)))
                                    .asDiagonal();
    const Eigen::Matrix2cd qq = Eigen::Vector2cd(std::exp(-I * (k * p.S_a / 2.0 + two_pi * phi)),
                                                 std::exp(I * (k * p.S_a / 2.0 - two_pi * phi)))
                                    .asDiagonal();
    return pp * bs * qq * bs * pp;
}

inline Eigen::Matrix2cd field_transfer_x(const OpticalParams& p) { return field_transfer(p, p.k_wave, p.phi_x); }
inline Eigen::Matrix2cd field_transfer_y(const OpticalParams& p) { return field_transfer(p, p.k_wave, p.phi_y); }

// Bloch-mode conditions for the amplitudes (a, b, c, d) of one unit cell.
inline Eigen::Matrix4cd bloch_mode_system(const OpticalParams& p, double k, double Kx, double Ky) {
    const Eigen::Matrix2cd mx = field_transfer(p, k, p.phi_x);
    const Eigen::Matrix2cd my = field_transfer(p, k, p.phi_y);
    const cplx ex = std::exp(I * Kx), ey = std::exp(I * Ky);
    Eigen::Matrix4cd a;
    a << 1.0, -ex * mx(0, 0), -ex * mx(0, 1), 0.0,
        0.0, -ex * mx(1, 0), -ex * mx(1, 1), 1.0,
        -ey * my(0, 0), -ey * my(0, 1), 0.0, 1.0,
        -ey * my(1, 0), -ey * my(1, 1), 1.0, 0.0;
    return a;
}

// det / (i e^{i(Kx' + Ky')}) with K' = K - 2 pi phi; real for the lossless network.
inline double bloch_condition(const OpticalParams& p, double k, double Kx, double Ky) {
    const cplx ph = I * std::exp(I * (Kx - two_pi * p.phi_x + Ky - two_pi * p.phi_y));
    return (bloch_mode_system(p, k, Kx, Ky).determinant() / ph).real();
}

inline double coupling_strength(const OpticalParams& p) { return p.Omega0 * p.r_mag * p.r_mag / (4.0 * std::numbers::pi); }

// Detuning omega - omega_0 of the Bloch mode nearest omega_0 at (Kx, Ky).
inline double bloch_dispersion(const OpticalParams& p, double Kx, double Ky) {
    p.validate();
    const double c = p.c_light();
    const double kap_k = coupling_strength(p) / c;  // kappa in wave-number units
    const double half = 6.0 * kap_k;
    const int n = 241;
    auto f = [&](double k) { return bloch_condition(p, k, Kx, Ky); };
    double best = 0.0;
    bool found = false;
    double k_prev = p.k_wave - half, f_prev = f(k_prev);
    for (int i = 1; i < n; ++i) {
        const double k = p.k_wave - half + 2.0 * half * i / (n - 1);
        const double fk = f(k);
        if (f_prev == 0.0 || (f_prev < 0.0) != (fk < 0.0)) {
            double root = k_prev;
            if (f_prev != 0.0) {
                boost::uintmax_t it = 200;
                const auto r = boost::math::tools::toms748_solve(
                    f, k_prev, k, f_prev, fk,
                    [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a)); }, it);
                root = 0.5 * (r.first + r.second);
            }
            if (!found || std::abs(root - p.k_wave) < std::abs(best - p.k_wave)) best = root;
            found = true;
        }
        k_prev = k;
        f_prev = fk;
    }
    if (!found) throw NumericalError("bloch_dispersion: no root near omega_0");
    return (best - p.k_wave) * c;
}

inline double tight_binding_dispersion(const OpticalParams& p, double Kx, double Ky) {
    return -2.0 * coupling_strength(p) * (std::cos(Kx - two_pi * p.phi_x) + std::cos(Ky - two_pi * p.phi_y));
}

struct DispersionCheck {
    double max_relative_error = 0.0;  // max |numeric - tight binding| / (4 kappa)
    double kappa = 0.0;
    double kappa_fit = 0.0;           // least-squares amplitude of the cosine law
};

inline DispersionCheck dispersion_check(const OpticalParams& p, int grid = 16) {
    const double kap = coupling_strength(p);
    DispersionCheck out{0.0, kap, 0.0};
    double num = 0.0, den = 0.0;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double Kx = -std::numbers::pi + two_pi * a / grid;
            const double Ky = -std::numbers::pi + two_pi * b / grid;
            const double d = bloch_dispersion(p, Kx, Ky);
            const double shape = -2.0 * (std::cos(Kx - two_pi * p.phi_x) + std::cos(Ky - two_pi * p.phi_y));
            out.max_relative_error = std::max(out.max_relative_error, std::abs(d - kap * shape) / (4.0 * kap));
            num += d * shape;
            den += shape * shape;
        }
    out.kappa_fit = num / den;
    return out;
}

// k L0 - (2p + |l| + 1) arccos((A + D)/2), reduced to [0, 2 pi).
inline double degenerate_mode_detuning(int p_idx, int l, double L0, double k_wave, const RayMatrix& ray) {
    ray.validate();
    const double half_trace = 0.5 * (ray.A + ray.D);
    if (std::abs(half_trace) > 1.0 + 1e-15) throw std::invalid_argument("unstable cavity: |(A+D)/2| > 1");
    const double g = std::acos(std::clamp(half_trace, -1.0, 1.0));
    double r = std::fmod(k_wave * L0 - (2.0 * p_idx + std::abs(l) + 1.0) * g, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

}  // namespace oamsim
