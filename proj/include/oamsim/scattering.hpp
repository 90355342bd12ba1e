// scattering.hpp - input-output Green's function, transmission amplitudes, S-matrix rows, spectra
#pragma once

#include "oamsim/hamiltonian.hpp"
#include "oamsim/parallel.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include <optional>
#include <string>
#include <vector>

namespace oamsim {

class DecaySpec {
  public:
    static DecaySpec uniform(double gamma) {
        if (!(gamma > 0.0)) throw std::invalid_argument("loss must be positive");
        DecaySpec d;
        d.uniform_ = gamma;
        return d;
    }
    static DecaySpec per_mode(std::vector<double> gammas) {
        for (double g : gammas)
            if (!(g > 0.0)) throw std::invalid_argument("loss must be positive");
        DecaySpec d;
        d.per_mode_ = std::move(gammas);
        return d;
    }
    [[nodiscard]] bool is_uniform() const { return per_mode_.empty(); }
    [[nodiscard]] double uniform_gamma() const {
        if (!is_uniform()) throw std::logic_error("DecaySpec: not uniform");
        return uniform_;
    }
    [[nodiscard]] double gamma(std::size_t i) const { return is_uniform() ? uniform_ : per_mode_.at(i); }
    [[nodiscard]] const std::vector<double>& rates() const { return per_mode_; }
    void check_dim(std::size_t n) const {
        if (!is_uniform() && per_mode_.size() != n)
            throw std::invalid_argument("DecaySpec: per-mode rate count does not match dimension");
    }
    [[nodiscard]] Eigen::VectorXd as_vector(std::size_t n) const {
        check_dim(n);
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = gamma(i);
        return v;
    }

  private:
    DecaySpec() = default;
    double uniform_ = 0.0;
    std::vector<double> per_mode_;
};

struct ScatteringResult {
    double omega = 0.0;
    SiteIndex input;
    Eigen::VectorXcd amplitudes;           // T over all modes
    bool includes_reflection_delta = false;
};

enum class SolverKind { Auto, Spectral, BlockTridiagonal, DenseLU, Iterative };

inline std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Auto: return "auto";
        case SolverKind::Spectral: return "spectral";
        case SolverKind::BlockTridiagonal: return "block-tridiagonal";
        case SolverKind::DenseLU: return "dense-lu";
        case SolverKind::Iterative: return "bicgstab";
    }
    return "?";
}

inline constexpr double residual_tolerance = 1e-10;
inline constexpr std::size_t direct_dim_limit = 6000;

namespace detail {
// True when only same or adjacent cavities are coupled (no x wrap beyond n_x = 2).
inline bool is_block_tridiagonal(const HamiltonianMatrix& h) {
    const int b = h.spec.block();
    for (int k = 0; k < h.entries.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(h.entries, k); it; ++it)
            if (std::abs(static_cast<int>(it.row()) / b - static_cast<int>(it.col()) / b) > 1) return false;
    return true;
}
}  // namespace detail

// Solves (omega - H + i Gamma/2) X = B for one or many right-hand sides. Keeps a reference to H.
class GreensSolver {
  public:
    GreensSolver(HamiltonianMatrix&&, DecaySpec, SolverKind = SolverKind::Auto, std::size_t = 1) = delete;
    GreensSolver(const HamiltonianMatrix& h, DecaySpec decay, SolverKind kind = SolverKind::Auto,
                 std::size_t omega_count = 1)
        : h_(&h), decay_(std::move(decay)), half_gamma_(decay_.as_vector(h.dim()) * 0.5) {
        kind_ = kind == SolverKind::Auto ? choose(omega_count) : kind;
        if (kind_ == SolverKind::Spectral) {
            if (!decay_.is_uniform()) throw std::invalid_argument("spectral solver requires uniform loss");
            eig_ = eigh(h.dense());
        } else if (kind_ == SolverKind::BlockTridiagonal) {
            if (!detail::is_block_tridiagonal(h))
                throw std::invalid_argument("block-tridiagonal solver requires open x boundaries");
            extract_blocks();
        }
    }

    [[nodiscard]] SolverKind kind() const { return kind_; }
    [[nodiscard]] const HamiltonianMatrix& hamiltonian() const { return *h_; }
    [[nodiscard]] const DecaySpec& decay() const { return decay_; }
    // Only valid for the spectral route.
    [[nodiscard]] const EigenDecomposition& eigen() const { return eig_.value(); }

    [[nodiscard]] Eigen::MatrixXcd solve(double omega, const Eigen::MatrixXcd& rhs) const {
        Eigen::MatrixXcd x;
        switch (kind_) {
            case SolverKind::Spectral: x = solve_spectral(omega, rhs); break;
            case SolverKind::BlockTridiagonal: x = solve_blocks(omega, rhs); break;
            case SolverKind::DenseLU: x = solve_dense(omega, rhs); break;
            default: x = solve_iterative(omega, rhs); break;
        }
        check_residual(omega, rhs, x);
        return x;
    }

    [[nodiscard]] double residual(double omega, const Eigen::MatrixXcd& rhs, const Eigen::MatrixXcd& x) const {
        const Eigen::MatrixXcd r = apply_shifted(omega, x) - rhs;
        double worst = 0.0;
        for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
            const double bn = rhs.col(c).norm();
            worst = std::max(worst, bn > 0 ? r.col(c).norm() / bn : r.col(c).norm());
        }
        return worst;
    }

  private:
    // Block elimination costs ~1/200 of a full eigendecomposition per frequency on desk-scale
    // lattices; dense LU ~1/20.
    SolverKind choose(std::size_t omega_count) const {
        const bool blocks = detail::is_block_tridiagonal(*h_) && h_->spec.n_x > 1;
        if (h_->dim() > direct_dim_limit) {
            return blocks && h_->spec.block() <= 2000 ? SolverKind::BlockTridiagonal : SolverKind::Iterative;
        }
        if (blocks) return decay_.is_uniform() && omega_count >= 200 ? SolverKind::Spectral : SolverKind::BlockTridiagonal;
        return decay_.is_uniform() && omega_count >= 20 ? SolverKind::Spectral : SolverKind::DenseLU;
    }

    [[nodiscard]] Eigen::MatrixXcd apply_shifted(double omega, const Eigen::MatrixXcd& x) const {
        Eigen::MatrixXcd y = -(h_->entries * x);
        for (Eigen::Index i = 0; i < x.rows(); ++i) y.row(i) += cplx(omega, half_gamma_[i]) * x.row(i);
        return y;
    }

    void check_residual(double omega, const Eigen::MatrixXcd& rhs, const Eigen::MatrixXcd& x) const {
        const double r = residual(omega, rhs, x);
        if (!(r < residual_tolerance))
            throw NumericalError("greens solve (" + to_string(kind_) + ") residual " + std::to_string(r) +
                                 " exceeds tolerance at omega=" + std::to_string(omega));
    }

    [[nodiscard]] Eigen::MatrixXcd solve_spectral(double omega, const Eigen::MatrixXcd& rhs) const {
        const auto& e = *eig_;
        const cplx shift(omega, 0.5 * decay_.uniform_gamma());
        Eigen::MatrixXcd c = e.vectors.adjoint() * rhs;
        for (Eigen::Index m = 0; m < c.rows(); ++m) c.row(m) /= (shift - e.values[m]);
        return e.vectors * c;
    }

    [[nodiscard]] Eigen::SparseMatrix<cplx> shifted_sparse(double omega) const {
        const auto n = static_cast<Eigen::Index>(h_->dim());
        Eigen::SparseMatrix<cplx> a = -h_->entries;
        Eigen::SparseMatrix<cplx> d(n, n);
        std::vector<Eigen::Triplet<cplx>> t;
        t.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            t.emplace_back(static_cast<int>(i), static_cast<int>(i), cplx(omega, half_gamma_[i]));
        d.setFromTriplets(t.begin(), t.end());
        a += d;
        a.makeCompressed();
        return a;
    }

    [[nodiscard]] Eigen::MatrixXcd solve_dense(double omega, const Eigen::MatrixXcd& rhs) const {
        Eigen::MatrixXcd a = -h_->dense();
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, i) += cplx(omega, half_gamma_[i]);
        return Eigen::PartialPivLU<Eigen::MatrixXcd>(a).solve(rhs);
    }

    [[nodiscard]] Eigen::MatrixXcd solve_iterative(double omega, const Eigen::MatrixXcd& rhs) const {
        const Eigen::SparseMatrix<cplx> a = shifted_sparse(omega);
        Eigen::BiCGSTAB<Eigen::SparseMatrix<cplx>, Eigen::DiagonalPreconditioner<cplx>> solver;
        solver.setTolerance(residual_tolerance * 1e-2);
        solver.setMaxIterations(static_cast<Eigen::Index>(20 * h_->dim()));
        solver.compute(a);
        Eigen::MatrixXcd x(rhs.rows(), rhs.cols());
        for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
            x.col(c) = solver.solve(Eigen::VectorXcd(rhs.col(c)));
            if (solver.info() != Eigen::Success)
                throw NumericalError("BiCGSTAB did not converge, estimated residual " +
                                     std::to_string(solver.error()));
        }
        return x;
    }

    void extract_blocks() {
        const int nb = h_->spec.n_x;
        const int w = h_->spec.block();
        const Eigen::MatrixXcd d = h_->dense();
        diag_.resize(static_cast<std::size_t>(nb));
        up_.resize(static_cast<std::size_t>(std::max(0, nb - 1)));
        low_.resize(up_.size());
        for (int j = 0; j < nb; ++j) {
            diag_[static_cast<std::size_t>(j)] = d.block(j * w, j * w, w, w);
            if (j + 1 < nb) {
                up_[static_cast<std::size_t>(j)] = d.block(j * w, (j + 1) * w, w, w);
                low_[static_cast<std::size_t>(j)] = d.block((j + 1) * w, j * w, w, w);
            }
        }
    }

    // Block Thomas elimination on A_j = omega - H_jj + i Gamma_j / 2, B_j = -H_{j,j+1}, C_j = -H_{j+1,j}.
    [[nodiscard]] Eigen::MatrixXcd solve_blocks(double omega, const Eigen::MatrixXcd& rhs) const {
        const int nb = h_->spec.n_x;
        const int w = h_->spec.block();
        std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu(static_cast<std::size_t>(nb));
        std::vector<Eigen::MatrixXcd> y(static_cast<std::size_t>(nb));
        for (int j = 0; j < nb; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            Eigen::MatrixXcd a = -diag_[uj];
            for (int i = 0; i < w; ++i) a(i, i) += cplx(omega, half_gamma_[j * w + i]);
            y[uj] = rhs.middleRows(j * w, w);
            if (j > 0) {
                const auto& prev = lu[uj - 1];
                // C_{j-1} = -low, B_{j-1} = -up: A_j - C D^{-1} B = A_j - low D^{-1} up
                a.noalias() -= low_[uj - 1] * prev.solve(up_[uj - 1]);
                y[uj].noalias() += low_[uj - 1] * prev.solve(y[uj - 1]);
            }
            lu[uj].compute(a);
        }
        Eigen::MatrixXcd x(rhs.rows(), rhs.cols());
        Eigen::MatrixXcd next;
        for (int j = nb - 1; j >= 0; --j) {
            const auto uj = static_cast<std::size_t>(j);
            Eigen::MatrixXcd r = y[uj];
            if (j + 1 < nb) r.noalias() += up_[uj] * next;
            next = lu[uj].solve(r);
            x.middleRows(j * w, w) = next;
        }
        return x;
    }

    const HamiltonianMatrix* h_;
    DecaySpec decay_;
    Eigen::VectorXd half_gamma_;
    SolverKind kind_ = SolverKind::DenseLU;
    std::optional<EigenDecomposition> eig_;
    std::vector<Eigen::MatrixXcd> diag_, up_, low_;
};

inline Eigen::MatrixXcd unit_columns(const LatticeSpec& spec, const std::vector<SiteIndex>& inputs) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(spec.dim()),
                                                static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t c = 0; c < inputs.size(); ++c)
        e(static_cast<Eigen::Index>(flat_index(spec, inputs[c])), static_cast<Eigen::Index>(c)) = 1.0;
    return e;
}

inline Eigen::VectorXcd greens_apply(const HamiltonianMatrix& h, const DecaySpec& decay, double omega,
                                     const SiteIndex& input, SolverKind kind = SolverKind::Auto) {
    GreensSolver solver(h, decay, kind);
    return solver.solve(omega, unit_columns(h.spec, {input})).col(0);
}

// T columns for several inputs from one solver: T = -i sqrt(Gamma) G sqrt(gamma_in).
inline Eigen::MatrixXcd transmission_columns(const GreensSolver& solver, double omega,
                                             const std::vector<SiteIndex>& inputs) {
    const auto& spec = solver.hamiltonian().spec;
    Eigen::MatrixXcd x = solver.solve(omega, unit_columns(spec, inputs));
    const auto& d = solver.decay();
    for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) *= std::sqrt(d.gamma(static_cast<std::size_t>(i)));
    for (std::size_t c = 0; c < inputs.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) *= -I * std::sqrt(d.gamma(flat_index(spec, inputs[c])));
    return x;
}

inline ScatteringResult transmission(const HamiltonianMatrix& h, const DecaySpec& decay, double omega,
                                     const SiteIndex& input, SolverKind kind = SolverKind::Auto) {
    GreensSolver solver(h, decay, kind);
    return {omega, input, transmission_columns(solver, omega, {input}).col(0), false};
}

inline Eigen::VectorXcd s_matrix_row(const HamiltonianMatrix& h, const DecaySpec& decay, double omega,
                                     const SiteIndex& input, SolverKind kind = SolverKind::Auto) {
    ScatteringResult r = transmission(h, decay, omega, input, kind);
    r.amplitudes[static_cast<Eigen::Index>(flat_index(h.spec, input))] += 1.0;
    return r.amplitudes;
}

inline std::vector<double> default_omega_grid(std::size_t n = 400, double lo = -4.5, double hi = 4.5) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

// Every cavity at OAM l (clamped into the window), all polarizations.
inline std::vector<SiteIndex> column_inputs(const LatticeSpec& spec, int l = 0) {
    const int lc = std::clamp(l, spec.l_min, spec.l_max);
    std::vector<SiteIndex> v;
    for (int j = 0; j < spec.n_x; ++j)
        for (int s = 0; s < spec.spin_dim; ++s) v.push_back({j, lc, s});
    return v;
}

// Sum over inputs and all outputs of |T|^2, from an eigendecomposition with uniform gamma.
// Each eigenvalue contributes a Lorentzian gamma^2 w_m / ((omega - E_m)^2 + gamma^2/4).
struct LorentzianSum {
    Eigen::VectorXd energies;
    Eigen::VectorXd weights;
    double gamma = 0.0;

    [[nodiscard]] double operator()(double omega) const {
        const double g2 = gamma * gamma;
        double s = 0.0;
        for (Eigen::Index m = 0; m < energies.size(); ++m) {
            const double d = omega - energies[m];
            s += weights[m] / (d * d + 0.25 * g2);
        }
        return g2 * s;
    }
};

inline LorentzianSum lorentzian_sum(const EigenDecomposition& e, const LatticeSpec& spec,
                                    const std::vector<SiteIndex>& inputs, double gamma) {
    LorentzianSum out{e.values, Eigen::VectorXd::Zero(e.values.size()), gamma};
    for (const auto& s : inputs)
        out.weights += e.vectors.row(static_cast<Eigen::Index>(flat_index(spec, s))).cwiseAbs2().transpose();
    return out;
}

inline std::vector<double> total_transmission_spectrum(const HamiltonianMatrix& h, const DecaySpec& decay,
                                                       const std::vector<SiteIndex>& inputs,
                                                       const std::vector<double>& omega_grid,
                                                       SolverKind kind = SolverKind::Auto) {
    if (omega_grid.empty()) throw std::invalid_argument("omega grid must be nonempty");
    GreensSolver solver(h, decay, kind, omega_grid.size());
    std::vector<double> out(omega_grid.size());
    if (solver.kind() == SolverKind::Spectral) {
        const auto ls = lorentzian_sum(solver.eigen(), h.spec, inputs, decay.uniform_gamma());
        for (std::size_t i = 0; i < omega_grid.size(); ++i) out[i] = ls(omega_grid[i]);
        return out;
    }
    parallel_for(omega_grid.size(), [&](std::size_t i) {
        out[i] = transmission_columns(solver, omega_grid[i], inputs).squaredNorm();
    });
    return out;
}

// Rows: flux values; columns: omega grid. Inputs default to every cavity at l = 0.
inline Eigen::MatrixXd butterfly_scan(const LatticeSpec& spec, const std::vector<Rational>& phi0_list,
                                      const std::vector<double>& omega_grid, const DecaySpec& decay,
                                      std::optional<std::vector<SiteIndex>> inputs = std::nullopt) {
    const auto in = inputs.value_or(column_inputs(spec, 0));
    Eigen::MatrixXd out(static_cast<Eigen::Index>(phi0_list.size()), static_cast<Eigen::Index>(omega_grid.size()));
    parallel_for(phi0_list.size(), [&](std::size_t r) {
        const auto h = build_landau_hofstadter(spec, phi0_list[r]);
        const auto row = total_transmission_spectrum(h, decay, in, omega_grid);
        for (std::size_t c = 0; c < row.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    });
    return out;
}

// Flux values p/q in [0, 1] with q <= qmax, ascending.
inline std::vector<Rational> farey_fluxes(int qmax) {
    std::vector<Rational> v;
    for (int q = 1; q <= qmax; ++q)
        for (int p = 0; p <= q; ++p)
            if (std::gcd(p, q) == 1) v.emplace_back(p, q);
    std::sort(v.begin(), v.end(), [](const Rational& a, const Rational& b) { return a.p() * b.q() < b.p() * a.q(); });
    return v;
}

}  // namespace oamsim
