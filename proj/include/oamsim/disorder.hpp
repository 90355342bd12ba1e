// disorder.hpp - Gaussian disorder models and Monte Carlo displacement statistics
#pragma once

#include "oamsim/edge.hpp"

#include <cstdint>
#include <random>

namespace oamsim {

// F(x) = 1 - exp(-(x/width)^2)
struct OamEnvelope {
    double width = 30.0;
    [[nodiscard]] double operator()(double x) const { return 1.0 - std::exp(-(x / width) * (x / width)); }
};

enum class DisorderScope { PerCavityLink, PerOAMLink, PerSite };

struct DisorderModel {
    double sigma_detuning = 0.0;        // kappa
    double sigma_coupling_mag = 0.0;    // relative
    double sigma_coupling_phase = 0.0;  // radians
    double sigma_loss = 0.0;            // relative
    std::optional<OamEnvelope> envelope;
    DisorderScope scope = DisorderScope::PerCavityLink;

    void validate() const {
        if (sigma_detuning < 0 || sigma_coupling_mag < 0 || sigma_coupling_phase < 0 || sigma_loss < 0)
            throw std::invalid_argument("DisorderModel: sigmas must be non-negative");
        if (envelope && !(envelope->width > 0)) throw std::invalid_argument("DisorderModel: envelope width must be positive");
    }
};

// Counter-seeded mt19937_64 per (seed, trial, stream); Box-Muller normals so draws do not
// depend on the standard library's distribution implementation.
class TrialRng {
  public:
    enum Stream : std::uint32_t { Detuning = 1, Coupling = 2, Loss = 3 };

    TrialRng(std::uint64_t seed, std::uint64_t trial, Stream stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                          static_cast<std::uint32_t>(stream)};
        eng_.seed(seq);
    }

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {
struct LinkKey {
    bool x_link;
    int j;  // lower cavity of the link (x) or the cavity (y)
    int l;  // the OAM (x) or lower OAM of the link (y)
};

// Classify a stored off-diagonal entry as a directed hop along its canonical link; `forward` when
// the source is the lower end.
inline std::optional<std::pair<LinkKey, bool>> classify(const LatticeSpec& spec, const SiteIndex& t, const SiteIndex& s) {
    if (t.l == s.l && t.j != s.j) {
        const bool wrap = std::abs(t.j - s.j) > 1;
        const int lo = wrap ? std::max(t.j, s.j) : std::min(t.j, s.j);
        return std::pair{LinkKey{true, lo, t.l}, s.j == lo};
    }
    if (t.j == s.j && t.l != s.l) {
        const bool wrap = std::abs(t.l - s.l) > 1;
        const int lo = wrap ? std::max(t.l, s.l) : std::min(t.l, s.l);
        (void)spec;
        return std::pair{LinkKey{false, t.j, lo}, s.l == lo};
    }
    return std::nullopt;
}
}  // namespace detail

// Perturbs every hop once (conjugated on the reverse direction) and adds detunings.
inline HamiltonianMatrix sample_disordered_hamiltonian(const HamiltonianMatrix& base, const DisorderModel& model,
                                                       std::uint64_t seed, std::uint64_t trial = 0) {
    model.validate();
    const auto& spec = base.spec;
    const int w = spec.window();
    auto env = [&](double x) { return model.envelope ? (*model.envelope)(x) : 1.0; };

    // Detuning: per cavity, or per (j, l) for PerSite.
    std::vector<double> detune;
    {
        TrialRng rng(seed, trial, TrialRng::Detuning);
        const std::size_t n = model.scope == DisorderScope::PerSite ? static_cast<std::size_t>(spec.n_x * w)
                                                                    : static_cast<std::size_t>(spec.n_x);
        for (std::size_t i = 0; i < n; ++i) detune.push_back(model.sigma_detuning * rng.normal());
    }
    // Link factors (1 + a) e^{i b}, drawn in a fixed order over all potential links.
    std::vector<cplx> xf(static_cast<std::size_t>(spec.n_x * w), 1.0), yf(static_cast<std::size_t>(spec.n_x * w), 1.0);
    {
        TrialRng rng(seed, trial, TrialRng::Coupling);
        auto factor = [&](double scale) {
            const double a = model.sigma_coupling_mag * rng.normal();
            const double b = model.sigma_coupling_phase * rng.normal();
            return (1.0 + a * scale) * std::exp(I * (b * scale));
        };
        switch (model.scope) {
            case DisorderScope::PerCavityLink:
                for (int j = 0; j < spec.n_x; ++j) {
                    const cplx f = factor(1.0);
                    for (int l = 0; l < w; ++l) xf[static_cast<std::size_t>(j * w + l)] = f;
                }
                break;
            case DisorderScope::PerOAMLink:
                for (int l = 0; l < w; ++l) {
                    const cplx f = factor(env(spec.l_min + l + 0.5));
                    for (int j = 0; j < spec.n_x; ++j) yf[static_cast<std::size_t>(j * w + l)] = f;
                }
                break;
            case DisorderScope::PerSite:
                for (int j = 0; j < spec.n_x; ++j)
                    for (int l = 0; l < w; ++l) {
                        yf[static_cast<std::size_t>(j * w + l)] = factor(env(spec.l_min + l + 0.5));
                        xf[static_cast<std::size_t>(j * w + l)] = factor(env(spec.l_min + l));
                    }
                break;
        }
    }
    HamiltonianMatrix out = base;
    for (int k = 0; k < out.entries.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(out.entries, k); it; ++it) {
            const auto t = site_at(spec, static_cast<std::size_t>(it.row()));
            const auto s = site_at(spec, static_cast<std::size_t>(it.col()));
            if (it.row() == it.col() || (t.j == s.j && t.l == s.l)) continue;
            const auto link = detail::classify(spec, t, s);
            if (!link) continue;
            const auto& [key, forward] = *link;
            const auto idx = static_cast<std::size_t>(key.j * w + (key.l - spec.l_min));
            const cplx f = key.x_link ? xf[idx] : yf[idx];
            it.valueRef() *= forward ? f : std::conj(f);
        }
    std::vector<Eigen::Triplet<cplx>> diag;
    for (std::size_t i = 0; i < spec.dim(); ++i) {
        const auto s = site_at(spec, i);
        const double v = model.scope == DisorderScope::PerSite
                             ? detune[static_cast<std::size_t>(s.j * w + (s.l - spec.l_min))]
                             : detune[static_cast<std::size_t>(s.j)];
        if (v != 0.0) diag.emplace_back(static_cast<int>(i), static_cast<int>(i), v);
    }
    SparseMatrix d(out.entries.rows(), out.entries.cols());
    d.setFromTriplets(diag.begin(), diag.end());
    out.entries += d;
    out.entries.makeCompressed();
    return out;
}

// gamma_n = gamma (1 + eps F(l)), resampling any draw that would make a rate non-positive.
inline DecaySpec loss_perturbed_decay(double gamma, const LatticeSpec& spec, const DisorderModel& model,
                                      std::uint64_t seed, std::uint64_t trial = 0) {
    model.validate();
    if (model.sigma_loss == 0.0) return DecaySpec::uniform(gamma);
    const int w = spec.window();
    const bool oam = model.scope != DisorderScope::PerCavityLink;
    auto env = [&](double x) { return oam && model.envelope ? (*model.envelope)(x) : 1.0; };
    TrialRng rng(seed, trial, TrialRng::Loss);
    auto draw = [&](double scale) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double g = gamma * (1.0 + model.sigma_loss * rng.normal() * scale);
            if (g > 0.0) return g;
        }
        throw NumericalError("loss_perturbed_decay: cannot keep rates positive");
    };
    std::vector<double> per_j, per_l, per_site;
    switch (model.scope) {
        case DisorderScope::PerCavityLink:
            for (int j = 0; j < spec.n_x; ++j) per_j.push_back(draw(1.0));
            break;
        case DisorderScope::PerOAMLink:
            for (int l = 0; l < w; ++l) per_l.push_back(draw(env(spec.l_min + l)));
            break;
        case DisorderScope::PerSite:
            for (int j = 0; j < spec.n_x; ++j)
                for (int l = 0; l < w; ++l) per_site.push_back(draw(env(spec.l_min + l)));
            break;
    }
    std::vector<double> rates(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) {
        const auto s = site_at(spec, i);
        const auto li = static_cast<std::size_t>(s.l - spec.l_min);
        rates[i] = !per_j.empty() ? per_j[static_cast<std::size_t>(s.j)]
                   : !per_l.empty() ? per_l[li]
                                    : per_site[static_cast<std::size_t>(s.j) * static_cast<std::size_t>(w) + li];
    }
    return DecaySpec::per_mode(std::move(rates));
}

struct MonteCarloSummary {
    std::vector<double> omega_grid;
    std::vector<double> mean;
    std::vector<double> std_dev;  // sample standard deviation
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

// Displacement relative to the input OAM, averaged over input OAM in [-l_avg, l_avg].
inline std::vector<double> relative_displacement_spectrum(const GreensSolver& solver,
                                                          const std::vector<double>& omega_grid,
                                                          const EdgeRegion& region, int l_avg = 0) {
    const auto& spec = solver.hamiltonian().spec;
    const Eigen::VectorXd lo = detail::oam_column(spec);
    std::vector<double> out(omega_grid.size(), 0.0);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        double acc = 0.0;
        for (int li = -l_avg; li <= l_avg; ++li) {
            const auto t = transmission_columns(solver, omega_grid[i], region_inputs(spec, region, li));
            const Eigen::VectorXd w = t.cwiseAbs2().rowwise().sum();
            acc += w.dot(lo) - li * w.sum();
        }
        out[i] = acc / (2 * l_avg + 1);
    }
    return out;
}

inline MonteCarloSummary displacement_robustness(const HamiltonianMatrix& base, const DisorderModel& model,
                                                 double gamma, const std::vector<double>& omega_grid,
                                                 const EdgeRegion& region, std::size_t trials, std::uint64_t seed,
                                                 int l_avg = 0) {
    if (trials < 2) throw std::invalid_argument("displacement_robustness: need at least 2 trials");
    model.validate();
    std::vector<std::vector<double>> per_trial(trials);
    parallel_for(trials, [&](std::size_t t) {
        const auto h = sample_disordered_hamiltonian(base, model, seed, t);
        const auto decay = loss_perturbed_decay(gamma, base.spec, model, seed, t);
        GreensSolver solver(h, decay, SolverKind::Auto, omega_grid.size() * static_cast<std::size_t>(2 * l_avg + 1));
        per_trial[t] = relative_displacement_spectrum(solver, omega_grid, region, l_avg);
    });
    MonteCarloSummary s{omega_grid, std::vector<double>(omega_grid.size(), 0.0),
                        std::vector<double>(omega_grid.size(), 0.0), trials, seed};
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        double m = 0.0;
        for (std::size_t t = 0; t < trials; ++t) m += per_trial[t][i];
        m /= static_cast<double>(trials);
        double v = 0.0;
        for (std::size_t t = 0; t < trials; ++t) v += (per_trial[t][i] - m) * (per_trial[t][i] - m);
        s.mean[i] = m;
        s.std_dev[i] = std::sqrt(v / static_cast<double>(trials - 1));
    }
    return s;
}

}  // namespace oamsim
