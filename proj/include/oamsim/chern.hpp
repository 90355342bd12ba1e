// chern.hpp - magnetic Bloch bands, lattice Chern numbers, B1/B2 phase-mismatch windings
#pragma once

#include "oamsim/hamiltonian.hpp"
#include "oamsim/parallel.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace oamsim {

// Bloch reduction of the OAM-gauge Hofstadter model on the 1 x q magnetic cell.
inline Eigen::MatrixXcd magnetic_bloch_hamiltonian(Rational phi0, double kx, double ky) {
    const auto q = static_cast<Eigen::Index>(phi0.q());
    const double f = phi0.value();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
    for (Eigen::Index m = 0; m < q; ++m) h(m, m) = -2.0 * std::cos(kx + two_pi * static_cast<double>(m) * f);
    if (q == 1) {
        h(0, 0) += -2.0 * std::cos(ky);
        return h;
    }
    for (Eigen::Index m = 0; m + 1 < q; ++m) h(m + 1, m) = h(m, m + 1) = -1.0;
    const double qk = static_cast<double>(q) * ky;
    h(0, q - 1) += -std::exp(-I * qk);
    h(q - 1, 0) += -std::exp(I * qk);
    return h;
}

struct MagneticBZGrid {
    Rational phi0;
    int nkx = 64;
    int nky = 64;

    [[nodiscard]] int q() const { return static_cast<int>(phi0.q()); }
    [[nodiscard]] double kx(int i) const { return -std::numbers::pi + two_pi * i / nkx; }
    [[nodiscard]] double ky(int j) const { return two_pi * j / (static_cast<double>(q()) * nky); }
    [[nodiscard]] std::size_t points() const { return static_cast<std::size_t>(nkx) * static_cast<std::size_t>(nky); }
    [[nodiscard]] std::size_t at(int i, int j) const {
        const int ii = ((i % nkx) + nkx) % nkx;
        const int jj = ((j % nky) + nky) % nky;
        return static_cast<std::size_t>(ii) * static_cast<std::size_t>(nky) + static_cast<std::size_t>(jj);
    }
    void validate() const {
        if (nkx < 2 || nky < 2) throw std::invalid_argument("MagneticBZGrid: need at least 2 points per axis");
    }
};

struct BlochBandData {
    MagneticBZGrid grid;
    std::vector<Eigen::VectorXd> energies;  // per k, ascending
    std::vector<Eigen::MatrixXcd> vectors;  // per k, column m = band m, rows l_q

    [[nodiscard]] int bands() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().cols()); }
    [[nodiscard]] int components() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().rows()); }
    [[nodiscard]] Eigen::VectorXcd u(int m, int i, int j) const { return vectors[grid.at(i, j)].col(m); }
    [[nodiscard]] double energy(int m, int i, int j) const { return energies[grid.at(i, j)][m]; }
};

inline BlochBandData band_structure(const MagneticBZGrid& grid) {
    grid.validate();
    BlochBandData d{grid, std::vector<Eigen::VectorXd>(grid.points()), std::vector<Eigen::MatrixXcd>(grid.points())};
    parallel_for(grid.points(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / static_cast<std::size_t>(grid.nky));
        const int j = static_cast<int>(idx % static_cast<std::size_t>(grid.nky));
        auto e = eigh(magnetic_bloch_hamiltonian(grid.phi0, grid.kx(i), grid.ky(j)));
        d.energies[idx] = std::move(e.values);
        d.vectors[idx] = std::move(e.vectors);
    });
    return d;
}

struct BandRange {
    double lo = 0.0;
    double hi = 0.0;
};

inline std::vector<BandRange> band_ranges(const BlochBandData& d) {
    std::vector<BandRange> r(static_cast<std::size_t>(d.bands()), {1e300, -1e300});
    for (const auto& e : d.energies)
        for (int m = 0; m < d.bands(); ++m) {
            r[static_cast<std::size_t>(m)].lo = std::min(r[static_cast<std::size_t>(m)].lo, e[m]);
            r[static_cast<std::size_t>(m)].hi = std::max(r[static_cast<std::size_t>(m)].hi, e[m]);
        }
    return r;
}

struct BulkGap {
    double lo = 0.0;   // top of the band below
    double hi = 0.0;   // bottom of the band above
    int bands_below = 0;
    [[nodiscard]] double center() const { return 0.5 * (lo + hi); }
    [[nodiscard]] double width() const { return hi - lo; }
};

inline std::vector<BulkGap> bulk_gaps(const BlochBandData& d, double min_width = 1e-3) {
    const auto r = band_ranges(d);
    std::vector<BulkGap> g;
    double top = -1e300;
    for (std::size_t m = 0; m + 1 < r.size(); ++m) {
        top = std::max(top, r[m].hi);
        if (r[m + 1].lo - top > min_width) g.push_back({top, r[m + 1].lo, static_cast<int>(m) + 1});
    }
    return g;
}

class ChernError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

inline constexpr double default_admissibility = 0.75 * std::numbers::pi;

namespace detail {
// Normalized link between band subspaces [first, first+count): det of the overlap matrix.
inline cplx link(const BlochBandData& d, int first, int count, std::size_t a, std::size_t b) {
    const Eigen::MatrixXcd ov = d.vectors[a].middleCols(first, count).adjoint() * d.vectors[b].middleCols(first, count);
    const cplx v = count == 1 ? ov(0, 0) : ov.determinant();
    const double n = std::abs(v);
    if (n < 1e-14) throw ChernError("grid too coarse: vanishing overlap between neighboring k-points");
    return v / n;
}

// Berry phase through plaquette (i,j)-(i+1,j+1), counterclockwise in (kx, ky).
inline double plaquette(const BlochBandData& d, int first, int count, int i, int j) {
    const auto& g = d.grid;
    const auto k00 = g.at(i, j), k10 = g.at(i + 1, j), k11 = g.at(i + 1, j + 1), k01 = g.at(i, j + 1);
    const cplx w = link(d, first, count, k00, k10) * link(d, first, count, k10, k11) *
                   link(d, first, count, k11, k01) * link(d, first, count, k01, k00);
    return std::arg(w);
}
}  // namespace detail

// Sum of Chern numbers of bands [first, first+count) via plaquette Wilson loops.
inline int fukui_hatsugai_chern_bands(const BlochBandData& d, int first, int count,
                                      double admissibility = default_admissibility) {
    if (first < 0 || count < 1 || first + count > d.bands()) throw std::invalid_argument("band range out of bounds");
    const auto& g = d.grid;
    double total = 0.0;
    for (int i = 0; i < g.nkx; ++i)
        for (int j = 0; j < g.nky; ++j) {
            const double f = detail::plaquette(d, first, count, i, j);
            if (std::abs(f) >= admissibility) throw ChernError("grid too coarse: plaquette Berry phase near pi");
            total += f;
        }
    return static_cast<int>(std::lround(total / two_pi));
}

inline int fukui_hatsugai_chern(const BlochBandData& d, int m, double admissibility = default_admissibility) {
    return fukui_hatsugai_chern_bands(d, m, 1, admissibility);
}

// Groups of bands that touch (minimum direct gap below tol), with the Chern number of each group.
struct BandGroup {
    int first = 0;
    int count = 1;
    int chern = 0;
};

inline std::vector<BandGroup> grouped_chern_numbers(const BlochBandData& d, double touch_tol = 1e-2) {
    std::vector<BandGroup> out;
    int first = 0;
    for (int m = 0; m < d.bands(); ++m) {
        bool touches_next = false;
        if (m + 1 < d.bands()) {
            double gap = 1e300;
            for (const auto& e : d.energies) gap = std::min(gap, e[m + 1] - e[m]);
            touches_next = gap < touch_tol;
        }
        if (!touches_next) {
            out.push_back({first, m - first + 1, fukui_hatsugai_chern_bands(d, first, m - first + 1)});
            first = m + 1;
        }
    }
    return out;
}

// ---- B1 / B2 phase-mismatch method ----

// Closed rectangle of grid points (cyclic ranges). A range covering the whole axis is a
// cylinder around the torus in that direction.
struct B2Region {
    int kx_start = 0;
    int kx_count = 1;
    int ky_start = 0;
    int ky_count = 1;
    int l_star = 0;  // component made real and positive inside this region
};

// B2 is a union of disjoint closed rectangles; B1 is the complement (sharing the boundaries).
struct BZPartition {
    std::vector<B2Region> b2;

    // B1 = {kx in [lo, hi]} over all ky, so B2 is the complementary slab.
    static BZPartition kx_slab(const MagneticBZGrid& g, double lo, double hi, int l_star) {
        const double eps = 1e-9;
        int first = -1, count = 0;
        for (int i = 0; i < g.nkx; ++i) {
            if (g.kx(i) >= lo - eps && g.kx(i) <= hi + eps) {
                if (first < 0) first = i;
                ++count;
            }
        }
        if (count < 2 || count > g.nkx - 1) throw std::invalid_argument("kx_slab: slab must leave a nonempty B2");
        const int last = first + count - 1;
        return {{B2Region{last % g.nkx, g.nkx - count + 2, 0, g.nky, l_star}}};
    }
};

namespace detail {
inline int offset(int i, int start, int n) { return ((i - start) % n + n) % n; }

inline bool covers_x(const B2Region& r, const MagneticBZGrid& g) { return r.kx_count >= g.nkx; }
inline bool covers_y(const B2Region& r, const MagneticBZGrid& g) { return r.ky_count >= g.nky; }

inline bool point_in(const B2Region& r, const MagneticBZGrid& g, int i, int j) {
    return (covers_x(r, g) || offset(i, r.kx_start, g.nkx) < r.kx_count) &&
           (covers_y(r, g) || offset(j, r.ky_start, g.nky) < r.ky_count);
}

// Plaquette with lower-left corner (i, j).
inline bool plaquette_in(const B2Region& r, const MagneticBZGrid& g, int i, int j) {
    const bool x = covers_x(r, g) || offset(i, r.kx_start, g.nkx) < r.kx_count - 1;
    const bool y = covers_y(r, g) || offset(j, r.ky_start, g.nky) < r.ky_count - 1;
    return x && y;
}

inline double chi(const BlochBandData& d, int m, int l_star, int i, int j) {
    const Eigen::VectorXcd u = d.u(m, i, j);
    return std::arg(u[l_star] * std::conj(u[0]));
}

// Counterclockwise boundary of a region as a closed list of grid points (one or two loops).
inline std::vector<std::vector<std::pair<int, int>>> region_loops(const B2Region& r, const MagneticBZGrid& g) {
    std::vector<std::vector<std::pair<int, int>>> loops;
    const int x0 = r.kx_start, x1 = r.kx_start + r.kx_count - 1;
    const int y0 = r.ky_start, y1 = r.ky_start + r.ky_count - 1;
    if (covers_x(r, g) && covers_y(r, g)) return loops;
    if (covers_y(r, g)) {
        std::vector<std::pair<int, int>> up, down;
        for (int j = 0; j <= g.nky; ++j) up.emplace_back(x1, j);
        for (int j = g.nky; j >= 0; --j) down.emplace_back(x0, j);
        loops.push_back(up);
        loops.push_back(down);
        return loops;
    }
    if (covers_x(r, g)) {
        std::vector<std::pair<int, int>> left, right;
        for (int i = g.nkx; i >= 0; --i) left.emplace_back(i, y1);
        for (int i = 0; i <= g.nkx; ++i) right.emplace_back(i, y0);
        loops.push_back(right);
        loops.push_back(left);
        return loops;
    }
    std::vector<std::pair<int, int>> loop;
    for (int i = x0; i < x1; ++i) loop.emplace_back(i, y0);
    for (int j = y0; j < y1; ++j) loop.emplace_back(x1, j);
    for (int i = x1; i > x0; --i) loop.emplace_back(i, y1);
    for (int j = y1; j > y0; --j) loop.emplace_back(x0, j);
    loop.emplace_back(x0, y0);
    loops.push_back(loop);
    return loops;
}

// Signed count of zeros of component `comp` inside plaquette (i,j): gauge-invariant comparison of the
// Wilson loop with the links in the gauge where that component is real and positive.
inline int component_vortex(const BlochBandData& d, int m, int comp, int i, int j) {
    const auto& g = d.grid;
    const std::size_t k[4] = {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)};
    Eigen::VectorXcd v[4];
    for (int c = 0; c < 4; ++c) {
        v[c] = d.vectors[k[c]].col(m);
        const cplx a = v[c][comp];
        if (std::abs(a) == 0.0) return 0;
        v[c] *= std::conj(a) / std::abs(a);
    }
    double sum = 0.0;
    cplx w = 1.0;
    for (int c = 0; c < 4; ++c) {
        const cplx o = v[c].dot(v[(c + 1) % 4]);
        sum += std::arg(o);
        w *= o;
    }
    return static_cast<int>(std::lround((sum - std::arg(w)) / two_pi));
}

inline bool in_any_plaquette(const BZPartition& p, const MagneticBZGrid& g, int i, int j) {
    return std::any_of(p.b2.begin(), p.b2.end(), [&](const B2Region& r) { return plaquette_in(r, g, i, j); });
}

inline bool in_any_interior(const BZPartition& p, const MagneticBZGrid& g, int i, int j) {
    // A point is interior to B2 when all four plaquettes around it belong to one region.
    return std::any_of(p.b2.begin(), p.b2.end(), [&](const B2Region& r) {
        return plaquette_in(r, g, i, j) && plaquette_in(r, g, i - 1, j) && plaquette_in(r, g, i, j - 1) &&
               plaquette_in(r, g, i - 1, j - 1);
    });
}
}  // namespace detail

inline constexpr double default_zero_tolerance = 1e-3;

// Throws ChernError when the partition does not isolate the zeros of u_0 inside B2.
inline void check_partition(const BlochBandData& d, int m, const BZPartition& p,
                            double zero_tol = default_zero_tolerance) {
    const auto& g = d.grid;
    for (std::size_t a = 0; a < p.b2.size(); ++a)
        for (std::size_t b = a + 1; b < p.b2.size(); ++b)
            for (int i = 0; i < g.nkx; ++i)
                for (int j = 0; j < g.nky; ++j)
                    if (detail::plaquette_in(p.b2[a], g, i, j) && detail::plaquette_in(p.b2[b], g, i, j))
                        throw ChernError("partition invalid: B2 regions overlap");
    for (int i = 0; i < g.nkx; ++i)
        for (int j = 0; j < g.nky; ++j) {
            if (!detail::in_any_interior(p, g, i, j) && std::abs(d.u(m, i, j)[0]) <= zero_tol)
                throw ChernError("partition invalid: u_0 vanishes in B1; re-partition");
            if (!detail::in_any_plaquette(p, g, i, j) && detail::component_vortex(d, m, 0, i, j) != 0)
                throw ChernError("partition invalid: zero of u_0 between grid points in B1; re-partition");
        }
    for (const auto& r : p.b2) {
        if (r.l_star < 1 || r.l_star >= d.components())
            throw std::invalid_argument("partition: l_star out of range");
        for (int i = 0; i < g.nkx; ++i)
            for (int j = 0; j < g.nky; ++j) {
                if (detail::point_in(r, g, i, j) && std::abs(d.u(m, i, j)[r.l_star]) <= zero_tol)
                    throw ChernError("partition invalid: reference component vanishes in B2; re-partition");
                if (detail::plaquette_in(r, g, i, j) && detail::component_vortex(d, m, r.l_star, i, j) != 0)
                    throw ChernError("partition invalid: reference component has a zero in B2; re-partition");
            }
    }
}

// C = (1/2pi) closed integral of grad chi around the boundary of B1 (counterclockwise), i.e. minus the
// counterclockwise windings around every B2 region, with chi = arg(u_{l*}) - arg(u_0).
inline int phase_mismatch_chern(const BlochBandData& d, int m, const BZPartition& p,
                                double zero_tol = default_zero_tolerance) {
    check_partition(d, m, p, zero_tol);
    double total = 0.0;
    for (const auto& r : p.b2)
        for (const auto& loop : detail::region_loops(r, d.grid))
            for (std::size_t s = 0; s + 1 < loop.size(); ++s)
                total -= wrap_angle(detail::chi(d, m, r.l_star, loop[s + 1].first, loop[s + 1].second) -
                                    detail::chi(d, m, r.l_star, loop[s].first, loop[s].second));
    return static_cast<int>(std::lround(total / two_pi));
}

namespace detail {
// Merges seed rectangles into disjoint bounding rectangles, then picks for each the component whose
// smallest magnitude over it is largest.
inline BZPartition merge_regions(const BlochBandData& d, int m, std::vector<B2Region> regions, double zero_tol) {
    const auto& g = d.grid;
    // Merge overlapping rectangles into bounding rectangles until disjoint.
    auto overlap = [&](const B2Region& a, const B2Region& b) {
        for (int i = 0; i < g.nkx; ++i)
            for (int j = 0; j < g.nky; ++j)
                if (detail::point_in(a, g, i, j) && detail::point_in(b, g, i, j)) return true;
        return false;
    };
    auto merge = [&](const B2Region& a, const B2Region& b) {
        auto span = [](int s1, int c1, int s2, int c2, int n) {
            if (c1 >= n || c2 >= n) return std::pair{0, n};
            // smallest cyclic interval containing both
            std::vector<bool> on(static_cast<std::size_t>(n), false);
            for (int k = 0; k < c1; ++k) on[static_cast<std::size_t>(((s1 + k) % n + n) % n)] = true;
            for (int k = 0; k < c2; ++k) on[static_cast<std::size_t>(((s2 + k) % n + n) % n)] = true;
            int best_gap = 0, gap_end = 0, run = 0;
            for (int k = 0; k < 2 * n; ++k) {
                if (!on[static_cast<std::size_t>(k % n)]) {
                    if (++run > best_gap && run <= n) {
                        best_gap = run;
                        gap_end = k;
                    }
                } else {
                    run = 0;
                }
            }
            if (best_gap == 0) return std::pair{0, n};
            return std::pair{(gap_end + 1) % n, n - best_gap};
        };
        const auto [xs, xc] = span(a.kx_start, a.kx_count, b.kx_start, b.kx_count, g.nkx);
        const auto [ys, yc] = span(a.ky_start, a.ky_count, b.ky_start, b.ky_count, g.nky);
        return B2Region{xs, xc, ys, yc, 0};
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < regions.size() && !changed; ++a)
            for (std::size_t b = a + 1; b < regions.size() && !changed; ++b)
                if (overlap(regions[a], regions[b])) {
                    regions[a] = merge(regions[a], regions[b]);
                    regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(b));
                    changed = true;
                }
    }
    BZPartition p;
    for (auto r : regions) {
        if (detail::covers_x(r, g) && detail::covers_y(r, g))
            throw ChernError("partition: zeros of u_0 dense across the zone; supply a partition");
        r.kx_start = ((r.kx_start % g.nkx) + g.nkx) % g.nkx;
        r.ky_start = ((r.ky_start % g.nky) + g.nky) % g.nky;
        double best = -1.0;
        for (int c = 1; c < d.components(); ++c) {
            double v = 1e300;
            for (int i = 0; i < g.nkx; ++i)
                for (int j = 0; j < g.nky; ++j)
                    if (detail::point_in(r, g, i, j)) {
                        const Eigen::VectorXcd u = d.u(m, i, j);
                        v = std::min(v, std::abs(u[c]) / u.norm());
                    }
            if (v > best) {
                best = v;
                r.l_star = c;
            }
        }
        if (best <= zero_tol) throw ChernError("partition: no component stays nonzero over a B2 region");
        p.b2.push_back(r);
    }
    return p;
}
}  // namespace detail

// Rectangles around clusters of u_0 zeros (grid near-zeros and between-point vortices), one grid
// cell of margin, each with the component that stays largest over it.
inline BZPartition auto_partition(const BlochBandData& d, int m, double zero_tol = default_zero_tolerance) {
    const auto& g = d.grid;
    std::vector<B2Region> regions;
    for (int i = 0; i < g.nkx; ++i)
        for (int j = 0; j < g.nky; ++j) {
            if (std::abs(d.u(m, i, j)[0]) < zero_tol) regions.push_back({i - 2, 5, j - 2, 5, 0});
            if (detail::component_vortex(d, m, 0, i, j) != 0) regions.push_back({i - 1, 4, j - 1, 4, 0});
        }
    return detail::merge_regions(d, m, std::move(regions), zero_tol);
}

// ---- Bloch states from torus transmission data ----

// amplitudes: T from input (0,0) to every site of a scalar torus in the OAM gauge.
namespace detail {
// Unnormalized T(kx, ky, l_q) after the narrow-band checks.
inline BlochBandData transmission_fourier(const Eigen::VectorXcd& amplitudes, const LatticeSpec& spec, Rational phi0,
                                          double omega, double gamma) {
    const int q = static_cast<int>(phi0.q());
    if (spec.spin_dim != 1 || spec.bc_x != Boundary::Periodic || spec.bc_y != Boundary::Periodic)
        throw std::invalid_argument("bloch_from_transmission: scalar torus required");
    if (spec.window() % q != 0) throw std::invalid_argument("bloch_from_transmission: window not multiple of q");
    if (spec.n_x % 2 != 0) throw std::invalid_argument("bloch_from_transmission: n_x must be even");
    if (static_cast<std::size_t>(amplitudes.size()) != spec.dim())
        throw std::invalid_argument("bloch_from_transmission: amplitude count does not match lattice");

    // The drive must sit on one narrow band, wider loss than bandwidth and narrower than the gaps.
    const auto ranges = band_ranges(band_structure({phi0, 32, 32}));
    int band = -1;
    for (std::size_t m = 0; m < ranges.size(); ++m)
        if (omega >= ranges[m].lo - gamma && omega <= ranges[m].hi + gamma) {
            if (band >= 0) throw NumericalError("bloch_from_transmission: band not isolated at omega");
            band = static_cast<int>(m);
        }
    if (band < 0) throw NumericalError("bloch_from_transmission: omega not on a band");
    const auto& r = ranges[static_cast<std::size_t>(band)];
    const double below = band > 0 ? r.lo - ranges[static_cast<std::size_t>(band) - 1].hi : 1e300;
    const double above =
        band + 1 < static_cast<int>(ranges.size()) ? ranges[static_cast<std::size_t>(band) + 1].lo - r.hi : 1e300;
    if (!(r.hi - r.lo < gamma) || !(gamma < std::min(below, above)))
        throw NumericalError("bloch_from_transmission: band not isolated at omega");

    MagneticBZGrid grid{phi0, spec.n_x, spec.window() / q};
    BlochBandData d{grid, std::vector<Eigen::VectorXd>(grid.points()), std::vector<Eigen::MatrixXcd>(grid.points())};
    parallel_for(grid.points(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / static_cast<std::size_t>(grid.nky));
        const int jy = static_cast<int>(idx % static_cast<std::size_t>(grid.nky));
        const double kx = grid.kx(i), ky = grid.ky(jy);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(q);
        for (std::size_t n = 0; n < spec.dim(); ++n) {
            const auto s = site_at(spec, n);
            const int lq = ((s.l % q) + q) % q;
            v[lq] += amplitudes[static_cast<Eigen::Index>(n)] * std::exp(-I * (kx * s.j + ky * (s.l - lq)));
        }
        if (v.norm() == 0.0) throw NumericalError("bloch_from_transmission: vanishing Fourier amplitude");
        d.vectors[idx] = v;
        d.energies[idx] = Eigen::VectorXd::Constant(1, omega);
    });
    return d;
}
}  // namespace detail

// Per-k unit vectors proportional to u^m u^m*_0. The cell phase e^{-i ky l_q} is left out so that
// the vectors are periodic over the grid, matching magnetic_bloch_hamiltonian.
inline BlochBandData bloch_from_transmission(const Eigen::VectorXcd& amplitudes, const LatticeSpec& spec,
                                             Rational phi0, double omega, double gamma) {
    auto d = detail::transmission_fourier(amplitudes, spec, phi0, omega, gamma);
    for (auto& v : d.vectors) v /= v.norm();
    return d;
}

struct TransmissionChern {
    int chern = 0;
    BZPartition partition;
};

// B2 surrounds the k-points where |T(k, 0)| falls below `frac` of its maximum, i.e. the zeros of u_0
// blurred by the loss. C is the winding of chi = arg T(k, l*) - arg T(k, 0) around the boundary of B1.
// The section T(k, .) never vanishes at finite loss, so only the boundary of B1 carries the band.
inline TransmissionChern transmission_chern(const Eigen::VectorXcd& amplitudes, const LatticeSpec& spec,
                                            Rational phi0, double omega, double gamma, double frac = 0.1) {
    if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("transmission_chern: frac must lie in (0, 1)");
    const auto d = detail::transmission_fourier(amplitudes, spec, phi0, omega, gamma);
    const auto& g = d.grid;
    double peak = 0.0;
    for (const auto& v : d.vectors) peak = std::max(peak, std::abs(v(0, 0)));
    std::vector<B2Region> seeds;
    for (int i = 0; i < g.nkx; ++i)
        for (int j = 0; j < g.nky; ++j)
            if (std::abs(d.u(0, i, j)[0]) < frac * peak) seeds.push_back({i - 1, 3, j - 1, 3, 0});
    TransmissionChern out;
    out.partition = detail::merge_regions(d, 0, std::move(seeds), 0.0);
    double total = 0.0;
    for (const auto& r : out.partition.b2)
        for (const auto& loop : detail::region_loops(r, g)) {
            for (const auto& [i, j] : loop)
                if (std::abs(d.u(0, i, j)[r.l_star]) < frac * peak * default_zero_tolerance)
                    throw ChernError("transmission_chern: reference component vanishes on the boundary of B1");
            for (std::size_t s = 0; s + 1 < loop.size(); ++s)
                total -= wrap_angle(detail::chi(d, 0, r.l_star, loop[s + 1].first, loop[s + 1].second) -
                                    detail::chi(d, 0, r.l_star, loop[s].first, loop[s].second));
        }
    out.chern = static_cast<int>(std::lround(total / two_pi));
    return out;
}

}  // namespace oamsim
