// lattice.hpp - lattice geometry, (j, l, s) indexing and neighbor structure
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oamsim {

enum class Boundary { Open, Periodic };

struct SiteIndex {
    int j = 0;  // cavity
    int l = 0;  // OAM number
    int s = 0;  // polarization

    friend bool operator==(const SiteIndex&, const SiteIndex&) = default;
};

enum class Direction { PlusX, MinusX, PlusY, MinusY };

struct Neighbor {
    Direction dir;
    SiteIndex site;
};

class LatticeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct LatticeSpec {
    int n_x = 10;
    int l_min = -50;
    int l_max = 50;
    int spin_dim = 1;
    Boundary bc_x = Boundary::Open;
    Boundary bc_y = Boundary::Open;

    [[nodiscard]] int window() const { return l_max - l_min + 1; }
    [[nodiscard]] std::size_t dim() const {
        return static_cast<std::size_t>(n_x) * static_cast<std::size_t>(window()) *
               static_cast<std::size_t>(spin_dim);
    }
    // size of one cavity block (all l and s)
    [[nodiscard]] int block() const { return window() * spin_dim; }

    void validate() const {
        if (n_x < 1) throw LatticeError("n_x must be >= 1");
        if (l_min > l_max) throw LatticeError("l_min must not exceed l_max");
        if (spin_dim != 1 && spin_dim != 2) throw LatticeError("spin_dim must be 1 or 2");
    }

    [[nodiscard]] bool contains(const SiteIndex& s) const {
        return s.j >= 0 && s.j < n_x && s.l >= l_min && s.l <= l_max && s.s >= 0 && s.s < spin_dim;
    }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

inline std::size_t flat_index(const LatticeSpec& spec, const SiteIndex& site) {
    if (!spec.contains(site)) {
        throw LatticeError("site (" + std::to_string(site.j) + "," + std::to_string(site.l) + "," +
                           std::to_string(site.s) + ") outside lattice");
    }
    const auto w = static_cast<std::size_t>(spec.window());
    return (static_cast<std::size_t>(site.j) * w + static_cast<std::size_t>(site.l - spec.l_min)) *
               static_cast<std::size_t>(spec.spin_dim) +
           static_cast<std::size_t>(site.s);
}

inline SiteIndex site_at(const LatticeSpec& spec, std::size_t idx) {
    if (idx >= spec.dim()) throw LatticeError("flat index out of range");
    const auto sd = static_cast<std::size_t>(spec.spin_dim);
    const auto w = static_cast<std::size_t>(spec.window());
    SiteIndex out;
    out.s = static_cast<int>(idx % sd);
    idx /= sd;
    out.l = static_cast<int>(idx % w) + spec.l_min;
    out.j = static_cast<int>(idx / w);
    return out;
}

// All sites in flat-index order.
inline std::vector<SiteIndex> all_sites(const LatticeSpec& spec) {
    std::vector<SiteIndex> out;
    out.reserve(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) out.push_back(site_at(spec, i));
    return out;
}

inline std::vector<Neighbor> neighbors(const LatticeSpec& spec, const SiteIndex& site) {
    std::vector<Neighbor> out;
    const int w = spec.window();
    auto step_x = [&](int dj, Direction d) {
        int j = site.j + dj;
        if (j < 0 || j >= spec.n_x) {
            if (spec.bc_x == Boundary::Open) return;
            j = (j + spec.n_x) % spec.n_x;
        }
        out.push_back({d, {j, site.l, site.s}});
    };
    auto step_y = [&](int dl, Direction d) {
        int l = site.l + dl;
        if (l < spec.l_min || l > spec.l_max) {
            if (spec.bc_y == Boundary::Open) return;
            l = spec.l_min + ((l - spec.l_min) % w + w) % w;
        }
        out.push_back({d, {site.j, l, site.s}});
    };
    step_x(+1, Direction::PlusX);
    step_x(-1, Direction::MinusX);
    step_y(+1, Direction::PlusY);
    step_y(-1, Direction::MinusY);
    return out;
}

// Distance (in sites) from the nearest lattice boundary along open directions.
inline int boundary_distance(const LatticeSpec& spec, const SiteIndex& s) {
    int d = 1 << 30;
    if (spec.bc_x == Boundary::Open) d = std::min({d, s.j, spec.n_x - 1 - s.j});
    if (spec.bc_y == Boundary::Open) d = std::min({d, s.l - spec.l_min, spec.l_max - s.l});
    return d;
}

}  // namespace oamsim
