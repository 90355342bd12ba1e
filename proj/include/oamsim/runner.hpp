// runner.hpp - experiment dispatch, output emission and run manifests
#pragma once

#include "oamsim/chern.hpp"
#include "oamsim/config.hpp"
#include "oamsim/io.hpp"
#include "oamsim/qsh.hpp"

#include <chrono>
#include <filesystem>

namespace oamsim::cli {

inline constexpr const char* artifact_version = "0.1.0";

struct RunOutput {
    io::OutputSet files;
    Json results = Json::object();
    Json conventions = Json::object();
};

struct RunManifest {
    Json config;
    std::string version;
    double wall_time_s = 0.0;
    std::vector<std::pair<std::string, std::string>> digests;  // file name, sha256
    Json results;
    Json conventions;

    [[nodiscard]] Json to_json() const {
        Json files = Json::array();
        for (const auto& [n, h] : digests) files.push_back({{"file", n}, {"sha256", h}});
        return {{"config", config},   {"version", version},       {"wall_time_s", wall_time_s},
                {"outputs", files},   {"results", results},       {"conventions", conventions}};
    }
};

namespace detail {

inline std::string displacement_table(const std::vector<double>& w, const std::vector<double>& mean,
                                      const std::vector<double>& sd) {
    io::CsvTable t({"omega", "l_e_mean", "l_e_std"});
    for (std::size_t i = 0; i < w.size(); ++i) t.row({w[i], mean[i], sd[i]});
    return t.str();
}

inline void run_spectrum(const ExperimentConfig& c, RunOutput& out) {
    const auto h = build_hamiltonian(c);
    const auto grid = c.omega.grid();
    const auto spec = total_transmission_spectrum(h, DecaySpec::uniform(c.gamma), column_inputs(c.lattice, 0), grid);
    io::CsvTable t({"omega", "transmission"});
    for (std::size_t i = 0; i < grid.size(); ++i) t.row({grid[i], spec[i]});
    out.files.add("spectrum.csv", t.str());
    out.conventions["spectrum_inputs"] = "every cavity at l = 0, every polarization";
    out.conventions["same_mode_term_included"] = true;
    out.conventions["reflection_delta_excluded"] = true;
}

inline void run_butterfly(const ExperimentConfig& c, RunOutput& out) {
    const auto fluxes = c.butterfly.fluxes.empty() ? farey_fluxes(c.butterfly.q_max) : c.butterfly.fluxes;
    const auto grid = c.omega.grid();
    const auto m = butterfly_scan(c.lattice, fluxes, grid, DecaySpec::uniform(c.gamma));
    io::CsvTable t({"phi0_p", "phi0_q", "phi0", "omega", "transmission"});
    for (std::size_t r = 0; r < fluxes.size(); ++r)
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.row({static_cast<double>(fluxes[r].p()), static_cast<double>(fluxes[r].q()), fluxes[r].value(), grid[i],
                   m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i))});
    out.files.add("butterfly.csv", t.str());
    out.results["flux_count"] = fluxes.size();
    out.conventions["spectrum_inputs"] = "every cavity at l = 0";
    out.conventions["same_mode_term_included"] = true;
}

inline void run_edge_map(const ExperimentConfig& c, RunOutput& out) {
    const auto h = build_hamiltonian(c);
    const auto map = transmission_map(h, DecaySpec::uniform(c.gamma), c.edge_map.omega, c.edge_map.input);
    out.files.add("edge_map.grid", io::grid_text(map.grid(), c.lattice.l_min, 0));
    io::CsvTable t({"j", "l", "s", "intensity"});
    for (std::size_t i = 0; i < c.lattice.dim(); ++i) {
        const auto s = site_at(c.lattice, i);
        t.row({static_cast<double>(s.j), static_cast<double>(s.l), static_cast<double>(s.s),
               map.intensity[static_cast<Eigen::Index>(i)]});
    }
    out.files.add("edge_map.csv", t.str());
    out.results["total"] = map.total();
    out.results["boundary_weight_within_2"] = map.boundary_weight(2);
    out.results["oam_moment"] = map.oam_moment();
    out.conventions["grid_layout"] = "rows = OAM l from l_min, cols = cavity j from 0, summed over polarization";
}

inline void run_displacement(const ExperimentConfig& c, RunOutput& out) {
    const auto h = build_hamiltonian(c);
    const auto grid = c.omega.grid();
    if (c.disorder) {
        const auto s = displacement_robustness(h, c.disorder->model, c.gamma, grid, c.region, c.disorder->trials, c.seed,
                                               c.disorder->input_oam_average);
        out.files.add("displacement.csv", displacement_table(grid, s.mean, s.std_dev));
        out.results["trials"] = s.trials;
        out.results["seed"] = s.seed;
        out.conventions["std"] = "sample standard deviation over trials";
        out.conventions["displacement"] = "relative to input OAM, averaged over inputs in [-a, a]";
    } else {
        const auto l = displacement_spectrum(h, DecaySpec::uniform(c.gamma), grid, c.region, c.polarization);
        out.files.add("displacement.csv", displacement_table(grid, l, std::vector<double>(grid.size(), 0.0)));
        out.results["trials"] = 1;
    }
    out.conventions["region"] = {{"side", c.region.side == EdgeSide::Left ? "left" : "right"}, {"depth", c.region.depth}};
    out.conventions["inputs"] = "l = 0 in every region cavity";
}

inline void run_chern(const ExperimentConfig& c, RunOutput& out) {
    const auto d = band_structure({c.hamiltonian.phi0, c.chern.nk, c.chern.nk});
    const auto ranges = band_ranges(d);
    const auto groups = grouped_chern_numbers(d);
    // Bands that touch another band only have a group Chern number; their per-band cells stay empty.
    io::CsvTable t({"band", "e_min", "e_max", "group_first_band", "group_chern", "chern_fukui_hatsugai",
                    "chern_phase_mismatch"});
    Json bands = Json::array(), gj = Json::array();
    int sum = 0;
    for (const auto& g : groups) {
        sum += g.chern;
        gj.push_back({{"first_band", g.first + 1}, {"count", g.count}, {"chern", g.chern}});
        for (int m = g.first; m < g.first + g.count; ++m) {
            const auto& r = ranges[static_cast<std::size_t>(m)];
            std::vector<std::string> row{io::format_double(m + 1), io::format_double(r.lo), io::format_double(r.hi),
                                         io::format_double(g.first + 1), io::format_double(g.chern), "", ""};
            Json b = {{"band", m + 1}, {"group_first_band", g.first + 1}};
            if (g.count == 1) {
                const int fhs = fukui_hatsugai_chern(d, m);
                const int pm = phase_mismatch_chern(d, m, auto_partition(d, m));
                row[5] = io::format_double(fhs);
                row[6] = io::format_double(pm);
                b["fukui_hatsugai"] = fhs;
                b["phase_mismatch"] = pm;
            }
            t.row_strings(std::move(row));
            bands.push_back(std::move(b));
        }
    }
    out.files.add("chern.csv", t.str());
    out.results["bands"] = bands;
    out.results["groups"] = gj;
    out.results["sum"] = sum;
    if (c.chern.transmission_omega) {
        const LatticeSpec torus{c.chern.torus_n_x, c.chern.torus_l_min, c.chern.torus_l_max, 1, Boundary::Periodic,
                                Boundary::Periodic};
        const auto h = build_oam_gauge_hofstadter(torus, c.hamiltonian.phi0);
        const double w = *c.chern.transmission_omega, gamma = c.chern.transmission_gamma;
        const auto r = transmission(h, DecaySpec::uniform(gamma), w, {0, 0, 0});
        const auto tc = transmission_chern(r.amplitudes, torus, c.hamiltonian.phi0, w, gamma);
        Json b2 = Json::array();
        for (const auto& reg : tc.partition.b2)
            b2.push_back({{"kx_start", reg.kx_start}, {"kx_count", reg.kx_count}, {"ky_start", reg.ky_start},
                          {"ky_count", reg.ky_count}, {"l_star", reg.l_star}});
        out.results["from_transmission"] = {{"omega", w}, {"gamma", gamma}, {"chern", tc.chern}, {"b2", b2}};
    }
    out.conventions["band_numbering"] = "1-based, ascending energy";
    out.conventions["brillouin_zone"] = "kx in [-pi, pi), ky in [0, 2 pi / q)";
}

inline void run_bands(const ExperimentConfig& c, RunOutput& out) {
    const auto d = band_structure({c.hamiltonian.phi0, c.chern.nk, c.chern.nk});
    io::CsvTable t({"kx", "ky", "band", "energy"});
    for (int i = 0; i < d.grid.nkx; ++i)
        for (int j = 0; j < d.grid.nky; ++j)
            for (int m = 0; m < d.bands(); ++m)
                t.row({d.grid.kx(i), d.grid.ky(j), static_cast<double>(m + 1), d.energy(m, i, j)});
    out.files.add("bands.csv", t.str());
    Json gaps = Json::array();
    for (const auto& g : bulk_gaps(d)) gaps.push_back({{"lo", g.lo}, {"hi", g.hi}, {"bands_below", g.bands_below}});
    out.results["gaps"] = gaps;
}

inline void run_qsh(const ExperimentConfig& c, RunOutput& out) {
    const auto& q = c.qsh;
    const auto scan = qsh_gap_scan(c.lattice, q.lambda0, q.beta0_list, q.target, q.nk);
    io::CsvTable t({"beta0", "e_low", "e_high", "width"});
    for (const auto& r : scan) t.row({r.beta0, r.e_low, r.e_high, r.width});
    out.files.add("qsh_gaps.csv", t.str());
    try {
        const auto tr = transition_detector(c.lattice, q.lambda0, q.beta0_list, q.target);
        out.results["transition"] = {{"beta_c", tr.beta_c}, {"uncertainty", tr.uncertainty}};
    } catch (const NumericalError& e) {
        out.results["transition"] = {{"beta_c", nullptr}, {"reason", e.what()}};
    }
    Json maps = Json::array();
    for (std::size_t i = 0; i < q.map_beta0.size(); ++i) {
        const auto m = polarized_edge_maps(c.lattice, q.map_beta0[i], q.lambda0, DecaySpec::uniform(c.gamma), q.map_omega);
        for (int s = 0; s < 2; ++s)
            out.files.add("qsh_map_" + std::to_string(i) + "_s" + std::to_string(s) + ".grid",
                          io::grid_text(m.map[s].grid(), c.lattice.l_min, 0));
        maps.push_back({{"beta0", q.map_beta0[i]},
                        {"displacement", {m.displacement[0], m.displacement[1]}},
                        {"edge_weight", {m.edge_weight[0], m.edge_weight[1]}}});
    }
    out.results["maps"] = maps;
    out.conventions["gap_method"] = scan.empty() ? "" : scan.front().method;
    out.conventions["edge_weight"] = "fraction of |T|^2 within 2 sites of an open boundary";
    out.conventions["map_inputs"] = "site (0, 0, s) for s = 0, 1";
}

inline void run_dispersion(const ExperimentConfig& c, RunOutput& out) {
    const auto& o = c.optics;
    io::CsvTable t({"r_mag", "kappa", "kappa_fit", "max_relative_error"});
    Json rows = Json::array();
    for (double r : o.r_mag) {
        const auto p = OpticalParams::resonant(r, o.n, o.m, o.S_c, o.phi_x, o.phi_y);
        const auto chk = dispersion_check(p, o.grid);
        t.row({r, chk.kappa, chk.kappa_fit, chk.max_relative_error});
        rows.push_back({{"r_mag", r}, {"max_relative_error", chk.max_relative_error}, {"within_r_squared", chk.max_relative_error < r * r}});
    }
    out.files.add("dispersion.csv", t.str());
    out.results["checks"] = rows;
    out.conventions["relative_error"] = "max |numeric - tight binding| / (4 kappa) over the K grid";
}

}  // namespace detail

// Computes every output in memory; nothing touches the file system.
inline RunOutput execute(const ExperimentConfig& c) {
    RunOutput out;
    switch (c.kind) {
        case ExperimentKind::Spectrum: detail::run_spectrum(c, out); break;
        case ExperimentKind::Butterfly: detail::run_butterfly(c, out); break;
        case ExperimentKind::EdgeMap: detail::run_edge_map(c, out); break;
        case ExperimentKind::Displacement:
        case ExperimentKind::Disorder: detail::run_displacement(c, out); break;
        case ExperimentKind::Chern: detail::run_chern(c, out); break;
        case ExperimentKind::Bands: detail::run_bands(c, out); break;
        case ExperimentKind::Qsh: detail::run_qsh(c, out); break;
        case ExperimentKind::DispersionCheck: detail::run_dispersion(c, out); break;
    }
    return out;
}

// Validated config in, files plus manifest.json out; outputs appear only once all succeeded.
inline RunManifest run(const ExperimentConfig& c) {
    if (auto d = validate(c); has_fatal(d)) throw ConfigError(std::move(d));
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out = execute(c);
    RunManifest m;
    m.config = to_json(c);
    m.version = artifact_version;
    m.results = out.results;
    m.conventions = out.conventions;
    for (const auto& [name, content] : out.files.files()) m.digests.emplace_back(name, io::sha256_hex(content));
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.files.add("manifest.json", m.to_json().dump(2) + "\n");
    out.files.commit(c.output_dir);
    return m;
}

}  // namespace oamsim::cli
