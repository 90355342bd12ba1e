// config.hpp - experiment configuration: JSON schema, defaults, diagnostics
#pragma once

#include "oamsim/disorder.hpp"
#include "oamsim/optics.hpp"

#include "json.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oamsim::cli {

using Json = nlohmann::json;

enum class ExperimentKind { Spectrum, Butterfly, EdgeMap, Displacement, Chern, Bands, Disorder, Qsh, DispersionCheck };

inline const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> v{
        {ExperimentKind::Spectrum, "spectrum"},         {ExperimentKind::Butterfly, "butterfly"},
        {ExperimentKind::EdgeMap, "edge-map"},          {ExperimentKind::Displacement, "displacement"},
        {ExperimentKind::Chern, "chern"},               {ExperimentKind::Bands, "bands"},
        {ExperimentKind::Disorder, "disorder"},         {ExperimentKind::Qsh, "qsh"},
        {ExperimentKind::DispersionCheck, "dispersion-check"}};
    return v;
}

inline std::string to_string(ExperimentKind k) {
    for (const auto& [kk, n] : kind_names())
        if (kk == k) return n;
    return "?";
}

inline std::optional<ExperimentKind> parse_kind(const std::string& s) {
    for (const auto& [k, n] : kind_names())
        if (n == s) return k;
    return std::nullopt;
}

enum class Model { Landau, OamGauge, NonAbelian, Dirac, Qsh };

inline const std::vector<std::pair<Model, std::string>>& model_names() {
    static const std::vector<std::pair<Model, std::string>> v{{Model::Landau, "landau"},
                                                              {Model::OamGauge, "oam-gauge"},
                                                              {Model::NonAbelian, "non-abelian"},
                                                              {Model::Dirac, "dirac"},
                                                              {Model::Qsh, "qsh"}};
    return v;
}

inline bool spinful(Model m) { return m == Model::NonAbelian || m == Model::Dirac || m == Model::Qsh; }

struct Diagnostic {
    enum class Severity { Fatal, Warning };
    Severity severity = Severity::Fatal;
    std::string path;  // dotted key path, "" for the document root
    std::string message;

    [[nodiscard]] std::string str() const {
        return std::string(severity == Severity::Fatal ? "fatal" : "warning") + ": " + (path.empty() ? "<root>" : path) +
               ": " + message;
    }
};

inline bool has_fatal(const std::vector<Diagnostic>& d) {
    return std::any_of(d.begin(), d.end(), [](const Diagnostic& x) { return x.severity == Diagnostic::Severity::Fatal; });
}

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<Diagnostic> diags)
        : std::runtime_error(summary(diags)), diagnostics(std::move(diags)) {}
    std::vector<Diagnostic> diagnostics;

  private:
    static std::string summary(const std::vector<Diagnostic>& d) {
        std::string s = "invalid configuration";
        for (const auto& x : d)
            if (x.severity == Diagnostic::Severity::Fatal) s += "\n  " + x.str();
        return s;
    }
};

struct HamiltonianConfig {
    Model model = Model::Landau;
    Rational phi0{1, 6};
    // non-abelian builder only
    double phi_x = 0.0;
    double alpha = 0.0;
    std::vector<double> axis1{1, 0, 0};
    std::vector<double> axis2{0, 0, 1};
    std::vector<double> beta;       // per cavity, empty = 0
    std::vector<double> lambda;     // per cavity, empty = 0
    std::vector<double> phi_y;      // per cavity, empty = j phi0
    // qsh builder
    double beta0 = 0.0;
    double lambda0 = 0.6;
};

struct OmegaConfig {
    double min = -4.5;
    double max = 4.5;
    std::size_t points = 400;
    std::vector<double> values;  // overrides the uniform grid when nonempty

    [[nodiscard]] std::vector<double> grid() const { return values.empty() ? default_omega_grid(points, min, max) : values; }
};

struct DisorderConfig {
    DisorderModel model;
    std::size_t trials = 100;
    int input_oam_average = 0;
};

struct ChernConfig {
    int nk = 64;
    // optional torus transmission pipeline
    std::optional<double> transmission_omega;
    double transmission_gamma = 0.1;
    int torus_n_x = 10;
    int torus_l_min = -51;
    int torus_l_max = 50;
};

struct ButterflyConfig {
    int q_max = 12;
    std::vector<Rational> fluxes;  // overrides q_max when nonempty
};

struct QshConfig {
    double lambda0 = 0.6;
    std::vector<double> beta0_list{0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15};
    double target = -1.6;
    int nk = 48;
    std::vector<double> map_beta0{0.0, 0.125};
    double map_omega = -1.6;
};

struct OpticsConfig {
    std::vector<double> r_mag{0.05, 0.1, 0.2};
    int n = 1000;
    int m = 3;
    double S_c = 1.0;
    double phi_x = 0.0;
    double phi_y = 0.0;
    int grid = 16;
};

struct EdgeMapConfig {
    double omega = -2.2;
    SiteIndex input{0, 0, 0};
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Displacement;
    LatticeSpec lattice;  // spin_dim follows the model unless given
    HamiltonianConfig hamiltonian;
    double gamma = 0.2;
    OmegaConfig omega;
    EdgeRegion region;
    std::optional<int> polarization;
    std::optional<DisorderConfig> disorder;
    ChernConfig chern;
    ButterflyConfig butterfly;
    QshConfig qsh;
    OpticsConfig optics;
    EdgeMapConfig edge_map;
    std::uint64_t seed = 20240601;
    std::string output_dir = "out";
};

namespace detail {

inline std::string boundary_name(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

inline std::string scope_name(DisorderScope s) {
    switch (s) {
        case DisorderScope::PerCavityLink: return "per-cavity-link";
        case DisorderScope::PerOAMLink: return "per-oam-link";
        case DisorderScope::PerSite: return "per-site";
    }
    return "?";
}

// Walks one JSON object, records type errors and the keys it consumed.
class Reader {
  public:
    Reader(const Json& j, std::string path, std::vector<Diagnostic>& diags) : j_(j), path_(std::move(path)), d_(diags) {
        if (!j_.is_object()) fatal(path_, "expected an object");
    }
    ~Reader() {
        if (!j_.is_object()) return;
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fatal(key(k), "unknown key");
    }
    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    [[nodiscard]] std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    void fatal(const std::string& path, const std::string& msg) { d_.push_back({Diagnostic::Severity::Fatal, path, msg}); }

    const Json* find(const std::string& k) {
        seen_.insert(k);
        if (!j_.is_object()) return nullptr;
        const auto it = j_.find(k);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    template <class T>
    void get(const std::string& k, T& out) {
        const Json* v = find(k);
        if (!v) return;
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v->is_number()) throw std::invalid_argument("expected a number");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v->is_number_integer()) throw std::invalid_argument("expected an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (v->get<long long>() < 0 && !v->is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v->is_string()) throw std::invalid_argument("expected a string");
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                if (!v->is_array()) throw std::invalid_argument("expected an array of numbers");
                for (const auto& e : *v)
                    if (!e.is_number()) throw std::invalid_argument("expected an array of numbers");
            }
            out = v->get<T>();
        } catch (const std::exception& e) {
            fatal(key(k), e.what());
        }
    }

    void get_boundary(const std::string& k, Boundary& out) {
        std::string s;
        const bool present = find(k) != nullptr;
        get(k, s);
        if (!present) return;
        if (s == "open") out = Boundary::Open;
        else if (s == "periodic") out = Boundary::Periodic;
        else fatal(key(k), "expected \"open\" or \"periodic\"");
    }

    void get_rational(const std::string& k, Rational& out) {
        const Json* v = find(k);
        if (!v) return;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
            fatal(key(k), "expected [p, q] with integer p, q");
            return;
        }
        if ((*v)[1].get<long long>() <= 0) {
            fatal(key(k), "flux denominator q must be positive");
            return;
        }
        out = Rational((*v)[0].get<long long>(), (*v)[1].get<long long>());
    }

  private:
    const Json& j_;
    std::string path_;
    std::vector<Diagnostic>& d_;
    std::set<std::string> seen_;
};

inline Json rational_json(Rational r) { return Json::array({r.p(), r.q()}); }

}  // namespace detail

// Schema: unknown keys and type errors become fatal diagnostics with their key path.
inline ExperimentConfig parse_config(const Json& doc, std::vector<Diagnostic>& diags,
                                     std::optional<ExperimentKind> kind_hint = std::nullopt) {
    ExperimentConfig c;
    if (kind_hint) c.kind = *kind_hint;
    detail::Reader root(doc, "", diags);
    if (!doc.is_object()) return c;

    std::string kind_s;
    const bool has_kind = root.find("kind") != nullptr;
    root.get("kind", kind_s);
    if (has_kind) {
        const auto k = parse_kind(kind_s);
        if (!k) root.fatal("kind", "unknown experiment kind \"" + kind_s + "\"");
        else if (kind_hint && *k != *kind_hint)
            root.fatal("kind", "config kind \"" + kind_s + "\" does not match subcommand \"" + to_string(*kind_hint) + "\"");
        else c.kind = *k;
    } else if (!kind_hint) {
        root.fatal("kind", "missing experiment kind");
    }

    // Defaults that depend on the experiment.
    if (c.kind == ExperimentKind::Spectrum || c.kind == ExperimentKind::Butterfly) c.gamma = 0.1;
    if (c.kind == ExperimentKind::Qsh) {
        c.hamiltonian.model = Model::Qsh;
        c.gamma = 0.1;
    }

    bool spin_given = false;
    if (const Json* v = root.find("lattice")) {
        detail::Reader r(*v, "lattice", diags);
        r.get("n_x", c.lattice.n_x);
        r.get("l_min", c.lattice.l_min);
        r.get("l_max", c.lattice.l_max);
        spin_given = r.find("spin_dim") != nullptr;
        r.get("spin_dim", c.lattice.spin_dim);
        r.get_boundary("bc_x", c.lattice.bc_x);
        r.get_boundary("bc_y", c.lattice.bc_y);
    }

    if (const Json* v = root.find("hamiltonian")) {
        detail::Reader r(*v, "hamiltonian", diags);
        std::string m;
        const bool present = r.find("model") != nullptr;
        r.get("model", m);
        if (present) {
            bool ok = false;
            for (const auto& [mm, n] : model_names())
                if (n == m) {
                    c.hamiltonian.model = mm;
                    ok = true;
                }
            if (!ok) r.fatal("hamiltonian.model", "unknown model \"" + m + "\"");
        }
        r.get_rational("phi0", c.hamiltonian.phi0);
        r.get("phi_x", c.hamiltonian.phi_x);
        r.get("alpha", c.hamiltonian.alpha);
        r.get("axis1", c.hamiltonian.axis1);
        r.get("axis2", c.hamiltonian.axis2);
        r.get("beta", c.hamiltonian.beta);
        r.get("lambda", c.hamiltonian.lambda);
        r.get("phi_y", c.hamiltonian.phi_y);
        r.get("beta0", c.hamiltonian.beta0);
        r.get("lambda0", c.hamiltonian.lambda0);
    }
    if (!spin_given) c.lattice.spin_dim = spinful(c.hamiltonian.model) ? 2 : 1;

    if (const Json* v = root.find("decay")) {
        detail::Reader r(*v, "decay", diags);
        r.get("gamma", c.gamma);
    }

    if (const Json* v = root.find("omega")) {
        detail::Reader r(*v, "omega", diags);
        r.get("min", c.omega.min);
        r.get("max", c.omega.max);
        r.get("points", c.omega.points);
        r.get("values", c.omega.values);
    }

    if (const Json* v = root.find("region")) {
        detail::Reader r(*v, "region", diags);
        std::string side;
        const bool present = r.find("side") != nullptr;
        r.get("side", side);
        if (present) {
            if (side == "left") c.region.side = EdgeSide::Left;
            else if (side == "right") c.region.side = EdgeSide::Right;
            else r.fatal("region.side", "expected \"left\" or \"right\"");
        }
        r.get("depth", c.region.depth);
    }

    if (const Json* v = root.find("polarization")) {
        if (!v->is_number_integer()) root.fatal("polarization", "expected an integer or null");
        else c.polarization = v->get<int>();
    }

    if (const Json* v = root.find("disorder")) {
        detail::Reader r(*v, "disorder", diags);
        DisorderConfig d;
        r.get("sigma_detuning", d.model.sigma_detuning);
        r.get("sigma_coupling_mag", d.model.sigma_coupling_mag);
        r.get("sigma_coupling_phase", d.model.sigma_coupling_phase);
        r.get("sigma_loss", d.model.sigma_loss);
        if (r.find("envelope_width")) {
            double w = 0.0;
            r.get("envelope_width", w);
            d.model.envelope = OamEnvelope{w};
        }
        std::string scope;
        const bool present = r.find("scope") != nullptr;
        r.get("scope", scope);
        if (present) {
            bool ok = false;
            for (auto s : {DisorderScope::PerCavityLink, DisorderScope::PerOAMLink, DisorderScope::PerSite})
                if (detail::scope_name(s) == scope) {
                    d.model.scope = s;
                    ok = true;
                }
            if (!ok) r.fatal("disorder.scope", "expected per-cavity-link, per-oam-link or per-site");
        }
        r.get("trials", d.trials);
        r.get("input_oam_average", d.input_oam_average);
        c.disorder = d;
    }

    if (const Json* v = root.find("chern")) {
        detail::Reader r(*v, "chern", diags);
        r.get("nk", c.chern.nk);
        if (const Json* t = r.find("transmission")) {
            detail::Reader rt(*t, "chern.transmission", diags);
            double w = 0.0;
            if (rt.find("omega")) {
                rt.get("omega", w);
                c.chern.transmission_omega = w;
            } else {
                rt.fatal("chern.transmission.omega", "required");
            }
            rt.get("gamma", c.chern.transmission_gamma);
            rt.get("n_x", c.chern.torus_n_x);
            rt.get("l_min", c.chern.torus_l_min);
            rt.get("l_max", c.chern.torus_l_max);
        }
    }

    if (const Json* v = root.find("butterfly")) {
        detail::Reader r(*v, "butterfly", diags);
        r.get("q_max", c.butterfly.q_max);
        if (const Json* f = r.find("fluxes")) {
            if (!f->is_array()) {
                r.fatal("butterfly.fluxes", "expected an array of [p, q]");
            } else {
                for (std::size_t i = 0; i < f->size(); ++i) {
                    Json wrap = {{"f", (*f)[i]}};
                    detail::Reader rf(wrap, "butterfly.fluxes", diags);
                    Rational q;
                    rf.get_rational("f", q);
                    c.butterfly.fluxes.push_back(q);
                }
            }
        }
    }

    if (const Json* v = root.find("qsh")) {
        detail::Reader r(*v, "qsh", diags);
        r.get("lambda0", c.qsh.lambda0);
        r.get("beta0_list", c.qsh.beta0_list);
        r.get("target", c.qsh.target);
        r.get("nk", c.qsh.nk);
        r.get("map_beta0", c.qsh.map_beta0);
        r.get("map_omega", c.qsh.map_omega);
    }

    if (const Json* v = root.find("optics")) {
        detail::Reader r(*v, "optics", diags);
        r.get("r_mag", c.optics.r_mag);
        r.get("n", c.optics.n);
        r.get("m", c.optics.m);
        r.get("S_c", c.optics.S_c);
        r.get("phi_x", c.optics.phi_x);
        r.get("phi_y", c.optics.phi_y);
        r.get("grid", c.optics.grid);
    }

    if (const Json* v = root.find("edge_map")) {
        detail::Reader r(*v, "edge_map", diags);
        r.get("omega", c.edge_map.omega);
        if (const Json* in = r.find("input")) {
            detail::Reader ri(*in, "edge_map.input", diags);
            ri.get("j", c.edge_map.input.j);
            ri.get("l", c.edge_map.input.l);
            ri.get("s", c.edge_map.input.s);
        }
    }

    root.get("seed", c.seed);
    root.get("output_dir", c.output_dir);
    return c;
}

// Physics and range checks; no computation.
inline std::vector<Diagnostic> validate(const ExperimentConfig& c) {
    std::vector<Diagnostic> d;
    auto fatal = [&d](std::string p, std::string m) { d.push_back({Diagnostic::Severity::Fatal, std::move(p), std::move(m)}); };
    auto warn = [&d](std::string p, std::string m) { d.push_back({Diagnostic::Severity::Warning, std::move(p), std::move(m)}); };
    const auto& L = c.lattice;
    const auto& H = c.hamiltonian;
    const auto k = c.kind;
    const bool lattice_used = k != ExperimentKind::Chern && k != ExperimentKind::Bands && k != ExperimentKind::DispersionCheck;

    if (!(c.gamma > 0.0)) fatal("decay.gamma", "loss must be positive");

    if (lattice_used) {
        try {
            L.validate();
        } catch (const std::exception& e) {
            fatal("lattice", e.what());
        }
        if (L.spin_dim != (spinful(H.model) ? 2 : 1))
            fatal("lattice.spin_dim", "spin_dim does not match the selected model");
        const long long q = H.phi0.q();
        if (H.model == Model::OamGauge && L.bc_y == Boundary::Periodic && L.window() % q != 0)
            fatal("lattice", "window not multiple of q");
        if ((H.model == Model::Landau || H.model == Model::Dirac) && L.bc_x == Boundary::Periodic && L.n_x % q != 0)
            fatal("lattice", "n_x not multiple of q");
        if (L.dim() > direct_dim_limit)
            warn("lattice", "dimension " + std::to_string(L.dim()) + " exceeds the direct-solver limit");
    }

    if (H.model == Model::NonAbelian) {
        for (const auto* ax : {&H.axis1, &H.axis2})
            if (ax->size() != 3 || std::abs(std::hypot((*ax)[0], (*ax)[1], (*ax)[2]) - 1.0) > 1e-12)
                fatal(ax == &H.axis1 ? "hamiltonian.axis1" : "hamiltonian.axis2", "axis must be a unit 3-vector");
        const auto nx = static_cast<std::size_t>(std::max(L.n_x, 0));
        if (!H.beta.empty() && H.beta.size() != nx) fatal("hamiltonian.beta", "one value per cavity required");
        if (!H.lambda.empty() && H.lambda.size() != nx) fatal("hamiltonian.lambda", "one value per cavity required");
        if (!H.phi_y.empty() && H.phi_y.size() != nx) fatal("hamiltonian.phi_y", "one value per cavity required");
    }

    if (k != ExperimentKind::Chern && k != ExperimentKind::Bands && k != ExperimentKind::DispersionCheck &&
        k != ExperimentKind::EdgeMap && k != ExperimentKind::Qsh) {
        if (c.omega.values.empty()) {
            if (c.omega.points < 1) fatal("omega.points", "at least one frequency required");
            if (!(c.omega.min <= c.omega.max)) fatal("omega", "min must not exceed max");
        }
    }

    if (k == ExperimentKind::Displacement || k == ExperimentKind::Disorder) {
        if (c.region.depth < 1 || 2 * c.region.depth > L.n_x) fatal("region.depth", "depth must lie in [1, n_x/2]");
        if (c.polarization && (*c.polarization < 0 || *c.polarization >= L.spin_dim))
            fatal("polarization", "polarization index out of range");
    }
    if (k == ExperimentKind::Disorder && !c.disorder) fatal("disorder", "required for kind disorder");
    if (c.disorder) {
        try {
            c.disorder->model.validate();
        } catch (const std::exception& e) {
            fatal("disorder", e.what());
        }
        if (c.disorder->trials < 2) fatal("disorder.trials", "at least 2 trials required");
        if (c.disorder->input_oam_average < 0) fatal("disorder.input_oam_average", "must be non-negative");
    }

    if (k == ExperimentKind::EdgeMap && lattice_used && !L.contains(c.edge_map.input))
        fatal("edge_map.input", "input site outside the lattice");

    if (k == ExperimentKind::Butterfly) {
        if (H.model != Model::Landau) fatal("hamiltonian.model", "butterfly scans use the landau model");
        if (c.butterfly.fluxes.empty() && c.butterfly.q_max < 1) fatal("butterfly.q_max", "must be >= 1");
    }

    if (k == ExperimentKind::Chern || k == ExperimentKind::Bands) {
        if (c.chern.nk < 4) fatal("chern.nk", "k grid must be at least 4 x 4");
        if (c.chern.transmission_omega) {
            const int w = c.chern.torus_l_max - c.chern.torus_l_min + 1;
            if (w < 1 || w % H.phi0.q() != 0) fatal("chern.transmission", "window not multiple of q");
            if (c.chern.torus_n_x < 2 || c.chern.torus_n_x % 2 != 0) fatal("chern.transmission.n_x", "must be even");
            if (!(c.chern.transmission_gamma > 0.0)) fatal("chern.transmission.gamma", "loss must be positive");
        }
    }

    if (k == ExperimentKind::Qsh) {
        if (H.model != Model::Qsh) fatal("hamiltonian.model", "qsh runs use the qsh model");
        if (c.qsh.beta0_list.empty()) fatal("qsh.beta0_list", "at least one value required");
        if (c.qsh.nk < 2) fatal("qsh.nk", "must be >= 2");
        if (L.bc_x == Boundary::Periodic && L.n_x % 4 != 0) fatal("lattice.n_x", "must be a multiple of 4 on a torus");
    }

    if (k == ExperimentKind::DispersionCheck) {
        if (c.optics.r_mag.empty()) fatal("optics.r_mag", "at least one value required");
        for (double r : c.optics.r_mag)
            if (!(r > 0.0 && r < 1.0)) fatal("optics.r_mag", "r_mag must lie in (0, 1)");
        if (c.optics.n < 1) fatal("optics.n", "must be >= 1");
        if (c.optics.n % 2 != 0) warn("optics.n", "odd n flips the sign of the cosine band");
        if (c.optics.m < 0) fatal("optics.m", "must be >= 0");
        if (!(c.optics.S_c > 0.0)) fatal("optics.S_c", "path lengths must be positive");
        if (c.optics.grid < 1) fatal("optics.grid", "must be >= 1");
    }
    return d;
}

// Normalized echo: every field with its effective value; parses back to the same config.
inline Json to_json(const ExperimentConfig& c) {
    const auto& H = c.hamiltonian;
    std::string model;
    for (const auto& [m, n] : model_names())
        if (m == H.model) model = n;
    Json j;
    j["kind"] = to_string(c.kind);
    j["lattice"] = {{"n_x", c.lattice.n_x},
                    {"l_min", c.lattice.l_min},
                    {"l_max", c.lattice.l_max},
                    {"spin_dim", c.lattice.spin_dim},
                    {"bc_x", detail::boundary_name(c.lattice.bc_x)},
                    {"bc_y", detail::boundary_name(c.lattice.bc_y)}};
    j["hamiltonian"] = {{"model", model}, {"phi0", detail::rational_json(H.phi0)}};
    if (H.model == Model::NonAbelian) {
        j["hamiltonian"].update({{"phi_x", H.phi_x},
                                 {"alpha", H.alpha},
                                 {"axis1", H.axis1},
                                 {"axis2", H.axis2},
                                 {"beta", H.beta},
                                 {"lambda", H.lambda},
                                 {"phi_y", H.phi_y}});
    }
    if (H.model == Model::Qsh) j["hamiltonian"].update({{"beta0", H.beta0}, {"lambda0", H.lambda0}});
    j["decay"] = {{"gamma", c.gamma}};
    j["omega"] = {{"min", c.omega.min}, {"max", c.omega.max}, {"points", c.omega.points}, {"values", c.omega.values}};
    j["region"] = {{"side", c.region.side == EdgeSide::Left ? "left" : "right"}, {"depth", c.region.depth}};
    j["polarization"] = c.polarization ? Json(*c.polarization) : Json(nullptr);
    if (c.disorder) {
        const auto& m = c.disorder->model;
        j["disorder"] = {{"sigma_detuning", m.sigma_detuning},
                         {"sigma_coupling_mag", m.sigma_coupling_mag},
                         {"sigma_coupling_phase", m.sigma_coupling_phase},
                         {"sigma_loss", m.sigma_loss},
                         {"envelope_width", m.envelope ? Json(m.envelope->width) : Json(nullptr)},
                         {"scope", detail::scope_name(m.scope)},
                         {"trials", c.disorder->trials},
                         {"input_oam_average", c.disorder->input_oam_average}};
    }
    j["chern"] = {{"nk", c.chern.nk}};
    if (c.chern.transmission_omega) {
        j["chern"]["transmission"] = {{"omega", *c.chern.transmission_omega},
                                      {"gamma", c.chern.transmission_gamma},
                                      {"n_x", c.chern.torus_n_x},
                                      {"l_min", c.chern.torus_l_min},
                                      {"l_max", c.chern.torus_l_max}};
    }
    Json fl = Json::array();
    for (auto f : c.butterfly.fluxes) fl.push_back(detail::rational_json(f));
    j["butterfly"] = {{"q_max", c.butterfly.q_max}, {"fluxes", fl}};
    j["qsh"] = {{"lambda0", c.qsh.lambda0}, {"beta0_list", c.qsh.beta0_list}, {"target", c.qsh.target},
                {"nk", c.qsh.nk},           {"map_beta0", c.qsh.map_beta0},   {"map_omega", c.qsh.map_omega}};
    j["optics"] = {{"r_mag", c.optics.r_mag}, {"n", c.optics.n},         {"m", c.optics.m},      {"S_c", c.optics.S_c},
                   {"phi_x", c.optics.phi_x}, {"phi_y", c.optics.phi_y}, {"grid", c.optics.grid}};
    j["edge_map"] = {{"omega", c.edge_map.omega},
                     {"input", {{"j", c.edge_map.input.j}, {"l", c.edge_map.input.l}, {"s", c.edge_map.input.s}}}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

// Parse + validate; throws ConfigError carrying every fatal diagnostic.
inline ExperimentConfig load_config(const Json& doc, std::optional<ExperimentKind> kind_hint = std::nullopt,
                                    std::vector<Diagnostic>* warnings = nullptr) {
    std::vector<Diagnostic> diags;
    auto c = parse_config(doc, diags, kind_hint);
    if (!has_fatal(diags)) {
        auto more = validate(c);
        diags.insert(diags.end(), more.begin(), more.end());
    }
    if (has_fatal(diags)) throw ConfigError(std::move(diags));
    if (warnings) *warnings = diags;
    return c;
}

inline std::vector<Diagnostic> validate(const Json& doc, std::optional<ExperimentKind> kind_hint = std::nullopt) {
    std::vector<Diagnostic> diags;
    auto c = parse_config(doc, diags, kind_hint);
    if (!has_fatal(diags)) {
        auto more = validate(c);
        diags.insert(diags.end(), more.begin(), more.end());
    }
    return diags;
}

inline HamiltonianMatrix build_hamiltonian(const ExperimentConfig& c) {
    const auto& H = c.hamiltonian;
    switch (H.model) {
        case Model::Landau: return build_landau_hofstadter(c.lattice, H.phi0);
        case Model::OamGauge: return build_oam_gauge_hofstadter(c.lattice, H.phi0);
        case Model::Dirac: return build_dirac(c.lattice, H.phi0);
        case Model::Qsh: return build_qsh(c.lattice, H.beta0, H.lambda0);
        case Model::NonAbelian: {
            GaugeConfig g;
            g.phi_x = H.phi_x;
            g.phi0 = H.phi0;
            g.alpha = H.alpha;
            g.axis1 = SpinAxis(H.axis1[0], H.axis1[1], H.axis1[2]);
            g.axis2 = SpinAxis(H.axis2[0], H.axis2[1], H.axis2[2]);
            g.beta_per_cavity = H.beta;
            g.lambda_per_cavity = H.lambda;
            g.phi_y_per_cavity = H.phi_y;
            return build_non_abelian(c.lattice, g);
        }
    }
    throw std::logic_error("unknown model");
}

}  // namespace oamsim::cli
