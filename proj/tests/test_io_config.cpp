#include "oamsim/runner.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <unistd.h>

using namespace oamsim;
using namespace oamsim::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("oamsim_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

bool mentions(const std::vector<Diagnostic>& d, const std::string& path, const std::string& text) {
    return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) {
        return x.severity == Diagnostic::Severity::Fatal && x.path == path && x.message.find(text) != std::string::npos;
    });
}

Json small_disorder_doc(const fs::path& out) {
    auto doc = Json::parse(R"({
        "kind": "disorder",
        "lattice": {"n_x": 6, "l_min": -8, "l_max": 8},
        "hamiltonian": {"model": "landau", "phi0": [1, 4]},
        "decay": {"gamma": 0.2},
        "omega": {"min": -2.5, "max": -1.5, "points": 3},
        "region": {"side": "right", "depth": 2},
        "disorder": {"sigma_detuning": 0.1, "sigma_coupling_phase": 0.05, "sigma_loss": 0.05, "trials": 4}
    })");
    doc["output_dir"] = out.string();
    return doc;
}

std::map<std::string, std::string> dir_files(const fs::path& d) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::directory_iterator(d)) m[e.path().filename().string()] = io::read_file(e.path());
    return m;
}

Json manifest_without_time(const std::string& text) {
    auto j = Json::parse(text);
    j.erase("wall_time_s");
    return j;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OAMSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const std::string& name, const Json& doc) {
    const auto p = scratch(name + ".json");
    std::ofstream(p) << doc.dump();
    return p;
}

}  // namespace

TEST(Csv, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(io::csv_field("abc"), "abc");
    EXPECT_EQ(io::csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(io::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(io::csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_double(1.0), "1");
    EXPECT_EQ(std::stod(io::format_double(-3.0901699437494745)), -3.0901699437494745);
}

TEST(Csv, TableLayout) {
    io::CsvTable t({"omega", "note"});
    t.row_strings({"1", "x,y"});
    EXPECT_EQ(t.str(), "omega,note\n1,\"x,y\"\n");
    EXPECT_THROW(t.row({1.0}), std::invalid_argument);
}

TEST(Grid, RoundTrip) {
    Eigen::MatrixXd g(3, 2);
    g << 0.1, 2.0, -1e-300, 5.5, 3.0 / 7.0, 0.0;
    const auto p = io::parse_grid(io::grid_text(g, -1, 0));
    EXPECT_EQ(p.l_min, -1);
    EXPECT_EQ(p.j_min, 0);
    EXPECT_EQ(p.values, g);
    EXPECT_THROW(io::parse_grid("2 2 0 0\n1 2 3\n"), std::invalid_argument);
}

TEST(Digest, Sha256KnownVector) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Validate, OamGaugeWindowMustMatchFlux) {
    const auto d = validate(Json::parse(R"({"kind": "displacement",
        "lattice": {"n_x": 10, "l_min": -50, "l_max": 50, "bc_y": "periodic"},
        "hamiltonian": {"model": "oam-gauge", "phi0": [1, 6]}})"));
    EXPECT_TRUE(mentions(d, "lattice", "window not multiple of q"));
}

TEST(Validate, LandauPeriodicXMustMatchFlux) {
    const auto d = validate(Json::parse(R"({"kind": "spectrum",
        "lattice": {"n_x": 10, "l_min": -5, "l_max": 5, "bc_x": "periodic"},
        "hamiltonian": {"model": "landau", "phi0": [1, 6]}})"));
    EXPECT_TRUE(mentions(d, "lattice", "n_x not multiple of q"));
}

TEST(Validate, LossMustBePositive) {
    const auto d = validate(Json::parse(R"({"kind": "spectrum", "decay": {"gamma": 0}})"));
    EXPECT_TRUE(mentions(d, "decay.gamma", "loss must be positive"));
}

TEST(Validate, UnknownKeyReportsPath) {
    const auto d = validate(Json::parse(R"({"kind": "spectrum", "lattice": {"n_x": 4, "nx": 5}})"));
    EXPECT_TRUE(mentions(d, "lattice.nx", "unknown key"));
}

TEST(Validate, TypeErrorsAndMismatchedSpin) {
    EXPECT_TRUE(mentions(validate(Json::parse(R"({"kind": "spectrum", "seed": "x"})")), "seed", "integer"));
    EXPECT_TRUE(mentions(validate(Json::parse(R"({"kind": "spectrum", "lattice": {"spin_dim": 2}})")), "lattice.spin_dim",
                         "spin_dim"));
    EXPECT_TRUE(mentions(validate(Json::parse(R"({"kind": "nonsense"})")), "kind", "unknown"));
    EXPECT_TRUE(mentions(validate(Json::parse(R"({"kind": "disorder"})")), "disorder", "required"));
}

TEST(Validate, OddModeIndexWarnsOnly) {
    const auto d = validate(Json::parse(R"({"kind": "dispersion-check", "optics": {"n": 1001}})"));
    EXPECT_FALSE(has_fatal(d));
    EXPECT_FALSE(d.empty());
}

TEST(Config, SpinInferredFromModel) {
    const auto c = load_config(Json::parse(R"({"kind": "spectrum", "hamiltonian": {"model": "dirac", "phi0": [1, 20]}})"));
    EXPECT_EQ(c.lattice.spin_dim, 2);
}

TEST(Config, EchoParsesBackToSameConfig) {
    const auto c = load_config(small_disorder_doc("unused"));
    const Json echo = to_json(c);
    EXPECT_EQ(to_json(load_config(echo)), echo);
    EXPECT_EQ(echo["disorder"]["trials"], 4);
}

TEST(Config, LoadThrowsWithAllDiagnostics) {
    try {
        load_config(Json::parse(R"({"kind": "spectrum", "decay": {"gamma": -1}, "bogus": 1})"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e.diagnostics, "bogus", "unknown key"));
    }
}

TEST(Runner, RerunIsByteIdentical) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    run(load_config(small_disorder_doc(a)));
    run(load_config(small_disorder_doc(b)));
    auto fa = dir_files(a), fb = dir_files(b);
    ASSERT_EQ(fa.size(), fb.size());
    for (const auto& [name, content] : fa) {
        if (name == "manifest.json") continue;
        EXPECT_EQ(content, fb.at(name)) << name;
    }
    auto ma = manifest_without_time(fa.at("manifest.json")), mb = manifest_without_time(fb.at("manifest.json"));
    ma["config"].erase("output_dir");
    mb["config"].erase("output_dir");
    EXPECT_EQ(ma, mb);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Runner, ResultsIndependentOfWorkerCount) {
    const auto c = load_config(small_disorder_doc("unused"));
    set_worker_count(1);
    const auto one = execute(c).files.files();
    set_worker_count(4);
    const auto four = execute(c).files.files();
    set_worker_count(std::thread::hardware_concurrency());
    EXPECT_EQ(one, four);
}

TEST(Runner, DisplacementTableHeader) {
    auto doc = small_disorder_doc("unused");
    doc["kind"] = "displacement";
    doc.erase("disorder");
    const auto files = execute(load_config(doc)).files.files();
    const auto& csv = files.at("displacement.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega,l_e_mean,l_e_std");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Runner, ChernManifestReportsFirstBand) {
    const auto out = execute(load_config(Json::parse(R"({"kind": "chern", "hamiltonian": {"phi0": [1, 6]}, "chern": {"nk": 32}})")));
    EXPECT_EQ(out.results["bands"][0]["fukui_hatsugai"], 1);
    EXPECT_EQ(out.results["bands"][0]["phase_mismatch"], 1);
    EXPECT_EQ(out.results["sum"], 0);
    EXPECT_EQ(out.results["groups"].size(), 5u);
    EXPECT_FALSE(out.results["bands"][2].contains("fukui_hatsugai"));
}

TEST(Runner, NumericalFailureLeavesNoOutput) {
    const auto dir = scratch("partial");
    auto doc = Json::parse(R"({"kind": "chern", "hamiltonian": {"phi0": [1, 6]}, "chern": {"nk": 16, "transmission": {"omega": -2.2}}})");
    doc["output_dir"] = dir.string();
    EXPECT_THROW(run(load_config(doc)), NumericalError);
    EXPECT_FALSE(fs::exists(dir) && !fs::is_empty(dir));
    fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
    const auto out = scratch("cli_out");
    const auto good = write_config("good", small_disorder_doc(out));
    EXPECT_EQ(run_cli("disorder --config " + good.string()), 0);
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    EXPECT_TRUE(fs::exists(out / "displacement.csv"));

    const auto bad = write_config("bad", Json::parse(R"({"decay": {"gamma": 0}})"));
    EXPECT_EQ(run_cli("spectrum --config " + bad.string()), 2);
    EXPECT_EQ(run_cli("spectrum --config " + bad.string() + " --validate-only"), 2);
    EXPECT_EQ(run_cli("disorder --config " + good.string() + " --validate-only"), 0);
    EXPECT_EQ(run_cli("nonsense"), 2);

    const auto numerical = write_config(
        "numerical", Json::parse(R"({"chern": {"nk": 16, "transmission": {"omega": -2.2}}})"));
    const auto num_out = scratch("cli_num");
    EXPECT_EQ(run_cli("chern --config " + numerical.string() + " --out " + num_out.string()), 3);
    EXPECT_FALSE(fs::exists(num_out / "manifest.json"));

    for (const auto& p : {good, bad, numerical}) fs::remove(p);
    fs::remove_all(out);
}
