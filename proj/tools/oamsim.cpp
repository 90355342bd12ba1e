// oamsim - run one experiment from a JSON config
#include "oamsim/runner.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

enum ExitCode { Ok = 0, ConfigFailure = 2, NumericalFailure = 3 };

struct Flags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool validate_only = false;
};

int run_kind(oamsim::cli::ExperimentKind kind, const Flags& f) {
    using namespace oamsim::cli;
    Json doc = Json::object();
    try {
        if (!f.config_path.empty()) {
            std::ifstream in(f.config_path);
            if (!in) {
                std::cerr << "error: cannot open config " << f.config_path << "\n";
                return ConfigFailure;
            }
            doc = Json::parse(in);
        }
    } catch (const Json::parse_error& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return ConfigFailure;
    }
    if (!doc.is_object()) {
        std::cerr << "fatal: <root>: expected an object\n";
        return ConfigFailure;
    }
    if (f.seed) doc["seed"] = *f.seed;
    if (!f.out_dir.empty()) doc["output_dir"] = f.out_dir;

    const auto diags = validate(doc, kind);
    for (const auto& d : diags) std::cerr << d.str() << "\n";
    if (has_fatal(diags)) return ConfigFailure;
    if (f.validate_only) {
        std::cout << "config ok\n";
        return Ok;
    }
    if (f.threads > 0) oamsim::set_worker_count(f.threads);
    try {
        const auto cfg = load_config(doc, kind);
        const auto m = run(cfg);
        std::cout << "wrote " << m.digests.size() << " files + manifest.json to " << cfg.output_dir << " in "
                  << m.wall_time_s << " s\n";
        return Ok;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return NumericalFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic-dimension photonic lattice experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::uint64_t seed = 0;
    for (const auto& [kind, name] : oamsim::cli::kind_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", flags.config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed")->each([&flags, &seed](const std::string&) { flags.seed = seed; });
        sub->add_option("--threads", flags.threads, "worker count cap")->check(CLI::PositiveNumber);
        sub->add_flag("--validate-only", flags.validate_only, "check the config and exit");
        sub->callback([k = kind, &flags] { throw CLI::RuntimeError(run_kind(k, flags)); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : ConfigFailure;
    }
    return Ok;
}
