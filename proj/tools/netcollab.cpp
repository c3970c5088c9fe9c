#include "netcollab/suite.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace netcollab;

namespace {

int with_spec(const std::string& path, std::optional<std::uint64_t> seed, std::optional<int> reps,
              const std::function<int(const SuiteSpec&)>& body) {
    SuiteSpec spec;
    try {
        spec = load_suite_spec(path);
        if (seed) spec.seed = *seed;
        if (reps) {
            if (*reps < 1) throw ConfigError("repetitions must be at least 1");
            spec.repetitions = *reps;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return body(spec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint network reconstruction and community detection from nodal dynamics"};
    app.require_subcommand(1);

    std::string spec_path, out, dataset, algo = "nc", config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    int parallel = 1;

    auto* generate = app.add_subcommand("generate", "Write one dataset file per suite instance");
    generate->add_option("--spec", spec_path, "Suite spec (JSON)")->required();
    generate->add_option("--out", out, "Output directory")->required();
    generate->add_option("--seed", seed, "Override the suite base seed");

    auto* run = app.add_subcommand("run", "Run one algorithm on one dataset");
    run->add_option("--dataset", dataset, "Dataset file from `generate`")->required();
    run->add_option("--algo", algo, "nc or nr2cd");
    run->add_option("--config", config_path, "JSON file of configuration overrides");
    run->add_option("--seed", seed, "Run seed");
    run->add_option("--out", out, "Result file")->required();

    auto* suite = app.add_subcommand("suite", "Run every instance, algorithm and repetition, then aggregate");
    suite->add_option("--spec", spec_path, "Suite spec (JSON)")->required();
    suite->add_option("--out", out, "Output directory")->required();
    suite->add_option("--seed", seed, "Override the suite base seed");
    suite->add_option("--reps", reps, "Override the repetition count");
    suite->add_option("--parallel", parallel, "Concurrent cells");

    auto* stats = app.add_subcommand("stats", "Recompute the report of a finished suite directory");
    stats->add_option("--out", out, "Suite output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*generate)
        return with_spec(spec_path, seed, std::nullopt, [&](const SuiteSpec& s) { return cmd_generate(s, out); });

    if (*suite)
        return with_spec(spec_path, seed, reps, [&](const SuiteSpec& s) { return cmd_suite(s, out, parallel); });

    if (*stats) return cmd_stats(out);

    NcConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open " << config_path << "\n";
                return kExitIo;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            cfg = apply_config_overrides(cfg, buf.str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (seed) cfg.seed = *seed;
    return cmd_run(dataset, algo, cfg, out);
}
