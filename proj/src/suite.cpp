#include "netcollab/suite.hpp"

#include "netcollab/stats.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace netcollab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string object_text(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    return j.dump();
}

}  // namespace

SuiteSpec parse_suite_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("suite spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("suite spec must be a JSON object");

    SuiteSpec spec;
    try {
        for (const auto& [key, value] : j.items())
            if (key != "instances" && key != "algorithms" && key != "repetitions" && key != "seed" &&
                key != "config")
                throw ConfigError("unknown suite spec key \"" + key + "\"");

        if (!j.contains("instances") || !j.at("instances").is_array() || j.at("instances").empty())
            throw ConfigError("suite spec needs a nonempty \"instances\" array");
        std::set<std::string> ids;
        for (const auto& item : j.at("instances")) {
            InstanceSpec inst;
            inst.network = item.at("network").get<std::string>();
            inst.kind = parse_dynamics_kind(item.value("dynamics", std::string("EG")));
            inst.sequences = item.value("ns", inst.sequences);
            inst.rounds = item.value("l", inst.rounds);
            inst.seed = item.value("seed", inst.seed);
            inst.nodes = item.value("n", inst.nodes);
            inst.id = item.value("id", inst.network + "-" + std::string(to_string(inst.kind)));
            if (inst.sequences < 1 || inst.rounds < 1)
                throw ConfigError("instance " + inst.id + ": ns and l must be positive");
            if (!ids.insert(inst.id).second) throw ConfigError("duplicate instance id \"" + inst.id + "\"");
            spec.instances.push_back(std::move(inst));
        }

        const json algos = j.value("algorithms", json::array({"nc", "nr2cd"}));
        if (!algos.is_array() || algos.empty()) throw ConfigError("\"algorithms\" must be a nonempty array");
        std::set<std::string> labels;
        for (const auto& item : algos) {
            AlgorithmSpec a;
            if (item.is_string()) {
                a.algorithm = item.get<std::string>();
                a.label = a.algorithm;
            } else {
                a.algorithm = item.at("algo").get<std::string>();
                a.label = item.value("label", a.algorithm);
                if (item.contains("config")) a.overrides = object_text(item.at("config"), "algorithm config");
            }
            if (!is_known_algorithm(a.algorithm))
                throw ConfigError("unknown algorithm \"" + a.algorithm + "\" (known: nc, nr2cd)");
            if (!labels.insert(a.label).second) throw ConfigError("duplicate algorithm label \"" + a.label + "\"");
            spec.algorithms.push_back(std::move(a));
        }

        spec.repetitions = j.value("repetitions", spec.repetitions);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("config")) spec.overrides = object_text(j.at("config"), "suite config");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed suite spec: ") + e.what());
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    if (spec.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    for (const auto& a : spec.algorithms) algorithm_config(spec, a);
    return spec;
}

SuiteSpec load_suite_spec(const fs::path& path) { return parse_suite_spec(read_text(path)); }

std::string suite_spec_to_json(const SuiteSpec& spec) {
    json j;
    j["instances"] = json::array();
    for (const auto& i : spec.instances)
        j["instances"].push_back({{"id", i.id},
                                  {"network", i.network},
                                  {"dynamics", std::string(to_string(i.kind))},
                                  {"ns", i.sequences},
                                  {"l", i.rounds},
                                  {"seed", i.seed},
                                  {"n", i.nodes}});
    j["algorithms"] = json::array();
    for (const auto& a : spec.algorithms)
        j["algorithms"].push_back({{"label", a.label}, {"algo", a.algorithm}, {"config", json::parse(a.overrides)}});
    j["repetitions"] = spec.repetitions;
    j["seed"] = spec.seed;
    j["config"] = json::parse(spec.overrides);
    return j.dump(2) + "\n";
}

bool is_known_algorithm(std::string_view name) { return name == "nc" || name == "nr2cd"; }

RunResult run_algorithm(std::string_view name, const NrProblem& problem, const NcConfig& cfg) {
    if (name == "nc") return run_network_collaborator(problem, cfg);
    if (name == "nr2cd") return run_nr2cd(problem, cfg);
    throw ConfigError("unknown algorithm \"" + std::string(name) + "\" (known: nc, nr2cd)");
}

Dataset materialize_instance(const InstanceSpec& instance) {
    Network net = load_named_network(instance.network, instance.nodes, instance.seed);
    return make_dataset(instance.id, instance.network, std::move(net), instance.kind, instance.sequences,
                        instance.rounds, splitmix(instance.seed ^ 0xd1b54a32d192ed03ULL));
}

std::uint64_t cell_seed(std::uint64_t base, std::string_view instance, std::string_view algorithm, int repetition) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, instance);
    h = fnv1a(h, std::string_view("\x1f", 1));
    h = fnv1a(h, algorithm);
    return splitmix(splitmix(base) ^ h ^ splitmix(static_cast<std::uint64_t>(repetition) + 1));
}

NcConfig algorithm_config(const SuiteSpec& spec, const AlgorithmSpec& algorithm) {
    NcConfig cfg = apply_config_overrides(NcConfig{}, spec.overrides);
    return apply_config_overrides(cfg, algorithm.overrides);
}

// ---------------------------------------------------------------------------

std::string run_file_name(const InstanceSpec& instance, const AlgorithmSpec& algorithm, int repetition) {
    char rep[16];
    std::snprintf(rep, sizeof rep, "%03d", repetition);
    return instance.id + "__" + algorithm.label + "__" + rep + ".json";
}

namespace {

MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    s.mean = mean(values);
    s.std = sample_std(values);
    s.median = median(values);
    s.values = std::move(values);
    return s;
}

json metric_json(const MetricSummary& m) {
    return {{"mean", m.mean}, {"std", m.std}, {"median", m.median}, {"values", m.values}};
}

std::string mean_std(double mean_value, double std_value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e(%.2e)", mean_value, std_value);
    return buf;
}

}  // namespace

StatReport aggregate_runs(const SuiteSpec& spec, const fs::path& runs_dir, std::vector<CellFailure> failures) {
    StatReport report;
    std::set<std::tuple<std::string, std::string, int>> failed;
    for (const auto& f : failures) failed.emplace(f.instance, f.label, f.repetition);

    for (const auto& inst : spec.instances) {
        InstanceReport ir;
        ir.id = inst.id;
        bool has_truth = false;
        std::vector<std::pair<std::vector<double>, std::vector<double>>> samples;
        std::vector<std::vector<std::optional<double>>> nmis;
        for (const auto& algo : spec.algorithms) {
            std::vector<double> mccs, qs;
            std::vector<std::optional<double>> n;
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                if (failed.count({inst.id, algo.label, rep})) continue;
                const fs::path file = runs_dir / run_file_name(inst, algo, rep);
                try {
                    const RunResult r = run_result_from_json(read_text(file));
                    mccs.push_back(r.mcc);
                    qs.push_back(r.q_star);
                    n.push_back(r.nmi_vs_truth);
                    has_truth = has_truth || r.nmi_vs_truth.has_value();
                } catch (const Error& e) {
                    failures.push_back({inst.id, algo.label, rep, e.what()});
                }
            }
            samples.emplace_back(std::move(mccs), std::move(qs));
            nmis.push_back(std::move(n));
        }
        ir.community_metric = has_truth ? "nmi" : "q";
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
            AlgorithmSummary s;
            s.label = spec.algorithms[a].label;
            s.mcc = summarize(samples[a].first);
            if (has_truth) {
                std::vector<double> v;
                for (const auto& x : nmis[a]) v.push_back(x.value_or(0.0));
                s.community = summarize(std::move(v));
            } else {
                s.community = summarize(samples[a].second);
            }
            ir.algorithms.push_back(std::move(s));
        }
        for (std::size_t a = 0; a < ir.algorithms.size(); ++a)
            for (std::size_t b = a + 1; b < ir.algorithms.size(); ++b)
                for (const char* metric : {"mcc", "community"}) {
                    const bool is_mcc = std::string_view(metric) == "mcc";
                    const auto& ma = is_mcc ? ir.algorithms[a].mcc : ir.algorithms[a].community;
                    const auto& mb = is_mcc ? ir.algorithms[b].mcc : ir.algorithms[b].community;
                    if (ma.values.empty() || mb.values.empty()) continue;
                    Comparison c;
                    c.metric = is_mcc ? "mcc" : ir.community_metric;
                    c.first = ir.algorithms[a].label;
                    c.second = ir.algorithms[b].label;
                    c.p_value = rank_sum_test(ma.values, mb.values);
                    if (c.p_value >= kSignificanceLevel || ma.mean == mb.mean) {
                        c.mark = "tie";
                        ++report.ties;
                    } else if (ma.mean > mb.mean) {
                        c.mark = "win";
                        ++report.wins;
                    } else {
                        c.mark = "loss";
                        ++report.losses;
                    }
                    ir.comparisons.push_back(std::move(c));
                }
        report.instances.push_back(std::move(ir));
    }
    report.failures = std::move(failures);
    std::sort(report.failures.begin(), report.failures.end(), [](const CellFailure& x, const CellFailure& y) {
        return std::tie(x.instance, x.label, x.repetition) < std::tie(y.instance, y.label, y.repetition);
    });
    return report;
}

std::string report_to_json(const StatReport& report) {
    json j;
    j["format"] = "netcollab-report";
    j["significance"] = kSignificanceLevel;
    j["instances"] = json::array();
    for (const auto& ir : report.instances) {
        json inst = {{"id", ir.id}, {"community_metric", ir.community_metric}};
        inst["algorithms"] = json::array();
        for (const auto& a : ir.algorithms)
            inst["algorithms"].push_back(
                {{"label", a.label}, {"mcc", metric_json(a.mcc)}, {ir.community_metric, metric_json(a.community)}});
        inst["comparisons"] = json::array();
        for (const auto& c : ir.comparisons)
            inst["comparisons"].push_back({{"metric", c.metric},
                                           {"first", c.first},
                                           {"second", c.second},
                                           {"p_value", c.p_value},
                                           {"mark", c.mark}});
        j["instances"].push_back(std::move(inst));
    }
    j["totals"] = {{"win", report.wins}, {"tie", report.ties}, {"loss", report.losses}};
    j["failures"] = json::array();
    for (const auto& f : report.failures)
        j["failures"].push_back(
            {{"instance", f.instance}, {"label", f.label}, {"repetition", f.repetition}, {"message", f.message}});
    return j.dump(2) + "\n";
}

std::string report_to_csv(const StatReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "instance,algorithm,metric,runs,mean,std,median,mean_std,reference,p_value,mark\n";
    for (const auto& ir : report.instances) {
        for (std::size_t a = 0; a < ir.algorithms.size(); ++a) {
            const auto& alg = ir.algorithms[a];
            for (const char* metric : {"mcc", "community"}) {
                const bool is_mcc = std::string_view(metric) == "mcc";
                const auto& m = is_mcc ? alg.mcc : alg.community;
                const std::string name = is_mcc ? "mcc" : ir.community_metric;
                out << ir.id << ',' << alg.label << ',' << name << ',' << m.values.size() << ',' << m.mean << ','
                    << m.std << ',' << m.median << ',' << mean_std(m.mean, m.std) << ',';
                // Marks read as the reference algorithm (the first listed) against this one.
                const Comparison* cmp = nullptr;
                if (a > 0)
                    for (const auto& c : ir.comparisons)
                        if (c.metric == name && c.first == ir.algorithms.front().label && c.second == alg.label)
                            cmp = &c;
                if (cmp)
                    out << cmp->first << ',' << cmp->p_value << ',' << cmp->mark;
                else
                    out << ",,";
                out << '\n';
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

namespace {

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int cmd_generate(const SuiteSpec& spec, const fs::path& out_dir) {
    return guarded([&] {
        fs::create_directories(out_dir);
        for (const auto& inst : spec.instances) save_dataset(materialize_instance(inst), out_dir / (inst.id + ".json"));
        return kExitOk;
    });
}

int cmd_run(const fs::path& dataset, std::string_view algorithm, const NcConfig& cfg, const fs::path& out_file) {
    return guarded([&] {
        if (!is_known_algorithm(algorithm))
            throw ConfigError("unknown algorithm \"" + std::string(algorithm) + "\" (known: nc, nr2cd)");
        if (algorithm == "nc") cfg.validate_collaborator();
        else cfg.validate_baseline();
        const Dataset ds = load_dataset(dataset);
        const RunResult result = run_algorithm(algorithm, ds.problem(), cfg);
        write_text(out_file, run_result_to_json(result));
        fs::path trace = out_file;
        trace.replace_extension(".trace.csv");
        write_text(trace, trace_to_csv(result));
        return kExitOk;
    });
}

int cmd_suite(const SuiteSpec& spec, const fs::path& out_dir, int parallelism) {
    return guarded([&]() -> int {
        if (spec.repetitions < 1) throw ConfigError("repetitions must be at least 1");
        if (parallelism < 1) throw ConfigError("--parallel must be at least 1");
        for (const auto& a : spec.algorithms) {
            const NcConfig cfg = algorithm_config(spec, a);
            if (a.algorithm == "nc") cfg.validate_collaborator();
            else cfg.validate_baseline();
        }
        write_text(out_dir / "suite.json", suite_spec_to_json(spec));

        fs::create_directories(out_dir / "datasets");
        std::vector<Dataset> datasets;
        datasets.reserve(spec.instances.size());
        for (const auto& inst : spec.instances) {
            datasets.push_back(materialize_instance(inst));
            save_dataset(datasets.back(), out_dir / "datasets" / (inst.id + ".json"));
        }
        std::vector<NrProblem> problems;
        for (const auto& ds : datasets) problems.push_back(ds.problem());

        struct Cell {
            std::size_t instance, algorithm;
            int repetition;
        };
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < spec.instances.size(); ++i)
            for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
                for (int r = 0; r < spec.repetitions; ++r) cells.push_back({i, a, r});

        const fs::path runs_dir = out_dir / "runs";
        std::vector<CellFailure> failures;
        std::mutex failure_mutex;
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k = next++; k < cells.size(); k = next++) {
                const Cell& c = cells[k];
                const auto& inst = spec.instances[c.instance];
                const auto& algo = spec.algorithms[c.algorithm];
                try {
                    NcConfig cfg = algorithm_config(spec, algo);
                    cfg.seed = cell_seed(spec.seed, inst.id, algo.label, c.repetition);
                    const RunResult r = run_algorithm(algo.algorithm, problems[c.instance], cfg);
                    write_text(runs_dir / run_file_name(inst, algo, c.repetition), run_result_to_json(r));
                } catch (const std::exception& e) {
                    std::lock_guard lock(failure_mutex);
                    failures.push_back({inst.id, algo.label, c.repetition, e.what()});
                }
            }
        };
        const int threads = std::min<int>(parallelism, static_cast<int>(cells.size()));
        std::vector<std::thread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        const StatReport report = aggregate_runs(spec, runs_dir, std::move(failures));
        write_text(out_dir / "report.json", report_to_json(report));
        write_text(out_dir / "report.csv", report_to_csv(report));
        for (const auto& f : report.failures)
            std::cerr << "cell " << f.instance << "/" << f.label << "/" << f.repetition << " failed: " << f.message
                      << "\n";
        return report.failures.empty() ? kExitOk : kExitPartial;
    });
}

int cmd_stats(const fs::path& out_dir) {
    return guarded([&]() -> int {
        const SuiteSpec spec = load_suite_spec(out_dir / "suite.json");
        const StatReport report = aggregate_runs(spec, out_dir / "runs");
        write_text(out_dir / "report.json", report_to_json(report));
        write_text(out_dir / "report.csv", report_to_csv(report));
        return report.failures.empty() ? kExitOk : kExitPartial;
    });
}

}  // namespace netcollab
