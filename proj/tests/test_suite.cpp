#include "doctest.h"

#include "netcollab/stats.hpp"
#include "netcollab/suite.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace netcollab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kSmallSuite = R"({
  "instances": [
    {"id": "EGz", "network": "ZK", "dynamics": "EG", "ns": 2, "l": 10, "seed": 4},
    {"id": "RNb", "network": "BA", "dynamics": "RN", "ns": 2, "l": 10, "seed": 2, "n": 20}
  ],
  "algorithms": ["nc", "nr2cd"],
  "repetitions": 3,
  "seed": 11,
  "config": {"n1": 20, "n2": 20, "tfe1": 2000, "tfe2": 2000, "t1": 100, "alpha": 10}
})";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "netcollab_test_suite" / name;
    fs::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("NETCOLLAB_CLI");
    REQUIRE(cli != nullptr);
    const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("suite spec parsing") {
    const SuiteSpec spec = parse_suite_spec(kSmallSuite);
    CHECK(spec.instances.size() == 2);
    CHECK(spec.instances[1].kind == DynamicsKind::ResistorNetwork);
    CHECK(spec.instances[1].nodes == 20);
    CHECK(spec.algorithms.size() == 2);
    CHECK(algorithm_config(spec, spec.algorithms[0]).tfe1 == 2000);
    CHECK(parse_suite_spec(suite_spec_to_json(spec)).repetitions == 3);
    CHECK(suite_spec_to_json(parse_suite_spec(suite_spec_to_json(spec))) == suite_spec_to_json(spec));

    const auto bad = [](const std::string& text) { CHECK_THROWS_AS(parse_suite_spec(text), ConfigError); };
    bad(R"({"instances": [{"network": "ZK"}], "repetitions": 0})");
    bad(R"({"instances": [{"network": "ZK"}], "algorithms": ["spea2"]})");
    bad(R"({"instances": []})");
    bad(R"({"instances": [{"network": "ZK"}], "reps": 3})");
    bad(R"({"instances": [{"network": "ZK"}, {"network": "ZK"}]})");
    bad(R"({"instances": [{"network": "ZK"}], "config": {"lambda": "half"}})");
    bad("not json");

    const SuiteSpec sweep = parse_suite_spec(
        R"({"instances": [{"network": "ZK"}], "algorithms": [{"label": "nc-l3", "algo": "nc", "config": {"lambda": 0.3}}, "nr2cd"]})");
    CHECK(algorithm_config(sweep, sweep.algorithms[0]).lambda == 0.3);
    CHECK(sweep.repetitions == 20);
}

TEST_CASE("unknown networks surface as configuration errors") {
    SuiteSpec spec = parse_suite_spec(R"({"instances": [{"network": "lesmis"}]})");
    CHECK_THROWS_AS(materialize_instance(spec.instances[0]), ConfigError);
    CHECK(cmd_generate(spec, fresh_dir("unknown")) == kExitConfig);
}

TEST_CASE("cell seeds") {
    CHECK(cell_seed(1, "EG1", "nc", 0) == cell_seed(1, "EG1", "nc", 0));
    CHECK(cell_seed(1, "EG1", "nc", 0) != cell_seed(1, "EG1", "nc", 1));
    CHECK(cell_seed(1, "EG1", "nc", 0) != cell_seed(1, "EG1", "nr2cd", 0));
    CHECK(cell_seed(1, "EG1", "nc", 0) != cell_seed(2, "EG1", "nc", 0));
    CHECK(cell_seed(1, "EG1", "nc", 0) != cell_seed(1, "EG2", "nc", 0));
    CHECK(cell_seed(1, "a", "bc", 0) != cell_seed(1, "ab", "c", 0));
}

TEST_CASE("generated datasets are reproducible") {
    const SuiteSpec spec = parse_suite_spec(kSmallSuite);
    const fs::path a = fresh_dir("gen-a"), b = fresh_dir("gen-b");
    REQUIRE(cmd_generate(spec, a) == kExitOk);
    REQUIRE(cmd_generate(spec, b) == kExitOk);
    for (const auto& inst : spec.instances) CHECK(slurp(a / (inst.id + ".json")) == slurp(b / (inst.id + ".json")));
}

TEST_CASE("a small suite end to end") {
    const SuiteSpec spec = parse_suite_spec(kSmallSuite);
    const fs::path out = fresh_dir("run-a");
    REQUIRE(cmd_suite(spec, out, 2) == kExitOk);

    int files = 0;
    for (const auto& e : fs::directory_iterator(out / "runs")) files += e.path().extension() == ".json";
    CHECK(files == 2 * 2 * 3);

    const std::string report = slurp(out / "report.json");
    const fs::path again = fresh_dir("run-b");
    REQUIRE(cmd_suite(spec, again, 1) == kExitOk);
    CHECK(slurp(again / "report.json") == report);
    CHECK(slurp(again / "report.csv") == slurp(out / "report.csv"));

    SUBCASE("report statistics match the run files") {
        const json r = json::parse(report);
        int comparisons = 0;
        for (const auto& inst : r.at("instances")) {
            const std::string id = inst.at("id");
            const std::string metric = inst.at("community_metric");
            CHECK(metric == (id == "EGz" ? "nmi" : "q"));
            for (const auto& alg : inst.at("algorithms")) {
                const std::string label = alg.at("label");
                std::vector<double> m, c;
                for (int rep = 0; rep < 3; ++rep) {
                    char name[64];
                    std::snprintf(name, sizeof name, "%s__%s__%03d.json", id.c_str(), label.c_str(), rep);
                    const json run = json::parse(slurp(out / "runs" / name));
                    m.push_back(run.at("metrics").at("mcc"));
                    c.push_back(run.at("metrics").at(metric == "nmi" ? "nmi" : "q"));
                }
                CHECK(std::abs(alg.at("mcc").at("mean").get<double>() - mean(m)) <= 1e-12);
                CHECK(std::abs(alg.at("mcc").at("std").get<double>() - sample_std(m)) <= 1e-12);
                CHECK(std::abs(alg.at(metric).at("mean").get<double>() - mean(c)) <= 1e-12);
                CHECK(std::abs(alg.at(metric).at("std").get<double>() - sample_std(c)) <= 1e-12);
            }
            for (const auto& cmp : inst.at("comparisons")) {
                ++comparisons;
                const double p = cmp.at("p_value");
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
                if (p >= kSignificanceLevel) CHECK(cmp.at("mark") == "tie");
            }
        }
        const auto& totals = r.at("totals");
        CHECK(totals.at("win").get<int>() + totals.at("tie").get<int>() + totals.at("loss").get<int>() == comparisons);
    }

    SUBCASE("stats recomputes the same report") {
        fs::remove(out / "report.json");
        CHECK(cmd_stats(out) == kExitOk);
        CHECK(slurp(out / "report.json") == report);
    }

    SUBCASE("a missing run file is a partial failure") {
        fs::remove(out / "runs" / "EGz__nc__001.json");
        CHECK(cmd_stats(out) == kExitPartial);
        const json r = json::parse(slurp(out / "report.json"));
        CHECK(r.at("failures").size() == 1);
        CHECK(r.at("instances")[0].at("algorithms")[0].at("mcc").at("values").size() == 2);
    }
}

TEST_CASE("marks follow the p-values") {
    SuiteSpec spec = parse_suite_spec(R"({"instances": [{"id": "x", "network": "ZK"}], "repetitions": 8})");
    const fs::path runs = fresh_dir("marks") / "runs";
    fs::create_directories(runs);
    RunResult r;
    r.x_star = Genome::Zero(4);
    r.x_star_objectives = ObjectiveVector::Zero(2);
    r.c_star = CommunityPartition::Zero(2);
    for (int rep = 0; rep < 8; ++rep) {
        r.algorithm = "nc";
        r.mcc = 0.9 + 0.001 * rep;
        r.nmi_vs_truth = 0.5 + 0.001 * rep;
        std::ofstream(runs / run_file_name(spec.instances[0], spec.algorithms[0], rep)) << run_result_to_json(r);
        r.algorithm = "nr2cd";
        r.mcc = 0.1 + 0.001 * rep;
        r.nmi_vs_truth = 0.5 + 0.001 * (7 - rep);
        std::ofstream(runs / run_file_name(spec.instances[0], spec.algorithms[1], rep)) << run_result_to_json(r);
    }
    const StatReport report = aggregate_runs(spec, runs);
    REQUIRE(report.instances.size() == 1);
    const auto& cmps = report.instances[0].comparisons;
    REQUIRE(cmps.size() == 2);
    CHECK(cmps[0].metric == "mcc");
    CHECK(cmps[0].p_value < kSignificanceLevel);
    CHECK(cmps[0].mark == "win");
    CHECK(cmps[1].metric == "nmi");
    CHECK(cmps[1].mark == "tie");
    CHECK(report.wins == 1);
    CHECK(report.ties == 1);
    const std::string csv = report_to_csv(report);
    CHECK(csv.find("x,nr2cd,mcc,8,") != std::string::npos);
    CHECK(csv.find(",nc,") != std::string::npos);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = fresh_dir("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"instances": [{"network": "ZK"}], "algorithms": ["spea2"]})";
    std::ofstream(dir / "ok.json") << R"({"instances": [{"id": "EGz", "network": "ZK", "ns": 2}]})";

    CHECK(run_cli("suite --spec " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == kExitConfig);
    CHECK(run_cli("suite --spec " + (dir / "ok.json").string() + " --out " + (dir / "o").string() + " --reps 0") ==
          kExitConfig);
    CHECK(run_cli("run --dataset " + (dir / "missing.json").string() + " --out " + (dir / "r.json").string() +
                  " --algo nr2cd") == kExitIo);
    CHECK(run_cli("bogus") == kExitConfig);

    REQUIRE(run_cli("generate --spec " + (dir / "ok.json").string() + " --out " + (dir / "data").string()) == kExitOk);
    CHECK(fs::exists(dir / "data" / "EGz.json"));
    std::ofstream(dir / "cfg.json") << R"({"n1": 20, "n2": 20, "tfe1": 1000, "tfe2": 1000})";
    CHECK(run_cli("run --dataset " + (dir / "data" / "EGz.json").string() + " --algo spea2 --out " +
                  (dir / "r.json").string()) == kExitConfig);
    CHECK(run_cli("run --dataset " + (dir / "data" / "EGz.json").string() + " --algo nr2cd --config " +
                  (dir / "cfg.json").string() + " --seed 5 --out " + (dir / "r.json").string()) == kExitOk);
    const RunResult r = run_result_from_json(slurp(dir / "r.json"));
    CHECK(r.seed == 5);
    CHECK(r.fe1 == 1000);
    CHECK(fs::exists(dir / "r.trace.csv"));
}
