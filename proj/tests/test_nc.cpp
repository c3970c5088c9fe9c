#include "doctest.h"

#include "netcollab/nc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace netcollab;

namespace {

NrProblem zk_problem(int sequences = 5) {
    const Network zk = load_named_network("ZK", 0, 0);
    return build_eg_problem(simulate_eg(zk, sequences, 10, 1), zk);
}

NrIndividual member(double h, double g) {
    NrIndividual m;
    m.genome = Genome::Zero(4);
    m.objectives = ObjectiveVector(2);
    m.objectives << h, g;
    return m;
}

NcConfig small_config() {
    NcConfig cfg;
    cfg.n1 = 20;
    cfg.n2 = 20;
    cfg.tfe1 = 4000;
    cfg.tfe2 = 4000;
    cfg.t1 = 200;
    cfg.alpha = 10;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("budget arithmetic with the default parameters") {
    const NcConfig cfg;
    CHECK(cfg.pre_nr_budget() == 100000);
    CHECK(cfg.normal_nr_budget() == 100000);
    CHECK(cfg.cd_steps() == 48);  // ceil(100000 / 2100)
    CHECK(cfg.cd_step_budget() == 2083);  // floor(100000 / 48)
    CHECK_NOTHROW(cfg.validate_collaborator());
    CHECK_NOTHROW(cfg.validate_baseline());
}

TEST_CASE("configuration validation") {
    NcConfig cfg;
    cfg.lambda = 1.0;
    CHECK_THROWS_AS(cfg.validate_collaborator(), ConfigError);
    cfg = NcConfig{};
    cfg.tfe2 = 150;
    CHECK_THROWS_AS(cfg.validate_collaborator(), ConfigError);
    cfg = NcConfig{};
    cfg.tfe1 = 150;
    CHECK_THROWS_AS(cfg.validate_collaborator(), ConfigError);
    CHECK_NOTHROW(cfg.validate_baseline());
    cfg.tfe1 = 50;
    CHECK_THROWS_AS(cfg.validate_baseline(), ConfigError);
    cfg = NcConfig{};
    cfg.pmu = 1.5;
    CHECK_THROWS_AS(cfg.validate_baseline(), ConfigError);
}

TEST_CASE("configuration overrides") {
    const NcConfig cfg = apply_config_overrides(NcConfig{}, R"({"tfe1": 20000, "lambda": 0.3, "pm": 0.01})");
    CHECK(cfg.tfe1 == 20000);
    CHECK(cfg.lambda == 0.3);
    REQUIRE(cfg.pm.has_value());
    CHECK(*cfg.pm == 0.01);
    CHECK(cfg.n1 == 100);
    CHECK_THROWS_WITH_AS(apply_config_overrides(NcConfig{}, R"({"popsize": 3})"), doctest::Contains("popsize"),
                         ConfigError);
    CHECK_THROWS_AS(apply_config_overrides(NcConfig{}, R"({"n1": "many"})"), ConfigError);
    CHECK_THROWS_AS(apply_config_overrides(NcConfig{}, "[1, 2]"), ConfigError);

    const NcConfig round = apply_config_overrides(NcConfig{}, config_to_json(cfg));
    CHECK(config_to_json(round) == config_to_json(cfg));
}

TEST_CASE("representative selection") {
    Rng rng(1);
    NrPopulation single;
    single.members = {member(1, 1), member(2, 2)};
    for (int t = 0; t < 20; ++t) CHECK(select_representative(single, rng).objectives[0] == 1.0);

    NrPopulation pair;
    pair.members = {member(0, 3), member(3, 0)};
    int first = 0;
    for (int t = 0; t < 2000; ++t) first += select_representative(pair, rng).objectives[0] == 0.0;
    CHECK(first > 900);
    CHECK(first < 1100);

    NrPopulation three;
    three.members = {member(0, 4), member(1, 2), member(4, 0)};
    std::map<double, int> hits;
    for (int t = 0; t < 4000; ++t) ++hits[select_representative(three, rng).objectives[0]];
    CHECK(hits[1.0] == 0);
    CHECK(hits[0.0] > 1850);
    CHECK(hits[4.0] > 1850);

    CHECK_THROWS_AS(select_representative(NrPopulation{}, rng), StateError);
}

TEST_CASE("transfer masks") {
    CommunityPartition c(5);
    c << 0, 1, 0, 1, 0;
    const auto within = within_community_mask(c, 0);
    CHECK(within.size() == 6);  // ordered pairs inside {0, 2, 4}
    for (auto p : within) {
        CHECK(c[p / 5] == 0);
        CHECK(c[p % 5] == 0);
        CHECK(p / 5 != p % 5);
    }
    const auto between = between_community_mask(c);
    CHECK(between.size() == 12);
    for (auto p : between) CHECK(c[p / 5] != c[p % 5]);
}

TEST_CASE("perturbed copies flip masked bits at the requested rate") {
    Rng rng(2);
    const Genome base = Genome::Zero(400);
    CommunityPartition c = CommunityPartition::Zero(20);
    const auto mask = within_community_mask(c, 0);
    const auto copies = perturbed_copies(base, mask, 50, 0.8, rng);
    double flipped = 0.0;
    for (const auto& g : copies) {
        flipped += g.cast<double>().sum();
        for (int i = 0; i < 20; ++i) CHECK(g[i * 20 + i] == 0);
    }
    CHECK(flipped / (50.0 * mask.size()) == doctest::Approx(0.8).epsilon(0.03));
}

TEST_CASE("knowledge transfer") {
    const NrProblem prob = zk_problem();
    const CommunityPartition truth = *prob.truth.truth_partition();
    Rng rng(5);
    NrPopulation pop = random_nr_population(prob, 20, initial_link_density(34), rng);

    SUBCASE("genomes differ from the representative only inside one mask") {
        TransferReport rep;
        const NrPopulation before = pop;
        const NrPopulation after = knowledge_transfer_cd_to_nr(pop, truth, 10, 200, prob, 20, 100000, rng, {}, &rep);
        CHECK(after.size() == 20);
        CHECK(after.fe_used == before.fe_used + rep.evaluations);
        CHECK(rep.evaluations == rep.within.fe_used + rep.between.fe_used);
        CHECK(rep.evaluations <= 2 * 200);

        const std::set<Eigen::Index> in(rep.within_mask.begin(), rep.within_mask.end());
        const std::set<Eigen::Index> out(rep.between_mask.begin(), rep.between_mask.end());
        auto confined = [&](const Genome& g, const std::set<Eigen::Index>& allowed) {
            for (Eigen::Index p = 0; p < g.size(); ++p)
                if (g[p] != rep.representative[p] && !allowed.count(p)) return false;
            return true;
        };
        for (const auto& m : rep.within.members) CHECK(confined(m.genome, in));
        for (const auto& m : rep.between.members) CHECK(confined(m.genome, out));

        std::set<std::vector<std::uint8_t>> old;
        for (const auto& m : before.members) old.insert({m.genome.data(), m.genome.data() + m.genome.size()});
        for (const auto& m : after.members) {
            if (old.count({m.genome.data(), m.genome.data() + m.genome.size()})) continue;
            CHECK((confined(m.genome, in) || confined(m.genome, out)));
        }
    }
    SUBCASE("alpha zero is plain survival") {
        const NrPopulation after = knowledge_transfer_cd_to_nr(pop, truth, 0, 0, prob, 20, 100000, rng);
        CHECK(after.fe_used == pop.fe_used);
        CHECK(after.size() == pop.size());
    }
    SUBCASE("the evaluation limit caps both local searches") {
        const long limit = pop.fe_used + 150;
        const NrPopulation after = knowledge_transfer_cd_to_nr(pop, truth, 10, 200, prob, 20, limit, rng);
        CHECK(after.fe_used == limit);
    }
    SUBCASE("partition size must match") {
        CHECK_THROWS_AS(knowledge_transfer_cd_to_nr(pop, CommunityPartition::Zero(5), 10, 200, prob, 20, 1000, rng),
                        DimensionError);
    }
}

TEST_CASE("collaborator run respects its budgets") {
    const NrProblem prob = zk_problem();
    const NcConfig cfg = small_config();
    const RunResult r = run_network_collaborator(prob, cfg);
    CHECK(r.cd_steps == cfg.cd_steps());
    CHECK(r.fe1 == cfg.tfe1);
    CHECK(r.fe2 <= cfg.tfe2);
    long fe1 = 0, fe2 = 0;
    int steps = 0;
    for (const auto& t : r.trace) {
        CHECK(t.fe1 >= fe1);
        CHECK(t.fe2 >= fe2);
        CHECK(t.fe1 <= cfg.tfe1);
        CHECK(t.fe2 <= cfg.tfe2);
        fe1 = t.fe1;
        fe2 = t.fe2;
        steps += t.modularity.has_value();
    }
    CHECK(steps == r.cd_steps);
    CHECK(r.c_star.size() == 34);
    CHECK(r.nmi_vs_truth.has_value());
    CHECK(r.mcc == doctest::Approx(mcc(r.x_star, prob.truth)));
}

TEST_CASE("runs are deterministic and serialize losslessly") {
    const NrProblem prob = zk_problem();
    const NcConfig cfg = small_config();
    const std::string a = run_result_to_json(run_network_collaborator(prob, cfg));
    CHECK(a == run_result_to_json(run_network_collaborator(prob, cfg)));
    CHECK(run_result_to_json(run_result_from_json(a)) == a);

    const RunResult base = run_nr2cd(prob, cfg);
    CHECK(run_result_to_json(base) == run_result_to_json(run_nr2cd(prob, cfg)));
    CHECK(base.fe1 == cfg.tfe1);
    CHECK(base.fe2 == cfg.tfe2);
    CHECK(base.cd_steps == 0);
    for (const auto& t : base.trace) {
        CHECK_FALSE(t.modularity.has_value());
        CHECK_FALSE(t.within_survivors.has_value());
    }
    const std::string csv = trace_to_csv(base);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(base.trace.size()) + 1);
}

TEST_CASE("baseline with the smallest CD budget") {
    const NrProblem prob = zk_problem();
    NcConfig cfg = small_config();
    cfg.tfe2 = cfg.n2;
    const RunResult r = run_nr2cd(prob, cfg);
    CHECK(r.fe2 == cfg.n2);
}
