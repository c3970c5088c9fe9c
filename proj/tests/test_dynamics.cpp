#include "doctest.h"

#include "netcollab/dynamics.hpp"
#include "netcollab/objectives.hpp"

#include <cmath>
#include <numbers>

using namespace netcollab;

namespace {

Network path3() { return Network::from_edges(3, {{0, 1}, {1, 2}}); }

// Payoff of one pairing: cooperator meets cooperator 1, defector meets cooperator 1.2, else 0.
double pair_payoff(bool me_cooperates, bool other_cooperates) {
    if (!other_cooperates) return 0.0;
    return me_cooperates ? 1.0 : 1.2;
}

}  // namespace

TEST_CASE("fermi rule") {
    CHECK(fermi_adoption_probability(1.0, 1.0) == doctest::Approx(0.5));
    CHECK(fermi_adoption_probability(0.0, 1.0) > 0.99);
    CHECK(fermi_adoption_probability(1.0, 0.0) < 0.01);
    CHECK(fermi_adoption_probability(0.0, 0.1) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("EG payoffs follow the pairwise rule") {
    const Network net = load_named_network("ZK", 0, 0);
    const EgData d = simulate_eg(net, 3, 8, 11);
    REQUIRE(d.cooperates.rows() == 24);
    const auto nbrs = net.neighbor_lists();
    for (Eigen::Index r = 0; r < d.cooperates.rows(); ++r)
        for (int i = 0; i < net.size(); ++i) {
            double y = 0.0;
            for (int j : nbrs[i]) y += pair_payoff(d.cooperates(r, i), d.cooperates(r, j));
            CHECK(d.payoffs(r, i) == doctest::Approx(y).epsilon(1e-12));
        }
}

TEST_CASE("EG strategies only change by imitating a neighbour") {
    const Network net = load_named_network("ZK", 0, 0);
    const EgData d = simulate_eg(net, 4, 10, 3);
    const auto nbrs = net.neighbor_lists();
    for (int s = 0; s < 4; ++s)
        for (int t = 1; t < 10; ++t)
            for (int i = 0; i < net.size(); ++i) {
                const int row = s * 10 + t;
                if (d.cooperates(row, i) == d.cooperates(row - 1, i)) continue;
                bool some_neighbour_had_it = false;
                for (int j : nbrs[i]) some_neighbour_had_it |= d.cooperates(row - 1, j) == d.cooperates(row, i);
                CHECK(some_neighbour_had_it);
            }
}

TEST_CASE("EG design matrix and exact recovery") {
    const Network net = load_named_network("ZK", 0, 0);
    const EgData d = simulate_eg(net, 5, 10, 1);
    const NrProblem prob = build_eg_problem(d, net);
    REQUIRE(prob.size() == 34);
    CHECK(prob.design[0].rows() == 50);
    CHECK(prob.design[0].cols() == 34);
    for (int i = 0; i < 34; i += 7)
        for (Eigen::Index r = 0; r < 50; ++r)
            for (int j = 0; j < 34; ++j)
                CHECK(prob.design[i](r, j) == pair_payoff(d.cooperates(r, i), d.cooperates(r, j)));
    const ObjectiveVector f = nr_objectives(prob, genome_from_adjacency(net.adjacency()));
    CHECK(f[0] < 1e-9);
    CHECK(f[1] == 156.0);
}

TEST_CASE("RN currents on a three-node path") {
    const Network net = path3();
    const RnData d = simulate_rn(net, 2, 6, 5);
    for (Eigen::Index r = 0; r < d.voltages.rows(); ++r) {
        const double v0 = d.voltages(r, 0), v1 = d.voltages(r, 1), v2 = d.voltages(r, 2);
        CHECK(d.currents(r, 0) == doctest::Approx(v0 - v1));
        CHECK(d.currents(r, 1) == doctest::Approx(2 * v1 - v0 - v2));
        CHECK(d.currents(r, 2) == doctest::Approx(v2 - v1));
    }
    const double horizon = 10.0 * 2.0 * std::numbers::pi / 1000.0;
    for (int s = 0; s < 2; ++s) {
        for (int k = 0; k < 6; ++k) {
            const double t = d.times(s, k);
            CHECK(t >= 0.0);
            CHECK(t <= horizon);
            if (k > 0) CHECK(t >= d.times(s, k - 1));
            for (int i = 0; i < 3; ++i)
                CHECK(d.voltages(s * 6 + k, i) ==
                      doctest::Approx(std::sin((1000.0 + d.perturbations(s, i)) * t)));
        }
        for (int i = 0; i < 3; ++i) {
            CHECK(d.perturbations(s, i) >= 0.0);
            CHECK(d.perturbations(s, i) <= 20.0);
        }
    }
    const NrProblem prob = build_rn_problem(d, net);
    CHECK(prob.design[1](0, 0) == doctest::Approx(d.voltages(0, 1) - d.voltages(0, 0)));
    CHECK(prob.design[1](0, 1) == 0.0);
}

TEST_CASE("RN exact recovery on synthetic networks") {
    for (const char* name : {"BA", "ER", "NW", "WS"}) {
        const Network net = load_named_network(name, 50, 2);
        const NrProblem prob = build_rn_problem(simulate_rn(net, 20, 10, 4), net);
        CHECK(nr_objectives(prob, genome_from_adjacency(net.adjacency()))[0] < 1e-9);
    }
}

TEST_CASE("datasets round-trip through JSON") {
    const Dataset eg = make_dataset("EG1", "ZK", load_named_network("ZK", 0, 0), DynamicsKind::EvolutionaryGame, 5, 10, 1);
    const std::string text = dataset_to_json(eg);
    CHECK(text.find("\"design_shape\":[50,34]") != std::string::npos);
    const Dataset back = dataset_from_json(text);
    CHECK(dataset_to_json(back) == text);
    CHECK(back.network.truth_partition().has_value());
    CHECK(std::get<EgData>(back.data).payoffs == std::get<EgData>(eg.data).payoffs);

    const Dataset rn = make_dataset("RN9", "BA", load_named_network("BA", 50, 1), DynamicsKind::ResistorNetwork, 20, 10, 1);
    const std::string rn_text = dataset_to_json(rn);
    CHECK(rn_text.find("truth_partition") == std::string::npos);
    const Dataset rn_back = dataset_from_json(rn_text);
    CHECK(dataset_to_json(rn_back) == rn_text);
    const NrProblem p1 = rn.problem(), p2 = rn_back.problem();
    CHECK(p1.design[3] == p2.design[3]);
}

TEST_CASE("simulation is reproducible from the seed") {
    const Network net = load_named_network("ZK", 0, 0);
    CHECK(simulate_eg(net, 2, 10, 7).cooperates == simulate_eg(net, 2, 10, 7).cooperates);
    CHECK(simulate_rn(net, 2, 10, 7).currents == simulate_rn(net, 2, 10, 7).currents);
    CHECK(simulate_eg(net, 2, 10, 7).cooperates != simulate_eg(net, 2, 10, 8).cooperates);
}

TEST_CASE("dynamics argument checks") {
    CHECK(parse_dynamics_kind("rn") == DynamicsKind::ResistorNetwork);
    CHECK_THROWS_AS(parse_dynamics_kind("SIS"), ConfigError);
    CHECK_THROWS_AS(simulate_eg(path3(), 0, 10, 1), DomainError);
    CHECK_THROWS_AS(dataset_from_json("{\"format\":\"other\"}"), ParseError);
}
