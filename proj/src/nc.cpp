#include "netcollab/nc.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>

namespace netcollab {

using nlohmann::json;

long NcConfig::pre_nr_budget() const {
    return static_cast<long>(std::llround((1.0 - lambda) * static_cast<double>(tfe1)));
}

long NcConfig::pre_cd_budget() const {
    return static_cast<long>(std::llround((1.0 - lambda) * static_cast<double>(tfe2)));
}

long NcConfig::cd_steps() const {
    const long per_generation = n1 + 2 * t1;
    if (per_generation <= 0) return 0;
    return (normal_nr_budget() + per_generation - 1) / per_generation;
}

long NcConfig::cd_step_budget() const {
    const long steps = cd_steps();
    return steps > 0 ? normal_cd_budget() / steps : 0;
}

namespace {

void check_rate(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

void check_common(const NcConfig& cfg) {
    if (cfg.n1 < 1 || cfg.n2 < 1) throw ConfigError("population sizes n1 and n2 must be positive");
    if (cfg.alpha < 0 || cfg.t1 < 0) throw ConfigError("alpha and t1 must be non-negative");
    check_rate(cfg.pc, "pc");
    if (cfg.pm) check_rate(*cfg.pm, "pm");
    check_rate(cfg.pmu, "pmu");
    check_rate(cfg.pmi, "pmi");
    check_rate(cfg.pmu_mi, "pmu_mi");
}

}  // namespace

void NcConfig::validate_collaborator() const {
    check_common(*this);
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must lie strictly between 0 and 1");
    if (pre_nr_budget() < n1)
        throw ConfigError("NR pre-optimization budget " + std::to_string(pre_nr_budget()) +
                          " is below one population (" + std::to_string(n1) + ")");
    if (normal_nr_budget() < n1)
        throw ConfigError("NR normal-stage budget " + std::to_string(normal_nr_budget()) +
                          " is below one generation (" + std::to_string(n1) + ")");
    if (pre_cd_budget() < n2)
        throw ConfigError("CD pre-optimization budget " + std::to_string(pre_cd_budget()) +
                          " is below one population (" + std::to_string(n2) + ")");
    if (cd_step_budget() < n2)
        throw ConfigError("per-step CD budget t2 = " + std::to_string(cd_step_budget()) +
                          " is below the CD population size " + std::to_string(n2));
}

void NcConfig::validate_baseline() const {
    check_common(*this);
    if (tfe1 < n1) throw ConfigError("tfe1 must cover at least one NR population");
    if (tfe2 < n2) throw ConfigError("tfe2 must cover at least one CD population");
}

NcConfig apply_config_overrides(NcConfig cfg, std::string_view json_object) {
    json j;
    try {
        j = json::parse(json_object);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n1") cfg.n1 = value.get<int>();
            else if (key == "n2") cfg.n2 = value.get<int>();
            else if (key == "tfe1") cfg.tfe1 = value.get<long>();
            else if (key == "tfe2") cfg.tfe2 = value.get<long>();
            else if (key == "lambda") cfg.lambda = value.get<double>();
            else if (key == "t1") cfg.t1 = value.get<long>();
            else if (key == "alpha") cfg.alpha = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "pc") cfg.pc = value.get<double>();
            else if (key == "pm") cfg.pm = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "pmu") cfg.pmu = value.get<double>();
            else if (key == "pmi") cfg.pmi = value.get<double>();
            else if (key == "pmu_mi") cfg.pmu_mi = value.get<double>();
            else throw ConfigError("unknown configuration key \"" + key + "\"");
        }
    } catch (const json::type_error& e) {
        throw ConfigError(std::string("configuration value has the wrong type: ") + e.what());
    }
    return cfg;
}

namespace {

json config_json(const NcConfig& cfg) {
    json j;
    j["n1"] = cfg.n1;
    j["n2"] = cfg.n2;
    j["tfe1"] = cfg.tfe1;
    j["tfe2"] = cfg.tfe2;
    j["lambda"] = cfg.lambda;
    j["t1"] = cfg.t1;
    j["alpha"] = cfg.alpha;
    j["seed"] = cfg.seed;
    j["pc"] = cfg.pc;
    j["pm"] = cfg.pm ? json(*cfg.pm) : json(nullptr);
    j["pmu"] = cfg.pmu;
    j["pmi"] = cfg.pmi;
    j["pmu_mi"] = cfg.pmu_mi;
    return j;
}

}  // namespace

std::string config_to_json(const NcConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------

const NrIndividual& select_representative(const NrPopulation& pop, Rng& rng) {
    if (pop.empty()) throw StateError("cannot select a representative from an empty population");
    const auto objs = objectives_of(pop.members);
    const Fronts fronts = fast_nondominated_sort(objs);
    const auto& first = fronts.front();

    std::vector<int> candidates;
    if (first.size() > 2) {
        std::vector<ObjectiveVector> front_objs;
        for (int idx : first) front_objs.push_back(objs[idx]);
        const auto cd = crowding_distance(front_objs);
        const double best = *std::max_element(cd.begin(), cd.end());
        for (std::size_t k = 0; k < first.size(); ++k)
            if (cd[k] == best) candidates.push_back(first[k]);
    } else {
        candidates = first;
    }
    const int pick = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    return pop.members[pick];
}

std::vector<Eigen::Index> within_community_mask(const CommunityPartition& partition, int label) {
    const Eigen::Index n = partition.size();
    std::vector<Eigen::Index> mask;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (partition[i] != label) continue;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i && partition[j] == label) mask.push_back(i * n + j);
    }
    return mask;
}

std::vector<Eigen::Index> between_community_mask(const CommunityPartition& partition) {
    const Eigen::Index n = partition.size();
    std::vector<Eigen::Index> mask;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (partition[i] != partition[j]) mask.push_back(i * n + j);
    return mask;
}

std::vector<Genome> perturbed_copies(const Genome& base, std::span<const Eigen::Index> mask, int count,
                                     double flip_probability, Rng& rng) {
    std::vector<Genome> out;
    out.reserve(std::max(count, 0));
    std::bernoulli_distribution flip(flip_probability);
    for (int k = 0; k < count; ++k) {
        Genome g = base;
        for (auto p : mask)
            if (flip(rng)) g[p] ^= 1;
        out.push_back(std::move(g));
    }
    return out;
}

NrPopulation masked_local_search(const Genome& base, std::span<const Eigen::Index> mask, int alpha,
                                 long budget, const NrProblem& problem, Rng& rng,
                                 const NrVariationRates& rates) {
    NrPopulation local;
    if (alpha <= 0 || budget <= 0 || mask.empty()) return local;

    const int initial = static_cast<int>(std::min<long>(alpha, budget));
    for (auto& g : perturbed_copies(base, mask, initial, kTransferFlipProbability, rng)) {
        NrIndividual ind;
        ind.objectives = nr_objectives(problem, g);
        ind.genome = std::move(g);
        local.members.push_back(std::move(ind));
    }
    local.fe_used = initial;

    while (local.fe_used < budget) {
        const long k = std::min<long>(alpha, budget - local.fe_used);
        NrPopulation pool;
        pool.members = std::move(local.members);
        const std::size_t parents = pool.size();
        std::uniform_int_distribution<std::size_t> pick(0, parents - 1);
        std::vector<Genome> children;
        while (static_cast<long>(children.size()) < k) {
            const auto& p1 = pool.members[pick(rng)].genome;
            const auto& p2 = pool.members[pick(rng)].genome;
            auto [c1, c2] = nr_variation(p1, p2, mask, rng, rates);
            children.push_back(std::move(c1));
            if (static_cast<long>(children.size()) < k) children.push_back(std::move(c2));
        }
        for (auto& c : children) {
            NrIndividual ind;
            ind.objectives = nr_objectives(problem, c);
            ind.genome = std::move(c);
            pool.members.push_back(std::move(ind));
        }
        pool.fe_used = local.fe_used + k;
        local = environment_selection(std::move(pool), std::min<std::size_t>(alpha, parents + k));
    }
    return local;
}

NrPopulation knowledge_transfer_cd_to_nr(NrPopulation pop, const CommunityPartition& partition, int alpha,
                                         long t1, const NrProblem& problem, std::size_t population_size,
                                         long fe_limit, Rng& rng, const NrVariationRates& rates,
                                         TransferReport* report) {
    if (pop.empty()) throw StateError("knowledge transfer needs an evaluated population");
    if (partition.size() != problem.size()) throw DimensionError("partition does not match the problem size");

    TransferReport local_report;
    TransferReport& rep = report ? *report : local_report;
    rep = TransferReport{};
    const long fe_before = pop.fe_used;

    if (alpha == 0) return environment_selection(std::move(pop), std::min(population_size, pop.size()));

    rep.representative = select_representative(pop, rng).genome;

    // ls1 targets one community with at least one internal pair.
    const CommunityPartition canon = canonical_labels(partition);
    const auto groups = communities(canon);
    std::vector<int> eligible;
    for (std::size_t c = 0; c < groups.size(); ++c)
        if (groups[c].size() >= 2) eligible.push_back(static_cast<int>(c));
    if (!eligible.empty()) {
        rep.community = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
        rep.within_mask = within_community_mask(canon, rep.community);
    }
    rep.between_mask = between_community_mask(canon);

    const long remaining = std::max(0L, fe_limit - pop.fe_used);
    rep.within = masked_local_search(rep.representative, rep.within_mask, alpha, std::min(t1, remaining),
                                     problem, rng, rates);
    const long after_within = std::max(0L, remaining - rep.within.fe_used);
    rep.between = masked_local_search(rep.representative, rep.between_mask, alpha,
                                      std::min(t1, after_within), problem, rng, rates);

    NrPopulation pool;
    const std::size_t base_count = pop.size();
    const std::size_t within_count = rep.within.size();
    pool.members = std::move(pop.members);
    for (const auto& m : rep.within.members) pool.members.push_back(m);
    for (const auto& m : rep.between.members) pool.members.push_back(m);
    pool.fe_used = fe_before + rep.within.fe_used + rep.between.fe_used;
    rep.evaluations = pool.fe_used - fe_before;

    const auto chosen = survivor_indices(pool.members, std::min(population_size, pool.size()));
    NrPopulation out;
    out.fe_used = pool.fe_used;
    for (int idx : chosen) {
        const auto k = static_cast<std::size_t>(idx);
        if (k >= base_count && k < base_count + within_count) ++rep.within_survivors;
        else if (k >= base_count + within_count) ++rep.between_survivors;
        out.members.push_back(std::move(pool.members[idx]));
    }
    return out;
}

double initial_link_density(int n) {
    return n > 0 ? std::min(1.0, 6.0 / n) : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

int first_front_size(const NrPopulation& pop) {
    int count = 0;
    for (const auto& m : pop.members) count += m.rank == 0 ? 1 : 0;
    return count;
}

void fill_population_summary(TraceRecord& rec, const NrPopulation& pop) {
    rec.front_size = first_front_size(pop);
    const NrIndividual* best = &pop.members.front();
    for (const auto& m : pop.members) {
        const auto& b = best->objectives;
        const auto& o = m.objectives;
        if (o[0] < b[0] || (o[0] == b[0] && o[1] < b[1])) best = &m;
    }
    rec.best_h = best->objectives[0];
    rec.best_g = best->objectives[1];
}

void fill_metrics(RunResult& result, const NrProblem& problem, const NrIndividual& x_star,
                  CommunityPartition c_star) {
    result.x_star = x_star.genome;
    result.x_star_objectives = x_star.objectives;
    result.c_star = std::move(c_star);
    result.mcc = mcc(result.x_star, problem.truth);
    if (const auto& truth = problem.truth.truth_partition()) result.nmi_vs_truth = nmi(result.c_star, *truth);
    result.q_star = modularity(problem.truth.adjacency(), result.c_star);
    result.q_reconstructed = modularity(symmetrize(as_matrix(result.x_star)), result.c_star);
}

}  // namespace

RunResult run_network_collaborator(const NrProblem& problem, const NcConfig& cfg) {
    cfg.validate_collaborator();
    Rng rng(cfg.seed);
    const auto nr_rates = cfg.nr_rates();
    const auto cd_rates = cfg.cd_rates();
    const std::size_t n1 = static_cast<std::size_t>(cfg.n1);
    const std::size_t n2 = static_cast<std::size_t>(cfg.n2);

    // Pre-optimization: NR first, then static CD on the selected structure.
    NrPopulation pop = random_nr_population(problem, n1, initial_link_density(problem.size()), rng);
    run_nr_optimizer(pop, problem, n1, cfg.pre_nr_budget(), rng, nr_rates);
    const NrIndividual x0 = select_representative(pop, rng);
    const CdResult pre_cd = cd_preoptimize(SparseGraph::from_adjacency(symmetrize(as_matrix(x0.genome))), n2,
                                           cfg.pre_cd_budget(), rng, cd_rates);
    long fe2 = pre_cd.evaluations;
    CommunityPartition current = pre_cd.partition;

    RunResult result;
    result.algorithm = "nc";
    result.seed = cfg.seed;
    const long steps_planned = cfg.cd_steps();
    const long step_budget = cfg.cd_step_budget();
    int steps = 0;

    for (int generation = 1; pop.fe_used < cfg.tfe1; ++generation) {
        nr_generation(pop, problem, n1, cfg.tfe1, rng, nr_rates);
        TraceRecord rec;
        rec.generation = generation;

        if (fe2 < cfg.tfe2 && steps < steps_planned) {
            ++steps;
            const long budget = steps == steps_planned ? cfg.tfe2 - fe2 : step_budget;
            const NrIndividual& xt = select_representative(pop, rng);
            rec.representative_h = xt.objectives[0];
            rec.representative_g = xt.objectives[1];
            const SparseGraph snapshot = SparseGraph::from_adjacency(symmetrize(as_matrix(xt.genome)));
            DynamicCdResult step = cd_dynamic_step(snapshot, current, n2, budget, rng, cd_rates);
            fe2 += step.evaluations;
            current = std::move(step.partition);
            rec.modularity = step.modularity;
            rec.cd_front_size = static_cast<int>(step.front.size());
            if (const auto& truth = problem.truth.truth_partition()) rec.nmi_truth = nmi(current, *truth);

            TransferReport transfer;
            pop = knowledge_transfer_cd_to_nr(std::move(pop), current, cfg.alpha, cfg.t1, problem, n1,
                                              cfg.tfe1, rng, nr_rates, &transfer);
            rec.within_survivors = transfer.within_survivors;
            rec.between_survivors = transfer.between_survivors;
        }
        rec.fe1 = pop.fe_used;
        rec.fe2 = fe2;
        fill_population_summary(rec, pop);
        result.trace.push_back(std::move(rec));
    }

    const NrIndividual x_star = select_representative(pop, rng);
    fill_metrics(result, problem, x_star, current);
    result.fe1 = pop.fe_used;
    result.fe2 = fe2;
    result.cd_steps = steps;
    return result;
}

RunResult run_nr2cd(const NrProblem& problem, const NcConfig& cfg) {
    cfg.validate_baseline();
    Rng rng(cfg.seed);
    const auto nr_rates = cfg.nr_rates();
    const std::size_t n1 = static_cast<std::size_t>(cfg.n1);

    RunResult result;
    result.algorithm = "nr2cd";
    result.seed = cfg.seed;

    NrPopulation pop = random_nr_population(problem, n1, initial_link_density(problem.size()), rng);
    for (int generation = 1; pop.fe_used < cfg.tfe1; ++generation) {
        nr_generation(pop, problem, n1, cfg.tfe1, rng, nr_rates);
        TraceRecord rec;
        rec.generation = generation;
        rec.fe1 = pop.fe_used;
        rec.fe2 = 0;
        fill_population_summary(rec, pop);
        result.trace.push_back(std::move(rec));
    }

    const NrIndividual x_star = select_representative(pop, rng);
    const CdResult cd = cd_preoptimize(SparseGraph::from_adjacency(symmetrize(as_matrix(x_star.genome))),
                                       static_cast<std::size_t>(cfg.n2), cfg.tfe2, rng, cfg.cd_rates());
    fill_metrics(result, problem, x_star, cd.partition);
    result.fe1 = pop.fe_used;
    result.fe2 = cd.evaluations;
    if (!result.trace.empty()) result.trace.back().fe2 = cd.evaluations;
    return result;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

std::string run_result_to_json(const RunResult& r) {
    json j;
    j["format"] = "netcollab-run";
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    const int n = r.x_star.size() ? genome_side(r.x_star) : 0;
    json links = json::array();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (r.x_star[Eigen::Index(i) * n + k]) links.push_back({i, k});
    j["x_star"] = {{"nodes", n}, {"links", std::move(links)}};
    j["x_star_objectives"] = std::vector<double>(r.x_star_objectives.data(),
                                                 r.x_star_objectives.data() + r.x_star_objectives.size());
    j["c_star"] = std::vector<int>(r.c_star.data(), r.c_star.data() + r.c_star.size());
    j["metrics"] = {{"mcc", r.mcc},
                    {"nmi", optional_json(r.nmi_vs_truth)},
                    {"q", r.q_star},
                    {"q_reconstructed", r.q_reconstructed}};
    j["fe1"] = r.fe1;
    j["fe2"] = r.fe2;
    j["cd_steps"] = r.cd_steps;
    json trace = json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"generation", t.generation},
                         {"fe1", t.fe1},
                         {"fe2", t.fe2},
                         {"front_size", t.front_size},
                         {"best_h", t.best_h},
                         {"best_g", t.best_g},
                         {"representative_h", optional_json(t.representative_h)},
                         {"representative_g", optional_json(t.representative_g)},
                         {"modularity", optional_json(t.modularity)},
                         {"nmi_truth", optional_json(t.nmi_truth)},
                         {"cd_front_size", optional_json(t.cd_front_size)},
                         {"within_survivors", optional_json(t.within_survivors)},
                         {"between_survivors", optional_json(t.between_survivors)}});
    }
    j["trace"] = std::move(trace);
    return j.dump(1) + "\n";
}

RunResult run_result_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.value("format", "") != "netcollab-run") throw ParseError("not a netcollab run document");
        RunResult r;
        r.algorithm = j.at("algorithm").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        const int n = j.at("x_star").at("nodes").get<int>();
        r.x_star = Genome::Zero(Eigen::Index(n) * n);
        for (const auto& l : j.at("x_star").at("links"))
            r.x_star[l.at(0).get<Eigen::Index>() * n + l.at(1).get<Eigen::Index>()] = 1;
        const auto objs = j.at("x_star_objectives").get<std::vector<double>>();
        r.x_star_objectives = Eigen::Map<const Eigen::VectorXd>(objs.data(), objs.size());
        const auto labels = j.at("c_star").get<std::vector<int>>();
        r.c_star = Eigen::Map<const CommunityPartition>(labels.data(), labels.size());
        const auto& m = j.at("metrics");
        r.mcc = m.at("mcc").get<double>();
        r.nmi_vs_truth = optional_from<double>(m, "nmi");
        r.q_star = m.at("q").get<double>();
        r.q_reconstructed = m.at("q_reconstructed").get<double>();
        r.fe1 = j.at("fe1").get<long>();
        r.fe2 = j.at("fe2").get<long>();
        r.cd_steps = j.at("cd_steps").get<int>();
        for (const auto& t : j.at("trace")) {
            TraceRecord rec;
            rec.generation = t.at("generation").get<int>();
            rec.fe1 = t.at("fe1").get<long>();
            rec.fe2 = t.at("fe2").get<long>();
            rec.front_size = t.at("front_size").get<int>();
            rec.best_h = t.at("best_h").get<double>();
            rec.best_g = t.at("best_g").get<double>();
            rec.representative_h = optional_from<double>(t, "representative_h");
            rec.representative_g = optional_from<double>(t, "representative_g");
            rec.modularity = optional_from<double>(t, "modularity");
            rec.nmi_truth = optional_from<double>(t, "nmi_truth");
            rec.cd_front_size = optional_from<int>(t, "cd_front_size");
            rec.within_survivors = optional_from<int>(t, "within_survivors");
            rec.between_survivors = optional_from<int>(t, "between_survivors");
            r.trace.push_back(rec);
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed run result: ") + e.what());
    }
}

std::string trace_to_csv(const RunResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "generation,fe1,fe2,front_size,best_h,best_g,representative_h,representative_g,"
           "modularity,nmi_truth,cd_front_size,within_survivors,between_survivors\n";
    auto opt = [&](const auto& v) {
        if (v) out << *v;
    };
    for (const auto& t : r.trace) {
        out << t.generation << ',' << t.fe1 << ',' << t.fe2 << ',' << t.front_size << ',' << t.best_h << ','
            << t.best_g << ',';
        opt(t.representative_h);
        out << ',';
        opt(t.representative_g);
        out << ',';
        opt(t.modularity);
        out << ',';
        opt(t.nmi_truth);
        out << ',';
        opt(t.cd_front_size);
        out << ',';
        opt(t.within_survivors);
        out << ',';
        opt(t.between_survivors);
        out << '\n';
    }
    return out.str();
}

}  // namespace netcollab
