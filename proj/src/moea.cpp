#include "netcollab/moea.hpp"

#include <unordered_map>

namespace netcollab {

Fronts fast_nondominated_sort(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    if (n == 0) throw DimensionError("cannot sort an empty objective set");
    for (const auto& o : objectives)
        if (o.size() != objectives.front().size())
            throw DimensionError("objective vectors of mixed length");

    std::vector<std::vector<int>> dominated(n);
    std::vector<int> domination_count(n, 0);
    Fronts fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(objectives[p], objectives[q])) {
                dominated[p].push_back(static_cast<int>(q));
                ++domination_count[q];
            } else if (dominates(objectives[q], objectives[p])) {
                dominated[q].push_back(static_cast<int>(p));
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (domination_count[p] == 0) fronts[0].push_back(static_cast<int>(p));

    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<int> next;
        for (int p : fronts[f])
            for (int q : dominated[p])
                if (--domination_count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (Eigen::Index k = 0; k < front.front().size(); ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double range = front[order.back()][k] - front[order.front()][k];
        if (range == 0.0) continue;
        for (std::size_t p = 1; p + 1 < n; ++p)
            distance[order[p]] += (front[order[p + 1]][k] - front[order[p - 1]][k]) / range;
    }
    return distance;
}

// ---------------------------------------------------------------------------

std::vector<Eigen::Index> off_diagonal_positions(int n) {
    std::vector<Eigen::Index> out;
    out.reserve(std::size_t(n) * (n > 0 ? n - 1 : 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) out.push_back(Eigen::Index(i) * n + j);
    return out;
}

void single_point_crossover(Genome& a, Genome& b, std::span<const Eigen::Index> positions, std::size_t cut) {
    cut = std::min(cut, positions.size());
    for (std::size_t k = 0; k < cut; ++k) std::swap(a[positions[k]], b[positions[k]]);
}

std::size_t bitwise_mutation(Genome& genome, std::span<const Eigen::Index> positions, double rate, Rng& rng) {
    if (rate <= 0.0 || positions.empty()) return 0;
    std::size_t flips = 0;
    if (rate >= 1.0) {
        for (auto p : positions) genome[p] ^= 1;
        return positions.size();
    }
    // Geometric gaps between successes reproduce independent per-bit Bernoulli trials.
    std::geometric_distribution<std::size_t> gap(rate);
    for (std::size_t k = gap(rng); k < positions.size(); k += 1 + gap(rng)) {
        genome[positions[k]] ^= 1;
        ++flips;
    }
    return flips;
}

namespace {

const std::vector<Eigen::Index>& cached_off_diagonal(int n) {
    thread_local int cached_n = -1;
    thread_local std::vector<Eigen::Index> cached;
    if (cached_n != n) {
        cached = off_diagonal_positions(n);
        cached_n = n;
    }
    return cached;
}

}  // namespace

std::pair<Genome, Genome> nr_variation(const Genome& a, const Genome& b,
                                       std::optional<std::span<const Eigen::Index>> mask, Rng& rng,
                                       const NrVariationRates& rates) {
    if (a.size() != b.size()) throw DimensionError("parents differ in length");
    const int n = genome_side(a);

    std::vector<Eigen::Index> filtered;
    std::span<const Eigen::Index> positions;
    if (mask) {
        filtered.reserve(mask->size());
        for (auto p : *mask) {
            if (p < 0 || p >= a.size())
                throw RangeError("mask index " + std::to_string(p) + " outside genome of length " +
                                 std::to_string(a.size()));
            if (p / n != p % n) filtered.push_back(p);
        }
        positions = filtered;
    } else {
        positions = cached_off_diagonal(n);
    }

    Genome c1 = a, c2 = b;
    if (positions.size() >= 2 && std::bernoulli_distribution(rates.crossover)(rng)) {
        const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, positions.size() - 1)(rng);
        single_point_crossover(c1, c2, positions, cut);
    }
    const double pm = rates.mutation ? *rates.mutation : 1.0 / static_cast<double>(a.size());
    bitwise_mutation(c1, positions, pm, rng);
    bitwise_mutation(c2, positions, pm, rng);
    return {std::move(c1), std::move(c2)};
}

Genome random_genome(int n, double density, Rng& rng) {
    Genome g = Genome::Zero(Eigen::Index(n) * n);
    std::bernoulli_distribution bit(density);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && bit(rng)) g[Eigen::Index(i) * n + j] = 1;
    return g;
}

NrPopulation random_nr_population(const NrProblem& problem, std::size_t size, double density, Rng& rng) {
    NrPopulation pop;
    pop.members.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
        NrIndividual ind;
        ind.genome = random_genome(problem.size(), density, rng);
        ind.objectives = nr_objectives(problem, ind.genome);
        pop.members.push_back(std::move(ind));
    }
    pop.fe_used = static_cast<long>(size);
    assign_rank_and_crowding(pop.members);
    return pop;
}

void nr_generation(NrPopulation& pop, const NrProblem& problem, std::size_t target_size, long fe_limit,
                   Rng& rng, const NrVariationRates& rates) {
    const long remaining = fe_limit - pop.fe_used;
    if (remaining <= 0 || pop.empty()) return;
    const std::size_t k = std::min<std::size_t>(target_size, static_cast<std::size_t>(remaining));

    NrPopulation pool;
    pool.members = std::move(pop.members);
    pool.members.reserve(pool.members.size() + k);
    const std::size_t parents = pool.members.size();
    std::vector<Genome> children;
    children.reserve(k + 1);
    while (children.size() < k) {
        const auto& p1 = binary_tournament(pool.members, rng);
        const auto& p2 = binary_tournament(pool.members, rng);
        auto [c1, c2] = nr_variation(p1.genome, p2.genome, std::nullopt, rng, rates);
        children.push_back(std::move(c1));
        if (children.size() < k) children.push_back(std::move(c2));
    }
    for (auto& child : children) {
        NrIndividual ind;
        ind.objectives = nr_objectives(problem, child);
        ind.genome = std::move(child);
        pool.members.push_back(std::move(ind));
    }
    pool.fe_used = pop.fe_used + static_cast<long>(k);
    pop = environment_selection(std::move(pool), std::min(target_size, parents + k));
}

void run_nr_optimizer(NrPopulation& pop, const NrProblem& problem, std::size_t target_size, long fe_limit,
                      Rng& rng, const NrVariationRates& rates) {
    while (pop.fe_used < fe_limit) nr_generation(pop, problem, target_size, fe_limit, rng, rates);
}

// ---------------------------------------------------------------------------

CommunityPartition random_neighbor_labels(const SparseGraph& graph, Rng& rng) {
    const int n = graph.size();
    CommunityPartition labels(n);
    std::iota(labels.data(), labels.data() + n, 0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i : order) {
        const auto& nb = graph.neighbors[i];
        if (nb.empty()) continue;
        labels[i] = labels[nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)]];
    }
    return labels;
}

void two_point_crossover(CommunityPartition& a, CommunityPartition& b, std::size_t first, std::size_t last) {
    last = std::min<std::size_t>(last, a.size());
    for (std::size_t k = first; k < last; ++k) std::swap(a[k], b[k]);
}

void label_mutation(CommunityPartition& labels, const SparseGraph& graph, double rate, Rng& rng) {
    if (rate <= 0.0) return;
    std::bernoulli_distribution hit(rate);
    for (int i = 0; i < graph.size(); ++i) {
        const auto& nb = graph.neighbors[i];
        if (nb.empty() || !hit(rng)) continue;
        labels[i] = labels[nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)]];
    }
}

void label_migration(CommunityPartition& labels, const SparseGraph& graph, double rate, Rng& rng) {
    if (rate <= 0.0) return;
    std::bernoulli_distribution hit(rate);
    std::unordered_map<int, int> counts;
    for (int i = 0; i < graph.size(); ++i) {
        const auto& nb = graph.neighbors[i];
        if (nb.empty() || !hit(rng)) continue;
        counts.clear();
        for (int j : nb) ++counts[labels[j]];
        int best_count = 0;
        std::vector<int> best;
        for (int j : nb) {
            const int l = labels[j];
            const int c = counts[l];
            if (c > best_count) {
                best_count = c;
                best.assign(1, l);
            } else if (c == best_count && std::find(best.begin(), best.end(), l) == best.end()) {
                best.push_back(l);
            }
        }
        labels[i] = best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng)];
    }
}

std::pair<CommunityPartition, CommunityPartition> cd_variation(const CommunityPartition& a,
                                                               const CommunityPartition& b,
                                                               const SparseGraph& graph, Rng& rng,
                                                               const CdVariationRates& rates) {
    if (a.size() != b.size() || a.size() != graph.size())
        throw DimensionError("label vectors must match the graph size");
    CommunityPartition c1 = a, c2 = b;
    std::uniform_int_distribution<std::size_t> cut(0, static_cast<std::size_t>(a.size()));
    std::size_t first = cut(rng), last = cut(rng);
    if (first > last) std::swap(first, last);
    two_point_crossover(c1, c2, first, last);
    for (CommunityPartition* child : {&c1, &c2}) {
        if (std::bernoulli_distribution(rates.mutation_vs_migration)(rng))
            label_mutation(*child, graph, rates.mutation, rng);
        else
            label_migration(*child, graph, rates.migration, rng);
    }
    return {std::move(c1), std::move(c2)};
}

CdResult cd_preoptimize(const SparseGraph& graph, std::size_t population, long budget, Rng& rng,
                        const CdVariationRates& rates) {
    if (population == 0 || budget < static_cast<long>(population))
        throw ConfigError("community pre-optimization needs budget >= population size");

    struct Scored {
        CommunityPartition labels;
        double q;
    };
    std::vector<Scored> pop;
    pop.reserve(2 * population);
    for (std::size_t k = 0; k < population; ++k) {
        CommunityPartition labels = random_neighbor_labels(graph, rng);
        const double q = modularity(graph, labels);
        pop.push_back({std::move(labels), q});
    }
    long evaluations = static_cast<long>(population);

    std::uniform_int_distribution<std::size_t> pick(0, population - 1);
    auto tournament = [&]() -> const CommunityPartition& {
        const auto& a = pop[pick(rng)];
        const auto& b = pop[pick(rng)];
        return a.q >= b.q ? a.labels : b.labels;
    };
    auto by_quality = [](const Scored& a, const Scored& b) { return a.q > b.q; };

    while (evaluations < budget) {
        const long k = std::min<long>(static_cast<long>(population), budget - evaluations);
        std::vector<Scored> children;
        children.reserve(k + 1);
        while (static_cast<long>(children.size()) < k) {
            auto [c1, c2] = cd_variation(tournament(), tournament(), graph, rng, rates);
            children.push_back({std::move(c1), 0.0});
            if (static_cast<long>(children.size()) < k) children.push_back({std::move(c2), 0.0});
        }
        for (auto& c : children) c.q = modularity(graph, c.labels);
        evaluations += k;
        for (auto& c : children) pop.push_back(std::move(c));
        std::stable_sort(pop.begin(), pop.end(), by_quality);
        pop.resize(population);
    }
    const auto best = std::max_element(pop.begin(), pop.end(),
                                       [](const Scored& a, const Scored& b) { return a.q < b.q; });
    return {canonical_labels(best->labels), best->q, evaluations};
}

DynamicCdResult cd_dynamic_step(const SparseGraph& graph, const CommunityPartition& previous,
                                std::size_t population, long budget, Rng& rng,
                                const CdVariationRates& rates) {
    if (population == 0 || budget < static_cast<long>(population))
        throw ConfigError("dynamic community step needs budget >= population size");
    if (previous.size() != graph.size()) throw DimensionError("previous partition does not match the snapshot");

    auto evaluate = [&](const CommunityPartition& labels) {
        ObjectiveVector f(2);
        f << -modularity(graph, labels), -nmi(labels, previous);
        return f;
    };

    CdPopulation pop;
    pop.members.reserve(2 * population);
    {
        CdIndividual seed;
        seed.genome = previous;
        seed.objectives = evaluate(seed.genome);
        pop.members.push_back(std::move(seed));
    }
    while (pop.size() < population) {
        CdIndividual ind;
        ind.genome = random_neighbor_labels(graph, rng);
        ind.objectives = evaluate(ind.genome);
        pop.members.push_back(std::move(ind));
    }
    pop.fe_used = static_cast<long>(population);
    assign_rank_and_crowding(pop.members);

    while (pop.fe_used < budget) {
        const long k = std::min<long>(static_cast<long>(population), budget - pop.fe_used);
        CdPopulation pool;
        pool.members = std::move(pop.members);
        const std::size_t parents = pool.size();
        std::vector<CommunityPartition> children;
        children.reserve(k + 1);
        while (static_cast<long>(children.size()) < k) {
            const auto& p1 = binary_tournament(pool.members, rng);
            const auto& p2 = binary_tournament(pool.members, rng);
            auto [c1, c2] = cd_variation(p1.genome, p2.genome, graph, rng, rates);
            children.push_back(std::move(c1));
            if (static_cast<long>(children.size()) < k) children.push_back(std::move(c2));
        }
        for (auto& c : children) {
            CdIndividual ind;
            ind.objectives = evaluate(c);
            ind.genome = std::move(c);
            pool.members.push_back(std::move(ind));
        }
        pool.fe_used = pop.fe_used + k;
        pop = environment_selection(std::move(pool), std::min(population, parents + k));
    }

    const Fronts fronts = assign_rank_and_crowding(pop.members);
    DynamicCdResult result;
    result.evaluations = pop.fe_used;
    result.front.fe_used = pop.fe_used;
    int best = fronts[0].front();
    for (int idx : fronts[0]) {
        result.front.members.push_back(pop.members[idx]);
        if (pop.members[idx].objectives[0] < pop.members[best].objectives[0]) best = idx;
    }
    result.partition = canonical_labels(pop.members[best].genome);
    result.modularity = -pop.members[best].objectives[0];
    result.nmi_to_previous = -pop.members[best].objectives[1];
    return result;
}

}  // namespace netcollab
