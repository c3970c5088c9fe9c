#pragma once

#include "netcollab/error.hpp"
#include "netcollab/graph.hpp"
#include "netcollab/objectives.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace netcollab {

using Rng = std::mt19937_64;

template <typename GenomeT>
struct Individual {
    GenomeT genome;
    ObjectiveVector objectives;
    int rank = 0;
    double crowding = 0.0;
};

/// Members plus the number of objective evaluations spent producing them.
template <typename GenomeT>
struct Population {
    std::vector<Individual<GenomeT>> members;
    long fe_used = 0;

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

using NrIndividual = Individual<Genome>;
using NrPopulation = Population<Genome>;
using CdIndividual = Individual<CommunityPartition>;
using CdPopulation = Population<CommunityPartition>;

using Fronts = std::vector<std::vector<int>>;

/// Deb's fast nondominated sort; front 0 holds the nondominated indices.
Fronts fast_nondominated_sort(std::span<const ObjectiveVector> objectives);

/// NSGA-II crowding distance within one front. Boundary points of each objective are
/// infinite; an objective with zero range adds nothing to interior points.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> front);

template <typename GenomeT>
std::vector<ObjectiveVector> objectives_of(const std::vector<Individual<GenomeT>>& members) {
    std::vector<ObjectiveVector> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.objectives);
    return out;
}

/// Writes rank and crowding into every member; returns the fronts.
template <typename GenomeT>
Fronts assign_rank_and_crowding(std::vector<Individual<GenomeT>>& members) {
    const auto objs = objectives_of(members);
    Fronts fronts = fast_nondominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<ObjectiveVector> front_objs;
        front_objs.reserve(fronts[f].size());
        for (int idx : fronts[f]) front_objs.push_back(objs[idx]);
        const auto cd = crowding_distance(front_objs);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            members[fronts[f][k]].rank = static_cast<int>(f);
            members[fronts[f][k]].crowding = cd[k];
        }
    }
    return fronts;
}

/// NSGA-II survival: whole fronts while they fit, then the last front by descending
/// crowding. Ranks and crowding are written into `members`; returns the chosen indices.
template <typename GenomeT>
std::vector<int> survivor_indices(std::vector<Individual<GenomeT>>& members, std::size_t n) {
    if (members.size() < n)
        throw RangeError("environment selection needs at least " + std::to_string(n) +
                         " candidates, got " + std::to_string(members.size()));
    const Fronts fronts = assign_rank_and_crowding(members);
    std::vector<int> chosen;
    chosen.reserve(n);
    for (const auto& front : fronts) {
        if (chosen.size() == n) break;
        if (chosen.size() + front.size() <= n) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        std::vector<int> order(front);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return members[a].crowding > members[b].crowding; });
        for (std::size_t k = 0; chosen.size() < n; ++k) chosen.push_back(order[k]);
    }
    return chosen;
}

template <typename GenomeT>
Population<GenomeT> environment_selection(Population<GenomeT> pool, std::size_t n) {
    const std::vector<int> chosen = survivor_indices(pool.members, n);
    Population<GenomeT> out;
    out.fe_used = pool.fe_used;
    out.members.reserve(n);
    for (int idx : chosen) out.members.push_back(std::move(pool.members[idx]));
    return out;
}

/// Lower rank wins, then larger crowding; exact ties go to a coin flip.
template <typename GenomeT>
const Individual<GenomeT>& binary_tournament(const std::vector<Individual<GenomeT>>& members, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const auto& a = members[pick(rng)];
    const auto& b = members[pick(rng)];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
    return std::bernoulli_distribution(0.5)(rng) ? a : b;
}

// ---------------------------------------------------------------------------
// Network reconstruction operators

struct NrVariationRates {
    double crossover = 1.0;
    /// Per-bit flip probability; unset means 1/D, masked or not.
    std::optional<double> mutation;
};

/// Every genome index i*N+j with i != j.
std::vector<Eigen::Index> off_diagonal_positions(int n);

/// Swaps the genes at positions[0, cut) between the two genomes.
void single_point_crossover(Genome& a, Genome& b, std::span<const Eigen::Index> positions, std::size_t cut);

/// Flips each listed position independently with probability `rate`; returns the flip count.
std::size_t bitwise_mutation(Genome& genome, std::span<const Eigen::Index> positions, double rate, Rng& rng);

/// Single-point crossover then bitwise mutation, restricted to `mask` when given. Diagonal
/// positions are never touched. Throws RangeError for mask indices outside the genome.
std::pair<Genome, Genome> nr_variation(const Genome& a, const Genome& b,
                                       std::optional<std::span<const Eigen::Index>> mask, Rng& rng,
                                       const NrVariationRates& rates = {});

/// Off-diagonal bits set independently with probability `density`.
Genome random_genome(int n, double density, Rng& rng);

/// Evaluated random population; charges `size` evaluations.
NrPopulation random_nr_population(const NrProblem& problem, std::size_t size, double density, Rng& rng);

/// One NSGA-II generation: tournament mating, variation, evaluation and survival back to
/// `target_size`. Produces min(target_size, fe_limit - fe_used) offspring.
void nr_generation(NrPopulation& pop, const NrProblem& problem, std::size_t target_size, long fe_limit,
                   Rng& rng, const NrVariationRates& rates = {});

/// Runs NSGA-II generations until pop.fe_used reaches fe_limit.
void run_nr_optimizer(NrPopulation& pop, const NrProblem& problem, std::size_t target_size, long fe_limit,
                      Rng& rng, const NrVariationRates& rates = {});

// ---------------------------------------------------------------------------
// Community detection operators

struct CdVariationRates {
    double mutation = 0.2;               // per-node probability in neighbour-label mutation
    double migration = 0.2;              // per-node probability in majority migration
    double mutation_vs_migration = 0.5;  // chance a child is mutated rather than migrated
};

/// Each node, in a random order, adopts the label of a random neighbour (labels start as node ids).
CommunityPartition random_neighbor_labels(const SparseGraph& graph, Rng& rng);

void two_point_crossover(CommunityPartition& a, CommunityPartition& b, std::size_t first, std::size_t last);

void label_mutation(CommunityPartition& labels, const SparseGraph& graph, double rate, Rng& rng);

/// Each node with probability `rate` takes the most frequent neighbour label (ties uniform).
void label_migration(CommunityPartition& labels, const SparseGraph& graph, double rate, Rng& rng);

std::pair<CommunityPartition, CommunityPartition> cd_variation(const CommunityPartition& a,
                                                               const CommunityPartition& b,
                                                               const SparseGraph& graph, Rng& rng,
                                                               const CdVariationRates& rates = {});

struct CdResult {
    CommunityPartition partition;
    double modularity = 0.0;
    long evaluations = 0;
};

/// Single-objective modularity GA (static snapshot).
CdResult cd_preoptimize(const SparseGraph& graph, std::size_t population, long budget, Rng& rng,
                        const CdVariationRates& rates = {});

struct DynamicCdResult {
    CommunityPartition partition;
    double modularity = 0.0;
    double nmi_to_previous = 0.0;
    /// Final first front; objectives are (-Q, -NMI to previous).
    CdPopulation front;
    long evaluations = 0;
};

/// Biobjective step on snapshot `graph`: maximize Q and NMI to `previous`. Returns the
/// first-front member with the largest Q.
DynamicCdResult cd_dynamic_step(const SparseGraph& graph, const CommunityPartition& previous,
                                std::size_t population, long budget, Rng& rng,
                                const CdVariationRates& rates = {});

}  // namespace netcollab
