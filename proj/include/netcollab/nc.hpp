#pragma once

#include "netcollab/dynamics.hpp"
#include "netcollab/moea.hpp"
#include "netcollab/objectives.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netcollab {

/// Run parameters. Field names match the keys of the JSON configuration file.
struct NcConfig {
    int n1 = 100;
    int n2 = 100;
    long tfe1 = 200000;
    long tfe2 = 200000;
    double lambda = 0.5;
    long t1 = 1000;
    int alpha = 20;
    std::uint64_t seed = 1;
    double pc = 1.0;
    std::optional<double> pm;  // unset: 1/D
    double pmu = 0.2;
    double pmi = 0.2;
    double pmu_mi = 0.5;

    long pre_nr_budget() const;
    long normal_nr_budget() const { return tfe1 - pre_nr_budget(); }
    long pre_cd_budget() const;
    long normal_cd_budget() const { return tfe2 - pre_cd_budget(); }
    /// Number of dynamic community steps: ceil(normal NR budget / (n1 + 2 t1)).
    long cd_steps() const;
    /// Evaluations per dynamic community step: floor(normal CD budget / cd_steps()).
    long cd_step_budget() const;

    NrVariationRates nr_rates() const { return {pc, pm}; }
    CdVariationRates cd_rates() const { return {pmu, pmi, pmu_mi}; }

    /// Throws ConfigError when a stage could not complete a single generation.
    void validate_collaborator() const;
    void validate_baseline() const;
};

/// Applies a JSON object of NcConfig overrides; unknown keys are a ConfigError.
NcConfig apply_config_overrides(NcConfig base, std::string_view json_object);
std::string config_to_json(const NcConfig& cfg);

struct TraceRecord {
    int generation = 0;
    long fe1 = 0;
    long fe2 = 0;
    int front_size = 0;
    double best_h = 0.0;  // smallest residual in the NR population, and its link count
    double best_g = 0.0;
    std::optional<double> representative_h;  // X(t), when a community step ran
    std::optional<double> representative_g;
    std::optional<double> modularity;  // C(t) on X(t)
    std::optional<double> nmi_truth;   // C(t) against the ground truth
    std::optional<int> cd_front_size;
    std::optional<int> within_survivors;
    std::optional<int> between_survivors;
};

struct RunResult {
    std::string algorithm;
    std::uint64_t seed = 0;
    Genome x_star;
    ObjectiveVector x_star_objectives;
    CommunityPartition c_star;
    double mcc = 0.0;
    std::optional<double> nmi_vs_truth;
    double q_star = 0.0;           // C* on the ground-truth network
    double q_reconstructed = 0.0;  // C* on symmetrized X*
    long fe1 = 0;
    long fe2 = 0;
    int cd_steps = 0;
    std::vector<TraceRecord> trace;
};

std::string run_result_to_json(const RunResult& result);
RunResult run_result_from_json(std::string_view text);
/// One row per trace record; empty optional fields are left blank.
std::string trace_to_csv(const RunResult& result);

/// Picks X(t) from the first front: the most isolated member (largest crowding, random
/// tie-break) when the front has more than two members, otherwise a random member.
const NrIndividual& select_representative(const NrPopulation& pop, Rng& rng);

inline constexpr double kTransferFlipProbability = 0.8;

/// Ordered off-diagonal pairs (i, j) with both endpoints labelled `label`.
std::vector<Eigen::Index> within_community_mask(const CommunityPartition& partition, int label);
/// Ordered off-diagonal pairs whose endpoints carry different labels.
std::vector<Eigen::Index> between_community_mask(const CommunityPartition& partition);

/// `count` copies of `base`, each masked position flipped with probability `flip_probability`.
std::vector<Genome> perturbed_copies(const Genome& base, std::span<const Eigen::Index> mask, int count,
                                     double flip_probability, Rng& rng);

/// Masked local search around `base`: perturbed initial population of `alpha`, then masked
/// variation and survival for at most `budget` evaluations in total.
NrPopulation masked_local_search(const Genome& base, std::span<const Eigen::Index> mask, int alpha,
                                 long budget, const NrProblem& problem, Rng& rng,
                                 const NrVariationRates& rates = {});

struct TransferReport {
    Genome representative;
    int community = -1;
    std::vector<Eigen::Index> within_mask;
    std::vector<Eigen::Index> between_mask;
    NrPopulation within;   // final P_in
    NrPopulation between;  // final P_out
    long evaluations = 0;
    int within_survivors = 0;
    int between_survivors = 0;
};

/// Community knowledge into the NR population: local searches inside one random community
/// and across community boundaries, then survival of pop + both local populations to
/// `population_size`. Evaluations are charged to pop.fe_used and never pass `fe_limit`.
NrPopulation knowledge_transfer_cd_to_nr(NrPopulation pop, const CommunityPartition& partition, int alpha,
                                         long t1, const NrProblem& problem, std::size_t population_size,
                                         long fe_limit, Rng& rng, const NrVariationRates& rates = {},
                                         TransferReport* report = nullptr);

/// Initial NR link density: expected degree about 6.
double initial_link_density(int n);

RunResult run_network_collaborator(const NrProblem& problem, const NcConfig& cfg);
RunResult run_nr2cd(const NrProblem& problem, const NcConfig& cfg);

}  // namespace netcollab
