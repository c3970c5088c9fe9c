#pragma once

#include "netcollab/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace netcollab {

enum class DynamicsKind { EvolutionaryGame, ResistorNetwork };

std::string_view to_string(DynamicsKind kind);
/// Accepts "EG" or "RN" (case-insensitive).
DynamicsKind parse_dynamics_kind(std::string_view text);

/// Prisoner's dilemma payoffs, row = own strategy, column = opponent (0 cooperate, 1 defect).
inline Eigen::Matrix2d payoff_matrix() {
    Eigen::Matrix2d p;
    p << 1.0, 0.0,
         1.2, 0.0;
    return p;
}

inline constexpr double kFermiNoise = 0.1;

/// Probability that a player with payoff `own` copies a neighbor with payoff `other`.
inline double fermi_adoption_probability(double own, double other, double kappa = kFermiNoise) {
    return 1.0 / (1.0 + std::exp((own - other) / kappa));
}

/// Observations of repeated prisoner's dilemma rounds. Row s*L + t of each matrix holds
/// round t of sequence s; column i is node i.
struct EgData {
    int sequences = 0;
    int rounds = 0;
    MatrixX<std::uint8_t> cooperates;  // 1 = cooperate ([1,0]), 0 = defect ([0,1])
    Eigen::MatrixXd payoffs;

    int size() const { return static_cast<int>(cooperates.cols()); }
    Eigen::Vector2d strategy(int row, int node) const {
        return cooperates(row, node) ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
    }
};

inline constexpr double kVoltagePeak = 1.0;
inline constexpr double kBaseFrequency = 1e3;
inline constexpr double kMaxDetuning = 20.0;

/// Resistor network samples. Rows are (sequence, sample) pairs as in EgData.
struct RnData {
    int sequences = 0;
    int samples = 0;
    Eigen::MatrixXd times;          // sequences x samples
    Eigen::MatrixXd perturbations;  // sequences x N, detuning of each node's source
    Eigen::MatrixXd voltages;
    Eigen::MatrixXd currents;

    int size() const { return static_cast<int>(voltages.cols()); }
};

/// One stacked linear system per node: design[i] * x_i = target[i] where x_i is row i of
/// the adjacency.
struct NrProblem {
    DynamicsKind kind = DynamicsKind::EvolutionaryGame;
    std::vector<Eigen::MatrixXd> design;
    std::vector<Eigen::VectorXd> target;
    Network truth;

    int size() const { return static_cast<int>(design.size()); }
    Eigen::Index genome_length() const { return Eigen::Index(size()) * size(); }
};

EgData simulate_eg(const Network& net, int sequences, int rounds, std::uint64_t seed);
RnData simulate_rn(const Network& net, int sequences, int samples, std::uint64_t seed);

NrProblem build_eg_problem(const EgData& data, const Network& net);
NrProblem build_rn_problem(const RnData& data, const Network& net);

/// A materialized instance: truth network plus recorded dynamics.
struct Dataset {
    std::string id;
    std::string network_name;
    DynamicsKind kind = DynamicsKind::EvolutionaryGame;
    int sequences = 0;
    int rounds = 0;
    std::uint64_t seed = 0;
    Network network;
    std::variant<EgData, RnData> data;

    NrProblem problem() const;
};

Dataset make_dataset(std::string id, std::string network_name, Network network,
                     DynamicsKind kind, int sequences, int rounds, std::uint64_t seed);

std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(std::string_view text);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace netcollab
