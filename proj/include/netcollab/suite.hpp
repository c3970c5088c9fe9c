#pragma once

#include "netcollab/dynamics.hpp"
#include "netcollab/nc.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netcollab {

struct InstanceSpec {
    std::string id;
    std::string network;  // ZK, dolphin, polbooks, football, ER, BA, NW, WS
    DynamicsKind kind = DynamicsKind::EvolutionaryGame;
    int sequences = 5;
    int rounds = 10;
    std::uint64_t seed = 1;
    int nodes = 50;  // synthetic networks only
};

struct AlgorithmSpec {
    std::string label;
    std::string algorithm;  // nc | nr2cd
    std::string overrides = "{}";
};

struct SuiteSpec {
    std::vector<InstanceSpec> instances;
    std::vector<AlgorithmSpec> algorithms;
    int repetitions = 20;
    std::uint64_t seed = 1;
    std::string overrides = "{}";  // applied before each algorithm's own overrides
};

/// Throws ConfigError for a malformed or inconsistent spec.
SuiteSpec parse_suite_spec(std::string_view text);
SuiteSpec load_suite_spec(const std::filesystem::path& path);
std::string suite_spec_to_json(const SuiteSpec& spec);

bool is_known_algorithm(std::string_view name);
RunResult run_algorithm(std::string_view name, const NrProblem& problem, const NcConfig& cfg);

Dataset materialize_instance(const InstanceSpec& instance);

/// Reproducible per-cell seed from the base seed, instance id, algorithm label and repetition.
std::uint64_t cell_seed(std::uint64_t base, std::string_view instance, std::string_view algorithm, int repetition);

NcConfig algorithm_config(const SuiteSpec& spec, const AlgorithmSpec& algorithm);

struct MetricSummary {
    std::vector<double> values;
    double mean = 0.0;
    double std = 0.0;
    double median = 0.0;
};

struct AlgorithmSummary {
    std::string label;
    MetricSummary mcc;
    MetricSummary community;  // NMI with a truth partition, otherwise Q
};

struct Comparison {
    std::string metric;
    std::string first;
    std::string second;
    double p_value = 1.0;
    /// "win", "tie" or "loss" for `first` against `second` at the 0.05 level.
    std::string mark;
};

struct InstanceReport {
    std::string id;
    std::string community_metric;  // "nmi" or "q"
    std::vector<AlgorithmSummary> algorithms;
    std::vector<Comparison> comparisons;
};

struct CellFailure {
    std::string instance;
    std::string label;
    int repetition = 0;
    std::string message;
};

struct StatReport {
    std::vector<InstanceReport> instances;
    std::vector<CellFailure> failures;
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

inline constexpr double kSignificanceLevel = 0.05;

std::string run_file_name(const InstanceSpec& instance, const AlgorithmSpec& algorithm, int repetition);

/// Aggregates the per-run files under `runs_dir`; missing files become failures.
StatReport aggregate_runs(const SuiteSpec& spec, const std::filesystem::path& runs_dir,
                          std::vector<CellFailure> failures = {});

std::string report_to_json(const StatReport& report);
std::string report_to_csv(const StatReport& report);

// Command entry points. Each returns a process exit code: 0 success, 1 I/O failure,
// 2 configuration error, 3 partial suite failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPartial = 3;

int cmd_generate(const SuiteSpec& spec, const std::filesystem::path& out_dir);
int cmd_run(const std::filesystem::path& dataset, std::string_view algorithm, const NcConfig& cfg,
            const std::filesystem::path& out_file);
int cmd_suite(const SuiteSpec& spec, const std::filesystem::path& out_dir, int parallelism);
/// Recomputes report.json and report.csv in `out_dir` from its suite.json and runs/.
int cmd_stats(const std::filesystem::path& out_dir);

}  // namespace netcollab
