#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netcollab {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Symmetric binary adjacency with a zero diagonal.
using Adjacency = MatrixX<std::uint8_t>;

/// One community label per node. Two nodes share a community iff their labels match.
using CommunityPartition = Eigen::VectorXi;

/// Relabels communities to 0..S-1 in order of first appearance.
CommunityPartition canonical_labels(const CommunityPartition& labels);

int community_count(const CommunityPartition& labels);

/// Node sets of each community, ordered by canonical label.
std::vector<std::vector<int>> communities(const CommunityPartition& labels);

template <typename Derived>
bool is_symmetric_zero_diagonal(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a(i, i) != 0) return false;
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            if (a(i, j) != a(j, i)) return false;
    }
    return true;
}

/// Logical OR with the transpose, diagonal cleared.
template <typename Derived>
Adjacency symmetrize(const Eigen::MatrixBase<Derived>& a) {
    const Eigen::Index n = a.rows();
    Adjacency out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = (i != j && (a(i, j) != 0 || a(j, i) != 0)) ? 1 : 0;
    return out;
}

class Network {
public:
    Network() = default;
    /// Throws DimensionError unless the matrix is square, symmetric and zero-diagonal
    /// and the partition (if any) has one label per node.
    explicit Network(Adjacency adjacency, std::optional<CommunityPartition> truth = std::nullopt);

    static Network from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                              std::optional<CommunityPartition> truth = std::nullopt);

    int size() const { return static_cast<int>(adjacency_.rows()); }
    const Adjacency& adjacency() const { return adjacency_; }
    const std::optional<CommunityPartition>& truth_partition() const { return truth_; }

    long edge_count() const;
    Eigen::VectorXi degrees() const;
    std::vector<std::vector<int>> neighbor_lists() const;
    /// Upper-triangle pairs (u < v).
    std::vector<std::pair<int, int>> edges() const;

private:
    Adjacency adjacency_;
    std::optional<CommunityPartition> truth_;
};

struct LoadDiagnostics {
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
    bool one_based = false;
};

/// Reads "u v" lines (`#` comments; optional "# nodes: N" header). Ids are 1-based when
/// the smallest id is 1, else 0-based. Self-loops and duplicates are dropped and counted.
Network load_edge_list(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& truth_path = std::nullopt,
                       LoadDiagnostics* diagnostics = nullptr);

/// One integer label per line; line i labels node i.
CommunityPartition load_partition(const std::filesystem::path& path);

/// Data directory for the named benchmark networks ($NETCOLLAB_DATA, else the build-time default).
std::filesystem::path data_directory();

std::vector<std::string> known_network_names();

/// Resolves a benchmark name: ZK, dolphin, polbooks, football (edge lists under the data
/// directory) or ER, BA, NW, WS (synthetic, mean degree about 6).
Network load_named_network(std::string_view name, int synthetic_n, std::uint64_t seed);

Network generate_er(int n, double p, std::uint64_t seed);
Network generate_ba(int n, int m, std::uint64_t seed);
Network generate_ws(int n, int k, double p_rewire, std::uint64_t seed);
Network generate_nw(int n, int k, double p_add, std::uint64_t seed);

}  // namespace netcollab
