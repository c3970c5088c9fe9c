#pragma once

#include "netcollab/dynamics.hpp"
#include "netcollab/error.hpp"
#include "netcollab/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace netcollab {

/// Candidate network: N*N bits, row-major, row i is node i's link vector. Diagonal stays 0.
using Genome = VectorX<std::uint8_t>;

/// All objectives are minimized; maximization targets are negated by the caller.
using ObjectiveVector = Eigen::VectorXd;

using GenomeView = Eigen::Map<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Side length N of an N*N genome; throws DimensionError when the length is not a square.
int genome_side(const Genome& genome);

inline GenomeView as_matrix(const Genome& genome) {
    const int n = genome_side(genome);
    return GenomeView(genome.data(), n, n);
}

template <typename Derived>
Genome genome_from_adjacency(const Eigen::MatrixBase<Derived>& a) {
    const Eigen::Index n = a.rows();
    Genome g(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g[i * n + j] = (i != j && a(i, j) != 0) ? 1 : 0;
    return g;
}

/// (h, g): summed squared residual of every node's linear system, and the number of set bits.
ObjectiveVector nr_objectives(const NrProblem& problem, const Genome& genome);

/// Residual of one node's system for a binary link row, summing only the selected columns.
template <typename DerivedRow>
double node_residual(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                     const Eigen::MatrixBase<DerivedRow>& row) {
    Eigen::VectorXd r = target;
    for (Eigen::Index j = 0; j < row.size(); ++j)
        if (row(j)) r -= design.col(j);
    return r.squaredNorm();
}

/// Newman modularity of a partition on an undirected graph; 0 for an edgeless graph.
template <typename Derived>
double modularity(const Eigen::MatrixBase<Derived>& adjacency, const CommunityPartition& labels) {
    const Eigen::Index n = adjacency.rows();
    if (labels.size() != n) throw DimensionError("partition length does not match node count");
    const CommunityPartition canon = canonical_labels(labels);
    const int s = n == 0 ? 0 : canon.maxCoeff() + 1;
    Eigen::VectorXd intra = Eigen::VectorXd::Zero(s);
    Eigen::VectorXd degree_sum = Eigen::VectorXd::Zero(s);
    double twice_edges = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double aij = static_cast<double>(adjacency(i, j));
            twice_edges += aij;
            degree_sum[canon[i]] += aij;
            if (canon[i] == canon[j]) intra[canon[i]] += aij;
        }
    if (twice_edges == 0.0) return 0.0;
    const double e = twice_edges / 2.0;
    // intra counts each internal edge twice
    return ((intra / 2.0) / e - (degree_sum / twice_edges).array().square().matrix()).sum();
}

/// Neighbor-list view used by the community-detection inner loops.
struct SparseGraph {
    std::vector<std::vector<int>> neighbors;
    long edges = 0;

    int size() const { return static_cast<int>(neighbors.size()); }

    template <typename Derived>
    static SparseGraph from_adjacency(const Eigen::MatrixBase<Derived>& a) {
        SparseGraph g;
        g.neighbors.resize(a.rows());
        long twice = 0;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                if (i != j && a(i, j) != 0) {
                    g.neighbors[i].push_back(static_cast<int>(j));
                    ++twice;
                }
        g.edges = twice / 2;
        return g;
    }
};

/// Same value as the dense overload; labels must lie in [0, N).
double modularity(const SparseGraph& graph, const CommunityPartition& labels);

/// Normalized mutual information between two partitions of the same node set.
double nmi(const CommunityPartition& a, const CommunityPartition& b);

/// Matthews correlation over all off-diagonal ordered pairs; 0 when undefined.
double mcc(const Genome& predicted, const Network& truth);

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

}  // namespace netcollab
