#include "netcollab/objectives.hpp"

#include <cmath>

namespace netcollab {

int genome_side(const Genome& genome) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(genome.size()))));
    if (n * n != genome.size())
        throw DimensionError("genome length " + std::to_string(genome.size()) + " is not a square");
    return static_cast<int>(n);
}

ObjectiveVector nr_objectives(const NrProblem& problem, const Genome& genome) {
    const int n = problem.size();
    if (genome.size() != problem.genome_length())
        throw DimensionError("genome length " + std::to_string(genome.size()) + " != N^2 = " +
                             std::to_string(problem.genome_length()));
    double h = 0.0;
    long g = 0;
    Eigen::VectorXd r;
    for (int i = 0; i < n; ++i) {
        const std::uint8_t* row = genome.data() + Eigen::Index(i) * n;
        const Eigen::MatrixXd& u = problem.design[i];
        r = problem.target[i];
        for (int j = 0; j < n; ++j)
            if (row[j]) {
                r -= u.col(j);
                ++g;
            }
        h += r.squaredNorm();
    }
    ObjectiveVector f(2);
    f << h, static_cast<double>(g);
    return f;
}

double modularity(const SparseGraph& graph, const CommunityPartition& labels) {
    const int n = graph.size();
    if (labels.size() != n) throw DimensionError("partition length does not match node count");
    if (graph.edges == 0) return 0.0;
    std::vector<double> intra(n, 0.0), degree_sum(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int li = labels[i];
        if (li < 0 || li >= n) throw RangeError("community label outside [0, N)");
        degree_sum[li] += static_cast<double>(graph.neighbors[i].size());
        for (int j : graph.neighbors[i])
            if (labels[j] == li) intra[li] += 1.0;
    }
    const double e = static_cast<double>(graph.edges);
    double q = 0.0;
    for (int s = 0; s < n; ++s) {
        if (degree_sum[s] == 0.0 && intra[s] == 0.0) continue;
        const double frac = degree_sum[s] / (2.0 * e);
        q += (intra[s] / 2.0) / e - frac * frac;
    }
    return q;
}

double nmi(const CommunityPartition& a, const CommunityPartition& b) {
    if (a.size() != b.size()) throw DimensionError("nmi needs partitions of equal length");
    if (a.size() == 0) throw DimensionError("nmi needs at least one node");
    const CommunityPartition ca = canonical_labels(a);
    const CommunityPartition cb = canonical_labels(b);
    const int s1 = ca.maxCoeff() + 1;
    const int s2 = cb.maxCoeff() + 1;
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(s1, s2);
    for (Eigen::Index i = 0; i < ca.size(); ++i) confusion(ca[i], cb[i]) += 1.0;

    // Identical up to relabeling: one nonzero per row and per column.
    if (s1 == s2 && ((confusion.array() > 0).cast<int>().rowwise().sum() == 1).all() &&
        ((confusion.array() > 0).cast<int>().colwise().sum() == 1).all())
        return 1.0;

    const double total = static_cast<double>(ca.size());
    const Eigen::VectorXd rows = confusion.rowwise().sum();
    const Eigen::RowVectorXd cols = confusion.colwise().sum();
    double numerator = 0.0;
    for (int i = 0; i < s1; ++i)
        for (int j = 0; j < s2; ++j) {
            const double aij = confusion(i, j);
            if (aij > 0) numerator += aij * std::log(aij * total / (rows[i] * cols[j]));
        }
    numerator *= -2.0;
    double denominator = 0.0;
    for (int i = 0; i < s1; ++i) denominator += rows[i] * std::log(rows[i] / total);
    for (int j = 0; j < s2; ++j) denominator += cols[j] * std::log(cols[j] / total);
    if (denominator == 0.0) return numerator == 0.0 ? 1.0 : 0.0;
    return numerator / denominator;
}

double mcc(const Genome& predicted, const Network& truth) {
    const int n = truth.size();
    if (predicted.size() != Eigen::Index(n) * n)
        throw DimensionError("predicted genome does not match the truth network size");
    const auto& a = truth.adjacency();
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool p = predicted[Eigen::Index(i) * n + j] != 0;
            const bool t = a(i, j) != 0;
            if (p && t) ++tp;
            else if (p) ++fp;
            else if (t) ++fn;
            else ++tn;
        }
    const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    if (denom == 0.0) return 0.0;
    return (tp * tn - fp * fn) / denom;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) throw DimensionError("dominance needs objective vectors of equal length");
    bool strictly_better = false;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly_better = true;
    }
    return strictly_better;
}

}  // namespace netcollab
