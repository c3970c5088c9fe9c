#include "netcollab/stats.hpp"

#include "netcollab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace netcollab {

namespace {

// Midranks of the pooled sample, doubled so they stay integral.
std::vector<long> doubled_midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return pooled[x] < pooled[y]; });
    std::vector<long> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const long doubled = static_cast<long>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

double exact_p(const std::vector<long>& ranks, std::size_t n1) {
    const std::size_t n = ranks.size();
    std::vector<long> largest(ranks);
    std::sort(largest.begin(), largest.end(), std::greater<>());
    const long max_sum = std::accumulate(largest.begin(), largest.begin() + static_cast<long>(n1), 0L);
    // ways[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<long double>> ways(n1 + 1, std::vector<long double>(max_sum + 1, 0.0L));
    ways[0][0] = 1.0L;
    for (std::size_t item = 0; item < n; ++item) {
        const long r = ranks[item];
        for (std::size_t k = std::min(n1, item + 1); k >= 1; --k)
            for (long s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
    }
    long observed = 0;
    for (std::size_t i = 0; i < n1; ++i) observed += ranks[i];
    const long centre = static_cast<long>(n1 * (n + 1));  // mean of the doubled sum
    const long observed_gap = std::labs(observed - centre);
    long double total = 0.0L, extreme = 0.0L;
    for (long s = 0; s <= max_sum; ++s) {
        total += ways[n1][s];
        if (std::labs(s - centre) >= observed_gap) extreme += ways[n1][s];
    }
    return static_cast<double>(std::min(1.0L, extreme / total));
}

double normal_p(const std::vector<double>& pooled, const std::vector<long>& ranks, std::size_t n1) {
    const double n = static_cast<double>(ranks.size());
    const double na = static_cast<double>(n1);
    const double nb = n - na;
    double w = 0.0;
    for (std::size_t i = 0; i < n1; ++i) w += ranks[i] / 2.0;
    const double u = w - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;

    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) return 1.0;
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

double rank_sum_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("rank-sum test needs two nonempty samples");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = doubled_midranks(pooled);
    if (std::min(a.size(), b.size()) < static_cast<std::size_t>(kExactRankSumLimit)) return exact_p(ranks, a.size());
    return normal_p(pooled, ranks, a.size());
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) {
    if (values.empty()) return 0.0;
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace netcollab
