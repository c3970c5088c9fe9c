#pragma once

#include <span>

namespace netcollab {

/// Two-sided Wilcoxon rank-sum p-value. Exact null distribution of the midrank sum when the
/// smaller sample has fewer than 8 values, otherwise the tie-corrected normal approximation
/// with continuity correction. Throws DomainError for an empty sample.
double rank_sum_test(std::span<const double> a, std::span<const double> b);

inline constexpr int kExactRankSumLimit = 8;

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);
double median(std::span<const double> values);

}  // namespace netcollab
