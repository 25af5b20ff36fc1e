// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/errors.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teamlab
{

struct PairedSample
{
    /// Optional ids of the matched pairs, for reporting.
    std::vector<std::string> labels;
    std::vector<double> a;
    std::vector<double> b;
};

struct TestResult
{
    double statistic = 0.0;
    std::optional<double> effect_size;
    std::optional<double> mean_diff;
    std::size_t n = 0;
    /// Two-sided.
    std::optional<double> p_value;
};

struct BootstrapResult
{
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

inline constexpr int kDefaultResamples = 1000;

/// Sample mean with a percentile 95% interval from seeded resampling with
/// replacement. Throws StatsError(EmptySample) on empty input and
/// StatsError(InvalidArgument) for fewer than 100 resamples.
[[nodiscard]] BootstrapResult bootstrap_accuracy(const std::vector<bool>& correct,
                                                 int n_resamples = kDefaultResamples,
                                                 std::uint64_t seed = 0);

[[nodiscard]] double mean(std::span<const double> x);
/// n - 1 denominator; needs at least two values.
[[nodiscard]] double sample_sd(std::span<const double> x);

/// 1-based ranks with ties sharing their average rank.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> x);

/// b - a, elementwise. Throws StatsError(LengthMismatch) on unequal sides.
[[nodiscard]] std::vector<double> differences(const PairedSample& s);

/// t on d = b - a with sample sd; effect_size is Cohen's d = mean(d)/sd(d).
/// Throws StatsError(ZeroVariance) when every difference is equal.
[[nodiscard]] TestResult paired_t(const PairedSample& s);

/// mean(d)/sd(d) on d = b - a.
[[nodiscard]] double cohens_d(const PairedSample& s);

/// W = min(W+, W-) after dropping zero differences, average ranks for
/// ties; p from the tie-corrected normal approximation.
[[nodiscard]] TestResult wilcoxon_signed_rank(const PairedSample& s);

/// H over pooled average ranks with the tie correction; p from chi-square
/// with k - 1 degrees of freedom.
[[nodiscard]] TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Throws StatsError(LengthMismatch) on unequal lengths or fewer than two
/// points, StatsError(ZeroVariance) when a side is constant.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

/// "***", "**", "*" or "" at 0.001, 0.01 and 0.05.
[[nodiscard]] std::string stars(std::optional<double> p);

/// Two-sided p-value of a t statistic.
[[nodiscard]] double t_test_p(double t, double df);
/// Upper tail of chi-square.
[[nodiscard]] double chi_square_p(double x, double df);
/// Two-sided p-value of a standard normal statistic.
[[nodiscard]] double normal_two_sided_p(double z);

} // namespace teamlab
