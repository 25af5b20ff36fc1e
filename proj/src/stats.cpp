// SPDX-License-Identifier: Apache-2.0
#include <teamlab/rng.hpp>
#include <teamlab/stats.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace teamlab
{

namespace
{

void require(bool ok, StatsError::Kind kind, const char* detail)
{
    if (!ok)
        throw StatsError(kind, detail);
}

} // namespace

BootstrapResult bootstrap_accuracy(const std::vector<bool>& correct, int n_resamples, std::uint64_t seed)
{
    require(!correct.empty(), StatsError::Kind::EmptySample, "bootstrap needs at least one outcome");
    require(n_resamples >= 100, StatsError::Kind::InvalidArgument, "bootstrap needs at least 100 resamples");

    auto const n = correct.size();
    auto const hits = static_cast<double>(std::count(correct.begin(), correct.end(), true));

    Rng rng(derive_seed(seed, "bootstrap_accuracy"));
    std::vector<double> means(static_cast<std::size_t>(n_resamples));
    for (auto& m: means)
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i)
            k += correct[rng.below(n)] ? 1 : 0;
        m = static_cast<double>(k) / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());

    // Linear interpolation between order statistics at 2.5% and 97.5%.
    auto quantile = [&](double q) {
        auto const pos = q * static_cast<double>(means.size() - 1);
        auto const lo = static_cast<std::size_t>(std::floor(pos));
        auto const hi = std::min(lo + 1, means.size() - 1);
        return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
    };
    return BootstrapResult { hits / static_cast<double>(n), quantile(0.025), quantile(0.975) };
}

double mean(std::span<const double> x)
{
    require(!x.empty(), StatsError::Kind::EmptySample, "mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x)
{
    require(x.size() >= 2, StatsError::Kind::EmptySample, "sd needs at least two values");
    auto const m = mean(x);
    double ss = 0.0;
    for (auto v: x)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::vector<double> average_ranks(std::span<const double> x)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t { 0 });
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return x[i] < x[j]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();)
    {
        auto j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]])
            ++j;
        auto const avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (auto k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::vector<double> differences(const PairedSample& s)
{
    require(s.a.size() == s.b.size(), StatsError::Kind::LengthMismatch, "paired sides differ in length");
    std::vector<double> d(s.a.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = s.b[i] - s.a[i];
    return d;
}

TestResult paired_t(const PairedSample& s)
{
    auto const d = differences(s);
    require(d.size() >= 2, StatsError::Kind::EmptySample, "paired t needs at least two pairs");
    auto const m = mean(d);
    auto const sd = sample_sd(d);
    require(sd > 0.0, StatsError::Kind::ZeroVariance, "differences have zero variance");

    auto const n = static_cast<double>(d.size());
    TestResult r;
    r.n = d.size();
    r.statistic = m / (sd / std::sqrt(n));
    r.effect_size = m / sd;
    r.mean_diff = m;
    r.p_value = t_test_p(r.statistic, n - 1.0);
    return r;
}

double cohens_d(const PairedSample& s)
{
    auto const d = differences(s);
    auto const sd = sample_sd(d);
    require(sd > 0.0, StatsError::Kind::ZeroVariance, "differences have zero variance");
    return mean(d) / sd;
}

TestResult wilcoxon_signed_rank(const PairedSample& s)
{
    auto const all = differences(s);
    std::vector<double> d;
    for (auto v: all)
        if (v != 0.0)
            d.push_back(v);
    require(!d.empty(), StatsError::Kind::AllZeroDiffs, "every difference is zero");
    require(d.size() >= 2, StatsError::Kind::EmptySample, "wilcoxon needs two nonzero differences");

    std::vector<double> mags(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        mags[i] = std::fabs(d[i]);
    auto const ranks = average_ranks(mags);
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        (d[i] > 0 ? plus : minus) += ranks[i];

    auto const n = static_cast<double>(d.size());
    double tie_term = 0.0;
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();)
    {
        auto j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        auto const t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    auto const w = std::min(plus, minus);
    auto const mu = n * (n + 1.0) / 4.0;
    auto const var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;

    TestResult r;
    r.n = all.size();
    r.statistic = w;
    r.mean_diff = mean(all);
    if (var > 0.0)
        r.p_value = normal_two_sided_p((w - mu) / std::sqrt(var));
    return r;
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups)
{
    require(groups.size() >= 2, StatsError::Kind::TooFewGroups, "kruskal-wallis needs at least two groups");
    std::vector<double> pooled;
    for (const auto& g: groups)
    {
        require(!g.empty(), StatsError::Kind::EmptySample, "kruskal-wallis group is empty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    auto const ranks = average_ranks(pooled);
    auto const n = static_cast<double>(pooled.size());

    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g: groups)
    {
        double r = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            r += ranks[offset + i];
        offset += g.size();
        h += r * r / static_cast<double>(g.size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();)
    {
        auto j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        auto const t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    auto const correction = 1.0 - tie_term / (n * n * n - n);

    TestResult r;
    r.n = pooled.size();
    // All values tied: no rank information at all.
    r.statistic = correction > 0.0 ? h / correction : 0.0;
    r.p_value = chi_square_p(r.statistic, static_cast<double>(groups.size() - 1));
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, StatsError::Kind::LengthMismatch, "correlation needs two equal-length sides of at least two");
    auto const mx = mean(x);
    auto const my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0 && syy > 0.0, StatsError::Kind::ZeroVariance, "correlation with a constant side");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, StatsError::Kind::LengthMismatch, "correlation needs two equal-length sides of at least two");
    auto const rx = average_ranks(x);
    auto const ry = average_ranks(y);
    return pearson(rx, ry);
}

std::string stars(std::optional<double> p)
{
    if (!p)
        return "";
    if (*p < 0.001)
        return "***";
    if (*p < 0.01)
        return "**";
    if (*p < 0.05)
        return "*";
    return "";
}

double t_test_p(double t, double df)
{
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double chi_square_p(double x, double df)
{
    if (x <= 0.0)
        return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_two_sided_p(double z)
{
    boost::math::normal dist;
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z))));
}

} // namespace teamlab
