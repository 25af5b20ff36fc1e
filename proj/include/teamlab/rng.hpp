// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace teamlab
{

[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
    for (unsigned char c: data)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a tag.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept
{
    return splitmix64(fnv1a64(tag, splitmix64(seed)));
}

/// Seeded generator whose output is identical on every platform.
///
/// std::mt19937_64 is fully specified by the standard, but the std
/// distributions are not, so bounded draws are done here.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed): _engine(seed) {}

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        auto const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = 0;
        do
            x = _engine();
        while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(_engine() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k)
    {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = i;
        for (std::size_t i = 0; i < k && i < n; ++i)
            std::swap(idx[i], idx[i + below(n - i)]);
        idx.resize(std::min(k, n));
        return idx;
    }

  private:
    std::mt19937_64 _engine;
};

} // namespace teamlab
