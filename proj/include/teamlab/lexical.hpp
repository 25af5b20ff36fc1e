// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamlab
{

using TokenCounts = std::map<std::string, int>;

/// The fixed 150-word English stopword list, sorted.
[[nodiscard]] std::span<const std::string_view> stopwords();

[[nodiscard]] bool is_stopword(std::string_view word);

/// Lowercases, turns every non-alphanumeric ASCII byte into a separator
/// (apostrophes are dropped, so "team's" reads "teams"), and drops stopwords.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

[[nodiscard]] TokenCounts count_tokens(std::span<const std::string> documents);

struct WordDelta
{
    std::string word;
    double delta = 0.0;

    bool operator==(const WordDelta&) const = default;
};

/// Add-alpha smoothed log-odds of each word in `a` against `b` over their
/// joint vocabulary, ranked by delta descending (ties by word). `top_k` of
/// zero returns every word. Throws StatsError(EmptyCorpus) if either side
/// has no tokens.
[[nodiscard]] std::vector<WordDelta> log_odds(const TokenCounts& a,
                                              const TokenCounts& b,
                                              std::size_t top_k = 0,
                                              double alpha = 1.0);

} // namespace teamlab
