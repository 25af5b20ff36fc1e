// SPDX-License-Identifier: Apache-2.0
#include <teamlab/errors.hpp>
#include <teamlab/lexical.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>

namespace teamlab
{

namespace
{

constexpr std::array<std::string_view, 150> kStopwords {
    "a", "about", "above", "across", "after", "again", "against", "all", "along", "also", "am",
    "among", "an", "and", "any", "are", "around", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "cannot", "could", "did", "do",
    "does", "doing", "dont", "down", "during", "each", "ever", "few", "for", "from", "further",
    "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him", "himself",
    "his", "how", "however", "i", "if", "im", "in", "into", "is", "it", "its", "itself", "just",
    "let", "may", "me", "might", "more", "most", "must", "my", "myself", "no", "nor", "not", "now",
    "of", "off", "on", "once", "only", "onto", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "same", "shall", "she", "should", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "very", "via", "was",
    "we", "were", "what", "when", "where", "whether", "which", "while", "who", "whom", "why",
    "will", "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself",
    "yourselves"
};

} // namespace

std::span<const std::string_view> stopwords()
{
    return kStopwords;
}

bool is_stopword(std::string_view word)
{
    return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !is_stopword(cur))
            out.push_back(cur);
        cur.clear();
    };
    for (char ch: text)
    {
        auto const c = static_cast<unsigned char>(ch);
        if (c == '\'')
            continue;
        if (c < 0x80 && !std::isalnum(c))
        {
            flush();
            continue;
        }
        cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
    flush();
    return out;
}

TokenCounts count_tokens(std::span<const std::string> documents)
{
    TokenCounts counts;
    for (const auto& doc: documents)
        for (auto& tok: tokenize(doc))
            ++counts[std::move(tok)];
    return counts;
}

std::vector<WordDelta> log_odds(const TokenCounts& a, const TokenCounts& b, std::size_t top_k, double alpha)
{
    auto total = [](const TokenCounts& c) {
        double n = 0.0;
        for (const auto& [w, k]: c)
            n += k;
        return n;
    };
    auto const na = total(a);
    auto const nb = total(b);
    if (na <= 0.0 || nb <= 0.0)
        throw StatsError(StatsError::Kind::EmptyCorpus, "log-odds needs two nonempty corpora");

    std::set<std::string> vocab;
    for (const auto& [w, k]: a)
        if (k > 0)
            vocab.insert(w);
    for (const auto& [w, k]: b)
        if (k > 0)
            vocab.insert(w);
    auto const v = static_cast<double>(vocab.size());

    auto count = [](const TokenCounts& c, const std::string& w) {
        auto it = c.find(w);
        return it == c.end() ? 0.0 : static_cast<double>(it->second);
    };

    std::vector<WordDelta> out;
    out.reserve(vocab.size());
    for (const auto& w: vocab)
    {
        auto const ca = count(a, w);
        auto const cb = count(b, w);
        auto const la = std::log((ca + alpha) / (na + alpha * v - ca - alpha));
        auto const lb = std::log((cb + alpha) / (nb + alpha * v - cb - alpha));
        out.push_back(WordDelta { w, la - lb });
    }
    std::sort(out.begin(), out.end(), [](const WordDelta& x, const WordDelta& y) {
        return x.delta != y.delta ? x.delta > y.delta : x.word < y.word;
    });
    if (top_k > 0 && out.size() > top_k)
        out.resize(top_k);
    return out;
}

} // namespace teamlab
