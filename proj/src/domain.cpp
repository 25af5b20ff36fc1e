// SPDX-License-Identifier: Apache-2.0
#include <teamlab/domain.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace teamlab
{

namespace
{

bool is_space(char c)
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_alnum(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char lower(char c)
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view word)
{
    if (pos + word.size() > s.size())
        return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (lower(s[pos + i]) != word[i])
            return false;
    return true;
}

std::size_t skip_spaces(std::string_view s, std::size_t pos)
{
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
        ++pos;
    return pos;
}

// Matches "answer" + (":" | " is" [":"]) + decorations + label at `pos`.
std::optional<Label> match_answer_phrase(std::string_view s, std::size_t pos, std::string_view labels)
{
    if (pos > 0 && is_alnum(s[pos - 1]))
        return std::nullopt;
    auto i = pos + 6;
    if (i < s.size() && s[i] == '*')
        while (i < s.size() && s[i] == '*')
            ++i;
    i = skip_spaces(s, i);
    if (i < s.size() && s[i] == ':')
        ++i;
    else if (starts_with_ci(s, i, "is") && (i + 2 >= s.size() || !is_alnum(s[i + 2])))
    {
        i += 2;
        i = skip_spaces(s, i);
        if (i < s.size() && s[i] == ':')
            ++i;
    }
    else
        return std::nullopt;

    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '*' || s[i] == '(' || s[i] == '['))
        ++i;
    if (i >= s.size())
        return std::nullopt;
    auto const letter = s[i];
    if (labels.find(letter) == std::string_view::npos)
        return std::nullopt;
    if (i + 1 < s.size() && is_alnum(s[i + 1]))
        return std::nullopt;
    return letter;
}

} // namespace

std::string to_string(DatasetId id)
{
    switch (id)
    {
        case DatasetId::CS: return "CS";
        case DatasetId::ST: return "ST";
        case DatasetId::SQA: return "SQA";
        case DatasetId::IH: return "IH";
    }
    return "?";
}

DatasetId dataset_from_string(std::string_view name)
{
    if (name == "CS")
        return DatasetId::CS;
    if (name == "ST")
        return DatasetId::ST;
    if (name == "SQA")
        return DatasetId::SQA;
    if (name == "IH")
        return DatasetId::IH;
    throw ValidationError(ValidationError::Kind::InvalidConfig, "dataset", "unknown dataset '" + std::string(name) + "'");
}

std::string to_string(TeamStructure s)
{
    return s == TeamStructure::Flat ? "flat" : "hier";
}

std::string to_string(BackendError::Kind kind)
{
    switch (kind)
    {
        case BackendError::Kind::Network: return "network";
        case BackendError::Kind::RateLimited: return "rate_limited";
        case BackendError::Kind::MalformedResponse: return "malformed_response";
        case BackendError::Kind::Timeout: return "timeout";
    }
    return "?";
}

std::string Question::labels() const
{
    std::string out;
    out.reserve(options.size());
    for (const auto& o: options)
        out.push_back(o.label);
    return out;
}

void normalize_labels(Question& q)
{
    for (auto& o: q.options)
        o.label = static_cast<char>(std::toupper(static_cast<unsigned char>(o.label)));
    q.gold = static_cast<char>(std::toupper(static_cast<unsigned char>(q.gold)));
}

void validate_question(const Question& q)
{
    using Kind = ValidationError::Kind;
    if (q.options.size() < 2)
        throw ValidationError(Kind::TooFewOptions, "options", "need at least 2 options, got " + std::to_string(q.options.size()));
    if (q.options.size() > 26)
        throw ValidationError(Kind::TooManyOptions, "options", "at most 26 options allowed");

    std::set<Label> seen;
    for (const auto& o: q.options)
        if (!seen.insert(o.label).second)
            throw ValidationError(Kind::DuplicateLabel, "options", std::string("duplicate label '") + o.label + "'");

    for (std::size_t i = 0; i < q.options.size(); ++i)
        if (q.options[i].label != static_cast<char>('A' + i))
            throw ValidationError(Kind::NonContiguousLabels,
                                  "options",
                                  std::string("expected label '") + static_cast<char>('A' + i) + "' at position " + std::to_string(i));

    if (!seen.contains(q.gold))
        throw ValidationError(Kind::GoldNotInOptions, "gold", std::string("gold '") + q.gold + "' is not an option label");
}

void sort_turns(std::vector<AgentTurn>& turns)
{
    std::stable_sort(turns.begin(), turns.end(), [](const AgentTurn& a, const AgentTurn& b) {
        return std::pair(a.round, a.agent_id) < std::pair(b.round, b.agent_id);
    });
}

std::optional<Label> parse_answer(std::string_view raw, std::string_view labels)
{
    std::optional<Label> phrase;
    for (std::size_t pos = 0; pos + 6 <= raw.size(); ++pos)
        if (starts_with_ci(raw, pos, "answer"))
            if (auto hit = match_answer_phrase(raw, pos, labels))
                phrase = hit;
    if (phrase)
        return phrase;

    std::optional<Label> token;
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
        auto const c = raw[i];
        if (labels.find(c) == std::string_view::npos)
            continue;
        auto const prev = i == 0 ? ' ' : raw[i - 1];
        auto const next = i + 1 < raw.size() ? raw[i + 1] : '\0';
        auto const after = i + 2 < raw.size() ? raw[i + 2] : ' ';
        if (prev == '(' && next == ')')
            token = c;
        else if ((is_space(prev) || prev == '*') && next == ')')
            token = c;
        else if ((is_space(prev) || prev == '*') && next == '.' && (is_space(after) || after == '*'))
            token = c;
    }
    return token;
}

std::optional<double> parse_confidence(std::string_view raw)
{
    for (std::size_t pos = 0; pos + 10 <= raw.size(); ++pos)
    {
        if (!starts_with_ci(raw, pos, "confidence"))
            continue;
        auto i = skip_spaces(raw, pos + 10);
        if (i >= raw.size() || (raw[i] != ':' && raw[i] != '='))
            continue;
        i = skip_spaces(raw, i + 1);
        double value = 0;
        auto const* first = raw.data() + i;
        auto const* last = raw.data() + raw.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc {})
            continue;
        if (ptr < last && *ptr == '%')
            value /= 100.0;
        else if (ptr < last && *ptr == '/')
            continue;
        if (value >= 0.0 && value <= 1.0)
            return value;
    }
    return std::nullopt;
}

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b]))
        ++b;
    while (e > b && is_space(s[e - 1]))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string extract_explanation(std::string_view raw)
{
    for (std::size_t pos = 0; pos + 12 <= raw.size(); ++pos)
        if (starts_with_ci(raw, pos, "explanation:"))
            return trim(raw.substr(pos + 12));
    return trim(raw);
}

AgentTurn make_turn(int agent_id, int round, std::string raw, std::string_view labels)
{
    AgentTurn turn;
    turn.agent_id = agent_id;
    turn.round = round;
    turn.answer = parse_answer(raw, labels);
    turn.explanation = extract_explanation(raw);
    turn.confidence = parse_confidence(raw);
    turn.raw_text = std::move(raw);
    return turn;
}

} // namespace teamlab
