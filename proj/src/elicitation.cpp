// SPDX-License-Identifier: Apache-2.0
#include <teamlab/elicitation.hpp>
#include <teamlab/prompt_text.hpp>

#include <array>
#include <cctype>

namespace teamlab
{

namespace
{

constexpr std::array<ProbeItem, 5> kPreItems {{
    { ProbePhase::Pre, 1, "What do you think is the primary goal of the team?", ProbeKind::Open },
    { ProbePhase::Pre, 2, "What is your role in the team?", ProbeKind::Open },
    { ProbePhase::Pre, 3, "How confident are you about executing the role?", ProbeKind::Likert },
    { ProbePhase::Pre, 4, "How confident are you in your team executing the task?", ProbeKind::Likert },
    { ProbePhase::Pre, 5, "How confident are you in the team’s ability to integrate diverse perspectives during the task?", ProbeKind::Likert },
}};

constexpr std::array<ProbeItem, 6> kPostItems {{
    { ProbePhase::Post, 1, "How do you think your team performed to achieve the goal?", ProbeKind::Likert },
    { ProbePhase::Post, 2, "How well do you think you contributed to the team?", ProbeKind::Likert },
    { ProbePhase::Post, 3, "How well do you think your team members contributed to the team?", ProbeKind::Likert },
    { ProbePhase::Post, 4, "Were you able to understand your team members?", ProbeKind::Likert },
    { ProbePhase::Post, 5, "Do you think your team members understood you?", ProbeKind::Likert },
    { ProbePhase::Post, 6, "Do you think you could come up with these solutions that the group came with?", ProbeKind::Likert },
}};

bool is_digit(char c)
{
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

struct Marker
{
    std::size_t begin = 0;
    std::size_t end = 0;
    int index = 0;
};

// A numbered marker at `i`: optional Q, the number, then '.', ':' or ')'.
// A '.' directly followed by a digit is a decimal, not a marker.
std::optional<Marker> marker_at(std::string_view s, std::size_t i, int n_items)
{
    if (i > 0)
    {
        auto const prev = s[i - 1];
        if (!(std::isspace(static_cast<unsigned char>(prev)) || prev == '(' || prev == '*' || prev == '['))
            return std::nullopt;
    }
    auto j = i;
    if (j < s.size() && (s[j] == 'Q' || s[j] == 'q'))
        ++j;
    auto const digits = j;
    int k = 0;
    while (j < s.size() && is_digit(s[j]) && j - digits < 3)
        k = k * 10 + (s[j++] - '0');
    if (j == digits || j >= s.size() || (s[j] != '.' && s[j] != ':' && s[j] != ')'))
        return std::nullopt;
    if (s[j] == '.' && j + 1 < s.size() && is_digit(s[j + 1]))
        return std::nullopt;
    if (k < 1 || k > n_items)
        return std::nullopt;
    return Marker { i, j + 1, k };
}

std::vector<Marker> markers(std::string_view s, int n_items)
{
    std::vector<Marker> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (auto m = marker_at(s, i, n_items))
        {
            out.push_back(*m);
            i = m->end - 1;
        }
    return out;
}

// First standalone 1..5 in a segment, allowing a "/5" denominator.
std::optional<int> first_score(std::string_view seg)
{
    for (std::size_t i = 0; i < seg.size(); ++i)
    {
        if (!is_digit(seg[i]))
            continue;
        auto j = i;
        while (j < seg.size() && is_digit(seg[j]))
            ++j;
        bool const glued_before = i > 0 && (std::isalpha(static_cast<unsigned char>(seg[i - 1])) || seg[i - 1] == '.' || seg[i - 1] == '/');
        bool const decimal = j + 1 < seg.size() && seg[j] == '.' && is_digit(seg[j + 1]);
        bool const glued_after = j < seg.size() && std::isalpha(static_cast<unsigned char>(seg[j]));
        auto const value = seg.substr(i, j - i);
        i = j;
        if (glued_before || decimal || glued_after)
            continue;
        if (j < seg.size() && seg[j] == '/')
        {
            auto const den = seg.substr(j + 1, 1);
            if (den != "5" || (j + 2 < seg.size() && is_digit(seg[j + 2])))
                continue;
        }
        if (value.size() == 1 && value[0] >= '1' && value[0] <= '5')
            return value[0] - '0';
        return std::nullopt;
    }
    return std::nullopt;
}

// Segments keyed by item. A marker met while the previous segment is still
// blank is read as that item's value ("3. 4. ..." answers item 3 with 4).
std::vector<std::pair<int, std::string>> segments(std::string_view s, int n_items)
{
    auto const ms = markers(s, n_items);
    std::vector<std::pair<int, std::string>> out;
    for (std::size_t m = 0; m < ms.size(); ++m)
    {
        auto const stop = m + 1 < ms.size() ? ms[m + 1].begin : s.size();
        auto seg = std::string(s.substr(ms[m].end, stop - ms[m].end));
        if (trim(seg).empty() && m + 1 < ms.size() && ms[m + 1].index <= 5)
        {
            auto const& next = ms[m + 1];
            out.emplace_back(ms[m].index, std::string(s.substr(next.begin, next.end - next.begin - 1)));
            ++m;
            continue;
        }
        out.emplace_back(ms[m].index, std::move(seg));
    }
    return out;
}

} // namespace

std::span<const ProbeItem> probe_items(ProbePhase phase)
{
    if (phase == ProbePhase::Pre)
        return kPreItems;
    return kPostItems;
}

std::string to_string(ProbePhase phase)
{
    return phase == ProbePhase::Pre ? "pre" : "post";
}

std::map<int, int> parse_likert(std::string_view text, int n_items)
{
    if (n_items < 1)
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "n_items", "must be at least 1");
    std::map<int, int> out;
    for (const auto& [k, seg]: segments(text, n_items))
        if (auto v = first_score(seg))
            out[k] = *v;
    return out;
}

std::map<int, std::string> parse_numbered(std::string_view text, int n_items)
{
    std::map<int, std::string> out;
    for (const auto& [k, seg]: segments(text, n_items))
    {
        auto t = trim(seg);
        if (!t.empty())
            out[k] = std::move(t);
    }
    return out;
}

std::string transcript_summary(const Transcript& t)
{
    int rounds = 0;
    for (const auto& turn: t.turns)
        rounds = std::max(rounds, turn.round + 1);
    if (t.verdict)
        rounds = t.verdict->rounds_used;
    std::string out = "Your team worked through " + std::to_string(rounds) + (rounds == 1 ? " round" : " rounds");
    if (t.verdict)
        out += " and gave the final answer " + std::string(1, t.verdict->final_answer) + ".";
    else
        out += " and did not reach a final answer.";
    return out;
}

ChatRequest build_probe_prompt(ProbePhase phase, const ProbeAgent& agent, const std::optional<std::string>& summary)
{
    if ((phase == ProbePhase::Post) != summary.has_value())
        throw ValidationError(ValidationError::Kind::PreconditionViolated,
                              "summary",
                              "must be present exactly for the post phase");

    std::string body;
    if (phase == ProbePhase::Pre)
        body = "Before the task begins, please answer the following questions about your team. "
               "Questions 1 and 2 are open-ended; answer questions 3 to 5 on a 1-5 scale (5 = highest).\n\n";
    else
        body = "The task is complete. " + *summary + "\n\n"
               "Please answer the following questions on a 1-5 scale (5 = highest).\n\n";
    for (const auto& item: probe_items(phase))
        body += std::to_string(item.index) + ". " + std::string(item.text) + "\n";
    body += "\nNumber each answer to match its question.";

    ChatRequest req;
    req.system = agent.framing;
    req.max_tokens = kAgentMaxTokens;
    req.messages.push_back(ChatMessage { Role::User, std::move(body) });
    return req;
}

ScoreSet score_response(ProbePhase phase, int agent_id, std::string raw)
{
    auto const items = probe_items(phase);
    auto const n = static_cast<int>(items.size());
    auto const likert = parse_likert(raw, n);
    auto const text = parse_numbered(raw, n);

    ScoreSet s;
    s.agent_id = agent_id;
    s.phase = phase;
    for (const auto& item: items)
    {
        if (item.kind == ProbeKind::Open)
        {
            if (auto it = text.find(item.index); it != text.end())
                s.free_text[item.index] = it->second;
            continue;
        }
        if (auto it = likert.find(item.index); it != likert.end())
            s.scores[item.index] = it->second;
        else
            s.missing.push_back(item.index);
    }
    s.raw_text = std::move(raw);
    return s;
}

std::vector<ScoreSet> run_probe(ProbePhase phase,
                                std::span<const ProbeAgent> agents,
                                Backend& backend,
                                const std::optional<std::string>& summary,
                                const std::string& model_name)
{
    std::vector<ChatRequest> requests;
    for (const auto& agent: agents)
    {
        auto req = build_probe_prompt(phase, agent, summary);
        req.model_name = model_name;
        requests.push_back(std::move(req));
    }
    auto outcomes = complete_all(backend, requests);
    std::vector<ScoreSet> out;
    for (std::size_t i = 0; i < agents.size(); ++i)
    {
        if (outcomes[i].error)
            std::rethrow_exception(outcomes[i].error);
        out.push_back(score_response(phase, agents[i].agent_id, std::move(outcomes[i].text)));
    }
    return out;
}

std::vector<ProbeDelta> pair_pre_post(const ScoreSet& pre, const ScoreSet& post)
{
    constexpr std::array<std::pair<int, int>, 3> kPairs {{ { 3, 2 }, { 4, 3 }, { 5, 4 } }};
    std::vector<ProbeDelta> out;
    for (auto [a, b]: kPairs)
    {
        auto ia = pre.scores.find(a);
        auto ib = post.scores.find(b);
        if (ia == pre.scores.end() || ib == post.scores.end())
            continue;
        out.push_back(ProbeDelta { a, b, ib->second - ia->second });
    }
    return out;
}

} // namespace teamlab
