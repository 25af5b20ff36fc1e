// SPDX-License-Identifier: Apache-2.0
#include <teamlab/csv.hpp>
#include <teamlab/elicitation.hpp>
#include <teamlab/judge.hpp>
#include <teamlab/prompt_text.hpp>
#include <teamlab/rng.hpp>
#include <teamlab/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

namespace teamlab
{

namespace
{

constexpr std::array<std::string_view, kJudgeDims> kDimNames {
    "comprehension", "coordination", "reasoning_strength", "coherence", "confidence",
};

constexpr std::array<std::string_view, kJudgeDims> kQuestions {
    "How well do the agents understand each other and collectively complete the task?",
    "How well do the agents coordinate, delegate tasks and integrate ideas?",
    "How strong is the team's reasoning compared to what an individual agent might produce?",
    "How clear, coherent and logically structure is the conversation?",
    "How confident are you in the team's final answer based on their reasoning?",
};

constexpr std::string_view kGuide =
    "Scale:\n"
    "1 = Lowest performance\n"
    "3 = Neutral baseline (conversation without teamwork)\n"
    "5 = Highest performance\n"
    "\n"
    "Scores 4-5: Indicating Improvement\n"
    "Q1: Team Alignment - Agents pick up on conversation, reasoning evolves, and move in the same direction.\n"
    "Q2: Leader-Member Dynamics - Leader gives instructions and members follow.\n"
    "Q3: Progressive Reasoning - Reasoning improves across rounds (later rounds stronger).\n"
    "Q4: Coherence - Conversation reaches logical conclusions with coherent explanations.\n"
    "Q5: Convincingness - Final answer is convincing and appropriate.\n"
    "\n"
    "Scores 1-2: Indicating Decline\n"
    "Q1: Misalignment - Agents diverge, get confused, or pick inconsistent answers.\n"
    "Q2: Fragmentation - No integration or delegation; reasoning fragmented.\n"
    "Q3: Illogical Reasoning - Explanations are illogical or self-descriptive.\n"
    "Q4: Lack of Logic - Conversation has contradictions or illogical elements.\n"
    "Q5: Confusion - Fails to deliver convincing answer, causes confusion.\n"
    "\n"
    "Score 3: Neutral\n"
    "Represents baseline reasoning, neither improved nor degraded.";

constexpr std::string_view kJudgeReprompt =
    "Please reply with five numbered scores from 1 to 5, one per question, in the form \"k: score\".";

std::string format_score(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    while (s.back() == '0')
        s.pop_back();
    if (s.back() == '.')
        s.pop_back();
    return s;
}

std::string tail_utf8(std::string_view s, std::size_t max_bytes)
{
    if (s.size() <= max_bytes)
        return std::string(s);
    auto start = s.size() - max_bytes;
    while (start < s.size() && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80)
        ++start;
    return std::string(s.substr(start));
}

std::string rationale_of(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto const at = lower.rfind("rationale:");
    if (at == std::string::npos)
        return trim(text);
    return trim(text.substr(at + 10));
}

} // namespace

std::span<const std::string_view> judge_dimension_names()
{
    return kDimNames;
}

std::span<const std::string_view> judge_questions()
{
    return kQuestions;
}

std::string_view scoring_guide()
{
    return kGuide;
}

Json to_json(const JudgeScore& s)
{
    Json dims = Json::object();
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        dims[std::string(kDimNames[d])] = s.dims[d];
    return Json { { "transcript_id", s.transcript_id }, { "dims", dims }, { "rationale", s.rationale } };
}

JudgeScore judge_score_from_json(const Json& j)
{
    JudgeScore s;
    s.transcript_id = j.at("transcript_id").get<std::string>();
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        s.dims[d] = j.at("dims").at(std::string(kDimNames[d])).get<int>();
    s.rationale = j.value("rationale", "");
    return s;
}

CalibrationSet load_calibration(const std::filesystem::path& path)
{
    CalibrationSet cal;
    std::size_t line = 0;
    for (const auto& row: read_jsonl(path))
    {
        ++line;
        Exemplar ex;
        if (row.contains("excerpt"))
            ex.excerpt = row["excerpt"].get<std::string>();
        else if (row.contains("transcript"))
            ex.excerpt = conversation_excerpt(transcript_from_json(row["transcript"]));
        else
            throw DatasetError(DatasetError::Kind::MalformedRecord, line, "calibration row needs excerpt or transcript");
        auto const& scores = row.at("scores");
        if (!scores.is_array() || scores.size() != kJudgeDims)
            throw DatasetError(DatasetError::Kind::MalformedRecord, line, "calibration scores must list five values");
        for (std::size_t d = 0; d < kJudgeDims; ++d)
            ex.scores[d] = scores[d].get<double>();
        cal.exemplars.push_back(std::move(ex));
    }
    return cal;
}

CalibrationSet select_calibration(const CalibrationSet& pool, std::size_t n)
{
    if (pool.size() <= n)
        return pool;
    auto mean_of = [](const Exemplar& e) { return std::accumulate(e.scores.begin(), e.scores.end(), 0.0) / kJudgeDims; };
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t { 0 });
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return mean_of(pool.exemplars[a]) < mean_of(pool.exemplars[b]);
    });
    CalibrationSet out;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const pos = n == 1 ? 0 : i * (pool.size() - 1) / (n - 1);
        out.exemplars.push_back(pool.exemplars[order[pos]]);
    }
    return out;
}

std::string render_conversation(const Transcript& t)
{
    bool const hier = t.structure == TeamStructure::Hierarchical;
    std::string out;
    int round = -1;
    for (const auto& turn: t.turns)
    {
        if (turn.round != round)
        {
            round = turn.round;
            out += (out.empty() ? "" : "\n") + std::string("Round ") + std::to_string(round) + "\n";
        }
        out += "Agent " + std::to_string(turn.agent_id);
        if (hier && turn.agent_id == 1)
            out += " (Leader)";
        out += ": " + trim(turn.raw_text) + "\n";
    }
    if (t.verdict)
        out += std::string("\nFinal answer: ") + t.verdict->final_answer + "\n";
    return out;
}

std::string conversation_excerpt(const Transcript& t, std::size_t max_chars)
{
    auto const full = render_conversation(t);
    if (full.size() <= max_chars)
        return full;
    return "..." + tail_utf8(full, max_chars - 3);
}

ChatRequest build_judge_prompt(const Transcript& t, const CalibrationSet& cal, const JudgeConfig& cfg)
{
    if (cal.exemplars.empty())
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "calibration", "must be nonempty");

    std::string body = "You will rate a conversation between AI agents working as a team on a multiple-choice reasoning question.\n\n";
    body += "Scoring Guide (1-5 Scale)\n";
    body += kGuide;
    body += "\n\nScored examples:\n";
    for (std::size_t i = 0; i < cal.exemplars.size(); ++i)
    {
        const auto& ex = cal.exemplars[i];
        body += "\nExample " + std::to_string(i + 1) + ":\n" + truncate_utf8(ex.excerpt, kExcerptChars) + "\nScores:";
        for (std::size_t d = 0; d < kJudgeDims; ++d)
            body += " " + std::to_string(d + 1) + ": " + format_score(ex.scores[d]);
        body += "\n";
    }
    body += "\nConversation to rate:\n" + conversation_excerpt(t) + "\n";
    body += "Rate the conversation on each question from 1 to 5:\n";
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        body += std::to_string(d + 1) + ". " + std::string(kQuestions[d]) + "\n";
    body += "\nReply with one line per question in the form \"k: score\", then a line beginning \"Rationale:\".";

    ChatRequest req;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    req.model_name = cfg.model_name;
    req.messages.push_back(ChatMessage { Role::User, std::move(body) });
    return req;
}

std::optional<std::array<int, kJudgeDims>> parse_judge_scores(std::string_view text)
{
    auto const parsed = parse_likert(text, static_cast<int>(kJudgeDims));
    if (parsed.size() != kJudgeDims)
        return std::nullopt;
    std::array<int, kJudgeDims> out {};
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        out[d] = parsed.at(static_cast<int>(d + 1));
    return out;
}

JudgeScore judge_transcript(const Transcript& t, const CalibrationSet& cal, Backend& backend, const JudgeConfig& cfg, std::string transcript_id)
{
    auto req = build_judge_prompt(t, cal, cfg);
    auto reply = backend.complete(req);
    auto scores = parse_judge_scores(reply);
    if (!scores)
    {
        req.messages.push_back(ChatMessage { Role::Assistant, reply });
        req.messages.push_back(ChatMessage { Role::User, std::string(kJudgeReprompt) });
        reply = backend.complete(req);
        scores = parse_judge_scores(reply);
        if (!scores)
            throw JudgeUnparseable("judge reply lacks five scores after reprompt");
    }
    JudgeScore out;
    out.transcript_id = transcript_id.empty() ? t.team_config_id + ":" + t.question_id : std::move(transcript_id);
    out.dims = *scores;
    out.rationale = rationale_of(reply);
    return out;
}

std::vector<std::size_t> sample_for_judging(std::span<const std::string> cell_keys, std::size_t n, std::uint64_t seed)
{
    if (n > cell_keys.size())
        throw ValidationError(ValidationError::Kind::PreconditionViolated, "n", "exceeds the transcript population");

    std::map<std::string, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < cell_keys.size(); ++i)
        cells[cell_keys[i]].push_back(i);

    std::map<std::string, std::size_t> quota;
    auto remaining = n;
    while (remaining > 0)
    {
        std::vector<std::string> open;
        for (const auto& [key, members]: cells)
            if (quota[key] < members.size())
                open.push_back(key);
        auto const share = remaining / open.size();
        auto const extra = remaining % open.size();
        for (std::size_t c = 0; c < open.size() && remaining > 0; ++c)
        {
            auto const want = share + (c < extra ? 1 : 0);
            auto const room = cells[open[c]].size() - quota[open[c]];
            auto const take = std::min(want, room);
            quota[open[c]] += take;
            remaining -= take;
        }
    }

    std::vector<std::size_t> out;
    for (const auto& [key, members]: cells)
    {
        Rng rng(derive_seed(seed, "judge:" + key));
        for (auto idx: rng.sample_indices(members.size(), quota[key]))
            out.push_back(members[idx]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ScoreVector> load_human_scores(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DatasetError(DatasetError::Kind::Io, 0, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw DatasetError(DatasetError::Kind::MalformedRecord, 1, "missing header");
    auto const header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DatasetError(DatasetError::Kind::MalformedRecord, 1, "missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    auto const id_col = column("transcript_id");
    column("annotator_id");
    std::array<std::size_t, kJudgeDims> q_cols {};
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        q_cols[d] = column("q" + std::to_string(d + 1));

    std::vector<std::string> order;
    std::map<std::string, std::pair<std::array<double, kJudgeDims>, int>> sums;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (trim(line).empty())
            continue;
        auto const fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DatasetError(DatasetError::Kind::MalformedRecord, lineno, "wrong field count");
        auto const& id = fields[id_col];
        auto [it, fresh] = sums.try_emplace(id);
        if (fresh)
            order.push_back(id);
        for (std::size_t d = 0; d < kJudgeDims; ++d)
        {
            try
            {
                it->second.first[d] += std::stod(fields[q_cols[d]]);
            }
            catch (const std::exception&)
            {
                throw DatasetError(DatasetError::Kind::MalformedRecord, lineno, "non-numeric score");
            }
        }
        ++it->second.second;
    }

    std::vector<ScoreVector> out;
    for (const auto& id: order)
    {
        auto const& [total, count] = sums.at(id);
        ScoreVector v;
        v.transcript_id = id;
        for (std::size_t d = 0; d < kJudgeDims; ++d)
            v.dims[d] = total[d] / count;
        out.push_back(std::move(v));
    }
    return out;
}

Agreement agreement(std::span<const ScoreVector> human, std::span<const ScoreVector> judge)
{
    if (human.size() != judge.size())
        throw StatsError(StatsError::Kind::LengthMismatch, "human and judge score lists differ in length");
    std::map<std::string, const ScoreVector*> by_id;
    for (const auto& j: judge)
        by_id[j.transcript_id] = &j;

    Agreement out;
    out.n = human.size();
    std::array<std::vector<double>, kJudgeDims> hs;
    std::array<std::vector<double>, kJudgeDims> js;
    std::vector<double> pooled_h;
    std::vector<double> pooled_j;
    std::size_t exact = 0;
    std::size_t close = 0;
    for (const auto& h: human)
    {
        auto it = by_id.find(h.transcript_id);
        if (it == by_id.end())
            throw StatsError(StatsError::Kind::LengthMismatch, "no judge score for " + h.transcript_id);
        for (std::size_t d = 0; d < kJudgeDims; ++d)
        {
            auto const a = h.dims[d];
            auto const b = it->second->dims[d];
            hs[d].push_back(a);
            js[d].push_back(b);
            pooled_h.push_back(a);
            pooled_j.push_back(b);
            auto const gap = std::fabs(a - b);
            exact += gap < 1e-9 ? 1 : 0;
            close += gap <= 1.0 + 1e-9 ? 1 : 0;
        }
    }

    auto rho = [](const std::vector<double>& a, const std::vector<double>& b) -> std::optional<double> {
        try
        {
            return spearman(a, b);
        }
        catch (const StatsError&)
        {
            return std::nullopt;
        }
    };
    for (std::size_t d = 0; d < kJudgeDims; ++d)
        out.rho[d] = rho(hs[d], js[d]);
    out.pooled_rho = rho(pooled_h, pooled_j);
    auto const cells = static_cast<double>(pooled_h.size());
    if (cells > 0)
    {
        out.exact_match = static_cast<double>(exact) / cells;
        out.within_one = static_cast<double>(close) / cells;
    }
    return out;
}

} // namespace teamlab
