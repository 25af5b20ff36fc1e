// SPDX-License-Identifier: Apache-2.0
#include <teamlab/json_io.hpp>

#include <fstream>
#include <sstream>

namespace teamlab
{

namespace
{

Json label_json(std::optional<Label> l)
{
    return l ? Json(std::string(1, *l)) : Json(nullptr);
}

Label label_from(const Json& j)
{
    auto const s = j.get<std::string>();
    if (s.size() != 1)
        throw Error("option label must be a single letter, got '" + s + "'");
    return s[0];
}

std::optional<Label> optional_label_from(const Json& j)
{
    if (j.is_null())
        return std::nullopt;
    return label_from(j);
}

std::string phase_name(ProbePhase p)
{
    return p == ProbePhase::Pre ? "pre" : "post";
}

std::string status_name(RunStatus s)
{
    switch (s)
    {
        case RunStatus::Ok: return "ok";
        case RunStatus::Abstained: return "abstained";
        case RunStatus::Timeout: return "timeout";
    }
    return "ok";
}

RunStatus status_from(const std::string& s)
{
    if (s == "abstained")
        return RunStatus::Abstained;
    if (s == "timeout")
        return RunStatus::Timeout;
    return RunStatus::Ok;
}

Json int_map(const std::map<int, int>& m)
{
    auto out = Json::object();
    for (auto [k, v]: m)
        out[std::to_string(k)] = v;
    return out;
}

Json text_map(const std::map<int, std::string>& m)
{
    auto out = Json::object();
    for (const auto& [k, v]: m)
        out[std::to_string(k)] = v;
    return out;
}

Json score_sets(const std::optional<std::vector<ScoreSet>>& sets)
{
    if (!sets)
        return nullptr;
    auto arr = Json::array();
    for (const auto& s: *sets)
        arr.push_back(to_json(s));
    return arr;
}

std::optional<std::vector<ScoreSet>> score_sets_from(const Json& j)
{
    if (j.is_null())
        return std::nullopt;
    std::vector<ScoreSet> out;
    for (const auto& s: j)
        out.push_back(score_set_from_json(s));
    return out;
}

} // namespace

Json to_json(const Question& q)
{
    Json j;
    j["id"] = q.id;
    j["text"] = q.text;
    auto opts = Json::array();
    for (const auto& o: q.options)
    {
        Json oj;
        oj["label"] = std::string(1, o.label);
        oj["body"] = o.body;
        opts.push_back(std::move(oj));
    }
    j["options"] = std::move(opts);
    j["gold"] = std::string(1, q.gold);
    j["dataset"] = to_string(q.dataset);
    return j;
}

Question question_from_json(const Json& j)
{
    Question q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    for (const auto& o: j.at("options"))
        q.options.push_back(Option { .label = label_from(o.at("label")), .body = o.at("body").get<std::string>() });
    q.gold = label_from(j.at("gold"));
    q.dataset = dataset_from_string(j.at("dataset").get<std::string>());
    normalize_labels(q);
    return q;
}

Json to_json(const AgentTurn& t)
{
    Json j;
    j["agent_id"] = t.agent_id;
    j["round"] = t.round;
    j["raw_text"] = t.raw_text;
    j["answer"] = label_json(t.answer);
    j["explanation"] = t.explanation;
    j["confidence"] = t.confidence ? Json(*t.confidence) : Json(nullptr);
    return j;
}

AgentTurn turn_from_json(const Json& j)
{
    AgentTurn t;
    t.agent_id = j.at("agent_id").get<int>();
    t.round = j.at("round").get<int>();
    t.raw_text = j.at("raw_text").get<std::string>();
    t.answer = optional_label_from(j.at("answer"));
    t.explanation = j.at("explanation").get<std::string>();
    if (!j.at("confidence").is_null())
        t.confidence = j.at("confidence").get<double>();
    return t;
}

Json to_json(const Verdict& v)
{
    Json j;
    j["final_answer"] = std::string(1, v.final_answer);
    j["decided_by"] = v.decided_by == DecidedBy::Leader ? "leader" : "majority";
    j["rounds_used"] = v.rounds_used;
    j["correct"] = v.correct;
    return j;
}

Verdict verdict_from_json(const Json& j)
{
    Verdict v;
    v.final_answer = label_from(j.at("final_answer"));
    v.decided_by = j.at("decided_by").get<std::string>() == "leader" ? DecidedBy::Leader : DecidedBy::Majority;
    v.rounds_used = j.at("rounds_used").get<int>();
    v.correct = j.at("correct").get<bool>();
    return v;
}

Json to_json(const Instruction& i)
{
    Json j;
    j["round"] = i.round;
    j["agent_id"] = i.agent_id;
    j["issuer"] = i.issuer;
    j["text"] = i.text;
    return j;
}

Instruction instruction_from_json(const Json& j)
{
    return Instruction {
        .round = j.at("round").get<int>(),
        .agent_id = j.at("agent_id").get<int>(),
        .issuer = j.at("issuer").get<int>(),
        .text = j.at("text").get<std::string>(),
    };
}

Json to_json(const ScoreSet& s)
{
    Json j;
    j["agent_id"] = s.agent_id;
    j["phase"] = phase_name(s.phase);
    j["scores"] = int_map(s.scores);
    j["free_text"] = text_map(s.free_text);
    j["missing"] = s.missing;
    j["raw_text"] = s.raw_text;
    return j;
}

ScoreSet score_set_from_json(const Json& j)
{
    ScoreSet s;
    s.agent_id = j.at("agent_id").get<int>();
    s.phase = j.at("phase").get<std::string>() == "post" ? ProbePhase::Post : ProbePhase::Pre;
    for (const auto& [k, v]: j.at("scores").items())
        s.scores[std::stoi(k)] = v.get<int>();
    for (const auto& [k, v]: j.at("free_text").items())
        s.free_text[std::stoi(k)] = v.get<std::string>();
    s.missing = j.at("missing").get<std::vector<int>>();
    s.raw_text = j.value("raw_text", std::string {});
    return s;
}

Json to_json(const Transcript& t)
{
    Json j;
    j["question_id"] = t.question_id;
    j["team_config_id"] = t.team_config_id;
    j["structure"] = to_string(t.structure);
    auto turns = Json::array();
    for (const auto& turn: t.turns)
        turns.push_back(to_json(turn));
    j["turns"] = std::move(turns);
    if (t.instructions)
    {
        auto arr = Json::array();
        for (const auto& i: *t.instructions)
            arr.push_back(to_json(i));
        j["instructions"] = std::move(arr);
    }
    else
        j["instructions"] = nullptr;
    j["verdict"] = t.verdict ? to_json(*t.verdict) : Json(nullptr);
    j["status"] = status_name(t.status);
    j["pre_probe"] = score_sets(t.pre_probe);
    j["post_probe"] = score_sets(t.post_probe);
    j["seed"] = t.seed;
    return j;
}

Transcript transcript_from_json(const Json& j)
{
    Transcript t;
    t.question_id = j.at("question_id").get<std::string>();
    t.team_config_id = j.at("team_config_id").get<std::string>();
    t.structure = j.at("structure").get<std::string>() == "hier" ? TeamStructure::Hierarchical : TeamStructure::Flat;
    for (const auto& turn: j.at("turns"))
        t.turns.push_back(turn_from_json(turn));
    if (!j.at("instructions").is_null())
    {
        t.instructions.emplace();
        for (const auto& i: j.at("instructions"))
            t.instructions->push_back(instruction_from_json(i));
    }
    if (!j.at("verdict").is_null())
        t.verdict = verdict_from_json(j.at("verdict"));
    t.status = status_from(j.value("status", std::string("ok")));
    t.pre_probe = score_sets_from(j.at("pre_probe"));
    t.post_probe = score_sets_from(j.at("post_probe"));
    t.seed = j.at("seed").get<std::uint64_t>();
    return t;
}

std::string to_jsonl_line(const Json& j)
{
    return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::vector<Json> read_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DatasetError(DatasetError::Kind::Io, 0, "cannot open " + path.string());
    std::vector<Json> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (trim(line).empty())
            continue;
        try
        {
            rows.push_back(Json::parse(line));
        }
        catch (const Json::parse_error& e)
        {
            throw DatasetError(DatasetError::Kind::MalformedRecord, lineno, e.what());
        }
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows)
{
    std::string out;
    for (const auto& r: rows)
        out += to_jsonl_line(r) + "\n";
    write_file(path, out);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << content;
}

} // namespace teamlab
