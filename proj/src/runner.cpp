// SPDX-License-Identifier: Apache-2.0
#include <teamlab/datasets.hpp>
#include <teamlab/elicitation.hpp>
#include <teamlab/flat_debate.hpp>
#include <teamlab/hier_delegation.hpp>
#include <teamlab/http_backend.hpp>
#include <teamlab/judge.hpp>
#include <teamlab/rng.hpp>
#include <teamlab/runner.hpp>
#include <teamlab/scripted_backend.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <thread>

namespace teamlab
{

namespace
{

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string utc_now()
{
    auto const t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm {};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<TeamSample> persona_teams(int team_size, int k, std::uint64_t seed)
{
    auto const team_seed = derive_seed(seed, "teams:" + std::to_string(team_size));
    if (team_size > 1)
        return stratified_sample(team_size, k / 3, team_seed).teams;
    auto const all = enumerate_personas();
    Rng rng(team_seed);
    std::vector<TeamSample> out;
    for (auto idx: rng.sample_indices(all.size(), static_cast<std::size_t>(k)))
        out.push_back(TeamSample { { all[idx] }, 0.0, Stratum::Low });
    return out;
}

std::vector<ProbeAgent> probe_agents(const Cell& c)
{
    std::vector<ProbeAgent> agents;
    if (c.structure == TeamStructure::Flat)
    {
        for (int i = 0; i < c.team_size; ++i)
        {
            std::optional<Persona> persona;
            if (c.team)
                persona = c.team->personas[static_cast<std::size_t>(i)];
            agents.push_back(ProbeAgent { i, flat_system_text(i, persona) });
        }
        return agents;
    }
    HierConfig hc;
    hc.shape = *c.shape;
    hc.max_rounds = c.rounds;
    if (c.team)
        hc.personas = c.team->personas;
    for (int id = 1; id <= c.team_size; ++id)
        agents.push_back(ProbeAgent { id, hier_framing(hc, id) });
    return agents;
}

struct QuestionOutcome
{
    bool recorded = false;
    Transcript transcript;
    std::string error;
};

QuestionOutcome run_question(const Cell& cell, const Question& q, int repeat, Backend& backend, bool probes, std::uint64_t seed)
{
    auto const question_seed = derive_seed(seed, transcript_key(cell.id, q.id, repeat));
    std::optional<std::vector<Persona>> personas;
    if (cell.team)
        personas = cell.team->personas;
    try
    {
        auto const agents = probes ? probe_agents(cell) : std::vector<ProbeAgent> {};
        std::optional<std::vector<ScoreSet>> pre;
        if (probes)
            pre = run_probe(ProbePhase::Pre, agents, backend, std::nullopt, cell.model);

        Transcript t;
        try
        {
            if (cell.structure == TeamStructure::Flat)
            {
                FlatConfig fc;
                fc.n_agents = cell.team_size;
                fc.max_rounds = cell.rounds;
                fc.personas = personas;
                fc.seed = question_seed;
                fc.model_name = cell.model;
                fc.team_config_id = cell.id;
                t = run_flat_debate(q, fc, backend);
            }
            else
            {
                HierConfig hc;
                hc.shape = *cell.shape;
                hc.max_rounds = cell.rounds;
                hc.personas = personas;
                hc.seed = question_seed;
                hc.model_name = cell.model;
                hc.team_config_id = cell.id;
                t = run_hier(q, hc, backend);
            }
        }
        catch (const TeamAbstained& e)
        {
            t = e.partial();
        }
        catch (const LeaderAbstained& e)
        {
            t = e.partial();
        }
        t.status = t.verdict ? RunStatus::Ok : RunStatus::Abstained;

        if (probes)
        {
            t.pre_probe = std::move(pre);
            t.post_probe = run_probe(ProbePhase::Post, agents, backend, transcript_summary(t), cell.model);
        }
        return QuestionOutcome { true, std::move(t), {} };
    }
    catch (const BackendError& e)
    {
        return QuestionOutcome { false, {}, e.what() };
    }
}

Transcript timeout_transcript(const Cell& cell, const Question& q, int repeat, std::uint64_t seed)
{
    Transcript t;
    t.question_id = q.id;
    t.team_config_id = cell.id;
    t.structure = cell.structure;
    t.status = RunStatus::Timeout;
    t.seed = derive_seed(seed, transcript_key(cell.id, q.id, repeat));
    if (cell.structure == TeamStructure::Hierarchical)
        t.instructions.emplace();
    return t;
}

Json record_json(const Cell& cell, const Question& q, int repeat, const Transcript& t)
{
    Json j;
    j["cell_id"] = cell.id;
    j["question_id"] = q.id;
    j["repeat"] = repeat;
    j["transcript"] = to_json(t);
    return j;
}

// Reads the good prefix of a transcripts file and cuts anything after it.
std::set<std::pair<std::string, int>> recover(const fs::path& file)
{
    std::set<std::pair<std::string, int>> done;
    if (!fs::exists(file))
        return done;
    auto const text = read_file(file);
    std::size_t pos = 0;
    std::size_t good = 0;
    while (pos < text.size())
    {
        auto const end = text.find('\n', pos);
        if (end == std::string::npos)
            break;
        try
        {
            auto const j = Json::parse(text.substr(pos, end - pos));
            done.emplace(j.at("question_id").get<std::string>(), j.at("repeat").get<int>());
        }
        catch (const Json::exception&)
        {
            break;
        }
        pos = end + 1;
        good = pos;
    }
    if (good < text.size())
        fs::resize_file(file, good);
    return done;
}

class Writer
{
  public:
    explicit Writer(const fs::path& file)
    {
        fs::create_directories(file.parent_path());
        _out.open(file, std::ios::app | std::ios::binary);
        if (!_out)
            throw DatasetError(DatasetError::Kind::Io, 0, "cannot write " + file.string());
    }

    void append(const Json& row)
    {
        _out << to_jsonl_line(row) << '\n';
        _out.flush();
    }

  private:
    std::ofstream _out;
};

std::vector<std::vector<Question>> load_all(const ExperimentConfig& cfg)
{
    std::vector<std::vector<Question>> out;
    for (std::size_t i = 0; i < cfg.datasets.size(); ++i)
    {
        const auto& d = cfg.datasets[i];
        DatasetSpec spec { d.dataset, d.split, d.path, d.sampling, derive_seed(cfg.seed, "dataset:" + std::to_string(i)) };
        out.push_back(load(spec));
    }
    return out;
}

Json mean_table(const std::map<int, std::pair<double, int>>& sums)
{
    Json j = Json::object();
    for (const auto& [k, v]: sums)
        j[std::to_string(k)] = v.first / v.second;
    return j;
}

CalibrationSet calibration_for(const ExperimentConfig& cfg)
{
    auto const pool = load_calibration(cfg.judge.calibration);
    if (pool.exemplars.empty())
        throw ConfigError("calibration file holds no exemplars: " + cfg.judge.calibration.string());
    return select_calibration(pool, cfg.judge.calibration_size);
}

} // namespace

std::string path_safe(std::string_view s)
{
    std::string out(s);
    for (auto& c: out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-')
            c = '_';
    return out;
}

std::vector<Cell> expand_matrix(const ExperimentConfig& cfg)
{
    validate(cfg);
    std::map<int, std::vector<TeamSample>> teams;
    auto teams_for = [&](int size) -> const std::vector<TeamSample>& {
        auto it = teams.find(size);
        if (it == teams.end())
            it = teams.emplace(size, persona_teams(size, cfg.diversity.k, cfg.seed)).first;
        return it->second;
    };

    std::vector<Cell> cells;
    auto add_setting = [&](Cell base) {
        base.id = to_string(base.dataset) + "." + path_safe(base.model) + "." + base.setting + ".base";
        base.baseline_id = base.id;
        cells.push_back(base);
        if (!cfg.diversity.stratified)
            return;
        const auto& samples = teams_for(base.team_size);
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            Cell c = base;
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "div%02zu", i + 1);
            c.id = to_string(base.dataset) + "." + path_safe(base.model) + "." + base.setting + "." + suffix;
            c.team_index = static_cast<int>(i);
            c.team = samples[i];
            cells.push_back(std::move(c));
        }
    };

    for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        for (const auto& model: cfg.backend.models)
        {
            for (auto n: cfg.teams.flat_sizes)
                for (auto r: cfg.teams.rounds)
                {
                    Cell c;
                    c.dataset_index = d;
                    c.dataset = cfg.datasets[d].dataset;
                    c.model = model;
                    c.structure = TeamStructure::Flat;
                    c.team_size = n;
                    c.rounds = r;
                    c.setting = "flat-n" + std::to_string(n) + "-r" + std::to_string(r);
                    add_setting(std::move(c));
                }
            for (auto shape: cfg.teams.hier_shapes)
                for (auto r: cfg.teams.rounds)
                {
                    Cell c;
                    c.dataset_index = d;
                    c.dataset = cfg.datasets[d].dataset;
                    c.model = model;
                    c.structure = TeamStructure::Hierarchical;
                    c.shape = shape;
                    c.team_size = layout_for(shape).total();
                    c.rounds = r;
                    c.setting = "hier-" + to_string(shape) + "-r" + std::to_string(r);
                    add_setting(std::move(c));
                }
        }
    return cells;
}

std::string judge_cell_key(const Cell& c)
{
    return to_string(c.structure) + "|" + (c.diverse() ? "diverse" : "baseline") + "|" + c.model + "|" + to_string(c.dataset);
}

Json to_json(const Cell& c)
{
    Json j;
    j["cell_id"] = c.id;
    j["dataset"] = to_string(c.dataset);
    j["model"] = c.model;
    j["structure"] = to_string(c.structure);
    j["setting"] = c.setting;
    j["team_size"] = c.team_size;
    j["shape"] = c.shape ? Json(to_string(*c.shape)) : Json(nullptr);
    j["rounds"] = c.rounds;
    if (c.team)
    {
        Json team = to_json(*c.team);
        team["team_index"] = *c.team_index;
        j["diversity"] = team;
    }
    else
        j["diversity"] = nullptr;
    j["baseline_cell"] = c.baseline_id;
    return j;
}

std::unique_ptr<Backend> make_backend(const BackendSettings& settings)
{
    if (settings.kind == "scripted")
    {
        if (!fs::exists(settings.script))
            throw ConfigError("script file not found: " + settings.script.string());
        try
        {
            return std::unique_ptr<Backend>(new ScriptedBackend(ScriptedBackend::from_file(settings.script)));
        }
        catch (const Json::exception& e)
        {
            throw ConfigError("bad script file " + settings.script.string() + ": " + e.what());
        }
    }
    HttpBackendConfig hc;
    hc.endpoint_url = settings.endpoint_url;
    hc.path = settings.path;
    hc.temperature = settings.temperature;
    hc.max_tokens = settings.max_tokens;
    hc.max_in_flight = settings.max_in_flight;
    return std::make_unique<HttpBackend>(HttpBackendConfig::from_environment(hc));
}

fs::path cell_dir(const fs::path& out, const std::string& cell_id)
{
    return out / "cells" / path_safe(cell_id);
}

std::string transcript_key(const std::string& cell_id, const std::string& question_id, int repeat)
{
    return cell_id + "#" + question_id + "#" + std::to_string(repeat);
}

std::vector<StoredRecord> read_cell_records(const fs::path& out, const std::string& cell_id)
{
    auto const file = cell_dir(out, cell_id) / "transcripts.jsonl";
    std::vector<StoredRecord> records;
    if (!fs::exists(file))
        return records;
    for (const auto& j: read_jsonl(file))
        records.push_back(StoredRecord {
            j.at("cell_id").get<std::string>(),
            j.at("question_id").get<std::string>(),
            j.at("repeat").get<int>(),
            transcript_from_json(j.at("transcript")),
        });
    return records;
}

RunSummary run(const ExperimentConfig& cfg, Backend& backend, Backend* judge_backend, const RunOptions& opts)
{
    auto const started = utc_now();
    auto const cells = expand_matrix(cfg);
    auto const out = cfg.output_dir;

    if (!opts.resume)
        for (const auto& c: cells)
        {
            auto const file = cell_dir(out, c.id) / "transcripts.jsonl";
            if (fs::exists(file) && fs::file_size(file) > 0)
                throw ConfigError("output directory " + out.string() + " already holds records; pass --resume to continue it");
        }

    std::optional<CalibrationSet> calibration;
    if (cfg.judge.enabled)
        calibration = calibration_for(cfg);

    auto const questions = load_all(cfg);
    auto const timeout = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.question_timeout_s));
    auto const batch = static_cast<std::size_t>(std::max(1, cfg.backend.max_in_flight));

    RunSummary summary;
    std::vector<std::thread> stragglers;
    Json cell_seconds = Json::object();

    for (const auto& cell: cells)
    {
        auto const cell_start = Clock::now();
        auto const file = cell_dir(out, cell.id) / "transcripts.jsonl";
        auto const done = recover(file);
        Writer writer(file);

        std::vector<std::pair<const Question*, int>> todo;
        for (int rep = 0; rep < cfg.repeats; ++rep)
            for (const auto& q: questions[cell.dataset_index])
                if (!done.contains({ q.id, rep }))
                    todo.emplace_back(&q, rep);

        std::size_t failed = 0;
        for (std::size_t start = 0; start < todo.size(); start += batch)
        {
            auto const stop = std::min(todo.size(), start + batch);
            struct Slot
            {
                std::future<QuestionOutcome> result;
                std::thread worker;
            };
            std::vector<Slot> slots;
            auto const deadline = Clock::now() + timeout;
            for (auto i = start; i < stop; ++i)
            {
                auto const [q, rep] = todo[i];
                std::packaged_task<QuestionOutcome()> task([&cell, q = *q, rep = rep, &backend, &cfg] {
                    return run_question(cell, q, rep, backend, cfg.probes, cfg.seed);
                });
                Slot slot;
                slot.result = task.get_future();
                slot.worker = std::thread(std::move(task));
                slots.push_back(std::move(slot));
            }
            for (std::size_t s = 0; s < slots.size(); ++s)
            {
                auto const [q, rep] = todo[start + s];
                auto& slot = slots[s];
                if (slot.result.wait_until(deadline) != std::future_status::ready)
                {
                    stragglers.push_back(std::move(slot.worker));
                    writer.append(record_json(cell, *q, rep, timeout_transcript(cell, *q, rep, cfg.seed)));
                    continue;
                }
                slot.worker.join();
                auto outcome = slot.result.get();
                if (!outcome.recorded)
                {
                    ++failed;
                    continue;
                }
                writer.append(record_json(cell, *q, rep, outcome.transcript));
            }
        }

        CellResult result;
        result.cell_id = cell.id;
        result.failed = failed;
        for (const auto& rec: read_cell_records(out, cell.id))
        {
            ++result.attempted;
            const auto& t = rec.transcript;
            if (t.verdict && t.verdict->correct)
                ++result.correct;
            if (t.status == RunStatus::Abstained)
                ++result.abstained;
            if (t.status == RunStatus::Timeout)
                ++result.timeouts;
        }
        result.complete = result.attempted == questions[cell.dataset_index].size() * static_cast<std::size_t>(cfg.repeats);
        summary.failed_questions += failed;
        summary.cells.push_back(result);
        cell_seconds[cell.id] = std::chrono::duration<double>(Clock::now() - cell_start).count();
    }

    for (auto& t: stragglers)
        t.join();

    // Cell table and aggregate summary, content-only so reruns diff clean.
    std::vector<Json> cell_rows;
    std::size_t attempted = 0;
    std::size_t correct = 0;
    std::map<int, std::pair<double, int>> pre_sums;
    std::map<int, std::pair<double, int>> post_sums;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        auto const& r = summary.cells[i];
        auto row = to_json(cells[i]);
        row["questions"] = questions[cells[i].dataset_index].size() * static_cast<std::size_t>(cfg.repeats);
        row["attempted"] = r.attempted;
        row["correct"] = r.correct;
        row["accuracy"] = r.attempted ? Json(static_cast<double>(r.correct) / static_cast<double>(r.attempted)) : Json(nullptr);
        row["abstained"] = r.abstained;
        row["timeouts"] = r.timeouts;
        row["complete"] = r.complete;
        cell_rows.push_back(std::move(row));
        attempted += r.attempted;
        correct += r.correct;

        if (cfg.probes)
            for (const auto& rec: read_cell_records(out, cells[i].id))
            {
                for (const auto& s: rec.transcript.pre_probe.value_or(std::vector<ScoreSet> {}))
                    for (auto [k, v]: s.scores)
                        pre_sums[k].first += v, ++pre_sums[k].second;
                for (const auto& s: rec.transcript.post_probe.value_or(std::vector<ScoreSet> {}))
                    for (auto [k, v]: s.scores)
                        post_sums[k].first += v, ++post_sums[k].second;
            }
    }
    write_jsonl(out / "cells.jsonl", cell_rows);

    if (cfg.judge.enabled)
    {
        auto const outcome = run_judge(cfg, judge_backend ? *judge_backend : backend);
        summary.judged = outcome.judged;
        summary.judge_failures = outcome.failures;
    }

    Json s;
    s["cells"] = cells.size();
    s["attempted"] = attempted;
    s["correct"] = correct;
    s["accuracy"] = attempted ? Json(static_cast<double>(correct) / static_cast<double>(attempted)) : Json(nullptr);
    s["failed_questions"] = summary.failed_questions;
    s["incomplete_cells"] = std::count_if(summary.cells.begin(), summary.cells.end(), [](const auto& r) { return !r.complete; });
    if (cfg.probes)
        s["probe_means"] = Json { { "pre", mean_table(pre_sums) }, { "post", mean_table(post_sums) } };
    if (cfg.judge.enabled)
        s["judge"] = Json { { "judged", summary.judged }, { "failures", summary.judge_failures } };
    write_file(out / "summary.json", s.dump(2) + "\n");

    Json meta;
    meta["started_at"] = started;
    meta["finished_at"] = utc_now();
    meta["resumed"] = opts.resume;
    meta["config"] = to_json(cfg);
    meta["cell_seconds"] = cell_seconds;
    write_file(out / "metadata.json", meta.dump(2) + "\n");
    return summary;
}

JudgeOutcome run_judge(const ExperimentConfig& cfg, Backend& judge_backend)
{
    auto const cells = expand_matrix(cfg);
    auto const calibration = calibration_for(cfg);

    struct Candidate
    {
        const Cell* cell;
        StoredRecord record;
    };
    std::vector<Candidate> population;
    std::vector<std::string> keys;
    for (const auto& cell: cells)
        for (auto& rec: read_cell_records(cfg.output_dir, cell.id))
            if (rec.transcript.status == RunStatus::Ok && rec.transcript.verdict)
            {
                keys.push_back(judge_cell_key(cell));
                population.push_back(Candidate { &cell, std::move(rec) });
            }

    auto const n = std::min(cfg.judge.sample, population.size());
    auto const chosen = sample_for_judging(keys, n, derive_seed(cfg.seed, "judge"));

    JudgeConfig jc;
    jc.model_name = cfg.judge.model_name;
    jc.temperature = cfg.judge.temperature;

    JudgeOutcome outcome;
    std::vector<Json> rows;
    auto const batch = static_cast<std::size_t>(std::max(1, cfg.backend.max_in_flight));
    for (std::size_t start = 0; start < chosen.size(); start += batch)
    {
        auto const stop = std::min(chosen.size(), start + batch);
        std::vector<std::future<JudgeScore>> pending;
        for (auto i = start; i < stop; ++i)
        {
            const auto& c = population[chosen[i]];
            auto id = transcript_key(c.cell->id, c.record.question_id, c.record.repeat);
            pending.push_back(std::async(std::launch::async, [&c, &calibration, &judge_backend, jc, id] {
                return judge_transcript(c.record.transcript, calibration, judge_backend, jc, id);
            }));
        }
        for (std::size_t p = 0; p < pending.size(); ++p)
        {
            const auto& c = population[chosen[start + p]];
            try
            {
                auto const score = pending[p].get();
                Json row = to_json(score);
                Json full;
                full["transcript_id"] = score.transcript_id;
                full["cell_id"] = c.cell->id;
                full["question_id"] = c.record.question_id;
                full["repeat"] = c.record.repeat;
                full["dims"] = row["dims"];
                full["rationale"] = row["rationale"];
                rows.push_back(std::move(full));
                ++outcome.judged;
            }
            catch (const JudgeUnparseable&)
            {
                ++outcome.failures;
            }
            catch (const BackendError&)
            {
                ++outcome.failures;
            }
        }
    }
    write_jsonl(cfg.output_dir / "judge.jsonl", rows);
    return outcome;
}

void run_probe_only(const ExperimentConfig& cfg, Backend& backend)
{
    for (const auto& cell: expand_matrix(cfg))
    {
        auto const sets = run_probe(ProbePhase::Pre, probe_agents(cell), backend, std::nullopt, cell.model);
        std::vector<Json> rows;
        for (const auto& s: sets)
            rows.push_back(Json { { "cell_id", cell.id }, { "score_set", to_json(s) } });
        write_jsonl(cell_dir(cfg.output_dir, cell.id) / "probes.jsonl", rows);
    }
}

} // namespace teamlab
