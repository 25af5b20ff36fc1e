// SPDX-License-Identifier: Apache-2.0
#include <teamlab/csv.hpp>
#include <teamlab/elicitation.hpp>
#include <teamlab/judge.hpp>
#include <teamlab/json_io.hpp>
#include <teamlab/lexical.hpp>
#include <teamlab/report.hpp>
#include <teamlab/runner.hpp>
#include <teamlab/stats.hpp>

#include <cstdio>
#include <map>
#include <set>

namespace teamlab
{

namespace
{

namespace fs = std::filesystem;

std::string num(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string num(std::optional<double> v)
{
    return v ? num(*v) : std::string();
}

struct CellData
{
    Json info;
    std::vector<StoredRecord> records;

    [[nodiscard]] std::string id() const { return info["cell_id"].get<std::string>(); }
    [[nodiscard]] std::string structure() const { return info["structure"].get<std::string>(); }
    [[nodiscard]] std::string dataset() const { return info["dataset"].get<std::string>(); }
    [[nodiscard]] std::string model() const { return info["model"].get<std::string>(); }
    [[nodiscard]] bool diverse() const { return !info["diversity"].is_null(); }
    [[nodiscard]] std::string diversity() const { return diverse() ? "diverse" : "baseline"; }

    [[nodiscard]] std::optional<double> accuracy() const
    {
        if (records.empty())
            return std::nullopt;
        double hits = 0;
        for (const auto& r: records)
            hits += correct(r) ? 1 : 0;
        return hits / static_cast<double>(records.size());
    }

    static bool correct(const StoredRecord& r) { return r.transcript.verdict && r.transcript.verdict->correct; }
};

// Test statistics as CSV fields: statistic, effect_size, mean_diff, p, stars.
std::vector<std::string> test_fields(const PairedSample& s)
{
    try
    {
        auto const r = paired_t(s);
        return { num(r.statistic), num(r.effect_size), num(r.mean_diff), num(r.p_value), stars(r.p_value) };
    }
    catch (const StatsError&)
    {
        std::optional<double> diff;
        if (!s.a.empty())
            diff = mean(differences(s));
        return { "", "", num(diff), "", "" };
    }
}

void write_table(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::string text = csv_row(header);
    for (const auto& r: rows)
        text += csv_row(r);
    write_file(path, text);
}

} // namespace

std::vector<fs::path> report(const fs::path& run_dir)
{
    auto const cells_file = run_dir / "cells.jsonl";
    if (!fs::exists(cells_file))
        throw NoRecords("no cells.jsonl in " + run_dir.string());

    std::vector<CellData> cells;
    std::size_t total = 0;
    for (auto& info: read_jsonl(cells_file))
    {
        CellData c { info, {} };
        c.records = read_cell_records(run_dir, c.id());
        total += c.records.size();
        cells.push_back(std::move(c));
    }
    if (total == 0)
        throw NoRecords("run " + run_dir.string() + " holds no transcripts");

    auto const out = run_dir / "report";
    fs::create_directories(out);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
        write_table(out / name, header, rows);
        written.push_back(out / name);
    };

    std::map<std::string, const CellData*> by_id;
    for (const auto& c: cells)
        by_id[c.id()] = &c;

    // Accuracy per model x dataset over baseline cells.
    {
        std::vector<std::pair<std::string, std::string>> keys;
        std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<bool>>> outcomes;
        for (const auto& c: cells)
        {
            if (c.diverse())
                continue;
            std::pair key { c.model(), c.dataset() };
            if (!outcomes.contains(key))
                keys.push_back(key);
            auto& v = outcomes[key][c.structure()];
            for (const auto& r: c.records)
                v.push_back(CellData::correct(r));
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& key: keys)
        {
            std::vector<std::string> row { key.first, key.second };
            for (const auto* s: { "flat", "hier" })
            {
                auto const& v = outcomes[key][s];
                if (v.empty())
                {
                    row.insert(row.end(), { "", "", "", "0" });
                    continue;
                }
                auto const b = bootstrap_accuracy(v, kDefaultResamples, 0);
                row.insert(row.end(), { num(b.mean), num(b.ci_low), num(b.ci_high), std::to_string(v.size()) });
            }
            rows.push_back(std::move(row));
        }
        emit("accuracy.csv",
             { "model", "dataset", "flat_accuracy", "flat_ci_low", "flat_ci_high", "flat_n", "hier_accuracy", "hier_ci_low", "hier_ci_high", "hier_n" },
             rows);
    }

    // Flat vs hierarchical, paired by (model, dataset, question) over baseline cells.
    {
        std::map<std::tuple<std::string, std::string, std::string>, std::map<std::string, std::pair<double, int>>> per_q;
        std::vector<std::string> datasets;
        for (const auto& c: cells)
        {
            if (c.diverse())
                continue;
            if (std::find(datasets.begin(), datasets.end(), c.dataset()) == datasets.end())
                datasets.push_back(c.dataset());
            for (const auto& r: c.records)
            {
                auto& slot = per_q[{ c.model(), c.dataset(), r.question_id }][c.structure()];
                slot.first += CellData::correct(r) ? 1 : 0;
                ++slot.second;
            }
        }
        auto sample_for = [&](const std::string& dataset) {
            PairedSample s;
            for (const auto& [key, by_structure]: per_q)
            {
                if (!dataset.empty() && std::get<1>(key) != dataset)
                    continue;
                auto f = by_structure.find("flat");
                auto h = by_structure.find("hier");
                if (f == by_structure.end() || h == by_structure.end())
                    continue;
                s.labels.push_back(std::get<0>(key) + "/" + std::get<1>(key) + "/" + std::get<2>(key));
                s.a.push_back(h->second.first / h->second.second);
                s.b.push_back(f->second.first / f->second.second);
            }
            return s;
        };
        std::vector<std::vector<std::string>> rows;
        for (const auto& d: datasets)
        {
            auto const s = sample_for(d);
            std::vector<std::string> row { d, std::to_string(s.a.size()) };
            auto const t = test_fields(s);
            row.insert(row.end(), t.begin(), t.end());
            rows.push_back(std::move(row));
        }
        auto const all = sample_for("");
        std::vector<std::string> row { "ALL", std::to_string(all.a.size()) };
        auto const t = test_fields(all);
        row.insert(row.end(), t.begin(), t.end());
        rows.push_back(std::move(row));
        emit("structure_ttest.csv", { "dataset", "n", "t", "cohens_d", "mean_diff_flat_minus_hier", "p_two_sided", "stars" }, rows);
    }

    // Persona cells against their matched baselines.
    {
        std::vector<std::pair<std::string, std::string>> groups;
        std::map<std::pair<std::string, std::string>, PairedSample> samples;
        for (const auto& c: cells)
        {
            if (!c.diverse())
                continue;
            auto base = by_id.find(c.info["baseline_cell"].get<std::string>());
            if (base == by_id.end())
                continue;
            auto const acc = c.accuracy();
            auto const base_acc = base->second->accuracy();
            if (!acc || !base_acc)
                continue;
            for (const auto& key: { std::pair { c.structure(), c.dataset() }, std::pair { c.structure(), std::string("ALL") } })
            {
                if (!samples.contains(key))
                    groups.push_back(key);
                auto& s = samples[key];
                s.labels.push_back(c.id());
                s.a.push_back(*base_acc);
                s.b.push_back(*acc);
            }
        }
        std::stable_sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : (x.second == "ALL") < (y.second == "ALL");
        });
        std::vector<std::vector<std::string>> rows;
        for (const auto& key: groups)
        {
            auto const& s = samples[key];
            std::vector<std::string> row { key.first, key.second, std::to_string(s.a.size()) };
            auto const t = test_fields(s);
            row.insert(row.end(), t.begin(), t.end());
            rows.push_back(std::move(row));
        }
        emit("diversity_ttest.csv",
             { "structure", "dataset", "n", "t", "cohens_d", "mean_diff_diverse_minus_baseline", "p_two_sided", "stars" },
             rows);
    }

    // Gini against accuracy.
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& c: cells)
        {
            if (!c.diverse())
                continue;
            auto const& d = c.info["diversity"];
            rows.push_back({ c.id(),
                             c.dataset(),
                             c.model(),
                             c.structure(),
                             c.info["setting"].get<std::string>(),
                             std::to_string(c.info["team_size"].get<int>()),
                             num(d["gini"].get<double>()),
                             d["stratum"].get<std::string>(),
                             num(c.accuracy()) });
        }
        emit("gini_accuracy.csv", { "cell_id", "dataset", "model", "structure", "setting", "team_size", "gini", "stratum", "accuracy" }, rows);
    }

    // Probe deltas and stratum comparisons.
    {
        std::map<std::tuple<std::string, std::string, int>, PairedSample> pairs;
        std::map<std::pair<std::string, int>, std::map<std::string, std::vector<double>>> by_stratum;
        std::map<std::string, std::vector<std::string>> open_answers[3];
        for (const auto& c: cells)
        {
            std::string stratum;
            if (c.diverse())
                stratum = c.info["diversity"]["stratum"].get<std::string>();
            for (const auto& r: c.records)
            {
                const auto& t = r.transcript;
                if (!t.pre_probe)
                    continue;
                for (const auto& pre: *t.pre_probe)
                {
                    for (int k = 1; k <= 2; ++k)
                        if (auto it = pre.free_text.find(k); it != pre.free_text.end())
                            open_answers[k][c.structure()].push_back(it->second);
                    if (!stratum.empty())
                        for (auto [k, v]: pre.scores)
                            by_stratum[{ c.structure(), k }][stratum].push_back(v);
                    if (!t.post_probe)
                        continue;
                    for (const auto& post: *t.post_probe)
                    {
                        if (post.agent_id != pre.agent_id)
                            continue;
                        for (const auto& d: pair_pre_post(pre, post))
                        {
                            auto& s = pairs[{ c.structure(), c.diversity(), d.pre_index }];
                            s.a.push_back(pre.scores.at(d.pre_index));
                            s.b.push_back(post.scores.at(d.post_index));
                        }
                    }
                }
            }
        }

        std::vector<std::vector<std::string>> rows;
        for (const auto& [key, s]: pairs)
        {
            auto const& [structure, diversity, pre_index] = key;
            std::vector<std::string> row { structure,
                                           diversity,
                                           std::to_string(pre_index),
                                           std::to_string(pre_index - 1),
                                           std::to_string(s.a.size()),
                                           num(mean(s.a)),
                                           num(mean(s.b)) };
            auto const t = test_fields(s);
            row.insert(row.end(), t.begin(), t.end());
            rows.push_back(std::move(row));
        }
        emit("probe_deltas.csv",
             { "structure", "diversity", "pre_index", "post_index", "n", "mean_pre", "mean_post", "t", "cohens_d", "mean_delta", "p_two_sided", "stars" },
             rows);

        std::vector<std::vector<std::string>> kw_rows;
        for (const auto& [key, strata]: by_stratum)
        {
            std::vector<std::vector<double>> groups;
            std::vector<std::string> row { key.first, std::to_string(key.second) };
            for (const auto* name: { "low", "medium", "high" })
            {
                auto it = strata.find(name);
                auto const n = it == strata.end() ? 0 : it->second.size();
                row.push_back(std::to_string(n));
                if (n > 0)
                    groups.push_back(it->second);
            }
            if (groups.size() >= 2)
            {
                auto const r = kruskal_wallis(groups);
                row.insert(row.end(), { num(r.statistic), num(r.p_value), stars(r.p_value) });
            }
            else
                row.insert(row.end(), { "", "", "" });
            kw_rows.push_back(std::move(row));
        }
        emit("pre_kruskal.csv", { "structure", "pre_index", "n_low", "n_medium", "n_high", "H", "p", "stars" }, kw_rows);

        for (int k = 1; k <= 2; ++k)
        {
            std::vector<std::vector<std::string>> lo_rows;
            auto const flat = count_tokens(open_answers[k]["flat"]);
            auto const hier = count_tokens(open_answers[k]["hier"]);
            if (!flat.empty() && !hier.empty())
                for (const auto& w: log_odds(flat, hier, 20))
                    lo_rows.push_back({ w.word, num(w.delta) });
            emit("log_odds_pre_q" + std::to_string(k) + ".csv", { "word", "delta_flat_vs_hier" }, lo_rows);
        }
    }

    // Judge means, shaped like a structure x diversity table.
    {
        std::vector<std::vector<std::string>> rows;
        auto const judge_file = run_dir / "judge.jsonl";
        if (fs::exists(judge_file))
        {
            std::map<std::pair<std::string, std::string>, std::pair<std::array<double, kJudgeDims>, int>> sums;
            for (const auto& row: read_jsonl(judge_file))
            {
                auto it = by_id.find(row.at("cell_id").get<std::string>());
                if (it == by_id.end())
                    continue;
                auto& slot = sums[{ it->second->structure(), it->second->diversity() }];
                auto const names = judge_dimension_names();
                for (std::size_t d = 0; d < kJudgeDims; ++d)
                    slot.first[d] += row.at("dims").at(std::string(names[d])).get<double>();
                ++slot.second;
            }
            for (const auto& [key, v]: sums)
            {
                std::vector<std::string> row { key.first, key.second, std::to_string(v.second) };
                for (std::size_t d = 0; d < kJudgeDims; ++d)
                    row.push_back(num(v.first[d] / v.second));
                rows.push_back(std::move(row));
            }
        }
        std::vector<std::string> header { "structure", "diversity", "n" };
        for (auto name: judge_dimension_names())
            header.emplace_back(name);
        emit("judge_means.csv", header, rows);
    }

    return written;
}

} // namespace teamlab
