// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mock experiment shared by the runner tests and the acceptance binary:
// two datasets of twenty questions, one flat and one L1 hierarchy setting,
// probes and a scripted judge. Flat teams always agree on A and leaders
// always finish on B, so accuracies follow from the gold letters alone.

#include "support.hpp"

#include <teamlab/config.hpp>
#include <teamlab/json_io.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace e2e
{

namespace fs = std::filesystem;
using teamlab::Json;

inline Json script_json()
{
    auto rule = [](Json contains, const std::string& response) { return Json { { "contains", contains }, { "response", response } }; };
    Json rules = Json::array();
    rules.push_back(rule("Neutral baseline", "1:4 2:3 3:4 4:4 5:3\nRationale: steady, polite exchange."));
    rules.push_back(rule(Json::array({ "You are a reasoning agent", "Before the task" }),
                         "1. open debate among equals 2. independent thinker 3. 4 4. 5 5. 5"));
    rules.push_back(rule("Before the task", "1. clear delegation from leader 2. follower 3. 3 4. 4 5. 5"));
    rules.push_back(rule("The task is complete", "1. 4 2. 4 3. 4 4. 4 5. 3 6. 3"));
    rules.push_back(rule("Final Answer: ___", "Final Answer: B"));
    rules.push_back(rule("You are the team leader",
                         "Agent 2: Check the facts.\nAgent 3: Weigh each option.\nAgent 4: Pick the likeliest."));
    rules.push_back(rule("Answer: ___", "The first option fits best. Answer: A"));
    return Json { { "seed", 7 }, { "rules", rules } };
}

/// Gold-letter counts read straight from the raw fixture files.
struct HandCounts
{
    int total = 0;
    int gold_a = 0;
    int gold_b = 0;
};

inline HandCounts count_raw(const fs::path& file, const std::string& key, const std::string& a, const std::string& b)
{
    HandCounts c;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        auto const j = Json::parse(line);
        auto const v = j.at(key).get<std::string>();
        ++c.total;
        c.gold_a += v == a;
        c.gold_b += v == b;
    }
    return c;
}

inline HandCounts cs_counts()
{
    return count_raw(testing::fixture("cs_dev.jsonl"), "answerKey", "A", "B");
}

inline HandCounts ih_counts()
{
    return count_raw(testing::fixture("ih_test.jsonl"), "class", "implicit_hate", "explicit_hate");
}

inline teamlab::ExperimentConfig make_config(const fs::path& work, const fs::path& out, bool probes = true, bool judge = true)
{
    using namespace teamlab;
    auto const script = work / "script.json";
    write_file(script, script_json().dump(2) + "\n");

    ExperimentConfig cfg;
    cfg.seed = 2024;
    cfg.output_dir = out;
    cfg.probes = probes;
    cfg.backend.kind = "scripted";
    cfg.backend.script = script;
    cfg.backend.models = { "mock" };
    cfg.backend.max_in_flight = 4;
    cfg.datasets = { DatasetSettings { DatasetId::CS, "dev", testing::fixture("cs_dev.jsonl"), Sampling::full() },
                     DatasetSettings { DatasetId::IH, "test", testing::fixture("ih_test.jsonl"), Sampling::full() } };
    cfg.teams.flat_sizes = { 3 };
    cfg.teams.hier_shapes = { HierShape::L1 };
    cfg.teams.rounds = { 2 };
    cfg.judge.enabled = judge;
    cfg.judge.calibration = testing::fixture("calibration.jsonl");
    cfg.judge.sample = 40;
    return cfg;
}

/// Relative path to file contents for every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const fs::path& root, const std::string& skip = "metadata.json")
{
    std::map<std::string, std::string> files;
    for (const auto& e: fs::recursive_directory_iterator(root))
    {
        if (!e.is_regular_file() || e.path().filename() == skip)
            continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), root).generic_string()] = ss.str();
    }
    return files;
}

/// Column values of a CSV row whose first fields match `prefix`.
inline std::vector<std::string> csv_row(const fs::path& file, const std::vector<std::string>& prefix)
{
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        if (!line.empty() && line.back() == ',')
            fields.emplace_back();
        bool match = fields.size() >= prefix.size();
        for (std::size_t i = 0; match && i < prefix.size(); ++i)
            match = fields[i] == prefix[i];
        if (match)
            return fields;
    }
    return {};
}

} // namespace e2e
