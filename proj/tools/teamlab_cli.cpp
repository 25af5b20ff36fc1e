// SPDX-License-Identifier: Apache-2.0
#include <teamlab/config.hpp>
#include <teamlab/datasets.hpp>
#include <teamlab/errors.hpp>
#include <teamlab/json_io.hpp>
#include <teamlab/persona.hpp>
#include <teamlab/report.hpp>
#include <teamlab/runner.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace
{

using namespace teamlab;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

struct Overrides
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

ExperimentConfig load(const Overrides& o)
{
    auto cfg = load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (!o.out.empty())
        cfg.output_dir = o.out;
    validate(cfg);
    return cfg;
}

std::unique_ptr<Backend> judge_backend_for(const ExperimentConfig& cfg)
{
    if (cfg.judge.enabled && cfg.judge.backend)
        return make_backend(*cfg.judge.backend);
    return nullptr;
}

void add_common(CLI::App* cmd, Overrides& o, bool with_out = true)
{
    cmd->add_option("--config", o.config, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override the config seed");
    if (with_out)
        cmd->add_option("--out", o.out, "Override the output directory");
}

int cmd_run(const Overrides& o, bool resume)
{
    auto const cfg = load(o);
    auto backend = make_backend(cfg.backend);
    auto judge = judge_backend_for(cfg);
    auto const summary = run(cfg, *backend, judge.get(), RunOptions { resume });
    std::size_t attempted = 0;
    std::size_t correct = 0;
    for (const auto& c: summary.cells)
    {
        attempted += c.attempted;
        correct += c.correct;
    }
    std::cout << summary.cells.size() << " cells, " << correct << "/" << attempted << " correct";
    if (summary.failed_questions > 0)
        std::cout << ", " << summary.failed_questions << " failed questions";
    if (summary.judge_failures > 0)
        std::cout << ", " << summary.judge_failures << " judge failures";
    std::cout << "\nwrote " << cfg.output_dir.string() << "\n";
    return summary.partial() ? kPartial : kOk;
}

int cmd_judge(const Overrides& o)
{
    auto cfg = load(o);
    if (!cfg.judge.enabled)
        throw ConfigError("judge is disabled in the config");
    auto judge = judge_backend_for(cfg);
    auto task = judge ? nullptr : make_backend(cfg.backend);
    auto const outcome = run_judge(cfg, judge ? *judge : *task);
    std::cout << outcome.judged << " transcripts judged, " << outcome.failures << " failures\n";
    return outcome.failures > 0 ? kPartial : kOk;
}

int cmd_probe_only(const Overrides& o)
{
    auto const cfg = load(o);
    auto backend = make_backend(cfg.backend);
    run_probe_only(cfg, *backend);
    std::cout << "wrote probes under " << (cfg.output_dir / "cells").string() << "\n";
    return kOk;
}

int cmd_validate(const Overrides& o)
{
    auto const cfg = load(o);
    auto const cells = expand_matrix(cfg);
    std::cout << "config ok: " << cells.size() << " cells\n";
    return kOk;
}

int cmd_report(const std::filesystem::path& run_dir)
{
    for (const auto& p: report(run_dir))
        std::cout << p.string() << "\n";
    return kOk;
}

struct NormalizeArgs
{
    std::string dataset;
    std::string split;
    std::string input;
    std::string sample = "full";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_normalize(const NormalizeArgs& a)
{
    DatasetSpec spec;
    spec.dataset = dataset_from_string(a.dataset);
    spec.split = a.split;
    spec.path = a.input;
    spec.sampling = sampling_from_string(a.sample);
    spec.seed = a.seed;
    auto const qs = load(spec);
    save_questions(a.out, qs);
    std::cout << qs.size() << " questions written to " << a.out << "\n";
    return kOk;
}

int cmd_personas(int size, int k, std::uint64_t seed, const std::string& out)
{
    if (k % 3 != 0 || k <= 0)
        throw ConfigError("--k must be a positive multiple of 3");
    auto const sample = stratified_sample(size, k / 3, seed);
    std::vector<Json> rows;
    for (const auto& t: sample.teams)
        rows.push_back(to_json(t));
    if (out.empty())
        for (const auto& r: rows)
            std::cout << to_jsonl_line(r) << "\n";
    else
        write_jsonl(out, rows);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Multi-agent team reasoning experiments" };
    app.require_subcommand(1);

    Overrides o;
    bool resume = false;
    auto* run_cmd = app.add_subcommand("run", "Execute the experiment matrix");
    add_common(run_cmd, o);
    run_cmd->add_flag("--resume", resume, "Skip recorded (cell, question) pairs");

    auto* judge_cmd = app.add_subcommand("judge", "Judge recorded transcripts");
    add_common(judge_cmd, o);

    auto* probe_cmd = app.add_subcommand("probe-only", "Run pre-task interviews only");
    add_common(probe_cmd, o);

    auto* validate_cmd = app.add_subcommand("validate-config", "Check a config and count its cells");
    add_common(validate_cmd, o);

    std::string run_dir;
    auto* report_cmd = app.add_subcommand("report", "Write CSV tables for a finished run");
    report_cmd->add_option("--out", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

    NormalizeArgs norm;
    auto* norm_cmd = app.add_subcommand("normalize", "Convert a raw dataset file to normalized JSONL");
    norm_cmd->add_option("--dataset", norm.dataset, "CS, ST, SQA or IH")->required();
    norm_cmd->add_option("--split", norm.split, "Split name")->required();
    norm_cmd->add_option("--input", norm.input, "Raw JSONL file")->required()->check(CLI::ExistingFile);
    norm_cmd->add_option("--sample", norm.sample, "full, fraction:P or per_class:N");
    norm_cmd->add_option("--seed", norm.seed, "Sampling seed");
    norm_cmd->add_option("--out", norm.out, "Output JSONL")->required();

    int team_size = 3;
    int k = 15;
    std::uint64_t persona_seed = 0;
    std::string persona_out;
    auto* persona_cmd = app.add_subcommand("personas", "Sample persona teams across gini strata");
    persona_cmd->add_option("--size", team_size, "Team size")->check(CLI::Range(1, 7));
    persona_cmd->add_option("--k", k, "Total teams, split evenly over three strata");
    persona_cmd->add_option("--seed", persona_seed, "Sampling seed");
    persona_cmd->add_option("--out", persona_out, "Output JSONL (stdout when omitted)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        auto const code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try
    {
        if (*run_cmd)
            return cmd_run(o, resume);
        if (*judge_cmd)
            return cmd_judge(o);
        if (*probe_cmd)
            return cmd_probe_only(o);
        if (*validate_cmd)
            return cmd_validate(o);
        if (*report_cmd)
            return cmd_report(run_dir);
        if (*norm_cmd)
            return cmd_normalize(norm);
        if (*persona_cmd)
            return cmd_personas(team_size, k, persona_seed, persona_out);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const ValidationError& e)
    {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const DatasetError& e)
    {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const NoRecords& e)
    {
        std::cerr << "no records: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kPartial;
    }
    return kOk;
}
