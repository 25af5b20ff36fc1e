// SPDX-License-Identifier: Apache-2.0
#include <teamlab/rng.hpp>
#include <teamlab/scripted_backend.hpp>

#include <algorithm>
#include <cstring>

namespace teamlab
{

ScriptedBackend::ScriptedBackend(std::uint64_t seed, std::vector<ScriptRule> rules):
    _seed(seed), _rules(std::move(rules))
{
    for (const auto& r: _rules)
        if (r.match == ScriptRule::Match::Exact && r.patterns.size() != 1)
            throw ValidationError(ValidationError::Kind::InvalidConfig, "rules", "exact rule needs exactly one pattern");
}

ScriptedBackend ScriptedBackend::from_json(const Json& j)
{
    std::vector<ScriptRule> rules;
    for (const auto& r: j.value("rules", Json::array()))
    {
        ScriptRule rule;
        if (r.contains("exact"))
        {
            rule.match = ScriptRule::Match::Exact;
            rule.patterns.push_back(r.at("exact").get<std::string>());
        }
        else
        {
            auto const& c = r.at("contains");
            if (c.is_string())
                rule.patterns.push_back(c.get<std::string>());
            else
                rule.patterns = c.get<std::vector<std::string>>();
        }
        rule.response = r.at("response").get<std::string>();
        rules.push_back(std::move(rule));
    }
    return ScriptedBackend(j.value("seed", std::uint64_t { 0 }), std::move(rules));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path)
{
    return from_json(Json::parse(read_file(path)));
}

std::string visible_option_labels(std::string_view prompt)
{
    std::string labels;
    std::size_t pos = 0;
    while (pos < prompt.size())
    {
        auto end = prompt.find('\n', pos);
        if (end == std::string_view::npos)
            end = prompt.size();
        auto const line = prompt.substr(pos, end - pos);
        auto const expected = static_cast<char>('A' + labels.size());
        if (line.size() >= 2 && line[0] == expected && line[1] == '.')
            labels.push_back(expected);
        pos = end + 1;
    }
    return labels.size() >= 2 ? labels : std::string("ABCDE");
}

std::string ScriptedBackend::complete(const ChatRequest& req)
{
    validate_request(req);
    _calls.fetch_add(1, std::memory_order_relaxed);
    auto const prompt = flatten_prompt(req);
    for (const auto& rule: _rules)
    {
        bool hit = false;
        if (rule.match == ScriptRule::Match::Exact)
            hit = prompt == rule.patterns.front();
        else
            hit = std::all_of(rule.patterns.begin(), rule.patterns.end(), [&](const std::string& p) {
                return prompt.find(p) != std::string::npos;
            });
        if (hit)
            return rule.response;
    }
    auto const labels = visible_option_labels(prompt);
    auto const h = splitmix64(fnv1a64(prompt, splitmix64(_seed)));
    return std::string("Answer: ") + labels[h % labels.size()];
}

std::string RecordingBackend::complete(const ChatRequest& req)
{
    auto response = _inner.complete(req);
    std::lock_guard lock(_mutex);
    _log.push_back(Exchange { req, response });
    return response;
}

std::vector<RecordingBackend::Exchange> RecordingBackend::exchanges() const
{
    std::lock_guard lock(_mutex);
    return _log;
}

} // namespace teamlab
