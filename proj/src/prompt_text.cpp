// SPDX-License-Identifier: Apache-2.0
#include <teamlab/prompt_text.hpp>

#include <future>

namespace teamlab
{

std::string render_question(const Question& q)
{
    auto out = q.text;
    for (const auto& o: q.options)
    {
        out += '\n';
        out += o.label;
        out += ". ";
        out += o.body;
    }
    return out;
}

std::string truncate_utf8(std::string_view s, std::size_t max_bytes)
{
    if (s.size() <= max_bytes)
        return std::string(s);
    auto cut = max_bytes;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80)
        --cut;
    return std::string(s.substr(0, cut));
}

std::string render_context(std::span<const AgentTurn> turns)
{
    std::string out;
    for (const auto& t: turns)
    {
        if (!out.empty())
            out += "\n\n";
        out += "Agent " + std::to_string(t.agent_id) + ": ";
        if (t.answer)
            out += truncate_utf8(trim(t.raw_text), kContextCharsPerAgent);
        else
            out += kNoAnswer;
    }
    return out;
}

std::string agent_list(std::span<const int> ids)
{
    std::string out;
    for (auto id: ids)
    {
        if (!out.empty())
            out += ", ";
        out += "Agent " + std::to_string(id);
    }
    return out;
}

std::string instruction_scaffold(std::span<const int> ids)
{
    std::string out;
    for (auto id: ids)
    {
        if (!out.empty())
            out += '\n';
        out += "Agent " + std::to_string(id) + ": ___";
    }
    return out;
}

std::vector<CallOutcome> complete_all(Backend& backend, const std::vector<ChatRequest>& requests)
{
    std::vector<std::future<std::string>> pending;
    pending.reserve(requests.size());
    for (const auto& req: requests)
        pending.push_back(std::async(std::launch::async, [&backend, &req] { return backend.complete(req); }));

    std::vector<CallOutcome> out(requests.size());
    for (std::size_t i = 0; i < pending.size(); ++i)
    {
        try
        {
            out[i].text = pending[i].get();
        }
        catch (...)
        {
            out[i].error = std::current_exception();
        }
    }
    return out;
}

} // namespace teamlab
