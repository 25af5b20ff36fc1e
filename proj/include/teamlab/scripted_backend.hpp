// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>
#include <teamlab/json_io.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace teamlab
{

struct ScriptRule
{
    enum class Match
    {
        /// Every pattern must occur somewhere in the flattened prompt.
        Substring,
        /// The flattened prompt must equal the single pattern.
        Exact,
    };

    Match match = Match::Substring;
    std::vector<std::string> patterns;
    std::string response;
};

/// Deterministic mock used by every test and by offline dry runs.
///
/// The first matching rule answers. Unmatched prompts get "Answer: X" with X
/// picked by hashing (seed, prompt) into the prompt's option letters, or into
/// A..E when no option list is visible. Output is a pure function of the
/// request, so call order and concurrency never change results.
class ScriptedBackend final: public Backend
{
  public:
    ScriptedBackend(std::uint64_t seed, std::vector<ScriptRule> rules);

    /// {"seed": 7, "rules": [{"contains": [..] | "exact": "..", "response": ".."}]}
    static ScriptedBackend from_json(const Json& j);
    static ScriptedBackend from_file(const std::filesystem::path& path);

    std::string complete(const ChatRequest& req) override;

    [[nodiscard]] std::uint64_t calls() const noexcept { return _calls.load(); }

    [[nodiscard]] std::uint64_t seed() const noexcept { return _seed; }

  private:
    std::uint64_t _seed;
    std::vector<ScriptRule> _rules;
    std::atomic<std::uint64_t> _calls { 0 };
};

/// Option letters listed as "X. ..." lines, contiguous from A.
[[nodiscard]] std::string visible_option_labels(std::string_view prompt);

/// Forwards to another backend and keeps every request/response pair.
class RecordingBackend final: public Backend
{
  public:
    struct Exchange
    {
        ChatRequest request;
        std::string response;
    };

    explicit RecordingBackend(Backend& inner): _inner(inner) {}

    std::string complete(const ChatRequest& req) override;

    [[nodiscard]] std::vector<Exchange> exchanges() const;

  private:
    Backend& _inner;
    mutable std::mutex _mutex;
    std::vector<Exchange> _log;
};

} // namespace teamlab
