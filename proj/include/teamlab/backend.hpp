// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/errors.hpp>

#include <optional>
#include <string>
#include <vector>

namespace teamlab
{

inline constexpr double kDefaultTemperature = 0.7;
inline constexpr int kAgentMaxTokens = 512;
inline constexpr int kLeaderMaxTokens = 1024;

enum class Role
{
    User,
    Assistant,
};

struct ChatMessage
{
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest
{
    std::optional<std::string> system;
    std::vector<ChatMessage> messages;
    double temperature = kDefaultTemperature;
    int max_tokens = kAgentMaxTokens;
    std::string model_name;

    bool operator==(const ChatRequest&) const = default;
};

/// Throws ValidationError if temperature is outside [0,2], messages are
/// empty or max_tokens is not positive.
void validate_request(const ChatRequest& req);

/// System text and every message joined by newlines; what scripted rules
/// match against and what deterministic fallbacks hash.
[[nodiscard]] std::string flatten_prompt(const ChatRequest& req);

/// A chat-completion service. Implementations must be safe to call from
/// many threads at once.
class Backend
{
  public:
    virtual ~Backend() = default;

    /// Returns the assistant text or throws BackendError.
    virtual std::string complete(const ChatRequest& req) = 0;
};

} // namespace teamlab
