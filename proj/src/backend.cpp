// SPDX-License-Identifier: Apache-2.0
#include <teamlab/backend.hpp>

namespace teamlab
{

void validate_request(const ChatRequest& req)
{
    using Kind = ValidationError::Kind;
    if (!(req.temperature >= 0.0 && req.temperature <= 2.0))
        throw ValidationError(Kind::PreconditionViolated, "temperature", "must lie in [0,2]");
    if (req.messages.empty())
        throw ValidationError(Kind::PreconditionViolated, "messages", "must not be empty");
    if (req.max_tokens <= 0)
        throw ValidationError(Kind::PreconditionViolated, "max_tokens", "must be positive");
}

std::string flatten_prompt(const ChatRequest& req)
{
    std::string out;
    if (req.system)
        out += *req.system;
    for (const auto& m: req.messages)
    {
        if (!out.empty())
            out += '\n';
        out += m.content;
    }
    return out;
}

} // namespace teamlab
