// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <teamlab/backend.hpp>

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace teamlab
{

struct HttpBackendConfig
{
    /// Scheme, host and port, e.g. "http://127.0.0.1:8000".
    std::string endpoint_url = "http://127.0.0.1:8000";
    std::string path = "/v1/chat/completions";
    std::string model_name;
    /// Overrides the per-request temperature when set.
    std::optional<double> temperature;
    /// Overrides the per-request token cap when set.
    std::optional<int> max_tokens;
    int max_in_flight = 8;
    /// Bearer token; empty for unauthenticated local servers.
    std::string api_key;

    int max_attempts = 5;
    std::chrono::milliseconds backoff_base { 1000 };
    double backoff_factor = 2.0;
    std::chrono::seconds request_timeout { 120 };

    /// Fills api_key from TEAMLAB_API_KEY when present.
    static HttpBackendConfig from_environment(HttpBackendConfig base);
};

/// OpenAI-compatible chat-completion client.
///
/// Retryable failures (network, 5xx, 429, timeouts) are retried with
/// exponential backoff; after max_attempts the last BackendError surfaces.
/// At most max_in_flight requests are outstanding at once.
class HttpBackend final: public Backend
{
  public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});
    ~HttpBackend() override;

    HttpBackend(const HttpBackend&) = delete;
    HttpBackend& operator=(const HttpBackend&) = delete;

    std::string complete(const ChatRequest& req) override;

    [[nodiscard]] const HttpBackendConfig& config() const noexcept { return _config; }

    /// The JSON body sent for `req` under this configuration.
    [[nodiscard]] std::string request_body(const ChatRequest& req) const;

  private:
    std::string attempt(const std::string& body);

    struct Gate;

    HttpBackendConfig _config;
    Sleeper _sleep;
    std::unique_ptr<Gate> _gate;
};

} // namespace teamlab
