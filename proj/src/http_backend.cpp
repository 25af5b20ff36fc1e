// SPDX-License-Identifier: Apache-2.0
#include <teamlab/http_backend.hpp>
#include <teamlab/json_io.hpp>

#include <httplib.h>

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace teamlab
{

struct HttpBackend::Gate
{
    std::mutex mutex;
    std::condition_variable cv;
    int in_flight = 0;
    int cap = 1;

    void acquire()
    {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return in_flight < cap; });
        ++in_flight;
    }

    void release()
    {
        {
            std::lock_guard lock(mutex);
            --in_flight;
        }
        cv.notify_one();
    }
};

HttpBackendConfig HttpBackendConfig::from_environment(HttpBackendConfig base)
{
    if (auto const* key = std::getenv("TEAMLAB_API_KEY"); key && *key)
        base.api_key = key;
    return base;
}

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper):
    _config(std::move(config)), _sleep(std::move(sleeper)), _gate(std::make_unique<Gate>())
{
    if (_config.max_in_flight < 1)
        throw ValidationError(ValidationError::Kind::InvalidConfig, "max_in_flight", "must be at least 1");
    if (_config.max_attempts < 1)
        throw ValidationError(ValidationError::Kind::InvalidConfig, "max_attempts", "must be at least 1");
    _gate->cap = _config.max_in_flight;
    if (!_sleep)
        _sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(const ChatRequest& req) const
{
    Json body;
    body["model"] = _config.model_name.empty() ? req.model_name : _config.model_name;
    auto messages = Json::array();
    if (req.system)
        messages.push_back(Json { { "role", "system" }, { "content", *req.system } });
    for (const auto& m: req.messages)
        messages.push_back(Json { { "role", m.role == Role::User ? "user" : "assistant" }, { "content", m.content } });
    body["messages"] = std::move(messages);
    body["temperature"] = _config.temperature.value_or(req.temperature);
    body["max_tokens"] = _config.max_tokens.value_or(req.max_tokens);
    return body.dump();
}

std::string HttpBackend::attempt(const std::string& body)
{
    using Kind = BackendError::Kind;

    httplib::Client client(_config.endpoint_url);
    client.set_connection_timeout(_config.request_timeout);
    client.set_read_timeout(_config.request_timeout);
    client.set_write_timeout(_config.request_timeout);
    httplib::Headers headers;
    if (!_config.api_key.empty())
        headers.emplace("Authorization", "Bearer " + _config.api_key);

    auto res = client.Post(_config.path, headers, body, "application/json");
    if (!res)
    {
        auto const err = res.error();
        auto const detail = "request failed: " + httplib::to_string(err);
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read || err == httplib::Error::Write)
            throw BackendError(Kind::Timeout, true, detail);
        throw BackendError(Kind::Network, true, detail);
    }
    if (res->status == 429)
        throw BackendError(Kind::RateLimited, true, "HTTP 429 rate limited");
    if (res->status >= 500)
        throw BackendError(Kind::Network, true, "HTTP " + std::to_string(res->status));
    if (res->status != 200)
        throw BackendError(Kind::Network, false, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));

    try
    {
        auto const j = Json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    catch (const Json::exception& e)
    {
        throw BackendError(Kind::MalformedResponse, false, std::string("unexpected completion payload: ") + e.what());
    }
}

std::string HttpBackend::complete(const ChatRequest& req)
{
    validate_request(req);
    auto const body = request_body(req);

    auto delay = _config.backoff_base;
    for (int attempt_no = 1;; ++attempt_no)
    {
        _gate->acquire();
        try
        {
            auto text = attempt(body);
            _gate->release();
            return text;
        }
        catch (const BackendError& e)
        {
            _gate->release();
            if (!e.retryable() || attempt_no >= _config.max_attempts)
                throw;
        }
        _sleep(delay);
        delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * _config.backoff_factor));
    }
}

} // namespace teamlab
