#pragma once

#include <string>
#include <string_view>

#include "reviewlore/llmgate/provider.hpp"

namespace reviewlore::llmgate {

// Plain key=value provider configuration; '#' starts a comment.
struct ProviderConfig {
    std::string provider = "openai";
    std::string adapter = "chat";  // "chat" (messages) or "completions" (prompt)
    std::string endpoint;
    std::string credential_env;    // env var holding the API key; empty for none
    std::string model;
    int concurrency = 4;
    int max_retries = 4;
    int backoff_initial_ms = 500;
    int backoff_cap_ms = 30000;
    int timeout_s = 120;
    bool multi_sample = true;
};

ProviderConfig parse_provider_config(std::string_view contents);
ProviderConfig load_provider_config(const std::string& path);

// HTTP POST {model, messages|prompt, temperature, n, max_tokens} against an
// OpenAI-compatible endpoint. 429 and 5xx map to retryable TransportErrors.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);

    std::string name() const override { return config_.provider + ":" + config_.model; }
    bool supports_multi_sample() const override { return config_.multi_sample; }
    ProviderReply complete(const ProviderRequest& request) override;

    const ProviderConfig& config() const noexcept { return config_; }

private:
    ProviderConfig config_;
    std::string origin_;
    std::string path_;
    std::string api_key_;
};

} // namespace reviewlore::llmgate
