#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "reviewlore/llmgate/provider.hpp"
#include "reviewlore/llmgate/template.hpp"

namespace reviewlore::llmgate {

enum class GatewayMode { Replay, Live };

struct GatewayOptions {
    GatewayMode mode = GatewayMode::Replay;
    std::filesystem::path fixture_dir;  // read in replay mode, written when recording
    bool record = false;
    int max_retries = 4;
    std::chrono::milliseconds backoff_initial{500};
    std::chrono::milliseconds backoff_cap{30000};
    int max_in_flight = 4;
    int repair_attempts = 2;
    // Replaced in tests so backoff does not actually sleep.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct CompletionRequest {
    std::string template_id;
    Variables variables;
    double temperature = 0;
    int candidate_count = 1;
    int max_output_tokens = 4096;
};

struct CompletionResponse {
    std::vector<Candidate> candidates;
    std::string provider_name;
    std::int64_t latency_ms = 0;
    std::string request_digest;
    int retries = 0;
    std::vector<std::chrono::milliseconds> backoff_delays;

    // Some candidate was cut short or refused.
    bool truncated() const;
};

enum class FieldKind { String, Integer, Number, Boolean, Array, Object };

// Required top-level fields of a structured reply and their JSON kinds.
using Schema = std::map<std::string, FieldKind>;

// Problems found when checking `doc` against `schema`; empty when valid.
std::vector<std::string> validate_document(const nlohmann::json& doc, const Schema& schema);

// Removes a surrounding ```/```json fence, if any.
std::string strip_code_fences(std::string_view text);

struct StructuredResponse {
    std::vector<nlohmann::json> documents;  // one per candidate
    CompletionResponse response;
    int repairs = 0;
};

// Provider-agnostic completion front end with record/replay. Replay mode
// serves fixtures/<template_id>/<version>/<digest>.response (candidate 1)
// and <digest>.<n>.response (candidate n); live mode calls the provider
// with exponential backoff and optionally records what it gets back.
class Gateway {
public:
    Gateway(std::shared_ptr<const TemplateRegistry> templates, GatewayOptions options,
            std::shared_ptr<Provider> provider = nullptr);

    CompletionResponse complete(const CompletionRequest& request);

    // Parses each candidate as JSON and checks it against `schema`; failing
    // candidates are re-asked with the problems appended, up to
    // repair_attempts times, before a StructuredOutputError is thrown.
    StructuredResponse complete_structured(const CompletionRequest& request, const Schema& schema);

    const TemplateRegistry& templates() const noexcept { return *templates_; }
    const GatewayOptions& options() const noexcept { return options_; }
    std::string provider_name() const;

    std::filesystem::path fixture_path(const std::string& template_id, int version, const std::string& digest,
                                       int candidate) const;

private:
    CompletionResponse send(const ProviderRequest& preq, const std::string& digest);
    CompletionResponse replay(const ProviderRequest& preq, const std::string& digest) const;
    ProviderReply call_with_retry(const ProviderRequest& preq, CompletionResponse& resp);
    void record(const ProviderRequest& preq, const std::string& digest, const CompletionResponse& resp);

    std::shared_ptr<const TemplateRegistry> templates_;
    GatewayOptions options_;
    std::shared_ptr<Provider> provider_;
    std::counting_semaphore<64> in_flight_;
    std::mutex record_mutex_;
};

} // namespace reviewlore::llmgate
