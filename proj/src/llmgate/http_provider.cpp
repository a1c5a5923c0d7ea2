#include "reviewlore/llmgate/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::llmgate {

using nlohmann::json;

ProviderConfig parse_provider_config(std::string_view contents) {
    ProviderConfig c;
    std::size_t lineno = 0;
    for (auto line : text::split_lines(contents)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("provider config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        auto as_int = [&] {
            try {
                return std::stoi(value);
            } catch (const std::exception&) {
                throw ConfigError("provider config: " + key + " must be an integer");
            }
        };
        if (key == "provider") c.provider = value;
        else if (key == "adapter") c.adapter = value;
        else if (key == "endpoint") c.endpoint = value;
        else if (key == "credential_env") c.credential_env = value;
        else if (key == "model") c.model = value;
        else if (key == "concurrency") c.concurrency = as_int();
        else if (key == "max_retries") c.max_retries = as_int();
        else if (key == "backoff_initial_ms") c.backoff_initial_ms = as_int();
        else if (key == "backoff_cap_ms") c.backoff_cap_ms = as_int();
        else if (key == "timeout_s") c.timeout_s = as_int();
        else if (key == "multi_sample") c.multi_sample = value == "true" || value == "1" || value == "yes";
        else throw ConfigError("provider config: unknown key " + key);
    }
    if (c.adapter != "chat" && c.adapter != "completions") throw ConfigError("provider config: unknown adapter " + c.adapter);
    if (c.concurrency < 1) throw ConfigError("provider config: concurrency must be >= 1");
    return c;
}

ProviderConfig load_provider_config(const std::string& path) { return parse_provider_config(text::read_file(path)); }

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("provider endpoint needs a scheme: " + config_.endpoint);
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    origin_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
    if (!config_.credential_env.empty()) {
        const char* key = std::getenv(config_.credential_env.c_str());
        if (!key) throw ConfigError("credential env var " + config_.credential_env + " is not set");
        api_key_ = key;
    }
}

ProviderReply HttpProvider::complete(const ProviderRequest& request) {
    json body{{"model", config_.model},
              {"temperature", request.temperature},
              {"n", request.candidate_count},
              {"max_tokens", request.max_output_tokens}};
    if (config_.adapter == "chat") body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
    else body["prompt"] = request.prompt;

    httplib::Client cli(origin_);
    cli.set_connection_timeout(std::chrono::seconds(config_.timeout_s));
    cli.set_read_timeout(std::chrono::seconds(config_.timeout_s));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TransportError("transport failure: " + httplib::to_string(res.error()), 0, true);
    if (res->status == 429 || res->status >= 500)
        throw TransportError("provider returned HTTP " + std::to_string(res->status), res->status, true);
    if (res->status != 200)
        throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body, res->status,
                             false);

    ProviderReply reply;
    try {
        const json doc = json::parse(res->body);
        for (const auto& choice : doc.at("choices")) {
            Candidate c;
            if (config_.adapter == "chat") c.text = choice.at("message").value("content", "");
            else c.text = choice.value("text", "");
            if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
                c.finish_reason = choice["finish_reason"].get<std::string>();
            reply.candidates.push_back(std::move(c));
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unparseable provider response: ") + e.what(), res->status, false);
    }
    return reply;
}

} // namespace reviewlore::llmgate
