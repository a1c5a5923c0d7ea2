#include "reviewlore/llmgate/gateway.hpp"

#include <algorithm>
#include <thread>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::llmgate {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view kind_name(FieldKind k) {
    switch (k) {
    case FieldKind::String: return "a string";
    case FieldKind::Integer: return "an integer";
    case FieldKind::Number: return "a number";
    case FieldKind::Boolean: return "a boolean";
    case FieldKind::Array: return "an array";
    case FieldKind::Object: return "an object";
    }
    return "?";
}

bool has_kind(const json& v, FieldKind k) {
    switch (k) {
    case FieldKind::String: return v.is_string();
    case FieldKind::Integer: return v.is_number_integer();
    case FieldKind::Number: return v.is_number();
    case FieldKind::Boolean: return v.is_boolean();
    case FieldKind::Array: return v.is_array();
    case FieldKind::Object: return v.is_object();
    }
    return false;
}

// Parse + validate one candidate text; returns problems (empty on success).
std::vector<std::string> check_candidate(const std::string& text, const Schema& schema, json& out) {
    try {
        out = json::parse(strip_code_fences(text));
    } catch (const json::parse_error& e) {
        return {std::string("reply is not valid JSON: ") + e.what()};
    }
    return validate_document(out, schema);
}

std::string repair_note(const std::vector<std::string>& problems, const std::string& previous, const Schema& schema) {
    std::string note = "\n\nYour previous reply could not be used:\n";
    for (const auto& p : problems) note += "- " + p + "\n";
    note += "\nPrevious reply:\n" + previous + "\n\nReply again with a single JSON document that has the fields: ";
    bool first = true;
    for (const auto& [name, kind] : schema) {
        if (!first) note += ", ";
        note += name + " (" + std::string(kind_name(kind)) + ")";
        first = false;
    }
    note += ".\n";
    return note;
}

} // namespace

bool CompletionResponse::truncated() const {
    return std::any_of(candidates.begin(), candidates.end(),
                       [](const Candidate& c) { return c.finish_reason != "stop"; });
}

std::vector<std::string> validate_document(const json& doc, const Schema& schema) {
    if (!doc.is_object()) return {"reply is not a JSON object"};
    std::vector<std::string> problems;
    for (const auto& [name, kind] : schema) {
        auto it = doc.find(name);
        if (it == doc.end()) problems.push_back("missing required field '" + name + "'");
        else if (!has_kind(*it, kind))
            problems.push_back("field '" + name + "' should be " + std::string(kind_name(kind)));
    }
    return problems;
}

std::string strip_code_fences(std::string_view text) {
    std::string_view t = text::trim(text);
    const auto open = t.find("```");
    if (open == std::string_view::npos) return std::string(t);
    const auto close = t.rfind("```");
    if (close == open) return std::string(t);
    std::string_view inner = t.substr(open + 3, close - open - 3);
    // Drop the info string ("json") on the opening fence line.
    const auto nl = inner.find('\n');
    if (nl != std::string_view::npos && text::trim(inner.substr(0, nl)).find(' ') == std::string_view::npos)
        inner = inner.substr(nl + 1);
    return std::string(text::trim(inner));
}

Gateway::Gateway(std::shared_ptr<const TemplateRegistry> templates, GatewayOptions options,
                 std::shared_ptr<Provider> provider)
    : templates_(std::move(templates)), options_(std::move(options)), provider_(std::move(provider)),
      in_flight_(std::clamp(options_.max_in_flight, 1, 64)) {
    if (!templates_) throw ConfigError("gateway needs a template registry");
    if (options_.mode == GatewayMode::Live && !provider_) throw ConfigError("live gateway needs a provider");
    if (options_.mode == GatewayMode::Replay && options_.fixture_dir.empty())
        throw ConfigError("replay gateway needs a fixture directory");
    if (options_.record && options_.fixture_dir.empty()) throw ConfigError("recording needs a fixture directory");
    if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string Gateway::provider_name() const {
    return options_.mode == GatewayMode::Replay ? std::string("replay") : provider_->name();
}

fs::path Gateway::fixture_path(const std::string& template_id, int version, const std::string& digest,
                               int candidate) const {
    const std::string file = candidate <= 1 ? digest + ".response" : digest + "." + std::to_string(candidate) + ".response";
    return options_.fixture_dir / template_id / std::to_string(version) / file;
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
    if (request.candidate_count < 1) throw DomainError("candidate_count must be >= 1");
    if (request.temperature < 0) throw DomainError("temperature must be >= 0");
    const PromptTemplate& t = templates_->get(request.template_id);

    ProviderRequest preq;
    preq.template_id = t.id;
    preq.version = t.version;
    preq.variables = request.variables;
    preq.prompt = canonical_prompt(t.render(request.variables));
    preq.temperature = request.temperature;
    preq.candidate_count = request.candidate_count;
    preq.max_output_tokens = request.max_output_tokens;
    return send(preq, request_digest(t.id, t.version, preq.prompt));
}

CompletionResponse Gateway::send(const ProviderRequest& preq, const std::string& digest) {
    if (options_.mode == GatewayMode::Replay) return replay(preq, digest);

    CompletionResponse resp;
    resp.provider_name = provider_->name();
    resp.request_digest = digest;
    const auto started = std::chrono::steady_clock::now();
    {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<64>& s;
            ~Release() { s.release(); }
        } release{in_flight_};

        if (preq.candidate_count > 1 && !provider_->supports_multi_sample()) {
            for (int i = 0; i < preq.candidate_count; ++i) {
                ProviderRequest one = preq;
                one.candidate_count = 1;
                one.sample_index = i;
                auto reply = call_with_retry(one, resp);
                if (reply.candidates.empty()) throw TransportError("provider returned no candidate", 0, false);
                resp.candidates.push_back(std::move(reply.candidates.front()));
            }
        } else {
            resp.candidates = call_with_retry(preq, resp).candidates;
        }
    }
    resp.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

    if (static_cast<int>(resp.candidates.size()) > preq.candidate_count) resp.candidates.resize(preq.candidate_count);
    if (static_cast<int>(resp.candidates.size()) < preq.candidate_count && !resp.truncated())
        throw TransportError("provider returned " + std::to_string(resp.candidates.size()) + " of " +
                                 std::to_string(preq.candidate_count) + " candidates",
                             0, false);
    if (options_.record) record(preq, digest, resp);
    return resp;
}

ProviderReply Gateway::call_with_retry(const ProviderRequest& preq, CompletionResponse& resp) {
    for (int attempt = 0;; ++attempt) {
        try {
            return provider_->complete(preq);
        } catch (const TransportError& e) {
            if (!e.retryable() || attempt >= options_.max_retries) throw;
            auto delay = options_.backoff_initial * (1LL << std::min(attempt, 20));
            delay = std::min<std::chrono::milliseconds>(delay, options_.backoff_cap);
            ++resp.retries;
            resp.backoff_delays.push_back(delay);
            options_.sleep(delay);
        }
    }
}

CompletionResponse Gateway::replay(const ProviderRequest& preq, const std::string& digest) const {
    CompletionResponse resp;
    resp.provider_name = "replay";
    resp.request_digest = digest;

    std::vector<std::string> finish_reasons;
    const fs::path sidecar = options_.fixture_dir / preq.template_id / std::to_string(preq.version) / (digest + ".request");
    if (fs::exists(sidecar)) {
        try {
            const json j = json::parse(text::read_file(sidecar.string()));
            if (j.contains("finish_reasons")) finish_reasons = j["finish_reasons"].get<std::vector<std::string>>();
        } catch (const json::exception&) {
            // sidecars are for auditing; a damaged one does not block replay
        }
    }
    for (int c = 1; c <= preq.candidate_count; ++c) {
        const fs::path p = fixture_path(preq.template_id, preq.version, digest, c);
        if (!fs::exists(p)) {
            if (c > 1 && static_cast<std::size_t>(c - 1) == finish_reasons.size() &&
                std::any_of(finish_reasons.begin(), finish_reasons.end(), [](const std::string& r) { return r != "stop"; }))
                break;  // recorded short reply
            throw FixtureMissingError(preq.template_id, preq.version, digest, p.string());
        }
        Candidate cand;
        cand.text = text::read_file(p.string());
        if (static_cast<std::size_t>(c - 1) < finish_reasons.size()) cand.finish_reason = finish_reasons[c - 1];
        resp.candidates.push_back(std::move(cand));
    }
    return resp;
}

void Gateway::record(const ProviderRequest& preq, const std::string& digest, const CompletionResponse& resp) {
    std::lock_guard lock(record_mutex_);
    const fs::path dir = options_.fixture_dir / preq.template_id / std::to_string(preq.version);
    fs::create_directories(dir);
    json sidecar{{"template_id", preq.template_id},
                 {"version", preq.version},
                 {"digest", digest},
                 {"temperature", preq.temperature},
                 {"candidate_count", preq.candidate_count},
                 {"repair", preq.repair},
                 {"provider", resp.provider_name},
                 {"finish_reasons", json::array()},
                 {"prompt", preq.prompt}};
    for (std::size_t i = 0; i < resp.candidates.size(); ++i) {
        sidecar["finish_reasons"].push_back(resp.candidates[i].finish_reason);
        text::write_file(fixture_path(preq.template_id, preq.version, digest, static_cast<int>(i) + 1).string(),
                         resp.candidates[i].text);
    }
    text::write_file((dir / (digest + ".request")).string(), sidecar.dump(2) + "\n");
}

StructuredResponse Gateway::complete_structured(const CompletionRequest& request, const Schema& schema) {
    const PromptTemplate& t = templates_->get(request.template_id);
    if (t.output_kind != OutputKind::StructuredDocument)
        throw PreconditionError("template " + t.id + " does not produce a structured document");

    StructuredResponse out;
    out.response = complete(request);
    const std::string base_prompt = canonical_prompt(t.render(request.variables));

    std::vector<std::string> raw;
    std::vector<std::string> all_problems;
    bool failed = false;
    for (const auto& cand : out.response.candidates) {
        std::string current = cand.text;
        raw.push_back(current);
        json doc;
        auto problems = check_candidate(current, schema, doc);
        for (int attempt = 0; !problems.empty() && attempt < options_.repair_attempts; ++attempt) {
            ProviderRequest preq;
            preq.template_id = t.id;
            preq.version = t.version;
            preq.variables = request.variables;
            preq.prompt = base_prompt + repair_note(problems, current, schema);
            preq.temperature = request.temperature;
            preq.candidate_count = 1;
            preq.max_output_tokens = request.max_output_tokens;
            preq.repair = true;
            auto fixed = send(preq, request_digest(t.id, t.version, preq.prompt));
            ++out.repairs;
            if (fixed.candidates.empty()) break;
            current = fixed.candidates.front().text;
            raw.push_back(current);
            problems = check_candidate(current, schema, doc);
        }
        if (!problems.empty()) {
            failed = true;
            all_problems.insert(all_problems.end(), problems.begin(), problems.end());
        } else {
            out.documents.push_back(std::move(doc));
        }
    }
    if (failed) {
        std::string what = "structured output for " + t.id + " unusable after " +
                           std::to_string(options_.repair_attempts) + " repair(s): " + text::join(all_problems, "; ");
        throw StructuredOutputError(what, std::move(raw), std::move(all_problems));
    }
    return out;
}

} // namespace reviewlore::llmgate
