#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include "reviewlore/llmgate/template.hpp"

namespace reviewlore::llmgate {

struct Candidate {
    std::string text;
    std::string finish_reason = "stop";  // "stop", "length", "refusal", ...

    bool operator==(const Candidate&) const = default;
};

// What a provider sees: the rendered prompt plus the bound variables, so
// scripted providers can answer without re-parsing the prompt.
struct ProviderRequest {
    std::string template_id;
    int version = 1;
    Variables variables;
    std::string prompt;
    double temperature = 0;
    int candidate_count = 1;
    int sample_index = 0;  // position when Best-of-N is issued as sequential calls
    int max_output_tokens = 4096;
    bool repair = false;   // prompt carries a repair note
};

struct ProviderReply {
    std::vector<Candidate> candidates;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    // True when one call can return several candidates.
    virtual bool supports_multi_sample() const { return false; }
    // Throws TransportError on transport failures.
    virtual ProviderReply complete(const ProviderRequest& request) = 0;
};

// Answers from an in-process function. Used by tests and for recording
// fixtures from a hand-written model stand-in.
class ScriptedProvider : public Provider {
public:
    using Responder = std::function<ProviderReply(const ProviderRequest&)>;

    explicit ScriptedProvider(Responder responder, std::string name = "scripted", bool multi_sample = true)
        : responder_(std::move(responder)), name_(std::move(name)), multi_sample_(multi_sample) {}

    std::string name() const override { return name_; }
    bool supports_multi_sample() const override { return multi_sample_; }
    ProviderReply complete(const ProviderRequest& request) override {
        ++calls_;
        return responder_(request);
    }

    int calls() const noexcept { return calls_.load(); }

private:
    Responder responder_;
    std::string name_;
    bool multi_sample_;
    std::atomic<int> calls_{0};
};

} // namespace reviewlore::llmgate
