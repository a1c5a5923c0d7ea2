#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace reviewlore::app {

// Every knob the commands share. Loaded from a key=value file, then
// overridden by command-line flags.
struct RunConfig {
    // paths
    std::string corpus_store = "corpus";
    std::string source_root;
    std::string index_cache;
    std::string provider_config;
    std::string fixture_dir = "fixtures";
    std::string template_dir;
    std::string rule_set = "rules.jsonl";

    // gateway
    bool live = false;
    bool record = false;
    int max_retries = 4;
    int max_in_flight = 4;
    int repair_attempts = 2;

    // rule generation
    std::size_t filter_batch_size = 20;
    double merge_threshold = 30.0;
    std::size_t merge_candidates_per_prompt = 30;

    // validation
    std::string mode = "rule_based";
    std::size_t top_r = 25;
    std::size_t context_budget = 24000;
    bool rank_with_context = true;
    double temperature = 0.2;
    double generation_temperature = 0.7;

    // evaluation
    int n = 10;
    int k = 3;
    std::optional<int> threshold;  // unset: 0, or 90 for a weak verifier
    bool verifier_weak = false;
    bool ground_truth_from_system = false;

    std::uint64_t seed = 1;

    // Throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    void load_text(std::string_view contents, const std::string& origin = "config");

    int effective_threshold() const;

    // Canonical key=value listing of the non-path knobs.
    std::string canonical() const;
    std::string digest() const;
};

} // namespace reviewlore::app
