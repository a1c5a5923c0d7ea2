#include "reviewlore/app/config.hpp"

#include <charconv>
#include <cstdio>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::app {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || p != end) throw ConfigError(key + ": not a number: '" + value + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = text::to_lower(value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "corpus_store") corpus_store = value;
    else if (key == "source_root") source_root = value;
    else if (key == "index_cache") index_cache = value;
    else if (key == "provider_config") provider_config = value;
    else if (key == "fixture_dir") fixture_dir = value;
    else if (key == "template_dir") template_dir = value;
    else if (key == "rule_set") rule_set = value;
    else if (key == "live") live = parse_bool(key, value);
    else if (key == "record") record = parse_bool(key, value);
    else if (key == "max_retries") max_retries = parse_number<int>(key, value);
    else if (key == "max_in_flight") max_in_flight = parse_number<int>(key, value);
    else if (key == "repair_attempts") repair_attempts = parse_number<int>(key, value);
    else if (key == "filter_batch_size") filter_batch_size = parse_number<std::size_t>(key, value);
    else if (key == "merge_threshold") merge_threshold = parse_double(key, value);
    else if (key == "merge_candidates_per_prompt") merge_candidates_per_prompt = parse_number<std::size_t>(key, value);
    else if (key == "mode") {
        if (value != "rule_based" && value != "rule_free") throw ConfigError("mode: expected rule_based or rule_free");
        mode = value;
    } else if (key == "top_r") top_r = parse_number<std::size_t>(key, value);
    else if (key == "context_budget") context_budget = parse_number<std::size_t>(key, value);
    else if (key == "rank_with_context") rank_with_context = parse_bool(key, value);
    else if (key == "temperature") temperature = parse_double(key, value);
    else if (key == "generation_temperature") generation_temperature = parse_double(key, value);
    else if (key == "n") n = parse_number<int>(key, value);
    else if (key == "k") k = parse_number<int>(key, value);
    else if (key == "threshold") threshold = parse_number<int>(key, value);
    else if (key == "verifier_weak") verifier_weak = parse_bool(key, value);
    else if (key == "ground_truth_from_system") ground_truth_from_system = parse_bool(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");

    if (filter_batch_size == 0) throw ConfigError("filter_batch_size must be positive");
    if (top_r == 0) throw ConfigError("top_r must be positive");
    if (context_budget == 0) throw ConfigError("context_budget must be positive");
    if (n < 1 || k < 1) throw ConfigError("n and k must be at least 1");
    if (threshold && (*threshold < 0 || *threshold > 100)) throw ConfigError("threshold must be in [0, 100]");
}

void RunConfig::load_text(std::string_view contents, const std::string& origin) {
    std::size_t lineno = 0;
    for (auto line : text::split_lines(contents)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        set(std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1))));
    }
}

void RunConfig::load_file(const std::string& path) { load_text(text::read_file(path), path); }

int RunConfig::effective_threshold() const { return threshold.value_or(verifier_weak ? 90 : 0); }

std::string RunConfig::canonical() const {
    std::string out;
    auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + "=" + v + "\n"; };
    kv("context_budget", std::to_string(context_budget));
    kv("filter_batch_size", std::to_string(filter_batch_size));
    kv("generation_temperature", num(generation_temperature));
    kv("ground_truth_from_system", ground_truth_from_system ? "true" : "false");
    kv("k", std::to_string(k));
    kv("merge_candidates_per_prompt", std::to_string(merge_candidates_per_prompt));
    kv("merge_threshold", num(merge_threshold));
    kv("mode", mode);
    kv("n", std::to_string(n));
    kv("rank_with_context", rank_with_context ? "true" : "false");
    kv("seed", std::to_string(seed));
    kv("temperature", num(temperature));
    kv("threshold", std::to_string(effective_threshold()));
    kv("top_r", std::to_string(top_r));
    return out;
}

std::string RunConfig::digest() const { return sha256_hex(canonical()).substr(0, 16); }

} // namespace reviewlore::app
