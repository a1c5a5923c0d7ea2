#include "reviewlore/rulegen/pipeline.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/rng.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::rulegen {

using nlohmann::json;
using llmgate::CompletionRequest;
using llmgate::FieldKind;

namespace {

std::string format_thread(const corpus::DiscussionThread& thread, std::size_t max_chars) {
    std::string out;
    for (const auto& m : thread.members) {
        out += "=== message-id: " + m.message_id + "\n";
        out += "author: " + m.author.display() + "\n";
        out += "date: " + text::iso8601_utc(m.date) + "\n";
        if (auto it = thread.reply_edges.find(m.message_id); it != thread.reply_edges.end())
            out += "in-reply-to: " + it->second + "\n";
        out += "subject: " + m.subject + "\n\n";
        const std::string_view body = text::utf8_prefix(m.body, max_chars);
        out.append(body);
        if (body.size() < m.body.size()) out += "\n[... truncated]";
        out += "\n\n";
    }
    return out;
}

template <class T, class F>
std::string numbered(const std::vector<T>& items, std::size_t begin, std::size_t end, F text_of) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i)
        out += "[" + std::to_string(i - begin + 1) + "] " + text::normalize_whitespace(text_of(items[i])) + "\n";
    return out;
}

std::optional<RemovalReason> parse_reason(std::string_view s) {
    const std::string r = text::to_lower(text::trim(s));
    if (r == "vague") return RemovalReason::Vague;
    if (r == "redundant") return RemovalReason::Redundant;
    if (r == "overlapping") return RemovalReason::Overlapping;
    if (r == "communication-convention" || r == "communication convention" || r == "communication_convention")
        return RemovalReason::CommunicationConvention;
    return std::nullopt;
}

json sources_json(const std::set<Source>& sources) {
    json a = json::array();
    for (const auto& s : sources) a.push_back({{"message_id", s.message_id}, {"author", s.author}});
    return a;
}

// 1-based index from a JSON element; nullopt when missing or out of range.
std::optional<std::size_t> index_in(const json& v, std::size_t size) {
    if (!v.is_number_integer()) return std::nullopt;
    const auto i = v.get<long long>();
    if (i < 1 || static_cast<std::size_t>(i) > size) return std::nullopt;
    return static_cast<std::size_t>(i - 1);
}

} // namespace

void AuditLog::write(const std::string& json_line) const {
    if (out_) *out_ << json_line << '\n';
}

std::string_view to_string(RemovalReason r) noexcept {
    switch (r) {
    case RemovalReason::Vague: return "vague";
    case RemovalReason::Redundant: return "redundant";
    case RemovalReason::Overlapping: return "overlapping";
    case RemovalReason::CommunicationConvention: return "communication-convention";
    }
    return "unknown";
}

std::vector<RawRule> extract_rules(llmgate::Gateway& gw, const corpus::DiscussionThread& thread,
                                   const RuleGenConfig& cfg, const AuditLog& audit) {
    if (thread.reply_count() == 0) return {};

    std::map<std::string, std::string> author_of;
    for (const auto& m : thread.members) author_of[m.message_id] = m.author.display();

    CompletionRequest req;
    req.template_id = "rules.extract";
    req.variables = {{"root_id", thread.root_id}, {"thread", format_thread(thread, cfg.max_message_chars)}};
    req.temperature = cfg.temperature;

    json doc;
    try {
        doc = gw.complete_structured(req, {{"rules", FieldKind::Array}}).documents.front();
    } catch (const FixtureMissingError&) {
        throw;
    } catch (const Error& e) {
        throw StageError("extract", thread.root_id, e.what());
    }

    std::vector<RawRule> out;
    for (const auto& item : doc["rules"]) {
        if (!item.is_object() || !item.contains("content") || !item["content"].is_string()) continue;
        RawRule r;
        r.content = std::string(text::trim(item["content"].get<std::string>()));
        if (text::normalize_whitespace(r.content).empty()) continue;
        if (item.contains("sources") && item["sources"].is_array()) {
            for (const auto& s : item["sources"]) {
                if (!s.is_string()) continue;
                std::string id(text::trim(s.get<std::string>()));
                if (id.size() >= 2 && id.front() == '<' && id.back() == '>') id = id.substr(1, id.size() - 2);
                auto it = author_of.find(id);
                if (it == author_of.end()) continue;  // not part of this thread
                r.sources.insert({id, it->second});
            }
        }
        if (r.sources.empty()) {
            audit.write(json{{"stage", "extract"}, {"thread", thread.root_id}, {"dropped", r.content},
                             {"reason", "no source inside the thread"}}
                            .dump());
            continue;
        }
        out.push_back(std::move(r));
    }
    audit.write(json{{"stage", "extract"}, {"thread", thread.root_id}, {"extracted", out.size()}}.dump());
    return out;
}

FilterResult filter_rules(llmgate::Gateway& gw, std::vector<RawRule> rules, const RuleGenConfig& cfg,
                          const AuditLog& audit) {
    FilterResult res;
    const std::size_t batch = std::max<std::size_t>(1, cfg.filter_batch_size);
    for (std::size_t begin = 0; begin < rules.size(); begin += batch) {
        const std::size_t end = std::min(rules.size(), begin + batch);
        std::map<std::size_t, RemovalReason> verdicts;
        CompletionRequest req;
        req.template_id = "rules.filter";
        req.variables = {{"rules", numbered(rules, begin, end, [](const RawRule& r) { return r.content; })}};
        req.temperature = cfg.temperature;
        try {
            const json doc = gw.complete_structured(req, {{"removed", FieldKind::Array}}).documents.front();
            for (const auto& item : doc["removed"]) {
                if (!item.is_object()) continue;
                auto idx = index_in(item.value("index", json()), end - begin);
                auto reason = parse_reason(item.value("reason", std::string{}));
                if (!idx || !reason) {
                    res.warnings.push_back("ignored malformed filter verdict: " + item.dump());
                    continue;
                }
                verdicts.emplace(begin + *idx, *reason);
            }
        } catch (const FixtureMissingError&) {
            throw;
        } catch (const Error& e) {
            res.warnings.push_back("filter batch " + std::to_string(begin / batch) + " passed through: " + e.what());
            audit.write(json{{"stage", "filter"}, {"batch", begin / batch}, {"warning", e.what()}}.dump());
        }
        for (std::size_t i = begin; i < end; ++i) {
            auto v = verdicts.find(i);
            if (v == verdicts.end()) {
                res.kept.push_back(std::move(rules[i]));
                continue;
            }
            audit.write(json{{"stage", "filter"}, {"removed", rules[i].content}, {"reason", to_string(v->second)},
                             {"sources", sources_json(rules[i].sources)}}
                            .dump());
            res.removed.push_back({std::move(rules[i]), v->second});
        }
    }
    return res;
}

CategorizeResult categorize_rules(llmgate::Gateway& gw, std::vector<RawRule> rules, const RuleGenConfig& cfg,
                                  const AuditLog& audit) {
    CategorizeResult res;
    const std::size_t batch = std::max<std::size_t>(1, cfg.categorize_batch_size);
    for (std::size_t begin = 0; begin < rules.size(); begin += batch) {
        const std::size_t end = std::min(rules.size(), begin + batch);
        std::map<std::size_t, Category> verdicts;
        CompletionRequest req;
        req.template_id = "rules.categorize";
        req.variables = {{"rules", numbered(rules, begin, end, [](const RawRule& r) { return r.content; })}};
        req.temperature = cfg.temperature;
        try {
            const json doc = gw.complete_structured(req, {{"categories", FieldKind::Array}}).documents.front();
            for (const auto& item : doc["categories"]) {
                if (!item.is_object()) continue;
                auto idx = index_in(item.value("index", json()), end - begin);
                auto cat = parse_category(item.value("category", std::string{}));
                if (idx && cat) verdicts.emplace(begin + *idx, *cat);
            }
        } catch (const FixtureMissingError&) {
            throw;
        } catch (const Error& e) {
            audit.write(json{{"stage", "categorize"}, {"batch", begin / batch}, {"warning", e.what()}}.dump());
        }
        for (std::size_t i = begin; i < end; ++i) {
            Category c = Category::Logic;
            if (auto v = verdicts.find(i); v != verdicts.end()) c = v->second;
            else res.defaulted.push_back(i);
            (c == Category::Logic ? res.logic : res.convention)++;
            audit.write(json{{"stage", "categorize"}, {"rule", rules[i].content}, {"category", to_string(c)},
                             {"defaulted", verdicts.count(i) == 0}}
                            .dump());
            res.rules.emplace_back(std::move(rules[i].content), c, std::move(rules[i].sources));
        }
    }
    return res;
}

ConsolidateResult consolidate_rules(llmgate::Gateway& gw, std::vector<Rule> existing, std::vector<Rule> incoming,
                                    const RuleGenConfig& cfg, const AuditLog& audit) {
    ConsolidateResult res;
    res.rules = std::move(existing);
    const std::size_t chunk = std::max<std::size_t>(1, cfg.merge_candidates_per_prompt);

    for (auto& rule : incoming) {
        if (!rule.mergeable(cfg.merge_threshold)) {
            res.rules.push_back(std::move(rule));
            continue;
        }
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < res.rules.size(); ++i)
            if (res.rules[i].category() == rule.category() && res.rules[i].mergeable(cfg.merge_threshold))
                candidates.push_back(i);

        bool merged = false;
        for (std::size_t begin = 0; begin < candidates.size() && !merged; begin += chunk) {
            const std::size_t end = std::min(candidates.size(), begin + chunk);
            std::string listing;
            for (std::size_t c = begin; c < end; ++c)
                listing += "[" + std::to_string(c - begin + 1) + "] " +
                           text::normalize_whitespace(res.rules[candidates[c]].content()) + "\n";
            CompletionRequest req;
            req.template_id = "rules.same_topic";
            req.variables = {{"category", std::string(to_string(rule.category()))},
                             {"rule", text::normalize_whitespace(rule.content())},
                             {"candidates", listing}};
            req.temperature = cfg.temperature;
            try {
                const json doc = gw.complete_structured(req, {{"same_topic_index", FieldKind::Integer},
                                                              {"merged_content", FieldKind::String}})
                                     .documents.front();
                const auto idx = doc["same_topic_index"].get<long long>();
                if (idx == 0) continue;
                auto pos = index_in(doc["same_topic_index"], end - begin);
                const std::string content(text::trim(doc["merged_content"].get<std::string>()));
                if (!pos || content.empty()) {
                    res.warnings.push_back("unusable merge verdict for rule: " + rule.content());
                    continue;
                }
                Rule& target = res.rules[candidates[begin + *pos]];
                MergeEvent ev{target.content(), rule.content(), content, rule.category()};
                target.absorb(rule, content);
                audit.write(json{{"stage", "consolidate"}, {"target", ev.target_before}, {"absorbed", ev.absorbed},
                                 {"merged", ev.merged}, {"diversity_level", target.diversity_level()}}
                                .dump());
                res.merges.push_back(std::move(ev));
                merged = true;
            } catch (const FixtureMissingError&) {
                throw;
            } catch (const Error& e) {
                res.warnings.push_back(std::string("merge check failed, rule kept unmerged: ") + e.what());
                audit.write(json{{"stage", "consolidate"}, {"rule", rule.content()}, {"warning", e.what()}}.dump());
                break;
            }
        }
        if (!merged) res.rules.push_back(std::move(rule));
    }
    return res;
}

RuleBuilder::RuleBuilder(llmgate::Gateway& gw, RuleGenConfig cfg, AuditLog audit)
    : gw_(gw), cfg_(std::move(cfg)), audit_(audit) {}

bool RuleBuilder::add_thread(const corpus::DiscussionThread& thread) {
    ProgressRow row = progress_.empty() ? ProgressRow{} : progress_.back();
    row.thread_index = ++threads_seen_;
    bool ok = true;
    try {
        auto raw = extract_rules(gw_, thread, cfg_, audit_);
        row.extracted += raw.size();
        auto filtered = filter_rules(gw_, std::move(raw), cfg_, audit_);
        row.filtered += filtered.kept.size();
        auto categorized = categorize_rules(gw_, std::move(filtered.kept), cfg_, audit_);
        row.logic += categorized.logic;
        row.convention += categorized.convention;
        auto consolidated = consolidate_rules(gw_, std::move(rules_), std::move(categorized.rules), cfg_, audit_);
        rules_ = std::move(consolidated.rules);
    } catch (const StageError& e) {
        errors_.push_back(e.what());
        ok = false;
    }
    row.consolidated_logic = 0;
    row.consolidated_convention = 0;
    for (const auto& r : rules_) (r.category() == Category::Logic ? row.consolidated_logic : row.consolidated_convention)++;
    progress_.push_back(row);
    return ok;
}

ProgressRow RuleBuilder::totals() const { return progress_.empty() ? ProgressRow{} : progress_.back(); }

std::string RuleBuilder::progress_csv(const std::string& config_digest) const {
    std::string out = "# config-digest: " + config_digest + "\n";
    out += "thread_index,extracted,filtered,logic,convention,consolidated_logic,consolidated_convention\n";
    for (const auto& r : progress_) {
        out += std::to_string(r.thread_index) + "," + std::to_string(r.extracted) + "," + std::to_string(r.filtered) +
               "," + std::to_string(r.logic) + "," + std::to_string(r.convention) + "," +
               std::to_string(r.consolidated_logic) + "," + std::to_string(r.consolidated_convention) + "\n";
    }
    return out;
}

std::string audit_checklist(const std::vector<Rule>& rules, std::uint64_t seed, std::size_t count) {
    SeededRng rng(seed);
    const auto picks = rng.sample_indices(rules.size(), std::min(count, rules.size()));
    std::string out = "# Rule audit sample (seed " + std::to_string(seed) + ", " + std::to_string(picks.size()) +
                      " of " + std::to_string(rules.size()) + " rules)\n\n"
                      "Keep a rule only if it tells a developer how to use a specific feature to implement a "
                      "particular function.\n\n";
    for (std::size_t n = 0; n < picks.size(); ++n) {
        const Rule& r = rules[picks[n]];
        out += "## " + std::to_string(n + 1) + ". [" + std::string(to_string(r.category())) + "] diversity " +
               std::to_string(r.diversity_level()) + "\n\n" + r.content() + "\n\n";
        for (const auto& s : r.sources()) out += "- message-id: " + s.message_id + " (" + s.author + ")\n";
        out += "\n- [ ] valid\n- [ ] invalid\n\n";
    }
    return out;
}

} // namespace reviewlore::rulegen
