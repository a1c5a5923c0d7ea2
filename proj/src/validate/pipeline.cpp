#include "reviewlore/validate/pipeline.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

#include "reviewlore/common/text.hpp"

namespace reviewlore::validate {

using nlohmann::json;
using nlohmann::ordered_json;
using llmgate::CompletionRequest;
using llmgate::FieldKind;
using rulegen::Rule;

namespace {

llmgate::Variables patch_variables(const corpus::Patch& patch) {
    return {{"subject", patch.subject},
            {"message_id", patch.message_id},
            {"commit_message", patch.commit_message},
            {"diff", patch.diff_text()}};
}

std::string numbered_rules(const std::vector<Rule>& rules, bool with_prefix) {
    std::string out;
    for (std::size_t i = 0; i < rules.size(); ++i)
        out += "[" + std::string(with_prefix ? "R" : "") + std::to_string(i + 1) + "] (" +
               std::string(rulegen::to_string(rules[i].category())) + ") " +
               text::normalize_whitespace(rules[i].content()) + "\n";
    return out;
}

// "R3", "r3", "3" or 3 -> 2
std::optional<std::size_t> rule_ref(const json& v, std::size_t size) {
    long long n = 0;
    if (v.is_number_integer()) {
        n = v.get<long long>();
    } else if (v.is_string()) {
        std::string s(text::trim(v.get<std::string>()));
        if (!s.empty() && (s[0] == 'R' || s[0] == 'r')) s.erase(0, 1);
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) || s.size() > 9)
            return std::nullopt;
        n = std::stoll(s);
    } else {
        return std::nullopt;
    }
    if (n < 1 || static_cast<std::size_t>(n) > size) return std::nullopt;
    return static_cast<std::size_t>(n - 1);
}

std::string string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

std::vector<Rule> diversity_order(const std::vector<Rule>& rules, std::size_t top_r) {
    std::vector<Rule> sorted = rules;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Rule& a, const Rule& b) {
        if (a.diversity_level() != b.diversity_level()) return a.diversity_level() > b.diversity_level();
        return a.content() < b.content();
    });
    if (sorted.size() > top_r) sorted.erase(sorted.begin() + static_cast<std::ptrdiff_t>(top_r), sorted.end());
    return sorted;
}

IssueSet parse_issue_set(const json& doc, const corpus::Patch& patch, const std::vector<Rule>& ranked, Mode mode) {
    IssueSet set;
    const std::string raw = patch.body;
    const std::string code_text = patch_code_text(patch);
    std::size_t n = 0;
    for (const auto& item : doc["issues"]) {
        ++n;
        const std::string label = "issue " + std::to_string(n);
        if (!item.is_object()) {
            set.rejections.push_back(label + ": not an object");
            continue;
        }
        Issue issue;
        issue.title = std::string(text::trim(string_field(item, "title")));
        issue.description = std::string(text::trim(string_field(item, "description")));
        issue.severity_hint = std::string(text::trim(string_field(item, "severity")));
        issue.patch_message_id = patch.message_id;
        if (issue.title.empty()) {
            set.rejections.push_back(label + ": no title");
            continue;
        }
        if (mode == Mode::RuleBased) {
            std::vector<std::string> unknown;
            std::set<std::size_t> cited;
            if (item.contains("rules") && item["rules"].is_array()) {
                for (const auto& ref : item["rules"]) {
                    if (auto idx = rule_ref(ref, ranked.size())) {
                        if (cited.insert(*idx).second) issue.rules_used.push_back(ranked[*idx]);
                    } else {
                        unknown.push_back(ref.is_string() ? ref.get<std::string>() : ref.dump());
                    }
                }
            }
            if (!unknown.empty()) {
                set.rejections.push_back(label + " \"" + issue.title + "\": cites unknown rule " +
                                         text::join(unknown, ", "));
                continue;
            }
            if (issue.rules_used.empty()) {
                set.rejections.push_back(label + " \"" + issue.title + "\": cites no rule");
                continue;
            }
        }
        std::string code = string_field(item, "code");
        while (!code.empty() && (code.back() == '\n' || code.back() == '\r')) code.pop_back();
        if (!code.empty()) {
            if (raw.find(code) != std::string::npos || code_text.find(code) != std::string::npos) {
                issue.code_excerpt = std::move(code);
            } else {
                set.warnings.push_back(label + " \"" + issue.title + "\": code excerpt not found in the patch, dropped");
            }
        }
        set.issues.push_back(std::move(issue));
    }
    return set;
}

std::string render_issue_list(const std::vector<ReportIssue>& items, const corpus::PatchSeries& series) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        out += "[" + std::to_string(i + 1) + "] patch " + std::to_string(it.patch_index + 1) + " (" +
               series.patches[it.patch_index].message_id + "): " + it.issue.title + "\n    " +
               text::normalize_whitespace(it.issue.description) + "\n";
    }
    return out;
}

ordered_json rule_json(const Rule& r) {
    ordered_json sources = ordered_json::array();
    for (const auto& s : r.sources()) sources.push_back({{"message_id", s.message_id}, {"author", s.author}});
    ordered_json j;
    j["content"] = r.content();
    j["category"] = std::string(rulegen::to_string(r.category()));
    j["sources"] = std::move(sources);
    return j;
}

ordered_json issue_json(const ReportIssue& r) {
    ordered_json rules = ordered_json::array();
    for (const auto& rule : r.issue.rules_used) rules.push_back(rule_json(rule));
    ordered_json j;
    j["patch_index"] = r.patch_index;
    j["ordinal"] = r.ordinal;
    j["title"] = r.issue.title;
    j["description"] = r.issue.description;
    j["code_excerpt"] = r.issue.code_excerpt;
    j["patch_message_id"] = r.issue.patch_message_id;
    j["severity_hint"] = r.issue.severity_hint;
    j["rules_used"] = std::move(rules);
    return j;
}

} // namespace

std::string_view to_string(Mode m) noexcept { return m == Mode::RuleBased ? "rule_based" : "rule_free"; }

std::optional<Mode> parse_mode(std::string_view s) noexcept {
    if (s == "rule_based") return Mode::RuleBased;
    if (s == "rule_free") return Mode::RuleFree;
    return std::nullopt;
}

std::string patch_code_text(const corpus::Patch& patch) {
    std::string out;
    for (const auto& h : patch.diff)
        for (const auto& l : h.lines) out += l.text + "\n";
    return out;
}

ChangeSummary summarize_changes(llmgate::Gateway& gw, const corpus::Patch& patch, const codectx::ContextResult& ctx,
                                const ValidateConfig& cfg) {
    if (patch.diff.empty()) throw PreconditionError("patch " + patch.message_id + " has no hunks");
    CompletionRequest req;
    req.template_id = "validate.summarize";
    req.variables = patch_variables(patch);
    req.variables["context"] = codectx::render_context(ctx);
    req.temperature = cfg.temperature;
    json doc;
    try {
        doc = gw.complete_structured(req, {{"summary", FieldKind::String}, {"symbols", FieldKind::Array}})
                  .documents.front();
    } catch (const FixtureMissingError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError("summarizing " + patch.message_id + " failed: " + e.what());
    }
    ChangeSummary s;
    s.patch_message_id = patch.message_id;
    s.summary = std::string(text::trim(doc["summary"].get<std::string>()));
    s.touched_files = patch.touched_files();
    // Keep only symbols that occur in the patch or the retrieved context.
    const std::string haystack = patch.diff_text() + "\n" + codectx::render_context(ctx);
    std::set<std::string> seen;
    for (const auto& sym : doc["symbols"]) {
        if (!sym.is_string()) continue;
        std::string name(text::trim(sym.get<std::string>()));
        if (name.empty() || haystack.find(name) == std::string::npos) continue;
        if (seen.insert(name).second) s.touched_symbols.push_back(std::move(name));
    }
    return s;
}

RankResult rank_rules(llmgate::Gateway& gw, const ChangeSummary& summary, const std::vector<Rule>& rules,
                      const codectx::ContextResult& ctx, const ValidateConfig& cfg) {
    if (rules.empty()) throw PreconditionError("cannot rank an empty rule set");
    RankResult res;
    CompletionRequest req;
    req.template_id = "validate.rank";
    std::string summary_text = summary.summary;
    if (!summary.touched_symbols.empty()) summary_text += "\nSymbols: " + text::join(summary.touched_symbols, ", ");
    if (!summary.touched_files.empty()) summary_text += "\nFiles: " + text::join(summary.touched_files, ", ");
    req.variables = {{"summary", summary_text},
                     {"context", cfg.rank_with_context ? codectx::render_context(ctx) : std::string("(omitted)")},
                     {"rules", numbered_rules(rules, false)}};
    req.temperature = cfg.temperature;
    try {
        const json doc = gw.complete_structured(req, {{"ranking", FieldKind::Array}}).documents.front();
        std::set<std::size_t> used;
        for (const auto& v : doc["ranking"]) {
            if (res.rules.size() >= cfg.top_r) break;
            auto idx = rule_ref(v, rules.size());
            if (idx && used.insert(*idx).second) res.rules.push_back(rules[*idx]);
        }
        if (!res.rules.empty()) return res;
        res.warning = "ranking named no known rule";
    } catch (const FixtureMissingError&) {
        throw;
    } catch (const Error& e) {
        res.warning = e.what();
    }
    res.rules = diversity_order(rules, cfg.top_r);
    res.fallback = true;
    return res;
}

std::vector<IssueSet> generate_issue_sets(llmgate::Gateway& gw, const corpus::Patch& patch,
                                          const std::vector<Rule>& ranked, const codectx::ContextResult& ctx,
                                          const ValidateConfig& cfg, int candidates) {
    if (candidates < 1) throw PreconditionError("candidate count must be at least 1");
    std::vector<IssueSet> sets(static_cast<std::size_t>(candidates));
    if (cfg.mode == Mode::RuleBased && ranked.empty()) return sets;

    CompletionRequest req;
    req.variables = patch_variables(patch);
    if (cfg.mode == Mode::RuleBased) {
        req.template_id = "validate.issues";
        req.variables["context"] = codectx::render_context(ctx);
        req.variables["rules"] = numbered_rules(ranked, true);
    } else {
        req.template_id = "validate.issues_rule_free";
    }
    req.temperature = cfg.generation_temperature;
    req.candidate_count = candidates;
    try {
        const auto resp = gw.complete_structured(req, {{"issues", FieldKind::Array}});
        for (std::size_t i = 0; i < sets.size() && i < resp.documents.size(); ++i)
            sets[i] = parse_issue_set(resp.documents[i], patch, ranked, cfg.mode);
    } catch (const FixtureMissingError&) {
        throw;
    } catch (const Error& e) {
        for (auto& s : sets) s.warnings.push_back("issue generation for " + patch.message_id + " failed: " + e.what());
    }
    return sets;
}

IssueSet generate_issues(llmgate::Gateway& gw, const corpus::Patch& patch, const std::vector<Rule>& ranked,
                         const codectx::ContextResult& ctx, const ValidateConfig& cfg) {
    return std::move(generate_issue_sets(gw, patch, ranked, ctx, cfg, 1).front());
}

ValidationReport batch_filter(llmgate::Gateway& gw, const corpus::PatchSeries& series,
                              const std::vector<std::vector<Issue>>& per_patch, const ValidateConfig& cfg) {
    if (per_patch.size() != series.patches.size())
        throw PreconditionError("issue lists do not line up with the series patches");
    ValidationReport report;
    report.series_id = series.id();
    report.mode = cfg.mode;
    std::vector<ReportIssue> all;
    for (std::size_t p = 0; p < per_patch.size(); ++p)
        for (std::size_t k = 0; k < per_patch[p].size(); ++k) all.push_back({p, k, per_patch[p][k]});
    if (all.empty()) return report;

    std::string listing;
    for (std::size_t p = 0; p < series.patches.size(); ++p) {
        const auto& patch = series.patches[p];
        listing += "--- patch " + std::to_string(p + 1) + "/" + std::to_string(series.patches.size()) + ": " +
                   patch.subject + " (" + patch.message_id + ")\n" + patch.diff_text() + "\n";
    }
    CompletionRequest req;
    req.template_id = "validate.batch_filter";
    req.variables = {{"series", listing}, {"issues", render_issue_list(all, series)}};
    req.temperature = cfg.temperature;

    std::map<std::size_t, std::string> removed;
    try {
        const json doc = gw.complete_structured(req, {{"removed", FieldKind::Array}}).documents.front();
        for (const auto& item : doc["removed"]) {
            if (!item.is_object() || !item.contains("index") || !item["index"].is_number_integer()) continue;
            const auto idx = item["index"].get<long long>();
            if (idx < 1 || static_cast<std::size_t>(idx) > all.size()) continue;
            std::string reason(text::trim(string_field(item, "reason")));
            removed.emplace(static_cast<std::size_t>(idx - 1), reason.empty() ? "unspecified" : reason);
        }
    } catch (const FixtureMissingError&) {
        throw;
    } catch (const Error& e) {
        report.unfiltered = true;
        report.warnings.push_back(std::string("batch filter unavailable, all issues retained: ") + e.what());
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (auto it = removed.find(i); it != removed.end()) report.filtered.push_back({std::move(all[i]), it->second});
        else report.issues.push_back(std::move(all[i]));
    }
    return report;
}

std::string render_report(const ValidationReport& report) {
    std::string out = "Validation report for " + report.series_id + "\n";
    out += "Mode: " + std::string(to_string(report.mode)) + "\n";
    if (!report.rule_set_digest.empty()) out += "Rule set: " + report.rule_set_digest + "\n";
    if (!report.model.empty()) out += "Model: " + report.model + "\n";
    if (report.unfiltered) out += "Batch filter: unavailable, all issues retained\n";
    out += "\n";
    if (report.issues.empty()) out += "No issues found.\n";
    for (std::size_t i = 0; i < report.issues.size(); ++i) {
        const Issue& is = report.issues[i].issue;
        out += "== Issue " + std::to_string(i + 1) + " ==\n\n";
        out += "Title: " + is.title + "\n\n";
        if (!is.code_excerpt.empty()) out += "```\n" + is.code_excerpt + "\n```\n";
        out += "> message-id: <" + is.patch_message_id + ">\n\n";
        out += "Issue Content\n\n" + is.description + "\n\n";
        out += "Rules Used\n\n";
        for (const auto& r : is.rules_used) {
            out += "- " + text::normalize_whitespace(r.content()) + "\n";
            for (const auto& s : r.sources())
                out += "  > - message-id: <" + s.message_id + ">\n  > - Author: " + s.author + "\n";
        }
        if (!is.rules_used.empty()) out += "\n";
    }
    if (!report.filtered.empty()) {
        out += "Filtered out\n\n";
        for (const auto& f : report.filtered)
            out += "- " + f.item.issue.title + " (patch " + std::to_string(f.item.patch_index + 1) + "): " + f.reason +
                   "\n";
    }
    return out;
}

ordered_json report_to_json(const ValidationReport& report) {
    ordered_json j;
    j["series_id"] = report.series_id;
    j["mode"] = std::string(to_string(report.mode));
    j["rule_set_digest"] = report.rule_set_digest;
    j["model"] = report.model;
    j["config_digest"] = report.config_digest;
    j["unfiltered"] = report.unfiltered;
    j["issues"] = ordered_json::array();
    for (const auto& r : report.issues) j["issues"].push_back(issue_json(r));
    j["filtered"] = ordered_json::array();
    for (const auto& f : report.filtered) {
        auto fj = issue_json(f.item);
        fj["reason"] = f.reason;
        j["filtered"].push_back(std::move(fj));
    }
    j["summaries"] = ordered_json::array();
    for (const auto& s : report.summaries) {
        ordered_json sj;
        sj["patch_message_id"] = s.patch_message_id;
        sj["summary"] = s.summary;
        sj["touched_symbols"] = s.touched_symbols;
        sj["touched_files"] = s.touched_files;
        j["summaries"].push_back(std::move(sj));
    }
    j["warnings"] = report.warnings;
    return j;
}

ValidationReport validate_series(llmgate::Gateway& gw, const corpus::PatchSeries& series, const SeriesInputs& in,
                                 const ValidateConfig& cfg) {
    static const std::vector<Rule> kNoRules;
    const std::vector<Rule>& rules = in.rules ? *in.rules : kNoRules;

    struct PatchResult {
        std::optional<ChangeSummary> summary;
        std::vector<Issue> issues;
        std::vector<std::string> warnings;
    };
    auto run_patch = [&](const corpus::Patch& patch) {
        PatchResult pr;
        if (cfg.mode == Mode::RuleBased && rules.empty()) {
            pr.warnings.push_back(patch.message_id + ": rule set is empty, nothing to check against");
            return pr;
        }
        codectx::ContextResult ctx;
        if (in.index) ctx = codectx::fetch_context(codectx::extract_symbols(patch), *in.index, cfg.context_budget);
        try {
            pr.summary = summarize_changes(gw, patch, ctx, cfg);
        } catch (const ValidationError& e) {
            pr.warnings.push_back(e.what());
            return pr;
        }
        std::vector<Rule> ranked;
        if (cfg.mode == Mode::RuleBased) {
            auto rank = rank_rules(gw, *pr.summary, rules, ctx, cfg);
            if (rank.fallback)
                pr.warnings.push_back(patch.message_id + ": rule ranking fell back to diversity order (" +
                                      rank.warning + ")");
            ranked = std::move(rank.rules);
        }
        auto set = generate_issues(gw, patch, ranked, ctx, cfg);
        for (const auto& r : set.rejections) pr.warnings.push_back(patch.message_id + ": rejected " + r);
        for (const auto& w : set.warnings) pr.warnings.push_back(patch.message_id + ": " + w);
        pr.issues = std::move(set.issues);
        return pr;
    };

    std::vector<std::future<PatchResult>> futures;
    for (const auto& patch : series.patches) futures.push_back(std::async(std::launch::async, run_patch, std::cref(patch)));
    std::vector<PatchResult> results;
    for (auto& f : futures) results.push_back(f.get());

    std::vector<std::vector<Issue>> per_patch;
    for (auto& r : results) per_patch.push_back(std::move(r.issues));
    ValidationReport report = batch_filter(gw, series, per_patch, cfg);
    report.rule_set_digest = in.rule_set_digest;
    report.config_digest = in.config_digest;
    report.model = gw.provider_name();
    std::vector<std::string> warnings;
    for (auto& r : results) {
        if (r.summary) report.summaries.push_back(std::move(*r.summary));
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
    report.warnings = std::move(warnings);
    return report;
}

} // namespace reviewlore::validate
