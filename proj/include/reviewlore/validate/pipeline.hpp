#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reviewlore/codectx/index.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/corpus/patch.hpp"
#include "reviewlore/llmgate/gateway.hpp"
#include "reviewlore/rulegen/rule.hpp"

namespace reviewlore::validate {

enum class Mode { RuleBased, RuleFree };
std::string_view to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view s) noexcept;

struct ValidateConfig {
    Mode mode = Mode::RuleBased;
    std::size_t top_r = 25;
    std::size_t context_budget = codectx::kDefaultContextBudget;
    bool rank_with_context = true;
    double temperature = 0.2;
    double generation_temperature = 0.7;
};

// A stage failed in a way that invalidates the patch's result.
class ValidationError : public Error {
public:
    using Error::Error;
};

struct ChangeSummary {
    std::string patch_message_id;
    std::string summary;
    std::vector<std::string> touched_symbols;
    std::vector<std::string> touched_files;
};

struct Issue {
    std::string title;
    std::string description;
    std::string code_excerpt;  // empty when the model's excerpt was not found in the patch
    std::string patch_message_id;
    std::vector<rulegen::Rule> rules_used;
    std::string severity_hint;
};

ChangeSummary summarize_changes(llmgate::Gateway& gw, const corpus::Patch& patch, const codectx::ContextResult& ctx,
                                const ValidateConfig& cfg = {});

struct RankResult {
    std::vector<rulegen::Rule> rules;
    bool fallback = false;  // model ranking unusable; ordered by diversity level
    std::string warning;
};

// Throws PreconditionError on an empty rule set.
RankResult rank_rules(llmgate::Gateway& gw, const ChangeSummary& summary, const std::vector<rulegen::Rule>& rules,
                      const codectx::ContextResult& ctx, const ValidateConfig& cfg = {});

struct IssueSet {
    std::vector<Issue> issues;
    std::vector<std::string> rejections;  // issues dropped by the citation gate
    std::vector<std::string> warnings;
};

// `candidates` independent issue sets for one patch. Issues citing a rule
// outside `ranked` are dropped; in rule-based mode an empty `ranked` list
// yields empty sets without calling the model.
std::vector<IssueSet> generate_issue_sets(llmgate::Gateway& gw, const corpus::Patch& patch,
                                          const std::vector<rulegen::Rule>& ranked, const codectx::ContextResult& ctx,
                                          const ValidateConfig& cfg, int candidates);

IssueSet generate_issues(llmgate::Gateway& gw, const corpus::Patch& patch, const std::vector<rulegen::Rule>& ranked,
                         const codectx::ContextResult& ctx, const ValidateConfig& cfg = {});

struct ReportIssue {
    std::size_t patch_index = 0;
    std::size_t ordinal = 0;  // position among the patch's generated issues
    Issue issue;
};

struct FilteredIssue {
    ReportIssue item;
    std::string reason;
};

struct ValidationReport {
    std::string series_id;
    Mode mode = Mode::RuleBased;
    std::vector<ReportIssue> issues;
    std::vector<FilteredIssue> filtered;
    bool unfiltered = false;  // batch filter unavailable; everything retained
    std::string rule_set_digest;
    std::string model;
    std::string config_digest;
    std::vector<ChangeSummary> summaries;
    std::vector<std::string> warnings;
};

// Drops issues a later patch resolves or another issue duplicates. Fails open.
ValidationReport batch_filter(llmgate::Gateway& gw, const corpus::PatchSeries& series,
                              const std::vector<std::vector<Issue>>& per_patch, const ValidateConfig& cfg = {});

std::string render_report(const ValidationReport& report);
nlohmann::ordered_json report_to_json(const ValidationReport& report);

struct SeriesInputs {
    const std::vector<rulegen::Rule>* rules = nullptr;  // may be empty in rule-free mode
    const codectx::SymbolIndex* index = nullptr;         // optional
    std::string rule_set_digest;
    std::string config_digest;
};

// Runs all stages over a series; patches are processed concurrently.
ValidationReport validate_series(llmgate::Gateway& gw, const corpus::PatchSeries& series, const SeriesInputs& in,
                                 const ValidateConfig& cfg = {});

// Joined hunk lines without their +/-/space markers.
std::string patch_code_text(const corpus::Patch& patch);

} // namespace reviewlore::validate
