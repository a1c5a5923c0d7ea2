#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "reviewlore/common/error.hpp"
#include "reviewlore/corpus/thread.hpp"
#include "reviewlore/llmgate/gateway.hpp"
#include "reviewlore/rulegen/rule.hpp"

namespace reviewlore::rulegen {

struct RuleGenConfig {
    std::size_t filter_batch_size = 20;
    std::size_t categorize_batch_size = 20;
    std::size_t merge_candidates_per_prompt = 30;
    std::size_t max_message_chars = 8000;
    double merge_threshold = kDefaultMergeThreshold;
    double temperature = 0.2;
};

// A stage could not talk to the model for one thread.
class StageError : public Error {
public:
    StageError(std::string stage, std::string thread_root, const std::string& cause)
        : Error(stage + " failed for thread " + thread_root + ": " + cause), stage_(std::move(stage)),
          thread_root_(std::move(thread_root)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& thread_root() const noexcept { return thread_root_; }

private:
    std::string stage_;
    std::string thread_root_;
};

// Line-delimited JSON transcript of stage decisions. A null stream disables it.
class AuditLog {
public:
    explicit AuditLog(std::ostream* out = nullptr) : out_(out) {}
    void write(const std::string& json_line) const;

private:
    std::ostream* out_;
};

// Rules proposed for one thread. Threads without replies short-circuit to
// an empty list. Sources outside the thread are dropped; a rule left with no
// sources is dropped. Throws StageError when the model call fails.
std::vector<RawRule> extract_rules(llmgate::Gateway& gw, const corpus::DiscussionThread& thread,
                                   const RuleGenConfig& cfg = {}, const AuditLog& audit = AuditLog{});

enum class RemovalReason { Vague, Redundant, Overlapping, CommunicationConvention };
std::string_view to_string(RemovalReason r) noexcept;

struct Removal {
    RawRule rule;
    RemovalReason reason;
};

struct FilterResult {
    std::vector<RawRule> kept;
    std::vector<Removal> removed;
    std::vector<std::string> warnings;  // batches passed through unfiltered
};

// Drops non-substantive rules, batch by batch. A batch whose verdict cannot
// be obtained passes through unchanged.
FilterResult filter_rules(llmgate::Gateway& gw, std::vector<RawRule> rules, const RuleGenConfig& cfg = {},
                          const AuditLog& audit = AuditLog{});

struct CategorizeResult {
    std::vector<Rule> rules;
    std::vector<std::size_t> defaulted;  // indices placed in Logic for lack of a verdict
    std::size_t logic = 0;
    std::size_t convention = 0;
};

CategorizeResult categorize_rules(llmgate::Gateway& gw, std::vector<RawRule> rules, const RuleGenConfig& cfg = {},
                                  const AuditLog& audit = AuditLog{});

struct MergeEvent {
    std::string target_before;
    std::string absorbed;
    std::string merged;
    Category category;
};

struct ConsolidateResult {
    std::vector<Rule> rules;
    std::vector<MergeEvent> merges;
    std::vector<std::string> warnings;  // merge checks that failed; nothing was merged
};

// Folds `incoming` into `existing` one rule at a time. Only rules of the same
// category below the merge threshold are merge candidates; rules at or above
// it are kept verbatim. The model decides topic sameness and writes the
// merged text.
ConsolidateResult consolidate_rules(llmgate::Gateway& gw, std::vector<Rule> existing, std::vector<Rule> incoming,
                                    const RuleGenConfig& cfg = {}, const AuditLog& audit = AuditLog{});

struct ProgressRow {
    std::size_t thread_index = 0;
    std::size_t extracted = 0;
    std::size_t filtered = 0;
    std::size_t logic = 0;
    std::size_t convention = 0;
    std::size_t consolidated_logic = 0;
    std::size_t consolidated_convention = 0;
};

// Streams threads through all four stages into one rule set. Counts in the
// progress rows are cumulative.
class RuleBuilder {
public:
    RuleBuilder(llmgate::Gateway& gw, RuleGenConfig cfg = {}, AuditLog audit = AuditLog{});

    // Returns false (and records the error) when the thread's extraction failed.
    bool add_thread(const corpus::DiscussionThread& thread);

    const std::vector<Rule>& rules() const noexcept { return rules_; }
    const std::vector<ProgressRow>& progress() const noexcept { return progress_; }
    const std::vector<std::string>& errors() const noexcept { return errors_; }
    ProgressRow totals() const;

    std::string progress_csv(const std::string& config_digest) const;

private:
    llmgate::Gateway& gw_;
    RuleGenConfig cfg_;
    AuditLog audit_;
    std::vector<Rule> rules_;
    std::vector<ProgressRow> progress_;
    std::vector<std::string> errors_;
    std::size_t threads_seen_ = 0;
};

// Seeded sample of rules rendered as a manual review checklist.
std::string audit_checklist(const std::vector<Rule>& rules, std::uint64_t seed, std::size_t count = 50);

} // namespace reviewlore::rulegen
