#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "reviewlore/corpus/patch.hpp"
#include "reviewlore/gcseval/score.hpp"
#include "reviewlore/llmgate/gateway.hpp"
#include "reviewlore/validate/pipeline.hpp"

namespace reviewlore::gcseval {

// Criteria keyed by fix-patch digest so every judgment of a pair shares them.
class CriteriaCache {
public:
    std::optional<CriteriaSet> get(const std::string& key) const;
    void put(const std::string& key, const CriteriaSet& set);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, CriteriaSet> sets_;
};

std::string fix_digest(const corpus::Patch& fix);

// Throws PreconditionError on an empty commit message and lets gateway
// failures propagate: criteria are the measuring instrument.
CriteriaSet generate_criteria(llmgate::Gateway& gw, const corpus::Patch& fix, CriteriaCache* cache = nullptr,
                              double temperature = 0.2);

// K verifier passes over one issue set. An empty set needs no model call
// and yields K empty rationales. Malformed verdicts are StructuralErrors.
std::vector<Rationale> verify_issues(llmgate::Gateway& gw, const CriteriaSet& criteria,
                                     const std::vector<validate::Issue>& issues, int k, double temperature = 0.2);

// Parses one verifier document.
Rationale parse_rationale(const nlohmann::json& doc, std::size_t issue_count);

// The fix's own commit message, wrapped as a single issue.
validate::Issue ground_truth_issue(const corpus::Patch& fix);

// N candidate issue sets for a patch.
using IssueSource = std::function<std::vector<std::vector<validate::Issue>>(const corpus::Patch&, int n)>;

struct HarnessConfig {
    EvalConfig eval;
    double verifier_temperature = 0.2;
    bool ground_truth_from_system = false;  // judge system(fix) instead of the fix's commit message
};

struct PairResult {
    std::string buggy_message_id;
    std::string fix_message_id;
    std::string label;
    ScoreBundle system;
    ScoreBundle ground_truth;
    std::optional<double> final_score;
    bool degenerate_ground_truth = false;  // ground truth scored below 1
    std::vector<std::size_t> issue_counts;  // per candidate set
};

PairResult evaluate_pair(llmgate::Gateway& gw, const corpus::PatchPair& pair, const IssueSource& system,
                         const HarnessConfig& cfg, CriteriaCache* cache = nullptr);

nlohmann::ordered_json to_json(const PairResult& r);
PairResult pair_result_from_json(const nlohmann::json& j);

// Per-label means of gcs, h_gcs and final score.
std::string aggregate_csv(const std::vector<PairResult>& results, const std::string& config_digest);

struct PairSpec {
    std::string buggy_message_id;
    std::string fix_message_id;
    std::string label;
};

// Line-delimited {buggy_message_id, fix_message_id, label}.
std::vector<PairSpec> parse_pairs(const std::string& text);

} // namespace reviewlore::gcseval
