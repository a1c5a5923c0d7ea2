#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "reviewlore/app/config.hpp"
#include "reviewlore/corpus/email.hpp"
#include "reviewlore/corpus/patch.hpp"
#include "reviewlore/corpus/stats.hpp"
#include "reviewlore/gcseval/harness.hpp"
#include "reviewlore/llmgate/gateway.hpp"
#include "reviewlore/rulegen/pipeline.hpp"
#include "reviewlore/rulestore/store.hpp"
#include "reviewlore/validate/pipeline.hpp"

namespace reviewlore::app {

// Replay gateway over cfg.fixture_dir, or a live one from cfg.provider_config.
std::shared_ptr<llmgate::Gateway> make_gateway(const RunConfig& cfg);

// Messages from the given mbox files, or from the corpus store when none are given.
std::vector<corpus::EmailMessage> load_messages(const RunConfig& cfg, const std::vector<std::string>& mboxes,
                                                std::ostream& log);

struct IngestResult {
    std::size_t parsed = 0;
    std::size_t added = 0;
    std::size_t diagnostics = 0;
};
IngestResult ingest(const RunConfig& cfg, const std::vector<std::string>& mboxes, std::ostream& log);

std::string stats_csv(const RunConfig& cfg, const std::vector<std::string>& mboxes,
                      const corpus::StatsOptions& options, std::ostream& log);

struct RulesBuildOptions {
    std::vector<std::string> mboxes;
    std::string selection = "all";  // "all", "first:N", or comma-separated root ids
    std::string audit_log;          // optional JSONL path
};

struct RulesBuildResult {
    rulestore::RuleSetSnapshot snapshot;
    std::vector<rulegen::ProgressRow> progress;
    std::string progress_csv;
    std::vector<std::string> errors;
};
// The commands below use make_gateway(cfg) unless a gateway is passed in.
RulesBuildResult build_rules(const RunConfig& cfg, const RulesBuildOptions& options, std::ostream& log,
                             std::shared_ptr<llmgate::Gateway> gw = nullptr);

// The patch series named by `input`: a mail or mbox file, else a message id
// looked up in the corpus store.
corpus::PatchSeries resolve_series(const RunConfig& cfg, const std::string& input, std::ostream& log);

validate::ValidationReport run_validate(const RunConfig& cfg, const corpus::PatchSeries& series, std::ostream& log,
                                        std::shared_ptr<llmgate::Gateway> gw = nullptr);

struct EvalGcsOptions {
    std::string pairs_file;
    std::vector<std::string> mboxes;
};

struct EvalGcsResult {
    std::vector<gcseval::PairResult> pairs;
    std::string results_jsonl;
    std::string aggregate_csv;
    std::vector<std::string> warnings;
};
EvalGcsResult eval_gcs(const RunConfig& cfg, const EvalGcsOptions& options, std::ostream& log,
                       std::shared_ptr<llmgate::Gateway> gw = nullptr);

// Two-column CSV (human,verifier) of yes/no or 1/0; a header row is skipped.
gcseval::KappaResult eval_kappa(const std::string& labels_text);

} // namespace reviewlore::app
