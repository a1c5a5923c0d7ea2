// Command-line front end: ingest, stats, rules, validate, eval.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "reviewlore/app/commands.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace app = reviewlore::app;
namespace text = reviewlore::text;

namespace {

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") std::cout << contents;
    else text::write_file(path, contents);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Mine review rules from mailing-list discussions and check patches against them."};
    cli.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::string fixture_dir, rule_set, source_root, store;
    bool live = false, record = false;
    cli.add_option("--config", config_file, "key=value config file");
    cli.add_option("--set", overrides, "override a config key (key=value)");
    cli.add_option("--fixtures", fixture_dir, "replay fixture directory");
    cli.add_option("--rules", rule_set, "rule set file");
    cli.add_option("--source-root", source_root, "source tree for code context");
    cli.add_option("--store", store, "corpus store directory");
    cli.add_flag("--live", live, "call the configured provider instead of replaying");
    cli.add_flag("--record", record, "record live responses as fixtures");

    auto* ingest = cli.add_subcommand("ingest", "add mbox archives to the corpus store");
    std::vector<std::string> ingest_files;
    ingest->add_option("mbox", ingest_files, "mbox files (gzip accepted)")->required();

    auto* stats = cli.add_subcommand("stats", "per-period review statistics as CSV");
    std::string period = "year", unit = "thread", stats_out, maintainers;
    std::size_t sample = 0;
    std::vector<std::string> stats_mbox;
    stats->add_option("--period", period)->check(CLI::IsMember({"year", "month", "all"}));
    stats->add_option("--sample", sample, "threads per period (0 = all)");
    stats->add_option("--unit", unit)->check(CLI::IsMember({"thread", "message"}));
    stats->add_option("--maintainers", maintainers, "comma-separated maintainer addresses");
    stats->add_option("--mbox", stats_mbox, "read mbox files instead of the store");
    stats->add_option("--out", stats_out, "CSV output (default stdout)");
    std::uint64_t stats_seed = 0;
    auto* seed_opt = stats->add_option("--seed", stats_seed);

    auto* rules = cli.add_subcommand("rules", "rule set commands");
    rules->require_subcommand(1);
    auto* build = rules->add_subcommand("build", "extract, filter, categorize and consolidate rules");
    app::RulesBuildOptions build_opts;
    std::string build_out, progress_out, checklist_out;
    std::size_t checklist_count = 50;
    build->add_option("--threads", build_opts.selection, "all, first:N, or comma-separated root ids");
    build->add_option("--mbox", build_opts.mboxes, "read mbox files instead of the store");
    build->add_option("--out", build_out, "rule set output (default: config rule_set)");
    build->add_option("--progress", progress_out, "per-thread progress CSV");
    build->add_option("--audit-log", build_opts.audit_log, "stage decisions as JSONL");
    build->add_option("--checklist", checklist_out, "sampled rules as a review checklist");
    build->add_option("--checklist-size", checklist_count);

    auto* query = rules->add_subcommand("query", "list rules by diversity level");
    std::string query_category, query_text;
    query->add_option("--category", query_category)->check(CLI::IsMember({"logic", "convention"}));
    query->add_option("--text", query_text, "case-insensitive substring");

    auto* validate = cli.add_subcommand("validate", "check a patch or series against the rule set");
    std::string validate_input, validate_mode, report_out, json_out;
    validate->add_option("input", validate_input, "mail/mbox file or message id")->required();
    validate->add_option("--mode", validate_mode)->check(CLI::IsMember({"rule_based", "rule_free"}));
    validate->add_option("--out", report_out, "rendered report (default stdout)");
    validate->add_option("--json", json_out, "structured report");

    auto* eval = cli.add_subcommand("eval", "evaluation commands");
    eval->require_subcommand(1);
    auto* gcs = eval->add_subcommand("gcs", "ground-truth coverage over buggy/fix pairs");
    app::EvalGcsOptions gcs_opts;
    std::string results_out, aggregate_out;
    int n = 0, k = 0, threshold = -1;
    gcs->add_option("--pairs", gcs_opts.pairs_file, "pairs JSONL")->required();
    gcs->add_option("--mbox", gcs_opts.mboxes, "read mbox files instead of the store");
    gcs->add_option("--N", n, "Best-of-N");
    gcs->add_option("--K", k, "verifier votes");
    gcs->add_option("--threshold", threshold, "confidence threshold")->check(CLI::Range(0, 100));
    gcs->add_option("--out", results_out, "per-pair results JSONL (default stdout)");
    gcs->add_option("--aggregate", aggregate_out, "per-label CSV");

    auto* kappa = eval->add_subcommand("kappa", "agreement between human and verifier labels");
    std::string labels;
    kappa->add_option("--labels", labels, "CSV of human,verifier labels")->required();

    CLI11_PARSE(cli, argc, argv);

    try {
        app::RunConfig cfg;
        if (!config_file.empty()) cfg.load_file(config_file);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw reviewlore::ConfigError("--set expects key=value, got " + o);
            cfg.set(o.substr(0, eq), o.substr(eq + 1));
        }
        if (!fixture_dir.empty()) cfg.fixture_dir = fixture_dir;
        if (!rule_set.empty()) cfg.rule_set = rule_set;
        if (!source_root.empty()) cfg.source_root = source_root;
        if (!store.empty()) cfg.corpus_store = store;
        if (live) cfg.live = true;
        if (record) cfg.record = true;

        if (*ingest) {
            app::ingest(cfg, ingest_files, std::cerr);
        } else if (*stats) {
            reviewlore::corpus::StatsOptions so;
            so.period = period == "year" ? reviewlore::corpus::StatsPeriod::Year
                        : period == "month" ? reviewlore::corpus::StatsPeriod::Month
                                            : reviewlore::corpus::StatsPeriod::All;
            so.unit = unit == "thread" ? reviewlore::corpus::SamplingUnit::Thread
                                       : reviewlore::corpus::SamplingUnit::Message;
            so.sample_size = sample;
            so.seed = seed_opt->count() ? stats_seed : cfg.seed;
            for (const auto& m : text::split(maintainers, ','))
                if (!text::trim(m).empty()) so.maintainers.insert(text::to_lower(text::trim(m)));
            emit(stats_out, app::stats_csv(cfg, stats_mbox, so, std::cerr));
        } else if (*build) {
            auto res = app::build_rules(cfg, build_opts, std::cerr);
            reviewlore::rulestore::save(res.snapshot, build_out.empty() ? cfg.rule_set : build_out);
            if (!progress_out.empty()) emit(progress_out, res.progress_csv);
            if (!checklist_out.empty())
                emit(checklist_out, reviewlore::rulegen::audit_checklist(res.snapshot.rules, cfg.seed, checklist_count));
        } else if (*query) {
            const auto snap = reviewlore::rulestore::load(cfg.rule_set);
            reviewlore::rulestore::RuleQuery q;
            if (!query_category.empty()) q.category = reviewlore::rulegen::parse_category(query_category);
            q.text = query_text;
            for (const auto& r : reviewlore::rulestore::query(snap, q)) {
                std::printf("%6.2f  %-10s  %s\n", r.diversity_level(),
                            std::string(reviewlore::rulegen::to_string(r.category())).c_str(),
                            text::normalize_whitespace(r.content()).c_str());
            }
        } else if (*validate) {
            if (!validate_mode.empty()) cfg.set("mode", validate_mode);
            const auto series = app::resolve_series(cfg, validate_input, std::cerr);
            const auto report = app::run_validate(cfg, series, std::cerr);
            emit(report_out, reviewlore::validate::render_report(report));
            if (!json_out.empty()) emit(json_out, reviewlore::validate::report_to_json(report).dump(2) + "\n");
        } else if (*gcs) {
            if (n > 0) cfg.n = n;
            if (k > 0) cfg.k = k;
            if (threshold >= 0) cfg.threshold = threshold;
            const auto res = app::eval_gcs(cfg, gcs_opts, std::cerr);
            emit(results_out, res.results_jsonl);
            if (!aggregate_out.empty()) emit(aggregate_out, res.aggregate_csv);
        } else if (*kappa) {
            const auto r = app::eval_kappa(text::read_file(labels));
            std::printf("kappa=%.3f ci95=[%.3f, %.3f] n=%zu p_o=%.4f p_e=%.4f\n", r.kappa, r.ci_low, r.ci_high, r.n,
                        r.observed_agreement, r.chance_agreement);
        }
    } catch (const reviewlore::FixtureMissingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
