#include "reviewlore/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include "reviewlore/codectx/index.hpp"
#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/gzip.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/corpus/store.hpp"
#include "reviewlore/corpus/thread.hpp"
#include "reviewlore/llmgate/http_provider.hpp"

namespace reviewlore::app {

namespace fs = std::filesystem;

namespace {

validate::ValidateConfig validate_config(const RunConfig& cfg) {
    validate::ValidateConfig v;
    v.mode = *validate::parse_mode(cfg.mode);
    v.top_r = cfg.top_r;
    v.context_budget = cfg.context_budget;
    v.rank_with_context = cfg.rank_with_context;
    v.temperature = cfg.temperature;
    v.generation_temperature = cfg.generation_temperature;
    return v;
}

std::optional<codectx::SymbolIndex> load_index(const RunConfig& cfg, std::ostream& log) {
    if (cfg.source_root.empty()) return std::nullopt;
    codectx::SymbolIndex idx = cfg.index_cache.empty()
                                   ? codectx::build_index(cfg.source_root)
                                   : codectx::load_or_build_index(cfg.source_root, cfg.index_cache);
    log << "symbol index: " << idx.symbols.size() << " symbols, " << idx.files_scanned << " files";
    if (idx.files_skipped) log << ", " << idx.files_skipped << " unreadable";
    log << "\n";
    return idx;
}

rulestore::RuleSetSnapshot load_rules(const RunConfig& cfg, std::ostream& log) {
    if (cfg.rule_set.empty() || !fs::exists(cfg.rule_set)) {
        log << "warning: rule set " << (cfg.rule_set.empty() ? "(none)" : cfg.rule_set) << " not found, using an empty set\n";
        return {};
    }
    return rulestore::load(cfg.rule_set);
}

corpus::Patch require_patch(const corpus::EmailMessage& m) {
    auto el = corpus::parse_patch(m);
    if (!el || !std::holds_alternative<corpus::Patch>(*el))
        throw StructuralError("message " + m.message_id + " carries no patch");
    return std::get<corpus::Patch>(std::move(*el));
}

} // namespace

std::shared_ptr<llmgate::Gateway> make_gateway(const RunConfig& cfg) {
    auto templates = std::make_shared<llmgate::TemplateRegistry>(llmgate::TemplateRegistry::load_dir(
        cfg.template_dir.empty() ? llmgate::default_template_dir() : fs::path(cfg.template_dir)));
    llmgate::GatewayOptions opts;
    opts.fixture_dir = cfg.fixture_dir;
    opts.max_retries = cfg.max_retries;
    opts.max_in_flight = cfg.max_in_flight;
    opts.repair_attempts = cfg.repair_attempts;
    std::shared_ptr<llmgate::Provider> provider;
    if (cfg.live) {
        if (cfg.provider_config.empty()) throw ConfigError("live mode needs provider_config");
        opts.mode = llmgate::GatewayMode::Live;
        opts.record = cfg.record;
        auto pc = llmgate::load_provider_config(cfg.provider_config);
        opts.max_in_flight = std::min(opts.max_in_flight, pc.concurrency);
        // Retry policy belongs to the provider; its file wins over the run config.
        opts.max_retries = pc.max_retries;
        opts.backoff_initial = std::chrono::milliseconds(pc.backoff_initial_ms);
        opts.backoff_cap = std::chrono::milliseconds(pc.backoff_cap_ms);
        provider = std::make_shared<llmgate::HttpProvider>(std::move(pc));
    }
    return std::make_shared<llmgate::Gateway>(std::move(templates), opts, std::move(provider));
}

std::vector<corpus::EmailMessage> load_messages(const RunConfig& cfg, const std::vector<std::string>& mboxes,
                                                std::ostream& log) {
    if (mboxes.empty()) {
        if (!fs::is_directory(cfg.corpus_store)) throw ConfigError("corpus store not found: " + cfg.corpus_store);
        return corpus::CorpusStore(cfg.corpus_store).load_all();
    }
    std::vector<corpus::EmailMessage> all;
    std::set<std::string> seen;
    for (const auto& path : mboxes) {
        auto parsed = corpus::parse_mbox(text::read_file(path));
        for (const auto& d : parsed.diagnostics)
            log << path << ": offset " << d.offset << ": " << d.text << "\n";
        for (auto& m : parsed.messages)
            if (seen.insert(m.message_id).second) all.push_back(std::move(m));
    }
    return all;
}

IngestResult ingest(const RunConfig& cfg, const std::vector<std::string>& mboxes, std::ostream& log) {
    if (mboxes.empty()) throw ConfigError("ingest needs at least one mbox file");
    corpus::CorpusStore store(cfg.corpus_store);
    IngestResult res;
    for (const auto& path : mboxes) {
        auto parsed = corpus::parse_mbox(text::read_file(path));
        for (const auto& d : parsed.diagnostics)
            log << path << ": offset " << d.offset << ": " << d.text << "\n";
        res.parsed += parsed.messages.size();
        res.diagnostics += parsed.diagnostics.size();
        res.added += store.add(parsed.messages);
    }
    log << "parsed " << res.parsed << " messages, added " << res.added << ", store holds " << store.size() << "\n";
    return res;
}

std::string stats_csv(const RunConfig& cfg, const std::vector<std::string>& mboxes,
                      const corpus::StatsOptions& options, std::ostream& log) {
    auto threading = corpus::build_threads(load_messages(cfg, mboxes, log));
    const auto report = corpus::corpus_stats(threading.threads, options);
    for (const auto& p : report.periods)
        if (p.sample_clamped)
            log << "warning: period " << p.period << " has only " << p.total_threads << " threads; sample clamped\n";
    std::string period = options.period == corpus::StatsPeriod::Year    ? "year"
                         : options.period == corpus::StatsPeriod::Month ? "month"
                                                                        : "all";
    std::string maint;
    for (const auto& m : options.maintainers) maint += m + ",";
    const std::string digest =
        sha256_hex("period=" + period + "\nsample=" + std::to_string(options.sample_size) +
                   "\nseed=" + std::to_string(options.seed) +
                   "\nunit=" + (options.unit == corpus::SamplingUnit::Thread ? "thread" : "message") +
                   "\nmaintainers=" + maint + "\n")
            .substr(0, 16);
    return report.to_csv(digest);
}

RulesBuildResult build_rules(const RunConfig& cfg, const RulesBuildOptions& options, std::ostream& log,
                             std::shared_ptr<llmgate::Gateway> gw) {
    auto messages = load_messages(cfg, options.mboxes, log);
    std::int64_t latest = 0;
    for (const auto& m : messages) latest = std::max(latest, m.date);
    auto threading = corpus::build_threads(std::move(messages));

    std::vector<const corpus::DiscussionThread*> selected;
    if (options.selection == "all") {
        for (const auto& t : threading.threads) selected.push_back(&t);
    } else if (options.selection.rfind("first:", 0) == 0) {
        std::size_t n = 0;
        try {
            n = std::stoul(options.selection.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("bad thread selection " + options.selection);
        }
        for (std::size_t i = 0; i < threading.threads.size() && i < n; ++i) selected.push_back(&threading.threads[i]);
    } else {
        for (const auto& id : text::split(options.selection, ',')) {
            const std::string want(text::trim(id));
            auto it = std::find_if(threading.threads.begin(), threading.threads.end(),
                                   [&](const corpus::DiscussionThread& t) { return t.root_id == want; });
            if (it == threading.threads.end()) throw ConfigError("no thread rooted at " + want);
            selected.push_back(&*it);
        }
    }

    std::ofstream audit_file;
    if (!options.audit_log.empty()) audit_file.open(options.audit_log, std::ios::binary);
    rulegen::AuditLog audit(audit_file.is_open() ? &audit_file : nullptr);

    if (!gw) gw = make_gateway(cfg);
    rulegen::RuleGenConfig rg;
    rg.filter_batch_size = cfg.filter_batch_size;
    rg.categorize_batch_size = cfg.filter_batch_size;
    rg.merge_threshold = cfg.merge_threshold;
    rg.merge_candidates_per_prompt = cfg.merge_candidates_per_prompt;
    rg.temperature = cfg.temperature;
    rulegen::RuleBuilder builder(*gw, rg, audit);
    for (const auto* t : selected) builder.add_thread(*t);

    RulesBuildResult res;
    res.snapshot.created_at = static_cast<std::time_t>(latest);
    res.snapshot.generation_config_digest = cfg.digest();
    res.snapshot.rules = builder.rules();
    res.progress = builder.progress();
    res.progress_csv = builder.progress_csv(cfg.digest());
    res.errors = builder.errors();
    for (const auto& e : res.errors) log << "warning: " << e << "\n";
    const auto t = builder.totals();
    log << selected.size() << " threads: extracted " << t.extracted << ", kept " << t.filtered << ", logic "
        << t.logic << ", convention " << t.convention << ", consolidated " << t.consolidated_logic << " logic / "
        << t.consolidated_convention << " convention\n";
    return res;
}

corpus::PatchSeries resolve_series(const RunConfig& cfg, const std::string& input, std::ostream& log) {
    std::vector<corpus::EmailMessage> messages;
    if (fs::is_regular_file(input)) {
        const std::string raw = text::read_file(input);
        if (raw.rfind("From ", 0) == 0 || looks_gzipped(raw)) {
            messages = load_messages(cfg, {input}, log);
        } else {
            std::vector<corpus::MboxDiagnostic> diags;
            messages.push_back(corpus::parse_message(raw, diags));
            for (const auto& d : diags) log << input << ": " << d.text << "\n";
        }
    } else {
        if (!fs::is_directory(cfg.corpus_store))
            throw ConfigError(input + " is neither a file nor resolvable without a corpus store");
        corpus::CorpusStore store(cfg.corpus_store);
        auto msg = store.find(input);
        if (!msg) throw ConfigError("message " + input + " is not in the corpus store");
        // Gather the rest of the series from the same thread.
        auto threading = corpus::build_threads(store.load_all());
        for (const auto& t : threading.threads) {
            if (!t.find(input)) continue;
            messages = t.members;
            break;
        }
        if (messages.empty()) messages.push_back(*msg);
    }
    auto series = corpus::assemble_series(messages);
    if (series.patches.empty()) throw StructuralError("no patch found in " + input);
    return series;
}

validate::ValidationReport run_validate(const RunConfig& cfg, const corpus::PatchSeries& series, std::ostream& log,
                                        std::shared_ptr<llmgate::Gateway> gw) {
    const auto vcfg = validate_config(cfg);
    rulestore::RuleSetSnapshot snapshot;
    if (vcfg.mode == validate::Mode::RuleBased) snapshot = load_rules(cfg, log);
    const auto index = load_index(cfg, log);
    if (!gw) gw = make_gateway(cfg);
    validate::SeriesInputs in;
    in.rules = &snapshot.rules;
    in.index = index ? &*index : nullptr;
    in.rule_set_digest = vcfg.mode == validate::Mode::RuleBased ? rulestore::snapshot_digest(snapshot).substr(0, 16) : "";
    in.config_digest = cfg.digest();
    auto report = validate::validate_series(*gw, series, in, vcfg);
    for (const auto& w : report.warnings) log << "warning: " << w << "\n";
    return report;
}

EvalGcsResult eval_gcs(const RunConfig& cfg, const EvalGcsOptions& options, std::ostream& log,
                       std::shared_ptr<llmgate::Gateway> gw) {
    EvalGcsResult res;
    const auto specs = gcseval::parse_pairs(text::read_file(options.pairs_file));
    auto messages = load_messages(cfg, options.mboxes, log);
    std::map<std::string, const corpus::EmailMessage*> by_id;
    for (const auto& m : messages) by_id.emplace(m.message_id, &m);
    auto lookup = [&](const std::string& id) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw StructuralError("pair message " + id + " not found");
        return require_patch(*it->second);
    };

    const auto vcfg = validate_config(cfg);
    rulestore::RuleSetSnapshot snapshot;
    if (vcfg.mode == validate::Mode::RuleBased) snapshot = load_rules(cfg, log);
    const auto index = load_index(cfg, log);
    if (!gw) gw = make_gateway(cfg);

    gcseval::HarnessConfig hc;
    hc.eval.n = cfg.n;
    hc.eval.k = cfg.k;
    hc.eval.confidence_threshold = cfg.effective_threshold();
    hc.verifier_temperature = cfg.temperature;
    hc.ground_truth_from_system = cfg.ground_truth_from_system;
    if (cfg.verifier_weak)
        res.warnings.push_back("verifier is flagged weaker than the generator; confidence threshold " +
                               std::to_string(hc.eval.confidence_threshold) + " applied");

    gcseval::IssueSource system = [&](const corpus::Patch& patch, int n) {
        codectx::ContextResult ctx;
        if (index) ctx = codectx::fetch_context(codectx::extract_symbols(patch), *index, vcfg.context_budget);
        std::vector<rulegen::Rule> ranked;
        if (vcfg.mode == validate::Mode::RuleBased && !snapshot.rules.empty()) {
            const auto summary = validate::summarize_changes(*gw, patch, ctx, vcfg);
            auto rank = validate::rank_rules(*gw, summary, snapshot.rules, ctx, vcfg);
            if (rank.fallback) res.warnings.push_back(patch.message_id + ": rule ranking fell back to diversity order");
            ranked = std::move(rank.rules);
        }
        auto sets = validate::generate_issue_sets(*gw, patch, ranked, ctx, vcfg, n);
        std::vector<std::vector<validate::Issue>> out;
        for (auto& s : sets) {
            for (const auto& w : s.warnings) res.warnings.push_back(patch.message_id + ": " + w);
            out.push_back(std::move(s.issues));
        }
        return out;
    };

    gcseval::CriteriaCache cache;
    for (const auto& spec : specs) {
        corpus::PatchPair pair{lookup(spec.buggy_message_id), lookup(spec.fix_message_id), spec.label};
        auto r = gcseval::evaluate_pair(*gw, pair, system, hc, &cache);
        if (r.degenerate_ground_truth)
            res.warnings.push_back("pair " + spec.fix_message_id + ": ground truth scored " +
                                   std::to_string(r.ground_truth.gcs) + " against its own criteria");
        res.results_jsonl += gcseval::to_json(r).dump() + "\n";
        res.pairs.push_back(std::move(r));
    }
    res.aggregate_csv = gcseval::aggregate_csv(res.pairs, cfg.digest());
    for (const auto& w : res.warnings) log << "warning: " << w << "\n";
    return res;
}

gcseval::KappaResult eval_kappa(const std::string& labels_text) {
    std::vector<bool> human, verifier;
    auto parse = [](std::string_view v, bool& out) {
        const std::string s = text::to_lower(text::trim(v));
        if (s == "1" || s == "yes" || s == "true") out = true;
        else if (s == "0" || s == "no" || s == "false") out = false;
        else return false;
        return true;
    };
    std::size_t lineno = 0;
    for (auto line : text::split_lines(labels_text)) {
        ++lineno;
        if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
        const auto cols = text::split(line, ',');
        bool h = false, v = false;
        if (cols.size() != 2 || !parse(cols[0], h) || !parse(cols[1], v)) {
            if (human.empty() && lineno == 1) continue;  // header
            throw StructuralError("labels line " + std::to_string(lineno) + ": expected two yes/no columns");
        }
        human.push_back(h);
        verifier.push_back(v);
    }
    return gcseval::cohens_kappa(human, verifier);
}

} // namespace reviewlore::app
