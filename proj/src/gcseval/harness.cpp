#include "reviewlore/gcseval/harness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::gcseval {

using nlohmann::json;
using nlohmann::ordered_json;
using llmgate::CompletionRequest;
using llmgate::FieldKind;

namespace {

bool parse_yes_no(const json& v, const std::string& where) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) {
        const auto n = v.get<long long>();
        if (n == 0 || n == 1) return n == 1;
    }
    if (v.is_string()) {
        const std::string s = text::to_lower(text::trim(v.get<std::string>()));
        if (s == "yes" || s == "true") return true;
        if (s == "no" || s == "false") return false;
    }
    throw StructuralError(where + ": match must be Yes or No, got " + v.dump());
}

int parse_confidence(const json& v, const std::string& where) {
    long long c = 0;
    if (v.is_number_integer()) c = v.get<long long>();
    else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) c = static_cast<long long>(v.get<double>());
    else throw StructuralError(where + ": confidence must be an integer, got " + v.dump());
    if (c < 1 || c > 100) throw StructuralError(where + ": confidence " + std::to_string(c) + " outside [1, 100]");
    return static_cast<int>(c);
}

std::size_t criterion_slot(const json& v, const std::string& where) {
    if (v.is_number_integer()) {
        const auto n = v.get<long long>();
        if (n >= 1 && n <= static_cast<long long>(kCriteriaPerIssue)) return static_cast<std::size_t>(n - 1);
    } else if (v.is_string()) {
        const std::string s = text::to_lower(text::trim(v.get<std::string>()));
        for (std::size_t i = 0; i < kCriteriaPerIssue; ++i)
            if (s == to_string(kAllCriterionKinds[i]) || s == std::to_string(i + 1)) return i;
    }
    throw StructuralError(where + ": unknown criterion " + v.dump());
}

std::string render_criteria(const CriteriaSet& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i)
        out += std::to_string(i + 1) + ". (" + std::string(to_string(c[i].kind)) + ") " + c[i].question + "\n";
    return out;
}

std::string render_issues(const std::vector<validate::Issue>& issues) {
    std::string out;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        const auto& is = issues[i];
        out += "[" + std::to_string(i + 1) + "] " + is.title + "\n" + is.description + "\n";
        if (!is.code_excerpt.empty()) out += "Code:\n" + is.code_excerpt + "\n";
        out += "\n";
    }
    return out;
}

ordered_json matrix_json(const std::vector<std::vector<double>>& m) {
    ordered_json a = ordered_json::array();
    for (const auto& row : m) a.push_back(row);
    return a;
}

ordered_json bundle_json(const ScoreBundle& b) {
    ordered_json j;
    j["gcs"] = b.gcs;
    j["h_gcs"] = b.h_gcs;
    j["rationale_scores"] = matrix_json(b.rationale_scores);
    j["rationale_max_scores"] = matrix_json(b.rationale_max_scores);
    return j;
}

ScoreBundle bundle_from_json(const json& j) {
    ScoreBundle b;
    b.gcs = j.at("gcs").get<double>();
    b.h_gcs = j.at("h_gcs").get<double>();
    b.rationale_scores = j.at("rationale_scores").get<std::vector<std::vector<double>>>();
    b.rationale_max_scores = j.at("rationale_max_scores").get<std::vector<std::vector<double>>>();
    return b;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::optional<CriteriaSet> CriteriaCache::get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = sets_.find(key);
    if (it == sets_.end()) return std::nullopt;
    return it->second;
}

void CriteriaCache::put(const std::string& key, const CriteriaSet& set) {
    std::lock_guard lock(mu_);
    sets_.insert_or_assign(key, set);
}

std::size_t CriteriaCache::size() const {
    std::lock_guard lock(mu_);
    return sets_.size();
}

std::string fix_digest(const corpus::Patch& fix) { return sha256_hex(fix.commit_message + "\n" + fix.diff_text()); }

CriteriaSet generate_criteria(llmgate::Gateway& gw, const corpus::Patch& fix, CriteriaCache* cache,
                              double temperature) {
    if (text::trim(fix.commit_message).empty())
        throw PreconditionError("fix patch " + fix.message_id + " has an empty commit message");
    const std::string key = fix_digest(fix);
    if (cache)
        if (auto hit = cache->get(key)) return *hit;

    CompletionRequest req;
    req.template_id = "gcs.criteria";
    req.variables = {{"commit_message", fix.commit_message}, {"diff", fix.diff_text()}};
    req.temperature = temperature;
    llmgate::Schema schema;
    for (auto kind : kAllCriterionKinds) schema.emplace(std::string(to_string(kind)), FieldKind::String);
    const json doc = gw.complete_structured(req, schema).documents.front();

    CriteriaSet set;
    for (std::size_t i = 0; i < kCriteriaPerIssue; ++i) {
        const auto kind = kAllCriterionKinds[i];
        std::string q(text::trim(doc[std::string(to_string(kind))].get<std::string>()));
        if (q.empty()) throw StructuralError("criterion " + std::string(to_string(kind)) + " is empty");
        set[i] = Criterion{kind, std::move(q)};
    }
    if (cache) cache->put(key, set);
    return set;
}

Rationale parse_rationale(const json& doc, std::size_t issue_count) {
    if (!doc.is_object() || !doc.contains("issues") || !doc["issues"].is_array())
        throw StructuralError("verifier reply lacks an issues array");
    Rationale r;
    for (const auto& item : doc["issues"]) {
        if (!item.is_object() || !item.contains("index") || !item["index"].is_number_integer())
            throw StructuralError("verifier entry lacks an index");
        const auto idx = item["index"].get<long long>();
        if (idx < 1 || static_cast<std::size_t>(idx) > issue_count)
            throw StructuralError("verifier judged unknown issue " + std::to_string(idx));
        const std::string where = "issue " + std::to_string(idx);
        IssueJudgment ij;
        ij.issue_index = static_cast<std::size_t>(idx - 1);
        ij.title = item.value("title", std::string{});
        if (item.contains("overall_match")) ij.overall_match = parse_yes_no(item["overall_match"], where);
        if (item.contains("overall_confidence")) ij.overall_confidence = parse_confidence(item["overall_confidence"], where);
        if (!item.contains("criteria") || !item["criteria"].is_array())
            throw StructuralError(where + ": no criteria judgments");
        std::array<std::optional<CriterionJudgment>, kCriteriaPerIssue> slots;
        for (const auto& c : item["criteria"]) {
            if (!c.is_object() || !c.contains("criterion") || !c.contains("match") || !c.contains("confidence"))
                throw StructuralError(where + ": incomplete criterion judgment");
            const auto slot = criterion_slot(c["criterion"], where);
            if (slots[slot]) throw StructuralError(where + ": criterion " + std::to_string(slot + 1) + " judged twice");
            slots[slot] = CriterionJudgment{parse_yes_no(c["match"], where), parse_confidence(c["confidence"], where),
                                            c.value("reason", std::string{})};
        }
        for (std::size_t s = 0; s < kCriteriaPerIssue; ++s) {
            if (!slots[s]) throw StructuralError(where + ": criterion " + std::to_string(s + 1) + " not judged");
            ij.criteria.push_back(std::move(*slots[s]));
        }
        r.issues.push_back(std::move(ij));
    }
    score_rationale(issue_count, r);  // coverage check
    return r;
}

std::vector<Rationale> verify_issues(llmgate::Gateway& gw, const CriteriaSet& criteria,
                                     const std::vector<validate::Issue>& issues, int k, double temperature) {
    if (k < 1) throw PreconditionError("K must be at least 1");
    if (issues.empty()) return std::vector<Rationale>(static_cast<std::size_t>(k));
    CompletionRequest req;
    req.template_id = "gcs.verify";
    req.variables = {{"criteria", render_criteria(criteria)}, {"issues", render_issues(issues)}};
    req.temperature = temperature;
    req.candidate_count = k;
    const auto resp = gw.complete_structured(req, {{"issues", FieldKind::Array}});
    std::vector<Rationale> out;
    for (const auto& doc : resp.documents) out.push_back(parse_rationale(doc, issues.size()));
    return out;
}

validate::Issue ground_truth_issue(const corpus::Patch& fix) {
    validate::Issue is;
    is.title = fix.subject;
    is.description = fix.commit_message;
    is.patch_message_id = fix.message_id;
    return is;
}

PairResult evaluate_pair(llmgate::Gateway& gw, const corpus::PatchPair& pair, const IssueSource& system,
                         const HarnessConfig& cfg, CriteriaCache* cache) {
    cfg.eval.check();
    PairResult res;
    res.buggy_message_id = pair.buggy.message_id;
    res.fix_message_id = pair.fix.message_id;
    res.label = pair.label;

    const CriteriaSet criteria = generate_criteria(gw, pair.fix, cache, cfg.verifier_temperature);

    auto judge = [&](const std::vector<std::vector<validate::Issue>>& sets) {
        std::vector<Run> runs;
        for (const auto& set : sets) runs.push_back({set.size(), verify_issues(gw, criteria, set, cfg.eval.k, cfg.verifier_temperature)});
        return runs;
    };

    const auto sets = system(pair.buggy, cfg.eval.n);
    if (sets.size() != static_cast<std::size_t>(cfg.eval.n))
        throw StructuralError("issue source returned " + std::to_string(sets.size()) + " sets, expected " +
                              std::to_string(cfg.eval.n));
    for (const auto& s : sets) res.issue_counts.push_back(s.size());
    res.system = score_runs(judge(sets), cfg.eval);

    if (cfg.ground_truth_from_system) {
        const auto gt_sets = system(pair.fix, cfg.eval.n);
        res.ground_truth = score_runs(judge(gt_sets), cfg.eval);
    } else {
        // Every ground-truth run is the same single issue, so one run stands for all N.
        EvalConfig one = cfg.eval;
        one.n = 1;
        res.ground_truth = score_runs(judge({{ground_truth_issue(pair.fix)}}), one);
    }
    res.degenerate_ground_truth = res.ground_truth.gcs < 1.0;
    if (res.ground_truth.gcs > 0) {
        res.final_score = final_score(res.system.gcs, res.ground_truth.gcs);
        res.system.final_score = res.final_score;
    }
    return res;
}

ordered_json to_json(const PairResult& r) {
    ordered_json j;
    j["buggy_message_id"] = r.buggy_message_id;
    j["fix_message_id"] = r.fix_message_id;
    j["label"] = r.label;
    j["gcs"] = r.system.gcs;
    j["h_gcs"] = r.system.h_gcs;
    j["gcs_ground_truth"] = r.ground_truth.gcs;
    j["final_score"] = r.final_score ? ordered_json(*r.final_score) : ordered_json(nullptr);
    j["degenerate_ground_truth"] = r.degenerate_ground_truth;
    j["issue_counts"] = r.issue_counts;
    j["system"] = bundle_json(r.system);
    j["ground_truth"] = bundle_json(r.ground_truth);
    return j;
}

PairResult pair_result_from_json(const json& j) {
    PairResult r;
    r.buggy_message_id = j.at("buggy_message_id").get<std::string>();
    r.fix_message_id = j.at("fix_message_id").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.system = bundle_from_json(j.at("system"));
    r.ground_truth = bundle_from_json(j.at("ground_truth"));
    if (!j.at("final_score").is_null()) r.final_score = j["final_score"].get<double>();
    r.system.final_score = r.final_score;
    r.degenerate_ground_truth = j.at("degenerate_ground_truth").get<bool>();
    r.issue_counts = j.at("issue_counts").get<std::vector<std::size_t>>();
    return r;
}

std::string aggregate_csv(const std::vector<PairResult>& results, const std::string& config_digest) {
    struct Acc {
        std::vector<double> gcs, h_gcs, fs;
        std::size_t degenerate = 0;
    };
    std::map<std::string, Acc> by_label;
    for (const auto& r : results) {
        auto& a = by_label[r.label];
        a.gcs.push_back(r.system.gcs);
        a.h_gcs.push_back(r.system.h_gcs);
        if (r.final_score) a.fs.push_back(*r.final_score);
        if (r.degenerate_ground_truth) ++a.degenerate;
    }
    std::string out = "# config-digest: " + config_digest + "\n";
    out += "label,pairs,mean_gcs,mean_h_gcs,mean_final_score,degenerate_ground_truth\n";
    for (const auto& [label, a] : by_label)
        out += text::csv_escape(label) + "," + std::to_string(a.gcs.size()) + "," + fmt6(mean(a.gcs)) + "," +
               fmt6(mean(a.h_gcs)) + "," + (a.fs.empty() ? std::string("NA") : fmt6(mean(a.fs))) + "," +
               std::to_string(a.degenerate) + "\n";
    return out;
}

std::vector<PairSpec> parse_pairs(const std::string& text_in) {
    std::vector<PairSpec> out;
    std::istringstream in(text_in);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw StructuralError("pairs line " + std::to_string(n) + " is not JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("buggy_message_id") || !j.contains("fix_message_id"))
            throw StructuralError("pairs line " + std::to_string(n) + " lacks message ids");
        out.push_back({j["buggy_message_id"].get<std::string>(), j["fix_message_id"].get<std::string>(),
                       j.value("label", std::string("unlabelled"))});
    }
    return out;
}

} // namespace reviewlore::gcseval
