// Records the packaged replay fixtures from a hand-written model stand-in
// (tests/data/script.json), then replays every scenario to freeze goldens.
//
//   reviewlore-fixturegen <tests/data> <tests/golden>

#include <filesystem>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reviewlore/app/commands.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/llmgate/provider.hpp"
#include "reviewlore/rulestore/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reviewlore;

namespace {

std::string norm(const std::string& s) { return text::normalize_whitespace(s); }

// "[3] text" or "[R3] (Logic) text" listing lines -> (number, text).
std::vector<std::pair<int, std::string>> listing(const std::string& block, bool with_category) {
    static const std::regex plain(R"(^\[R?(\d+)\] (.*)$)");
    static const std::regex cat(R"(^\[R?(\d+)\] \((\w+)\) (.*)$)");
    std::vector<std::pair<int, std::string>> out;
    for (auto line : text::split_lines(block)) {
        const std::string l(line);
        std::smatch m;
        if (with_category ? std::regex_match(l, m, cat) : std::regex_match(l, m, plain))
            out.emplace_back(std::stoi(m[1]), m[m.size() - 1]);
    }
    return out;
}

// Titles of the "[i] title" entries of a verifier issue listing, in order.
std::vector<std::string> issue_titles(const std::string& block) {
    std::vector<std::string> titles;
    for (auto line : text::split_lines(block)) {
        const std::string tag = "[" + std::to_string(titles.size() + 1) + "] ";
        if (line.substr(0, tag.size()) == tag) titles.emplace_back(line.substr(tag.size()));
    }
    return titles;
}

class Script {
public:
    explicit Script(json doc) : s_(std::move(doc)) {
        for (auto& [content, topic] : s_["topics"].items()) topic_[norm(content)] = topic.get<std::string>();
        for (auto& [topic, content] : s_["merged"].items()) topic_[norm(content.get<std::string>())] = topic;
    }

    llmgate::ProviderReply operator()(const llmgate::ProviderRequest& r) const {
        const auto& v = r.variables;
        const int n = std::max(1, r.candidate_count);
        std::vector<json> docs;
        for (int i = 0; i < n; ++i) docs.push_back(answer(r.template_id, v, i, n));
        llmgate::ProviderReply reply;
        for (const auto& d : docs) reply.candidates.push_back({d.dump(1), "stop"});
        return reply;
    }

private:
    json answer(const std::string& id, const llmgate::Variables& v, int i, int n) const {
        if (id == "rules.extract") {
            json rules = json::array();
            if (auto it = s_["extract"].find(v.at("root_id")); it != s_["extract"].end())
                for (const auto& r : *it) rules.push_back({{"content", r["content"]}, {"sources", r["sources"]}});
            return {{"rules", rules}};
        }
        if (id == "rules.filter") {
            json removed = json::array();
            for (const auto& [k, t] : listing(v.at("rules"), false))
                for (auto& [content, reason] : s_["filter"].items())
                    if (norm(content) == t) removed.push_back({{"index", k}, {"reason", reason}});
            return {{"removed", removed}};
        }
        if (id == "rules.categorize") {
            json cats = json::array();
            for (const auto& [k, t] : listing(v.at("rules"), false)) {
                std::string c = "Logic";
                for (auto& [content, cat] : s_["categories"].items())
                    if (norm(content) == t) c = cat == "convention" ? "Convention" : "Logic";
                cats.push_back({{"index", k}, {"category", c}});
            }
            return {{"categories", cats}};
        }
        if (id == "rules.same_topic") {
            const auto topic = topic_.find(norm(v.at("rule")));
            if (topic != topic_.end())
                for (const auto& [k, t] : listing(v.at("candidates"), false))
                    if (auto c = topic_.find(t); c != topic_.end() && c->second == topic->second)
                        return {{"same_topic_index", k}, {"merged_content", s_["merged"].value(topic->second, t)}};
            return {{"same_topic_index", 0}, {"merged_content", ""}};
        }
        if (id == "validate.summarize") {
            const auto& s = s_["summaries"].at(v.at("message_id"));
            return {{"summary", s["summary"]}, {"symbols", s["symbols"]}};
        }
        if (id == "validate.rank") {
            std::map<std::string, int> num;
            for (const auto& [k, t] : listing(v.at("rules"), true)) num[t] = k;
            json ranking = json::array();
            for (const auto& c : s_["rank_order"])
                if (auto it = num.find(norm(c.get<std::string>())); it != num.end()) ranking.push_back(it->second);
            return {{"ranking", ranking}};
        }
        if (id == "validate.issues" || id == "validate.issues_rule_free") {
            std::map<std::string, int> num;
            if (v.count("rules"))
                for (const auto& [k, t] : listing(v.at("rules"), true)) num[t] = k;
            const char* table = n > 1 ? "eval_issues" : id == "validate.issues" ? "issues" : "issues_rule_free";
            const auto& variants = s_[table].at(v.at("message_id"));
            json issues = json::array();
            for (auto is : variants.at(static_cast<std::size_t>(i) % variants.size())) {
                json refs = json::array();
                for (const auto& r : is["rules"]) {
                    const std::string ref = r.get<std::string>();
                    if (std::regex_match(ref, std::regex(R"(R\d+)"))) refs.push_back(ref);
                    else if (auto it = num.find(norm(ref)); it != num.end()) refs.push_back("R" + std::to_string(it->second));
                }
                if (id == "validate.issues") is["rules"] = refs;
                else is.erase("rules");
                issues.push_back(is);
            }
            return {{"issues", issues}};
        }
        if (id == "validate.batch_filter") return {{"removed", json::array()}};
        if (id == "gcs.criteria") {
            for (const auto& c : s_["criteria"])
                if (v.at("commit_message").find(c["match"].get<std::string>()) != std::string::npos)
                    return {{"root_cause", c["root_cause"]}, {"code_location", c["code_location"]},
                            {"fixing_strategy", c["fixing_strategy"]}, {"keyword_overlap", c["keyword_overlap"]}};
            throw Error("script has no criteria for this fix");
        }
        if (id == "gcs.verify") {
            json issues = json::array();
            const auto titles = issue_titles(v.at("issues"));
            for (std::size_t k = 0; k < titles.size(); ++k) {
                json vote = s_["default_verdict"];
                for (const auto& vd : s_["verdicts"]) {
                    if (v.at("criteria").find(vd["criteria"].get<std::string>()) == std::string::npos) continue;
                    if (titles[k].find(vd["title"].get<std::string>()) == std::string::npos) continue;
                    vote = vd["votes"].at(static_cast<std::size_t>(i) % vd["votes"].size());
                    break;
                }
                json crit = json::array();
                bool any = false;
                for (std::size_t c = 0; c < 4; ++c) {
                    const bool yes = vote[c][0].get<int>() != 0;
                    any = any || yes;
                    crit.push_back({{"criterion", c + 1},
                                    {"reason", yes ? "The issue covers this point." : "The issue does not cover this point."},
                                    {"match", yes ? "Yes" : "No"},
                                    {"confidence", vote[c][1]}});
                }
                issues.push_back({{"index", k + 1}, {"title", titles[k]}, {"overall_match", any ? "Yes" : "No"},
                                  {"overall_confidence", vote[0][1]}, {"criteria", crit}});
            }
            return {{"issues", issues}};
        }
        throw Error("script cannot answer template " + id);
    }

    json s_;
    std::map<std::string, std::string> topic_;
};

void put(const fs::path& p, const std::string& contents) {
    fs::create_directories(p.parent_path());
    text::write_file(p.string(), contents);
    std::cout << "wrote " << p.string() << "\n";
}

// Runs every scenario once through `gateway_for`; writes goldens when `golden` is set.
void run_all(const fs::path& data, const fs::path* golden,
             const std::function<std::shared_ptr<llmgate::Gateway>(const app::RunConfig&)>& gateway_for) {
    std::ostringstream log;
    app::RunConfig base;
    base.fixture_dir = (data / "fixtures").string();

    {
        auto cfg = base;
        app::RulesBuildOptions o;
        o.mboxes = {(data / "corpus" / "rules_corpus.mbox").string()};
        auto r = app::build_rules(cfg, o, log, gateway_for(cfg));
        if (!r.errors.empty()) throw Error("rules build: " + r.errors.front());
        if (golden) {
            put(*golden / "rules_progress.csv", r.progress_csv);
            put(*golden / "rules_built.jsonl", rulestore::serialize(r.snapshot));
        }
    }
    const auto zswap = data / "zswap";
    for (const char* mode : {"rule_based", "rule_free"}) {
        auto cfg = base;
        cfg.mode = mode;
        cfg.source_root = (zswap / "tree").string();
        cfg.rule_set = (data / "rules.jsonl").string();
        auto series = app::resolve_series(cfg, (zswap / "acomp.eml").string(), log);
        auto report = app::run_validate(cfg, series, log, gateway_for(cfg));
        if (golden) {
            put(*golden / ("zswap_" + std::string(mode) + ".txt"), validate::render_report(report));
            put(*golden / ("zswap_" + std::string(mode) + ".json"), validate::report_to_json(report).dump(2) + "\n");
        }
    }
    {
        auto cfg = base;
        cfg.source_root = (zswap / "tree").string();
        cfg.rule_set = (data / "rules.jsonl").string();
        auto series = app::resolve_series(cfg, (data / "gate" / "page_mark.eml").string(), log);
        auto report = app::run_validate(cfg, series, log, gateway_for(cfg));
        if (golden) put(*golden / "gate_rule_based.txt", validate::render_report(report));
    }
    {
        auto cfg = base;
        cfg.rule_set = (data / "rules.jsonl").string();
        app::EvalGcsOptions o;
        o.pairs_file = (data / "pairs" / "pairs.jsonl").string();
        o.mboxes = {(data / "pairs" / "pairs.mbox").string()};
        auto r = app::eval_gcs(cfg, o, log, gateway_for(cfg));
        if (golden) {
            put(*golden / "gcs_results.jsonl", r.results_jsonl);
            put(*golden / "gcs_aggregate.csv", r.aggregate_csv);
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: reviewlore-fixturegen <data-dir> <golden-dir>\n";
        return 1;
    }
    const fs::path data = argv[1], golden = argv[2];
    try {
        auto script = std::make_shared<Script>(json::parse(text::read_file((data / "script.json").string())));
        fs::remove_all(data / "fixtures");
        auto templates = std::make_shared<llmgate::TemplateRegistry>(
            llmgate::TemplateRegistry::load_dir(llmgate::default_template_dir()));
        auto provider = std::make_shared<llmgate::ScriptedProvider>(
            [script](const llmgate::ProviderRequest& r) { return (*script)(r); });

        run_all(data, nullptr, [&](const app::RunConfig& cfg) {
            llmgate::GatewayOptions opts;
            opts.mode = llmgate::GatewayMode::Live;
            opts.record = true;
            opts.fixture_dir = cfg.fixture_dir;
            return std::make_shared<llmgate::Gateway>(templates, opts, provider);
        });
        std::cout << provider->calls() << " scripted calls recorded\n";
        run_all(data, &golden, [](const app::RunConfig& cfg) { return app::make_gateway(cfg); });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
