#include "reviewlore/rulestore/store.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::rulestore {

using nlohmann::ordered_json;
using rulegen::Category;
using rulegen::Rule;

namespace {

ordered_json rule_to_json(const Rule& r) {
    ordered_json sources = ordered_json::array();
    for (const auto& s : r.sources()) sources.push_back({{"message_id", s.message_id}, {"author", s.author}});
    ordered_json j;
    j["content"] = r.content();
    j["category"] = std::string(rulegen::to_string(r.category()));
    j["sources"] = std::move(sources);
    j["history"] = r.history();
    j["diversity_level"] = r.diversity_level();
    return j;
}

Rule rule_from_json(const ordered_json& j, std::size_t line) {
    const auto where = " (line " + std::to_string(line) + ")";
    if (!j.is_object()) throw StructuralError("rule is not an object" + where);
    for (const char* key : {"content", "category", "sources", "history", "diversity_level"})
        if (!j.contains(key)) throw StructuralError(std::string("rule lacks '") + key + "'" + where);
    auto cat = rulegen::parse_category(j["category"].get<std::string>());
    if (!cat) throw StructuralError("unknown category '" + j["category"].get<std::string>() + "'" + where);
    std::set<rulegen::Source> sources;
    for (const auto& s : j["sources"])
        sources.insert({s.at("message_id").get<std::string>(), s.at("author").get<std::string>()});
    Rule r(j["content"].get<std::string>(), *cat, std::move(sources), j["history"].get<std::vector<std::string>>());
    const double stored = j["diversity_level"].get<double>();
    if (std::abs(stored - r.diversity_level()) > 1e-9)
        throw StructuralError("stored diversity_level " + std::to_string(stored) + " disagrees with sources" + where);
    return r;
}

} // namespace

std::string serialize(const RuleSetSnapshot& snapshot) {
    ordered_json header;
    header["schema_version"] = snapshot.schema_version;
    header["created_at"] = text::iso8601_utc(snapshot.created_at);
    header["generation_config_digest"] = snapshot.generation_config_digest;
    header["rule_count"] = snapshot.rules.size();
    std::string out = header.dump() + "\n";
    for (const auto& r : snapshot.rules) out += rule_to_json(r).dump() + "\n";
    return out;
}

RuleSetSnapshot deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    RuleSetSnapshot snap;
    bool have_header = false;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw StructuralError("line " + std::to_string(line_no) + " is not JSON: " + e.what());
        }
        if (!have_header) {
            if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer())
                throw StructuralError("missing snapshot header");
            const int version = j["schema_version"].get<int>();
            if (version != kSchemaVersion) throw SchemaVersionError(version);
            snap.schema_version = version;
            if (!j.contains("created_at") || !j["created_at"].is_string())
                throw StructuralError("snapshot header lacks created_at");
            try {
                snap.created_at = static_cast<std::time_t>(text::parse_iso8601_utc(j["created_at"].get<std::string>()));
            } catch (const Error& e) {
                throw StructuralError(std::string("snapshot header: ") + e.what());
            }
            snap.generation_config_digest = j.value("generation_config_digest", std::string{});
            expected = j.value("rule_count", std::size_t{0});
            have_header = true;
            continue;
        }
        snap.rules.push_back(rule_from_json(j, line_no));
    }
    if (!have_header) throw StructuralError("empty rule set file");
    if (snap.rules.size() != expected)
        throw StructuralError("header announces " + std::to_string(expected) + " rules, found " +
                              std::to_string(snap.rules.size()));
    return snap;
}

void save(const RuleSetSnapshot& snapshot, const std::filesystem::path& file) {
    for (std::size_t i = 0; i < snapshot.rules.size(); ++i) {
        const Rule& r = snapshot.rules[i];
        if (r.sources().empty() || text::trim(r.content()).empty())
            throw InvariantError("rule " + std::to_string(i) + " violates rule invariants");
    }
    const std::string body = serialize(snapshot);
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    text::write_file(tmp.string(), body);
    std::filesystem::rename(tmp, file);
}

RuleSetSnapshot load(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) throw PreconditionError("rule set file not found: " + file.string());
    return deserialize(text::read_file(file.string()));
}

std::string snapshot_digest(const RuleSetSnapshot& snapshot) { return sha256_hex(serialize(snapshot)); }

std::vector<Rule> query(const RuleSetSnapshot& snapshot, const RuleQuery& q) {
    std::vector<Rule> out;
    for (const auto& r : snapshot.rules) {
        if (q.category && r.category() != *q.category) continue;
        if (!q.text.empty() && !text::icontains(r.content(), q.text)) continue;
        out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const Rule& a, const Rule& b) {
        if (a.diversity_level() != b.diversity_level()) return a.diversity_level() > b.diversity_level();
        return a.content() < b.content();
    });
    return out;
}

} // namespace reviewlore::rulestore
