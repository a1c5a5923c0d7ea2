#include "reviewlore/corpus/store.hpp"

#include <fstream>

#include "reviewlore/common/digest.hpp"
#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const Mailbox& m) { j = json{{"name", m.name}, {"address", m.address}}; }

void from_json(const json& j, Mailbox& m) {
    m.name = j.at("name").get<std::string>();
    m.address = j.at("address").get<std::string>();
}

void to_json(json& j, const EmailMessage& m) {
    j = json{{"message_id", m.message_id},
             {"in_reply_to", m.in_reply_to ? json(*m.in_reply_to) : json(nullptr)},
             {"references", m.references},
             {"author", m.author},
             {"date", m.date},
             {"subject", m.subject},
             {"body", m.body},
             {"raw_headers", m.raw_headers},
             {"synthetic_id", m.synthetic_id}};
}

void from_json(const json& j, EmailMessage& m) {
    m.message_id = j.at("message_id").get<std::string>();
    if (!j.at("in_reply_to").is_null()) m.in_reply_to = j.at("in_reply_to").get<std::string>();
    m.references = j.at("references").get<std::vector<std::string>>();
    m.author = j.at("author").get<Mailbox>();
    m.date = j.at("date").get<std::int64_t>();
    m.subject = j.at("subject").get<std::string>();
    m.body = j.at("body").get<std::string>();
    m.raw_headers = j.at("raw_headers").get<std::map<std::string, std::vector<std::string>>>();
    m.synthetic_id = j.value("synthetic_id", false);
}

std::string CorpusStore::file_name_for(const std::string& message_id) {
    std::string encoded = text::percent_encode(message_id);
    // Keep names under common filesystem limits.
    if (encoded.size() > 200) encoded = encoded.substr(0, 120) + "~" + sha256_hex(message_id).substr(0, 32);
    return encoded + ".json";
}

CorpusStore::CorpusStore(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_ / "messages");
    const fs::path manifest = dir_ / "manifest.jsonl";
    if (!fs::exists(manifest)) return;
    std::ifstream in(manifest);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            Entry e{j.at("message_id").get<std::string>(), j.at("file").get<std::string>(),
                    j.at("date").get<std::int64_t>(), j.value("synthetic_id", false)};
            index_.emplace(e.message_id, entries_.size());
            entries_.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw Error("corrupt corpus manifest line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
}

std::size_t CorpusStore::add(std::span<const EmailMessage> messages) {
    std::size_t added = 0;
    for (const auto& m : messages) {
        if (contains(m.message_id)) continue;
        const std::string file = file_name_for(m.message_id);
        text::write_file((dir_ / "messages" / file).string(), json(m).dump(1) + "\n");
        index_.emplace(m.message_id, entries_.size());
        entries_.push_back({m.message_id, file, m.date, m.synthetic_id});
        ++added;
    }
    if (added) write_manifest();
    return added;
}

void CorpusStore::write_manifest() const {
    std::string out;
    for (const auto& e : entries_) {
        json j{{"message_id", e.message_id}, {"file", e.file}, {"date", e.date}, {"synthetic_id", e.synthetic_id}};
        out += j.dump() + "\n";
    }
    const fs::path tmp = dir_ / "manifest.jsonl.tmp";
    text::write_file(tmp.string(), out);
    fs::rename(tmp, dir_ / "manifest.jsonl");
}

std::optional<EmailMessage> CorpusStore::find(const std::string& message_id) const {
    auto it = index_.find(message_id);
    if (it == index_.end()) return std::nullopt;
    const auto& e = entries_[it->second];
    return json::parse(text::read_file((dir_ / "messages" / e.file).string())).get<EmailMessage>();
}

std::vector<EmailMessage> CorpusStore::load_all() const {
    std::vector<EmailMessage> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_)
        out.push_back(json::parse(text::read_file((dir_ / "messages" / e.file).string())).get<EmailMessage>());
    return out;
}

} // namespace reviewlore::corpus
