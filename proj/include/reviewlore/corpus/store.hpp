#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "reviewlore/corpus/email.hpp"

namespace reviewlore::corpus {

void to_json(nlohmann::json& j, const Mailbox& m);
void from_json(const nlohmann::json& j, Mailbox& m);
void to_json(nlohmann::json& j, const EmailMessage& m);
void from_json(const nlohmann::json& j, EmailMessage& m);

// On-disk corpus: one JSON file per message under messages/, named by the
// percent-encoded Message-ID, plus manifest.jsonl listing every message in
// insertion order.
class CorpusStore {
public:
    // Opens `dir`, creating it when absent.
    explicit CorpusStore(std::filesystem::path dir);

    // Adds messages not yet present; returns how many were new.
    std::size_t add(std::span<const EmailMessage> messages);

    bool contains(const std::string& message_id) const { return index_.count(message_id) != 0; }
    std::optional<EmailMessage> find(const std::string& message_id) const;
    std::vector<EmailMessage> load_all() const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::filesystem::path& dir() const noexcept { return dir_; }

    static std::string file_name_for(const std::string& message_id);

private:
    struct Entry {
        std::string message_id;
        std::string file;
        std::int64_t date = 0;
        bool synthetic_id = false;
    };

    void write_manifest() const;

    std::filesystem::path dir_;
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

} // namespace reviewlore::corpus
