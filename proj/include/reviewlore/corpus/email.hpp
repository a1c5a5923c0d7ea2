#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reviewlore::corpus {

struct Mailbox {
    std::string name;
    std::string address;

    // "Name <address>", or just the address when there is no name.
    std::string display() const;
    bool operator==(const Mailbox&) const = default;
};

struct EmailMessage {
    std::string message_id;  // without angle brackets
    std::optional<std::string> in_reply_to;
    std::vector<std::string> references;
    Mailbox author;
    std::int64_t date = 0;  // seconds since the epoch, UTC
    std::string subject;
    std::string body;  // decoded text parts, LF line endings
    std::map<std::string, std::vector<std::string>> raw_headers;  // lower-cased names
    bool synthetic_id = false;  // message had no Message-ID; id is a content digest

    bool operator==(const EmailMessage&) const = default;
};

struct MboxDiagnostic {
    std::size_t offset = 0;  // byte offset of the message within the archive
    std::string message_id;  // empty when unknown
    std::string text;
};

struct MboxParseResult {
    std::vector<EmailMessage> messages;
    std::vector<MboxDiagnostic> diagnostics;
};

// Splits an mbox archive ("From " framing, >From unescaping) into messages.
// Gzip input is detected by magic bytes. Per-message decode failures are
// recorded and skipped; an archive that does not start with a "From " line
// throws MboxFramingError. Duplicate Message-IDs keep the first occurrence.
MboxParseResult parse_mbox(std::string_view archive);

// Parses one RFC 5322 message. `fallback_date` is used when the Date header
// is missing or unparseable.
EmailMessage parse_message(std::string_view raw, std::vector<MboxDiagnostic>& diagnostics,
                           std::size_t offset = 0, std::optional<std::int64_t> fallback_date = std::nullopt);

std::optional<std::int64_t> parse_rfc5322_date(std::string_view value);
Mailbox parse_mailbox(std::string_view value);

// All <id> tokens in order, brackets stripped.
std::vector<std::string> parse_message_ids(std::string_view value);

// Digest-derived id for mail without a Message-ID header.
std::string synthetic_message_id(std::string_view raw_message);

} // namespace reviewlore::corpus
