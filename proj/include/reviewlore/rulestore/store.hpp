#pragma once

#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reviewlore/rulegen/rule.hpp"

namespace reviewlore::rulestore {

inline constexpr int kSchemaVersion = 1;

struct RuleSetSnapshot {
    int schema_version = kSchemaVersion;
    std::time_t created_at = 0;
    std::string generation_config_digest;
    std::vector<rulegen::Rule> rules;

    bool operator==(const RuleSetSnapshot&) const = default;
};

// Line-delimited JSON: one header document, then one rule per line.
std::string serialize(const RuleSetSnapshot& snapshot);
RuleSetSnapshot deserialize(const std::string& text);

// Throws InvariantError naming the offending rule index.
void save(const RuleSetSnapshot& snapshot, const std::filesystem::path& file);
// Throws SchemaVersionError on unknown versions, StructuralError on malformed lines.
RuleSetSnapshot load(const std::filesystem::path& file);

// Digest of the serialized snapshot, used to tag reports.
std::string snapshot_digest(const RuleSetSnapshot& snapshot);

struct RuleQuery {
    std::optional<rulegen::Category> category;
    std::string text;  // case-insensitive substring; empty matches all
};

// Matching rules ordered by diversity level descending, then content.
std::vector<rulegen::Rule> query(const RuleSetSnapshot& snapshot, const RuleQuery& q = {});

} // namespace reviewlore::rulestore
