#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace reviewlore::rulegen {

enum class Category { Logic, Convention };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s) noexcept;

// Where a rule came from: one review message and who wrote it.
struct Source {
    std::string message_id;
    std::string author;

    auto operator<=>(const Source&) const = default;
};

// A rule straight out of extraction, before categorisation.
struct RawRule {
    std::string content;
    std::set<Source> sources;

    std::set<std::string> source_message_ids() const;
    std::set<std::string> source_authors() const;
};

// sqrt(nr_authors * nr_msgid) * 10. Both counts must be >= 1.
double compute_diversity_level(long long nr_authors, long long nr_msgid);

// Diversity at or above this value makes a rule immune to merging.
inline constexpr double kDefaultMergeThreshold = 30.0;

// A categorised rule with provenance. The diversity level is derived from the
// distinct authors and message ids in `sources` and is recomputed whenever
// the sources change; merged-away content is kept in `history`.
class Rule {
public:
    Rule(std::string content, Category category, std::set<Source> sources, std::vector<std::string> history = {});

    const std::string& content() const noexcept { return content_; }
    Category category() const noexcept { return category_; }
    const std::set<Source>& sources() const noexcept { return sources_; }
    const std::vector<std::string>& history() const noexcept { return history_; }

    std::size_t nr_authors() const noexcept { return nr_authors_; }
    std::size_t nr_msgid() const noexcept { return nr_msgid_; }
    double diversity_level() const noexcept { return diversity_; }

    bool mergeable(double threshold = kDefaultMergeThreshold) const noexcept { return diversity_ < threshold; }

    // Folds `other` into this rule: sources are unioned, both prior contents
    // (and both histories) are appended to the history, and the content is
    // replaced by `merged_content`. Categories must match.
    void absorb(const Rule& other, std::string merged_content);

    bool operator==(const Rule& other) const;

private:
    void recompute();

    std::string content_;
    Category category_;
    std::set<Source> sources_;
    std::vector<std::string> history_;
    std::size_t nr_authors_ = 0;
    std::size_t nr_msgid_ = 0;
    double diversity_ = 0;
};

} // namespace reviewlore::rulegen
