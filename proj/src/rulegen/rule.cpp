#include "reviewlore/rulegen/rule.hpp"

#include <cmath>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::rulegen {

std::string_view to_string(Category c) noexcept {
    return c == Category::Logic ? "Logic" : "Convention";
}

std::optional<Category> parse_category(std::string_view s) noexcept {
    const auto t = text::trim(s);
    if (text::iequals(t, "logic")) return Category::Logic;
    if (text::iequals(t, "convention")) return Category::Convention;
    return std::nullopt;
}

std::set<std::string> RawRule::source_message_ids() const {
    std::set<std::string> out;
    for (const auto& s : sources) out.insert(s.message_id);
    return out;
}

std::set<std::string> RawRule::source_authors() const {
    std::set<std::string> out;
    for (const auto& s : sources) out.insert(s.author);
    return out;
}

double compute_diversity_level(long long nr_authors, long long nr_msgid) {
    if (nr_authors < 1 || nr_msgid < 1)
        throw DomainError("diversity level needs nr_authors >= 1 and nr_msgid >= 1 (got " +
                          std::to_string(nr_authors) + ", " + std::to_string(nr_msgid) + ")");
    return std::sqrt(static_cast<double>(nr_authors) * static_cast<double>(nr_msgid)) * 10.0;
}

Rule::Rule(std::string content, Category category, std::set<Source> sources, std::vector<std::string> history)
    : content_(std::move(content)), category_(category), sources_(std::move(sources)), history_(std::move(history)) {
    if (text::normalize_whitespace(content_).empty()) throw InvariantError("rule content is empty");
    recompute();
}

void Rule::recompute() {
    std::set<std::string_view> authors;
    std::set<std::string_view> ids;
    for (const auto& s : sources_) {
        authors.insert(s.author);
        ids.insert(s.message_id);
    }
    nr_authors_ = authors.size();
    nr_msgid_ = ids.size();
    if (nr_authors_ == 0 || nr_msgid_ == 0) throw InvariantError("rule without sources: " + content_);
    diversity_ = compute_diversity_level(static_cast<long long>(nr_authors_), static_cast<long long>(nr_msgid_));
}

void Rule::absorb(const Rule& other, std::string merged_content) {
    if (other.category_ != category_) throw InvariantError("cannot merge a Logic rule with a Convention rule");
    if (text::normalize_whitespace(merged_content).empty()) throw InvariantError("merged rule content is empty");
    history_.insert(history_.end(), other.history_.begin(), other.history_.end());
    history_.push_back(content_);
    history_.push_back(other.content_);
    sources_.insert(other.sources_.begin(), other.sources_.end());
    content_ = std::move(merged_content);
    recompute();
}

bool Rule::operator==(const Rule& other) const {
    return content_ == other.content_ && category_ == other.category_ && sources_ == other.sources_ &&
           history_ == other.history_ && diversity_ == other.diversity_;
}

} // namespace reviewlore::rulegen
