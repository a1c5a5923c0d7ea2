#pragma once

#include <map>
#include <string>
#include <vector>

#include "reviewlore/corpus/email.hpp"

namespace reviewlore::corpus {

struct DiscussionThread {
    std::string root_id;
    // Root first, then the rest by (date, message_id).
    std::vector<EmailMessage> members;
    // child message_id -> parent message_id; the root has no entry.
    std::map<std::string, std::string> reply_edges;

    const EmailMessage& root() const { return members.front(); }
    std::size_t reply_count() const noexcept { return members.empty() ? 0 : members.size() - 1; }
    const EmailMessage* find(const std::string& message_id) const;
};

struct BrokenEdge {
    std::string child;
    std::string parent;
};

struct Threading {
    std::vector<DiscussionThread> threads;  // ordered by root (date, message_id)
    std::vector<BrokenEdge> broken_edges;   // reply cycles that were cut
};

// Connected components of the reply graph. A message's parent is its
// In-Reply-To when that id is in the corpus, else the last References entry
// that is. Cycles are cut at the edge leaving the latest-dated message.
Threading build_threads(std::vector<EmailMessage> messages);

} // namespace reviewlore::corpus
