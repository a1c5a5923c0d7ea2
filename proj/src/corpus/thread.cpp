#include "reviewlore/corpus/thread.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace reviewlore::corpus {

const EmailMessage* DiscussionThread::find(const std::string& message_id) const {
    for (const auto& m : members)
        if (m.message_id == message_id) return &m;
    return nullptr;
}

namespace {

bool earlier(const EmailMessage& a, const EmailMessage& b) {
    return a.date != b.date ? a.date < b.date : a.message_id < b.message_id;
}

} // namespace

Threading build_threads(std::vector<EmailMessage> messages) {
    Threading out;
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < messages.size(); ++i) by_id.emplace(messages[i].message_id, i);

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(messages.size(), kNone);
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& m = messages[i];
        auto resolve = [&](const std::string& id) -> std::size_t {
            auto it = by_id.find(id);
            return it == by_id.end() || it->second == i ? kNone : it->second;
        };
        if (m.in_reply_to) parent[i] = resolve(*m.in_reply_to);
        for (auto r = m.references.rbegin(); parent[i] == kNone && r != m.references.rend(); ++r)
            parent[i] = resolve(*r);
    }

    // Cut cycles: walk each chain; on revisiting a node of the current walk,
    // drop the parent edge of the latest-dated message on the cycle.
    std::vector<int> state(messages.size(), 0);  // 0 new, 1 on current walk, 2 done
    for (std::size_t start = 0; start < messages.size(); ++start) {
        std::vector<std::size_t> walk;
        std::size_t cur = start;
        while (cur != kNone && state[cur] == 0) {
            state[cur] = 1;
            walk.push_back(cur);
            cur = parent[cur];
        }
        if (cur != kNone && state[cur] == 1) {
            auto from = std::find(walk.begin(), walk.end(), cur);
            std::size_t latest = *from;
            for (auto it = from; it != walk.end(); ++it)
                if (earlier(messages[latest], messages[*it])) latest = *it;
            out.broken_edges.push_back({messages[latest].message_id, messages[parent[latest]].message_id});
            parent[latest] = kNone;
        }
        for (auto w : walk) state[w] = 2;
    }

    // Roots and component membership.
    std::vector<std::size_t> root_of(messages.size(), kNone);
    for (std::size_t i = 0; i < messages.size(); ++i) {
        std::vector<std::size_t> path;
        std::size_t r = i;
        while (root_of[r] == kNone && parent[r] != kNone) {
            path.push_back(r);
            r = parent[r];
        }
        if (root_of[r] == kNone) root_of[r] = r;
        for (auto p : path) root_of[p] = root_of[r];
    }
    std::unordered_map<std::size_t, std::vector<std::size_t>> groups;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (root_of[i] == i) roots.push_back(i);
        groups[root_of[i]].push_back(i);
    }
    std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) { return earlier(messages[a], messages[b]); });

    out.threads.reserve(roots.size());
    for (std::size_t r : roots) {
        auto& members = groups[r];
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (a == r || b == r) return a == r && b != r;
            return earlier(messages[a], messages[b]);
        });
        DiscussionThread t;
        t.root_id = messages[r].message_id;
        for (std::size_t i : members) {
            if (parent[i] != kNone) t.reply_edges.emplace(messages[i].message_id, messages[parent[i]].message_id);
        }
        t.members.reserve(members.size());
        for (std::size_t i : members) t.members.push_back(std::move(messages[i]));
        out.threads.push_back(std::move(t));
    }
    return out;
}

} // namespace reviewlore::corpus
