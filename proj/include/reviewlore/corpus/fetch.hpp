#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace reviewlore::corpus {

// Pulls whole-thread mbox exports from a public-inbox style archive:
// GET <base>/<message-id>/t.mbox.gz. Any failure is reported in `error`
// and leaves `mbox` empty so callers fall back to local data.
class ArchiveFetcher {
public:
    explicit ArchiveFetcher(std::string base_url, std::chrono::seconds timeout = std::chrono::seconds(30));

    struct Result {
        std::optional<std::string> mbox;  // inflated
        std::string error;
    };

    Result fetch_thread(const std::string& message_id) const;

private:
    std::string origin_;  // scheme://host[:port]
    std::string prefix_;  // path below the origin, no trailing slash
    std::chrono::seconds timeout_;
};

} // namespace reviewlore::corpus
