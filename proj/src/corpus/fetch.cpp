#include "reviewlore/corpus/fetch.hpp"

#include <httplib.h>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/gzip.hpp"
#include "reviewlore/common/text.hpp"

namespace reviewlore::corpus {

ArchiveFetcher::ArchiveFetcher(std::string base_url, std::chrono::seconds timeout) : timeout_(timeout) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("archive URL needs a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? std::string{} : base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

ArchiveFetcher::Result ArchiveFetcher::fetch_thread(const std::string& message_id) const {
    Result r;
    try {
        httplib::Client cli(origin_);
        cli.set_connection_timeout(timeout_);
        cli.set_read_timeout(timeout_);
        cli.set_follow_location(true);
        const std::string path = prefix_ + "/" + text::percent_encode(message_id) + "/t.mbox.gz";
        auto res = cli.Get(path);
        if (!res) {
            r.error = "request failed: " + httplib::to_string(res.error());
            return r;
        }
        if (res->status != 200) {
            r.error = "HTTP " + std::to_string(res->status) + " for " + path;
            return r;
        }
        r.mbox = looks_gzipped(res->body) ? gunzip(res->body) : res->body;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

} // namespace reviewlore::corpus
