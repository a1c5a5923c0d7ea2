#include "reviewlore/corpus/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "reviewlore/common/error.hpp"
#include "reviewlore/common/rng.hpp"
#include "reviewlore/common/text.hpp"
#include "reviewlore/corpus/patch.hpp"

namespace reviewlore::corpus {

namespace {

std::string period_key(std::int64_t epoch, StatsPeriod p) {
    if (p == StatsPeriod::All) return "all";
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds{epoch}})};
    char buf[16];
    if (p == StatsPeriod::Year) std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year()));
    else std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
    return buf;
}

// FNV-1a, used to give each period its own deterministic stream.
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool is_patch_root(const DiscussionThread& t) { return parse_patch(t.root()).has_value(); }

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

double nearest_rank_percentile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("percentile of an empty set");
    const double rank = std::ceil(p * static_cast<double>(sorted.size()));
    const std::size_t idx = rank < 1 ? 0 : static_cast<std::size_t>(rank) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
}

StatsReport corpus_stats(std::span<const DiscussionThread> threads, const StatsOptions& options) {
    std::map<std::string, std::vector<const DiscussionThread*>> by_period;
    for (const auto& t : threads) {
        if (t.members.empty()) continue;
        by_period[period_key(t.root().date, options.period)].push_back(&t);
    }

    StatsReport report;
    for (auto& [key, group] : by_period) {
        PeriodStats ps;
        ps.period = key;
        ps.total_threads = group.size();
        SeededRng rng(options.seed ^ fnv1a(key));

        std::vector<const DiscussionThread*> sampled;
        std::vector<const EmailMessage*> replies;
        if (options.unit == SamplingUnit::Thread) {
            std::size_t want = options.sample_size == 0 ? group.size() : options.sample_size;
            if (want > group.size()) {
                ps.sample_clamped = true;
                want = group.size();
            }
            for (std::size_t i : rng.sample_indices(group.size(), want)) sampled.push_back(group[i]);
            for (const auto* t : sampled)
                for (std::size_t m = 1; m < t->members.size(); ++m) replies.push_back(&t->members[m]);
        } else {
            sampled = group;
            std::vector<const EmailMessage*> all;
            for (const auto* t : group)
                for (std::size_t m = 1; m < t->members.size(); ++m) all.push_back(&t->members[m]);
            std::size_t want = options.sample_size == 0 ? all.size() : options.sample_size;
            if (want > all.size()) {
                ps.sample_clamped = true;
                want = all.size();
            }
            for (std::size_t i : rng.sample_indices(all.size(), want)) replies.push_back(all[i]);
        }
        ps.sampled_threads = sampled.size();

        std::vector<double> latencies;
        for (const auto* t : sampled) {
            if (!is_patch_root(*t)) continue;
            ++ps.patch_threads;
            if (t->reply_count() == 0) {
                ++ps.unreviewed;
                continue;
            }
            std::int64_t earliest = t->members[1].date;
            for (std::size_t m = 1; m < t->members.size(); ++m) earliest = std::min(earliest, t->members[m].date);
            latencies.push_back(static_cast<double>(earliest - t->root().date));
        }
        ps.unreviewed_fraction =
            ps.patch_threads == 0 ? 0.0 : static_cast<double>(ps.unreviewed) / static_cast<double>(ps.patch_threads);
        if (!latencies.empty()) {
            std::sort(latencies.begin(), latencies.end());
            ps.p50_latency_s = nearest_rank_percentile(latencies, 0.5);
            ps.p90_latency_s = nearest_rank_percentile(latencies, 0.9);
        }
        ps.replies = replies.size();
        for (const auto* m : replies)
            if (options.maintainers.count(text::to_lower(m->author.address))) ++ps.maintainer_replies;
        ps.maintainer_reply_fraction =
            ps.replies == 0 ? 0.0 : static_cast<double>(ps.maintainer_replies) / static_cast<double>(ps.replies);
        report.periods.push_back(std::move(ps));
    }
    return report;
}

std::string StatsReport::to_csv(const std::string& config_digest) const {
    std::string out = "# config-digest: " + config_digest + "\n";
    out += "period,total,patch_threads,unreviewed_pct,p50_latency_s,p90_latency_s,maintainer_reply_pct\n";
    for (const auto& p : periods) {
        out += text::csv_escape(p.period) + "," + std::to_string(p.total_threads) + "," +
               std::to_string(p.patch_threads) + "," + fmt_double(p.unreviewed_fraction * 100.0) + "," +
               (p.p50_latency_s ? fmt_double(*p.p50_latency_s) : std::string{}) + "," +
               (p.p90_latency_s ? fmt_double(*p.p90_latency_s) : std::string{}) + "," +
               fmt_double(p.maintainer_reply_fraction * 100.0) + "\n";
    }
    return out;
}

} // namespace reviewlore::corpus
