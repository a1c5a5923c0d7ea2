#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "reviewlore/corpus/thread.hpp"

namespace reviewlore::corpus {

enum class StatsPeriod { Year, Month, All };
enum class SamplingUnit { Thread, Message };

struct StatsOptions {
    StatsPeriod period = StatsPeriod::Year;
    std::uint64_t seed = 0;
    // Threads (or reply messages) drawn per period; 0 takes everything.
    std::size_t sample_size = 0;
    SamplingUnit unit = SamplingUnit::Thread;
    std::set<std::string> maintainers;  // lower-cased addresses
};

struct PeriodStats {
    std::string period;
    std::size_t total_threads = 0;   // in the period, before sampling
    std::size_t sampled_threads = 0;
    bool sample_clamped = false;     // fewer threads than requested
    std::size_t patch_threads = 0;   // sampled threads whose root is a patch or cover letter
    std::size_t unreviewed = 0;      // ...of which have no reply at all
    double unreviewed_fraction = 0;
    std::optional<double> p50_latency_s;  // root to earliest reply
    std::optional<double> p90_latency_s;
    std::size_t replies = 0;
    std::size_t maintainer_replies = 0;
    double maintainer_reply_fraction = 0;

    bool operator==(const PeriodStats&) const = default;
};

struct StatsReport {
    std::vector<PeriodStats> periods;

    // Columns: period,total,patch_threads,unreviewed_pct,p50_latency_s,
    // p90_latency_s,maintainer_reply_pct, preceded by a config-digest comment.
    std::string to_csv(const std::string& config_digest) const;
    bool operator==(const StatsReport&) const = default;
};

// Nearest-rank percentile; `sorted` must be ascending and non-empty.
double nearest_rank_percentile(std::span<const double> sorted, double p);

StatsReport corpus_stats(std::span<const DiscussionThread> threads, const StatsOptions& options);

} // namespace reviewlore::corpus
