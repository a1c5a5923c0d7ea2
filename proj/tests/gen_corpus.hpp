#pragma once

// Synthetic mailing-list archive with known thread structure and diffs.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct GeneratedHunk {
    std::string path;
    int adds = 0;
    int removes = 0;
};

struct GeneratedCorpus {
    std::string mbox;
    std::size_t messages = 0;
    std::size_t expected_threads = 0;
    std::map<std::string, std::string> root_of;                      // message id -> thread root id
    std::map<std::string, std::vector<GeneratedHunk>> patches;       // root id -> hunks
};

inline std::string gen_date(std::int64_t t) {
    static const char* days[] = {"Thu", "Fri", "Sat", "Sun", "Mon", "Tue", "Wed"};
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    std::int64_t z = t / 86400 + 719468;
    const std::int64_t era = z / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    const std::int64_t sod = t % 86400;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d +0000", days[(t / 86400) % 7],
                  static_cast<int>(d), months[m - 1], static_cast<int>(y), static_cast<int>(sod / 3600),
                  static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
    return buf;
}

inline GeneratedCorpus generate_corpus(std::size_t n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
    static const char* names[] = {"Wei Lin", "Ravi Kumar", "Maya Chen", "Tom Berg", "Jonas Weber", "Ana Silva"};

    GeneratedCorpus g;
    g.messages = n;
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> refs;  // ancestry chain per message
    std::int64_t t = 1600000000;
    for (std::size_t i = 0; i < n; ++i) {
        t += 30 + static_cast<std::int64_t>(pick(600));
        const std::string id = "g" + std::to_string(i) + "." + std::to_string(seed) + "@gen.example.org";
        const std::string who = names[pick(6)];
        std::string addr = who;
        for (auto& c : addr) c = c == ' ' ? '.' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        addr += "@example.org";

        std::vector<std::string> chain;
        bool root = ids.empty() || chance(0.3);
        bool orphan = false;
        if (!root) {
            if (chance(0.03)) {
                orphan = true;  // parent never made it into the archive
                chain = {"lost" + std::to_string(i) + "@gen.example.org"};
            } else {
                const std::size_t p = ids.size() - 1 - pick(std::min<std::size_t>(ids.size(), 40));
                chain = refs[p];
                chain.push_back(ids[p]);
            }
        }
        std::string root_id = id;
        if (!root && !orphan) root_id = g.root_of.at(chain.back());
        if (root || orphan) ++g.expected_threads;
        g.root_of[id] = root_id;

        std::string m = "From " + addr + " Mon Jan  1 00:00:00 2001\n";
        m += "From: " + who + " <" + addr + ">\n";
        m += "Date: " + gen_date(t) + "\n";
        m += "Message-ID: <" + id + ">\n";
        if (!chain.empty()) {
            m += "In-Reply-To: <" + chain.back() + ">\n";
            m += "References:";
            for (const auto& r : chain) m += " <" + r + ">";
            m += "\n";
        }
        const bool patch = root && chance(0.5);
        m += std::string("Subject: ") + (root ? "" : "Re: ") + (patch ? "[PATCH] " : "") + "topic " +
             std::to_string(i) + "\n";
        m += "Content-Type: text/plain; charset=utf-8\n\n";
        if (patch) {
            m += "Change " + std::to_string(i) + ".\n\nSigned-off-by: " + who + " <" + addr + ">\n---\n";
            std::vector<GeneratedHunk> hunks;
            const std::size_t files = 1 + pick(3);
            for (std::size_t f = 0; f < files; ++f) {
                const std::string path = "dir" + std::to_string(pick(5)) + "/file" + std::to_string(f) + ".c";
                m += "diff --git a/" + path + " b/" + path + "\n--- a/" + path + "\n+++ b/" + path + "\n";
                int line = 1 + static_cast<int>(pick(50));
                const std::size_t nh = 1 + pick(3);
                for (std::size_t h = 0; h < nh; ++h) {
                    GeneratedHunk gh{path, 0, 0};
                    std::string lines;
                    int ctx = 0;
                    const std::size_t len = 1 + pick(8);
                    for (std::size_t l = 0; l < len; ++l) {
                        switch (pick(3)) {
                        case 0: lines += " \tctx_" + std::to_string(l) + "();\n"; ++ctx; break;
                        case 1: lines += "+\tadded_" + std::to_string(l) + "();\n"; ++gh.adds; break;
                        default: lines += "-\tremoved_" + std::to_string(l) + "();\n"; ++gh.removes; break;
                        }
                    }
                    m += "@@ -" + std::to_string(line) + "," + std::to_string(ctx + gh.removes) + " +" +
                         std::to_string(line) + "," + std::to_string(ctx + gh.adds) + " @@ int f(void)\n" + lines;
                    line += 20 + ctx + gh.removes;
                    hunks.push_back(gh);
                }
            }
            g.patches[id] = std::move(hunks);
        } else {
            m += "Message " + std::to_string(i) + " body.\n> quoted text\n";
        }
        m += "\n";
        g.mbox += m;
        ids.push_back(id);
        refs.push_back(std::move(chain));
    }
    return g;
}

} // namespace testsupport
