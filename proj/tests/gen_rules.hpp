#pragma once

// Random rules with awkward content for round-trip testing.

#include <random>
#include <string>
#include <vector>

#include "reviewlore/rulegen/rule.hpp"

namespace testsupport {

inline std::vector<reviewlore::rulegen::Rule> random_rules(std::size_t n, std::uint32_t seed) {
    using namespace reviewlore::rulegen;
    std::mt19937 rng(seed);
    auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
    static const char* pieces[] = {"lock", " the ", "\"quoted\"", "\\", "\t", "caf\xc3\xa9", "\xe2\x86\x92", "\n",
                                   "{}", "[R1]", ",", "smp_mb()", "<a@b>", "  ", "\xf0\x9f\x90\xa7"};
    auto words = [&](std::size_t count) {
        std::string s = "w";
        for (std::size_t i = 0; i < count; ++i) s += pieces[pick(std::size(pieces))];
        return s;
    };
    std::vector<Rule> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::set<Source> sources;
        const std::size_t ns = 1 + pick(6);
        for (std::size_t s = 0; s < ns; ++s)
            sources.insert({"m" + std::to_string(pick(20)) + "." + std::to_string(i) + "@lists.example.org",
                            "Author " + std::to_string(pick(5)) + " <a" + std::to_string(pick(5)) + "@example.org>"});
        std::vector<std::string> history;
        for (std::size_t h = pick(3); h > 0; --h) history.push_back(words(1 + pick(6)));
        out.emplace_back(words(1 + pick(12)), pick(2) ? Category::Logic : Category::Convention, std::move(sources),
                         std::move(history));
    }
    return out;
}

} // namespace testsupport
