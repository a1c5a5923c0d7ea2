#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace reviewlore {

// Platform-stable seeded generator. std::uniform_int_distribution is
// implementation-defined, so bounded draws use rejection sampling on the
// raw mt19937_64 stream instead.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    // Seeded Fisher-Yates selection of `count` distinct indices out of
    // [0, population), in selection order.
    std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count);

private:
    std::mt19937_64 engine_;
};

} // namespace reviewlore
