#include "reviewlore/common/rng.hpp"

#include <limits>
#include <numeric>

#include "reviewlore/common/error.hpp"

namespace reviewlore {

std::uint64_t SeededRng::below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("SeededRng::below requires bound > 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

std::vector<std::size_t> SeededRng::sample_indices(std::size_t population, std::size_t count) {
    if (count > population) throw DomainError("sample larger than population");
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

} // namespace reviewlore
