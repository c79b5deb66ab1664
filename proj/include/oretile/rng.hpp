#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace oretile {

// Portable draws: libstdc++ and libc++ distributions differ, plain modulo does not.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

// uniform in [lo, hi]
inline long long draw_between(std::mt19937_64& rng, long long lo, long long hi)
{
    return lo + static_cast<long long>(draw_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

template <class Vec>
void portable_shuffle(Vec& v, std::mt19937_64& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[draw_below(rng, i)]);
}

} // namespace oretile
