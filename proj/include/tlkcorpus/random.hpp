#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tlkcorpus {

/// Independent generator streams derived from one configuration seed.
enum class RandomStream : std::uint32_t {
    Balance = 1,
    Split = 2,
};

/// Seeded Mersenne Twister (mt19937_64) with its own bounded-integer and
/// shuffle routines. The engine and std::seed_seq are fully specified by the
/// standard; std::uniform_int_distribution and std::shuffle are not, so
/// neither is used here. Sequences are identical on every conforming platform.
class PortableRng {
public:
    PortableRng(std::uint64_t seed, RandomStream stream)
    {
        std::seed_seq seq { static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream) };
        engine_.seed(seq);
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound) by rejection; bound must be non-zero.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Fisher-Yates, walking from the back.
    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tlkcorpus
