#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace cdrb {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// xoshiro256++ generator with splitmix64 seeding. All distributions are
/// derived from the raw 64-bit stream in-repo, so sequences are identical
/// across platforms and standard-library versions.
///
/// Sub-streams: every stream is derived from the root seed plus a name and
/// up to three indices, never from generator state. Work items that own
/// their stream (demo i, batch item b, ...) therefore produce the same
/// draws whether executed serially or in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = detail::splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller; stateless (two uniforms per draw).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Derive an independent generator from the root seed and a stream name.
    Rng stream(std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0,
               std::uint64_t c = 0) const {
        std::uint64_t x = root_ ^ detail::fnv1a64(name);
        std::uint64_t h = detail::splitmix64(x);
        x ^= a + 0x9e3779b97f4a7c15ULL;
        h ^= detail::splitmix64(x);
        x ^= b + 0xa0761d6478bd642fULL;
        h ^= detail::splitmix64(x);
        x ^= c + 0xe7037ed1a0b428dbULL;
        h ^= detail::splitmix64(x);
        return Rng(h);
    }

    std::uint64_t root_seed() const { return root_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t root_;
    std::uint64_t s_[4];
};

}  // namespace cdrb
