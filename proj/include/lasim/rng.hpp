#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lasim {

// Stable 64-bit mixing/hashing used for per-run seed derivation. These are
// fixed algorithms (not std::hash) so that seeds are reproducible across
// builds and platforms.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based seed for one (agent, run, stream) cell of an experiment.
// Streams keep channel noise, agent decisions, and ACK draws independent.
enum class RngStream : std::uint64_t { channel = 1, agent = 2, ack = 3 };

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view agent_name,
                                 std::uint64_t run, RngStream stream) {
    std::uint64_t h = splitmix64(base_seed ^ fnv1a64(agent_name));
    h = splitmix64(h ^ (0x9e3779b97f4a7c15ULL * (run + 1)));
    return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace lasim
