#pragma once

#include <cstdint>
#include <random>

namespace latept {

// splitmix64 step; used only to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a single 64-bit stream seed from (master, key1, key2). Distinct key
// pairs give unrelated seeds, so replicas can run in any order or thread and
// still produce identical per-replica output.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key1, std::uint64_t key2) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= splitmix64(s) + key1;
    (void)splitmix64(s);
    s ^= splitmix64(s) + key2;
    return splitmix64(s);
}

// A full-width generator seeded through seed_seq so that all 64 state words
// differ between streams, not just the first.
inline std::mt19937_64 seeded_stream(std::uint64_t master, std::uint64_t key1, std::uint64_t key2) {
    std::uint64_t s = derive_seed(master, key1, key2);
    std::uint64_t w0 = splitmix64(s), w1 = splitmix64(s), w2 = splitmix64(s), w3 = splitmix64(s);
    std::seed_seq seq{
        static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
        static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
        static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
        static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
    return std::mt19937_64(seq);
}

} // namespace latept
