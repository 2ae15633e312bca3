#pragma once

#include <array>
#include <cstdint>

namespace levybridge {

// splitmix64: seed expansion / child-stream derivation. Passing the same
// state always yields the same sequence on every platform.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Child-stream derivation used everywhere a root seed fans out into
// parallel streams (blocks, chains): splitmix64(seed + (index+1) * golden).
std::uint64_t derive_child_seed(std::uint64_t seed, std::uint64_t index);

// xoshiro256** seeded through splitmix64. All distributions below are
// hand-rolled from uniform bits so that output streams are bit-identical
// across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // child stream i: reseed through splitmix64 from (root seed, i).
    // Documented split function: child_seed = splitmix64(seed + (i+1)*GOLDEN).
    Rng split(std::uint64_t child_index) const;

    double uniform01();                    // [0, 1), 53-bit resolution
    double uniform_open01();               // (0, 1]
    double uniform(double a, double b);    // [a, b)
    double exponential(double rate);       // inverse CDF
    double normal();                       // Marsaglia polar
    double gamma(double shape);            // Marsaglia-Tsang, unit scale
    long poisson(double mean);             // exponential inter-arrival counting
    std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}

    // UniformRandomBitGenerator interface
    using result_type = std::uint64_t;
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }
    std::uint64_t operator()() { return next_u64(); }

private:
    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace levybridge
