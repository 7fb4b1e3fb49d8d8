#pragma once

#include <cstdint>
#include <random>

namespace sparselab {

// Deterministic random numbers. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); all mappings from raw 64-bit words to
// doubles/integers are implemented here so that identical seeds give
// bit-identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; two draws per pair, one cached.
    double normal();

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Stream-splitting seed derivation (splitmix64 finalizer). Used to give each
// generated object (matrix, signal, noise, ...) its own independent stream
// from one trial seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace sparselab
