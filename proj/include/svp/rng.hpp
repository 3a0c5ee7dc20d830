#pragma once

#include <array>
#include <cstdint>

#include "svp/error.hpp"

namespace svp {

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (key, counter), so random streams can be sliced by purpose/trial/entry and
// consumed in any order or from any thread with identical results. This is
// what makes every artifact byte-reproducible from one master seed.
class philox4x32 {
public:
    explicit philox4x32(std::uint64_t key) noexcept
        : k0_(static_cast<std::uint32_t>(key)), k1_(static_cast<std::uint32_t>(key >> 32)) {}

    std::array<std::uint32_t, 4> block(std::uint64_t ctr_hi, std::uint64_t ctr_lo) const noexcept;

private:
    std::uint32_t k0_, k1_;
};

// Stream identifier layout: purpose (8 bits) | trial (24 bits) | entry (32
// bits). It forms the high counter word; the low word counts draws within
// the stream.
enum class rng_purpose : std::uint32_t {
    noise_entry = 1,
    clique_placement = 2,
    observe_mask = 3,
    vertex_shuffle = 4,
    graph_edge = 5,
    corruption_entry = 6,
    signal_entry = 7,
    facts_instance = 8,
};

constexpr std::uint64_t stream_id(rng_purpose purpose, std::uint32_t trial, std::uint32_t entry) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(purpose) & 0xffu) << 56) |
           (static_cast<std::uint64_t>(trial & 0xffffffu) << 32) | entry;
}

// Sequential view over one (key, stream) lane.
class rng_stream {
public:
    rng_stream(std::uint64_t key, std::uint64_t stream) noexcept
        : eng_(key), hi_(stream), lo_(0), have_(0) {}

    rng_stream(std::uint64_t key, rng_purpose purpose, std::uint32_t trial, std::uint32_t entry) noexcept
        : rng_stream(key, stream_id(purpose, trial, entry)) {}

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double next_unit() noexcept;

    // Standard normal via Box-Muller (cosine branch only; the unused sine
    // value is discarded to keep the draw count schedule-independent).
    double next_gaussian() noexcept;

    // Standard normal conditioned on |z| <= bound, by rejection-resampling.
    double next_gaussian_truncated(double bound);

    bool next_bernoulli(double p);

    // Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n);

private:
    philox4x32 eng_;
    std::uint64_t hi_, lo_;
    std::array<std::uint32_t, 4> buf_{};
    int have_;
};

} // namespace svp
