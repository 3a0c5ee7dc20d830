#include "svp/rng.hpp"

#include <cmath>

namespace svp {

namespace {

constexpr std::uint32_t PHILOX_M0 = 0xD2511F53u;
constexpr std::uint32_t PHILOX_M1 = 0xCD9E8D57u;
constexpr std::uint32_t PHILOX_W0 = 0x9E3779B9u; // golden ratio
constexpr std::uint32_t PHILOX_W1 = 0xBB67AE85u; // sqrt(3) - 1

inline void round_once(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2, std::uint32_t& c3,
                       std::uint32_t k0, std::uint32_t k1) noexcept {
    std::uint64_t p0 = static_cast<std::uint64_t>(PHILOX_M0) * c0;
    std::uint64_t p1 = static_cast<std::uint64_t>(PHILOX_M1) * c2;
    std::uint32_t h0 = static_cast<std::uint32_t>(p0 >> 32), l0 = static_cast<std::uint32_t>(p0);
    std::uint32_t h1 = static_cast<std::uint32_t>(p1 >> 32), l1 = static_cast<std::uint32_t>(p1);
    std::uint32_t n0 = h1 ^ c1 ^ k0;
    std::uint32_t n1 = l1;
    std::uint32_t n2 = h0 ^ c3 ^ k1;
    std::uint32_t n3 = l0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32::block(std::uint64_t ctr_hi, std::uint64_t ctr_lo) const noexcept {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = k0_, k1 = k1_;
    for (int r = 0; r < 10; ++r) {
        round_once(c0, c1, c2, c3, k0, k1);
        k0 += PHILOX_W0;
        k1 += PHILOX_W1;
    }
    return {c0, c1, c2, c3};
}

std::uint32_t rng_stream::next_u32() noexcept {
    if (have_ == 0) {
        buf_ = eng_.block(hi_, lo_++);
        have_ = 4;
    }
    return buf_[4 - have_--];
}

std::uint64_t rng_stream::next_u64() noexcept {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double rng_stream::next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double rng_stream::next_gaussian() noexcept {
    double u1;
    do {
        u1 = next_unit();
    } while (u1 == 0.0);
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double rng_stream::next_gaussian_truncated(double bound) {
    require(bound > 0.0, errc::non_positive_input, "truncation bound must be positive");
    for (;;) {
        double z = next_gaussian();
        if (std::fabs(z) <= bound) return z;
    }
}

bool rng_stream::next_bernoulli(double p) {
    require(p >= 0.0 && p <= 1.0, errc::bad_spec, "bernoulli probability outside [0,1]");
    return next_unit() < p;
}

std::uint64_t rng_stream::next_below(std::uint64_t n) {
    require(n > 0, errc::non_positive_input, "next_below needs n > 0");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % n;
    }
}

} // namespace svp
