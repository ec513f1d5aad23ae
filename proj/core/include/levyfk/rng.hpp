#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace levyfk {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream_id); draws from distinct streams are independent and the
// sequence for a given address never depends on evaluation order, which is
// what makes parallel replicates reproducible.
class Philox4x32 {
  public:
    Philox4x32(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (have_ == 0) refill();
        const std::uint64_t lo = buf_[2 * (2 - have_)];
        const std::uint64_t hi = buf_[2 * (2 - have_) + 1];
        --have_;
        return lo | (hi << 32);
    }

    // uniform on (0,1), never exactly 0 or 1
    double uniform() {
        const std::uint64_t u = next_u64();
        return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        cached_normal_ = r * std::sin(th);
        have_normal_ = true;
        return r * std::cos(th);
    }

    // Standard symmetric alpha-stable draw with characteristic function
    // exp(-|xi|^alpha), via the Chambers-Mallows-Stuck construction.
    double stable_symmetric(double alpha) {
        if (alpha == 1.0) {
            const double v = M_PI * (uniform() - 0.5);
            return std::tan(v);
        }
        const double v = M_PI * (uniform() - 0.5);
        double w = exponential();
        while (w == 0.0) w = exponential();
        const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
        const double b = std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
        return a * b;
    }

    // One-sided rho-stable draw (rho in (0,1)) with Laplace transform
    // exp(-lambda^rho), via Kanter's construction.
    double stable_one_sided(double rho) {
        const double th = M_PI * uniform();
        double w = exponential();
        while (w == 0.0) w = exponential();
        const double a = std::pow(std::sin(rho * th), rho) *
                         std::pow(std::sin((1.0 - rho) * th), 1.0 - rho) / std::sin(th);
        // A = a^{1/(1-rho)}; Z = (A/w)^{(1-rho)/rho}
        return std::pow(a, 1.0 / rho) * std::pow(w, -(1.0 - rho) / rho);
    }

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

  private:
    static std::array<std::uint32_t, 4> single_round(const std::array<std::uint32_t, 4>& c,
                                                     const std::array<std::uint32_t, 2>& k) {
        const std::uint64_t p0 = 0xD2511F53ull * c[0];
        const std::uint64_t p1 = 0xCD9E8D57ull * c[2];
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    void refill() {
        const std::array<std::uint32_t, 4> ctr = {stream_lo_, stream_hi_,
                                                  static_cast<std::uint32_t>(block_),
                                                  static_cast<std::uint32_t>(block_ >> 32)};
        const auto out = block(ctr, key_);
        buf_ = out;
        ++block_;
        have_ = 2;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
    bool have_normal_ = false;
    double cached_normal_ = 0.0;
};

} // namespace levyfk
