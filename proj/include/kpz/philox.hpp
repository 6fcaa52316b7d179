#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace kpz {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
// Stateless: each (key, counter) pair yields four independent 32-bit
// words, so noise fields index the stream by (sample, step, cell pair)
// and stay reproducible under any threading layout.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// Two standard normals from one Philox block via Box-Muller.  The
// uniforms are offset into (0,1] so the log argument never vanishes.
inline void philox_normal_pair(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index, double& n0, double& n1) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto r = Philox4x32::block(ctr, key);
    const double u1 =
        (static_cast<std::uint64_t>(r[0]) << 32 | r[1]) * 0x1.0p-64 + 0x1.0p-65;
    const double u2 =
        (static_cast<std::uint64_t>(r[2]) << 32 | r[3]) * 0x1.0p-64 + 0x1.0p-65;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    n0 = rad * std::cos(6.283185307179586476925286766559 * u2);
    n1 = rad * std::sin(6.283185307179586476925286766559 * u2);
}

} // namespace kpz
