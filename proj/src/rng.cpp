#include "gafzero/rng.hpp"

#include <cmath>

namespace gafzero {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index) {
    // Mix seed and stream index into one key, then expand to 256 bits.
    std::uint64_t key = seed;
    (void)splitmix64(key);
    key ^= 0x6a09e667f3bcc909ULL + stream_index * 0xd1342543de82ef95ULL;
    for (auto& w : s_) w = splitmix64(key);
}

std::uint64_t RandomStream::next_u64() {
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

double RandomStream::next_uniform() {
    // 53-bit mantissa, then nudge away from 0.
    const double u = double(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-54;
}

std::complex<double> RandomStream::next_complex_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double rho = std::sqrt(-std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    return {rho * std::cos(ang), rho * std::sin(ang)};
}

}  // namespace gafzero
