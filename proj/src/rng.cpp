#include "ldv/rng.hpp"

#include <cmath>

#include "ldv/types.hpp"

namespace ldv {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

} // namespace

CounterRng::CounterRng(RandomSeed s) {
    key_[0] = static_cast<std::uint32_t>(s.seed);
    key_[1] = static_cast<std::uint32_t>(s.seed >> 32);
    stream_[0] = static_cast<std::uint32_t>(s.stream_id);
    stream_[1] = static_cast<std::uint32_t>(s.stream_id >> 32);
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t index) const {
    std::uint32_t c0 = static_cast<std::uint32_t>(index);
    std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
    std::uint32_t c2 = stream_[0];
    std::uint32_t c3 = stream_[1];
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];

    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {c0, c1, c2, c3};
}

double CounterRng::uniform(std::uint64_t index) const {
    const auto b = block(index);
    const std::uint64_t v = join64(b[0], b[1]);
    // (0, 1]: never returns 0, safe under log().
    return static_cast<double>((v >> 11) + 1) * 0x1.0p-53;
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t index) const {
    const auto b = block(index);
    const double u1 = static_cast<double>((join64(b[0], b[1]) >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(join64(b[2], b[3]) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = constants::two_pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

double CounterRng::normal(std::uint64_t index) const {
    return normal_pair(index)[0];
}

double CounterRng::exponential(std::uint64_t index) const {
    return -std::log(uniform(index));
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RandomSeed derive_stream(RandomSeed base, std::uint64_t tag) {
    return RandomSeed{base.seed, mix64(base.stream_id + 0x632BE59BD9B4E019ull * (tag + 1))};
}

} // namespace ldv
