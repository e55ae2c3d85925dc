#pragma once

// Counter-based random number generation. Every variate is a pure function
// of (seed value, stream, counter), so parallel workers produce identical
// samples regardless of scheduling.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace girko {

struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream = 0;
};

namespace detail {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t keyed(std::uint64_t value, std::uint64_t stream,
                           std::uint64_t ctr) {
    // two mixing rounds keyed by value/stream; counters far apart in the
    // input space decorrelate after the first round already
    std::uint64_t x = mix64(ctr + 0x632be59bd9b4e019ULL * stream);
    return mix64(x ^ mix64(value));
}

} // namespace detail

// Stateless generator addressed by a 64-bit counter.
class CounterRng {
  public:
    explicit CounterRng(Seed s) : seed_(s) {}

    std::uint64_t bits(std::uint64_t ctr) const {
        return detail::keyed(seed_.value, seed_.stream, ctr);
    }

    // uniform in (0,1); never exactly 0 or 1
    double uniform(std::uint64_t ctr) const {
        return (static_cast<double>(bits(ctr) >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard complex gaussian: E zeta = E zeta^2 = 0, E|zeta|^2 = 1
    std::complex<double> gaussian(std::uint64_t ctr) const {
        double r = std::sqrt(-std::log(uniform(2 * ctr)));
        double phi = 2.0 * std::numbers::pi * uniform(2 * ctr + 1);
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    // uniform on the 4th roots of unity: i^k, k in {0,1,2,3}
    std::complex<double> phase4(std::uint64_t ctr) const {
        switch (bits(ctr) & 3u) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }

    // uniform on the disk of radius sqrt(2), so E|zeta|^2 = 1
    std::complex<double> disk(std::uint64_t ctr) const {
        double r = std::sqrt(2.0 * uniform(2 * ctr));
        double phi = 2.0 * std::numbers::pi * uniform(2 * ctr + 1);
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    Seed seed_;
};

} // namespace girko
