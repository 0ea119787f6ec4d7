#pragma once

#include <cstdint>
#include <random>

namespace sdgeom {

// std::mt19937_64 is fully specified by the standard; the standard
// distributions are not, so doubles are formed from the raw 53 high bits to
// keep fuzz runs identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // (0, hi]
    double uniform_open_low(double hi) { return hi * (1.0 - uniform()); }
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace sdgeom
