#include "plurilab/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace plurilab::numerics {

namespace {
constexpr int kHaltonPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (i > 0) {
        x += f * double(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}
} // namespace

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim) {
    if (dim < 1 || dim > 8) throw std::invalid_argument("HaltonSequence: dim must be in 1..8");
    SplitMix64 g(hash_combine(seed, 0x48414c544fULL));
    shift_.resize(dim_);
    for (int d = 0; d < dim_; ++d) shift_[d] = g.next_double();
    index_ = 64; // skip the strongly correlated leading points
}

void HaltonSequence::next(std::span<double> out) {
    for (int d = 0; d < dim_; ++d) {
        double x = radical_inverse(index_, kHaltonPrimes[d]) + shift_[d];
        out[d] = x - std::floor(x);
    }
    ++index_;
}

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double RadialBump::operator()(double t) const {
    if (t <= a0 || t >= a3) return 0.0;
    if (t < a1) return smoothstep((t - a0) / (a1 - a0));
    if (t <= a2) return 1.0;
    return smoothstep((a3 - t) / (a3 - a2));
}

} // namespace plurilab::numerics
