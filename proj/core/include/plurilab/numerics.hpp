#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace plurilab::numerics {

using Complex = std::complex<double>;

/// Kahan-Babuska compensated accumulator. Accumulation order is the caller's
/// responsibility; summing in a fixed order keeps results bit-reproducible.
class KahanSum {
public:
    KahanSum() = default;
    explicit KahanSum(double init) : sum_(init) {}

    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    KahanSum& operator+=(double x) { add(x); return *this; }

    double get() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Compensated accumulator for complex values (componentwise Kahan).
class KahanSumComplex {
public:
    void add(Complex x) { re_.add(x.real()); im_.add(x.imag()); }
    KahanSumComplex& operator+=(Complex x) { add(x); return *this; }
    Complex get() const { return {re_.get(), im_.get()}; }

private:
    KahanSum re_, im_;
};

/// A scalar measurement with a (one-sigma-like) error bar.
struct ValueWithError {
    double value = 0.0;
    double error = 0.0;

    ValueWithError operator+(const ValueWithError& o) const { return {value + o.value, error + o.error}; }
    ValueWithError operator-(const ValueWithError& o) const { return {value - o.value, error + o.error}; }
    ValueWithError scaled(double c) const { return {c * value, std::abs(c) * error}; }
};

/// splitmix64: tiny deterministic generator used for seed derivation and
/// Cranley-Patterson shifts. Stable across platforms, unlike std:: engines.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// uniform in [0,1)
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }
    /// standard normal (Box-Muller, consumes two uniforms)
    double next_normal() {
        double u1 = next_double(), u2 = next_double();
        u1 = std::max(u1, 0x1.0p-60);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    return g.next();
}

/// Halton sequence in up to 8 dimensions with a per-dimension random shift
/// (Cranley-Patterson rotation). Deterministic for a given seed.
class HaltonSequence {
public:
    HaltonSequence(int dim, std::uint64_t seed);

    /// Fills out[0..dim) with the next point in [0,1)^dim.
    void next(std::span<double> out);

private:
    int dim_;
    std::uint64_t index_ = 0;
    std::vector<double> shift_;
};

/// C^2 smoothstep: 6x^5-15x^4+10x^3 on [0,1], clamped outside.
double smoothstep(double x);

/// Radial plateau bump: rises smoothly on [a0,a1], equals 1 on [a1,a2],
/// falls on [a2,a3]. C^2, compactly supported in [a0,a3].
struct RadialBump {
    double a0, a1, a2, a3;
    double operator()(double t) const;
};

} // namespace plurilab::numerics
