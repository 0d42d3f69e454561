#include "plurilab/form.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace plurilab::forms {

namespace {
const Complex kI(0.0, 1.0);

Complex ipow(int k) {
    k %= 4;
    if (k < 0) k += 4;
    switch (k) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

/// det of the minor J[I,K] of a Jacobian, |I| = |K| <= 3
Complex minor_det(const HolomorphicMap& phi, std::span<const Complex> w,
                  const MultiIndex& I, const MultiIndex& K) {
    int m = I.size();
    if (m == 0) return 1.0;
    Complex a[3][3];
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) a[r][c] = phi.jacobian(w, I[r], K[c]);
    if (m == 1) return a[0][0];
    if (m == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
         - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
         + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Mixed complex second derivative d^2 f / dz_j dzbar_k by central
/// differences in the four underlying real coordinates.
Complex mixed_second(const CoefficientFn& f, std::span<const Complex> z, int j, int k, double h) {
    std::vector<Complex> p(z.begin(), z.end());
    auto eval2 = [&](int cj, double dj, int ck, double dk) {
        // cj, ck: 0 = real axis, 1 = imaginary axis (1-based coords j, k)
        Complex zj = p[size_t(j - 1)], zk = p[size_t(k - 1)];
        p[size_t(j - 1)] += (cj == 0) ? Complex(dj, 0.0) : Complex(0.0, dj);
        p[size_t(k - 1)] += (ck == 0) ? Complex(dk, 0.0) : Complex(0.0, dk);
        Complex v = f(p);
        p[size_t(j - 1)] = zj;
        p[size_t(k - 1)] = zk;
        return v;
    };
    auto second = [&](int cj, int ck) -> Complex {
        if (j == k && cj == ck) {
            Complex f0 = f(p);
            return (eval2(cj, h, ck, 0.0) - 2.0 * f0 + eval2(cj, -h, ck, 0.0)) / (h * h);
        }
        return (eval2(cj, h, ck, h) - eval2(cj, h, ck, -h) - eval2(cj, -h, ck, h) + eval2(cj, -h, ck, -h)) /
               (4.0 * h * h);
    };
    // d/dz_j = (d/dx_j - i d/dy_j)/2,  d/dzbar_k = (d/dx_k + i d/dy_k)/2
    Complex xx = second(0, 0), xy = second(0, 1), yx = second(1, 0), yy = second(1, 1);
    return 0.25 * (xx + yy + kI * (xy - yx));
}
} // namespace

double abs2(std::span<const Complex> z) {
    double s = 0.0;
    for (const auto& c : z) s += std::norm(c);
    return s;
}

double abs2_diff(std::span<const Complex> z, std::span<const Complex> w) {
    double s = 0.0;
    for (size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - w[i]);
    return s;
}

void Form::set_coefficient(const MultiIndex& I, const MultiIndex& J, CoefficientFn f) {
    if (I.size() != s_ || J.size() != t_) throw std::invalid_argument("Form: index size mismatch");
    coeffs_[{I, J}] = std::move(f);
}

void Form::add_coefficient(const MultiIndex& I, const MultiIndex& J, CoefficientFn f, Complex scale) {
    if (I.size() != s_ || J.size() != t_) throw std::invalid_argument("Form: index size mismatch");
    auto it = coeffs_.find({I, J});
    if (it == coeffs_.end()) {
        if (scale == Complex(1.0))
            coeffs_[{I, J}] = std::move(f);
        else
            coeffs_[{I, J}] = [f = std::move(f), scale](std::span<const Complex> z) { return scale * f(z); };
    } else {
        CoefficientFn prev = it->second;
        it->second = [prev, f = std::move(f), scale](std::span<const Complex> z) {
            return prev(z) + scale * f(z);
        };
    }
}

void Form::set_constant(const MultiIndex& I, const MultiIndex& J, Complex c) {
    set_coefficient(I, J, [c](std::span<const Complex>) { return c; });
}

Complex Form::raw_coefficient(const MultiIndex& I, const MultiIndex& J, std::span<const Complex> z) const {
    auto it = coeffs_.find({I, J});
    if (it == coeffs_.end()) return {0.0, 0.0};
    return it->second(z);
}

Complex Form::expansion_coefficient(const MultiIndex& I, const MultiIndex& J, std::span<const Complex> z) const {
    if (!is_qq()) throw std::logic_error("expansion_coefficient: form is not (q,q)");
    int q = s_;
    return std::pow(2.0, q) * ipow(-q * q) * raw_coefficient(I, J, z);
}

bool Form::hermitian_at(std::span<const Complex> z, double rel_tol) const {
    if (!is_qq()) return false;
    double scale = 0.0;
    auto idx = MultiIndex::all(n_, s_);
    std::vector<Complex> vals;
    for (const auto& I : idx)
        for (const auto& J : idx) {
            Complex v = expansion_coefficient(I, J, z);
            vals.push_back(v);
            scale = std::max(scale, std::abs(v));
        }
    size_t m = idx.size();
    for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < m; ++b) {
            Complex lhs = vals[a * m + b], rhs = std::conj(vals[b * m + a]);
            if (std::abs(lhs - rhs) > rel_tol * std::max(scale, 1e-300)) return false;
        }
    return true;
}

Form Form::wedge(const Form& other) const {
    if (n_ != other.n_) throw std::invalid_argument("wedge: ambient dimensions differ");
    int s = s_ + other.s_, t = t_ + other.t_;
    if (s > n_ || t > n_) throw std::invalid_argument("wedge: degree overflow");
    Form out(n_, s, t);
    // sign from moving other's dz block (size s2) past this form's dzbar block (size t1)
    double block_sign = (t_ * other.s_) % 2 == 0 ? 1.0 : -1.0;
    for (const auto& [ij1, f1] : coeffs_) {
        for (const auto& [ij2, f2] : other.coeffs_) {
            auto [I, sI] = ij1.first.merge(ij2.first);
            if (sI == 0) continue;
            auto [J, sJ] = ij1.second.merge(ij2.second);
            if (sJ == 0) continue;
            Complex sign = block_sign * double(sI * sJ);
            out.add_coefficient(I, J,
                                [g1 = f1, g2 = f2](std::span<const Complex> z) { return g1(z) * g2(z); },
                                sign);
        }
    }
    out.singular_ = singular_;
    out.singular_.insert(out.singular_.end(), other.singular_.begin(), other.singular_.end());
    return out;
}

Form Form::scaled(Complex c) const {
    Form out(n_, s_, t_);
    for (const auto& [ij, f] : coeffs_) {
        CoefficientFn fn = f;
        out.coeffs_[ij] = [fn, c](std::span<const Complex> z) { return c * fn(z); };
    }
    out.singular_ = singular_;
    return out;
}

Form Form::plus(const Form& other) const {
    if (n_ != other.n_ || s_ != other.s_ || t_ != other.t_)
        throw std::invalid_argument("plus: bidegree mismatch");
    Form out = *this;
    for (const auto& [ij, f] : other.coeffs_) out.add_coefficient(ij.first, ij.second, f);
    out.singular_.insert(out.singular_.end(), other.singular_.begin(), other.singular_.end());
    return out;
}

Complex Form::top_factor(int n) {
    Complex f = std::pow(Complex(0.0, -2.0), n);
    return ((n * (n - 1) / 2) % 2 == 0) ? f : -f;
}

Complex Form::top_density(std::span<const Complex> z) const {
    if (s_ != n_ || t_ != n_) throw std::logic_error("top_density: not a top-degree form");
    static thread_local std::map<int, MultiIndex> full_cache;
    auto it = full_cache.find(n_);
    if (it == full_cache.end()) {
        std::vector<int> v(static_cast<size_t>(n_));
        for (int i = 0; i < n_; ++i) v[size_t(i)] = i + 1;
        it = full_cache.emplace(n_, MultiIndex(v)).first;
    }
    return raw_coefficient(it->second, it->second, z) * top_factor(n_);
}

Form Form::pulled_back(const HolomorphicMap& phi, std::vector<SingularPoint> singular) const {
    if (phi.to_dim != n_) throw std::invalid_argument("pulled_back: dimension mismatch");
    int m = phi.from_dim;
    if (s_ > m || t_ > m) {
        Form out(m, std::min(s_, m), std::min(t_, m)); // pullback vanishes; keep empty form
        out.singular_ = std::move(singular);
        return out;
    }
    Form out(m, s_, t_);
    auto Ks = MultiIndex::all(m, s_);
    auto Ls = MultiIndex::all(m, t_);
    for (const auto& K : Ks) {
        for (const auto& L : Ls) {
            // capture the whole coefficient table; evaluate sum_{I,J} f_{I,J}(phi(w)) det J[I,K] conj(det J[J,L])
            auto coeffs = coeffs_; // shared by value
            CoefficientFn fn = [coeffs, phi, K, L](std::span<const Complex> w) -> Complex {
                std::vector<Complex> z(static_cast<size_t>(phi.to_dim));
                phi.apply(w, z);
                Complex acc(0.0);
                for (const auto& [ij, f] : coeffs) {
                    Complex dI = minor_det(phi, w, ij.first, K);
                    if (dI == Complex(0.0)) continue;
                    Complex dJ = minor_det(phi, w, ij.second, L);
                    if (dJ == Complex(0.0)) continue;
                    acc += f(z) * dI * std::conj(dJ);
                }
                return acc;
            };
            out.set_coefficient(K, L, std::move(fn));
        }
    }
    out.singular_ = std::move(singular);
    return out;
}

Form Form::ddc_numeric(const DdcOptions& opt) const {
    Form out(n_, s_ + 1, t_ + 1);
    if (s_ + 1 > n_ || t_ + 1 > n_) throw std::invalid_argument("ddc: degree overflow");
    double two_pi = 2.0 * std::numbers::pi;
    for (const auto& [ij, f] : coeffs_) {
        const MultiIndex I = ij.first, J = ij.second;
        const CoefficientFn fn = f;
        for (int j = 1; j <= n_; ++j) {
            if (I.contains(j)) continue;
            auto [Ip, sI] = I.insert(j);
            for (int k = 1; k <= n_; ++k) {
                if (J.contains(k)) continue;
                auto [Jp, sJ] = J.insert(k);
                // dz_j ^ dzbar_k ^ dz_I ^ dzbar_J: dzbar_k moves past |I| dz's
                double move_sign = (I.size() % 2 == 0) ? 1.0 : -1.0;
                Complex scale = (kI / two_pi) * move_sign * double(sI * sJ);
                CoefficientFn g = [fn, j, k, opt](std::span<const Complex> z) -> Complex {
                    double h = opt.rel_step * std::max(std::sqrt(abs2(z)), 1e-2);
                    Complex d = mixed_second(fn, z, j, k, h);
                    if (opt.richardson) {
                        Complex d2 = mixed_second(fn, z, j, k, 0.5 * h);
                        d = (4.0 * d2 - d) / 3.0;
                    }
                    return d;
                };
                out.add_coefficient(Ip, Jp, std::move(g), scale);
            }
        }
    }
    out.singular_ = singular_;
    return out;
}

double Form::singular_distance(std::span<const Complex> z) const {
    double d2 = std::numeric_limits<double>::infinity();
    for (const auto& s : singular_) d2 = std::min(d2, abs2_diff(z, s.where));
    return std::sqrt(d2);
}

} // namespace plurilab::forms
