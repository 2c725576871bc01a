#pragma once

// Finitely supported complex functions on G0(d) and their convolution algebra.
//
// Supports are moment-curve-thin, so a dense array over Z^|Y_d| is hopeless;
// entries live in a hash map keyed by the coordinate vector.  Values below
// 1e-15 in modulus are pruned.  Treat a SparseFunction as immutable once
// built: every operation here returns a fresh object.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nilcircle/cutoffs.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/parallel.hpp"

namespace nilcircle {

using Complex = std::complex<double>;

inline constexpr double kSparsePruneTol = 1e-15;

class SparseFunction {
public:
    using Map = std::unordered_map<LatticeElement, Complex, LatticeElementHash>;

    SparseFunction() = default;
    explicit SparseFunction(GroupShape shape) : shape_(shape) {}

    static SparseFunction delta(const LatticeElement& g, Complex value = 1.0) {
        SparseFunction f(g.shape);
        f.add(g, value);
        return f;
    }

    const GroupShape& shape() const { return shape_; }
    size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Map& entries() const { return entries_; }

    Complex value(const LatticeElement& g) const {
        auto it = entries_.find(g);
        return it == entries_.end() ? Complex(0.0) : it->second;
    }

    void add(const LatticeElement& g, Complex v) {
        if (g.shape != shape_) throw std::invalid_argument("SparseFunction: shape mismatch");
        auto [it, inserted] = entries_.try_emplace(g, v);
        if (!inserted) it->second += v;
        if (std::abs(it->second) < kSparsePruneTol) entries_.erase(it);
    }

    // Deterministic iteration order (lexicographic coordinates).
    std::vector<std::pair<LatticeElement, Complex>> items_sorted() const {
        std::vector<std::pair<LatticeElement, Complex>> v(entries_.begin(), entries_.end());
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return LatticeElementLess{}(a.first, b.first);
        });
        return v;
    }

    SparseFunction map_values(const std::function<Complex(const LatticeElement&, Complex)>& fn) const {
        SparseFunction out(shape_);
        for (const auto& [g, v] : entries_) out.add(g, fn(g, v));
        return out;
    }

private:
    GroupShape shape_;
    Map entries_;
};

inline SparseFunction add(const SparseFunction& f, const SparseFunction& g, Complex cf = 1.0,
                          Complex cg = 1.0) {
    if (f.shape() != g.shape()) throw std::invalid_argument("add: shape mismatch");
    SparseFunction out(f.shape());
    for (const auto& [x, v] : f.entries()) out.add(x, cf * v);
    for (const auto& [x, v] : g.entries()) out.add(x, cg * v);
    return out;
}

// (f*g)(x) = sum_y f(y^-1 x) g(y); equivalently mass f(a)g(b) lands at b*a.
// Chunked over the support of f with a fixed chunk count, merged in chunk
// order, so the result does not depend on the number of worker threads.
inline SparseFunction convolve(const SparseFunction& f, const SparseFunction& g) {
    if (f.shape() != g.shape()) throw std::invalid_argument("convolve: shape mismatch");
    SparseFunction out(f.shape());
    if (f.empty() || g.empty()) return out;

    auto fa = f.items_sorted();
    auto gb = g.items_sorted();

    const long long n = static_cast<long long>(fa.size());
    const long long chunks = std::min<long long>(64, n);
    std::vector<SparseFunction::Map> partial(static_cast<size_t>(chunks));
    parallel_for(chunks, [&](long long c) {
        auto& part = partial[static_cast<size_t>(c)];
        long long lo = n * c / chunks, hi = n * (c + 1) / chunks;
        for (long long i = lo; i < hi; ++i) {
            const auto& [a, va] = fa[static_cast<size_t>(i)];
            for (const auto& [b, vb] : gb) {
                LatticeElement x = multiply(b, a);
                auto [it, inserted] = part.try_emplace(std::move(x), va * vb);
                if (!inserted) it->second += va * vb;
            }
        }
    });
    for (const auto& part : partial)
        for (const auto& [x, v] : part) out.add(x, v);
    return out;
}

// Adjoint of f -> f*K is f -> f*K^adj with K^adj(g) = conj(K(g^-1)).
inline SparseFunction adjoint_kernel(const SparseFunction& k) {
    SparseFunction out(k.shape());
    for (const auto& [g, v] : k.entries()) out.add(inverse(g), std::conj(v));
    return out;
}

inline Complex inner_product(const SparseFunction& f, const SparseFunction& g) {
    if (f.shape() != g.shape()) throw std::invalid_argument("inner_product: shape mismatch");
    Complex s = 0.0;
    const SparseFunction& small = f.support_size() <= g.support_size() ? f : g;
    const SparseFunction& large = f.support_size() <= g.support_size() ? g : f;
    for (const auto& [x, v] : small.items_sorted()) {
        Complex w = large.value(x);
        s += (&small == &f) ? v * std::conj(w) : w * std::conj(v);
    }
    return s;
}

// Counting-measure L^p norm; p = infinity gives the sup norm.
inline double lp_norm(const SparseFunction& f, double p) {
    if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& [g, v] : f.entries()) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (const auto& [g, v] : f.entries()) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

// Smoothed averaging along the moment curve at scale N >= 1:
//   M_N(f)(x) = sum_n N^-1 chi(N^-1 n) f(A0(n)^-1 x),   kernel
//   G_N(x)    = sum_n N^-1 chi(N^-1 n) 1_{A0(n)}(x).
struct AverageParams {
    double N = 1.0;
    CutoffFunction chi{CutoffKind::Chi};
    GroupShape shape;

    AverageParams(double n, GroupShape s) : N(n), shape(s) {
        if (N < 1.0) throw std::domain_error("AverageParams: N must be >= 1");
    }
    // Scale tau^k on the dyadic-like grid, tau in (1,2].
    AverageParams(double tau, int k, GroupShape s) : AverageParams(std::pow(tau, k), s) {
        if (tau <= 1.0 || tau > 2.0) throw std::domain_error("AverageParams: tau in (1,2]");
    }
};

inline SparseFunction average_kernel(const AverageParams& params) {
    SparseFunction out(params.shape);
    const long long span = static_cast<long long>(std::floor(2.0 * params.N));
    for (long long n = -span; n <= span; ++n) {
        double w = params.chi(static_cast<double>(n) / params.N) / params.N;
        if (w == 0.0) continue;
        out.add(moment_curve(Int(n), params.shape), w);
    }
    return out;
}

// Direct evaluation of M_N(f); agrees pointwise with convolve(f, average_kernel).
inline SparseFunction apply_average(const SparseFunction& f, const AverageParams& params) {
    if (f.shape() != params.shape) throw std::invalid_argument("apply_average: shape mismatch");
    SparseFunction out(params.shape);
    const long long span = static_cast<long long>(std::floor(2.0 * params.N));
    for (long long n = -span; n <= span; ++n) {
        double w = params.chi(static_cast<double>(n) / params.N) / params.N;
        if (w == 0.0) continue;
        LatticeElement an = moment_curve(Int(n), params.shape);
        for (const auto& [y, v] : f.items_sorted()) out.add(multiply(an, y), w * v);
    }
    return out;
}

// Kernel of the high-order composition S_1^* T_1 ... S_r^* T_r where
// S_j f = f * L_j and T_j f = f * K_j:
//
//   A^r(y) = sum over h_j in supp L_j, g_j in supp K_j of
//            prod_j conj(L_j(h_j)) K_j(g_j)  at  y = h_1^-1 g_1 ... h_r^-1 g_r.
//
// Enumerated recursively over the word, reusing partial products.
inline SparseFunction ttstar_kernel(const std::vector<SparseFunction>& Ls,
                                    const std::vector<SparseFunction>& Ks) {
    if (Ls.empty() || Ks.empty() || Ls.size() != Ks.size())
        throw std::invalid_argument("ttstar_kernel: need r matching kernel pairs");
    const size_t r = Ls.size();
    const GroupShape shape = Ls[0].shape();
    for (const auto& k : Ls)
        if (k.shape() != shape) throw std::invalid_argument("ttstar_kernel: shape mismatch");
    for (const auto& k : Ks)
        if (k.shape() != shape) throw std::invalid_argument("ttstar_kernel: shape mismatch");

    std::vector<std::vector<std::pair<LatticeElement, Complex>>> ls, ks;
    for (const auto& f : Ls) ls.push_back(f.items_sorted());
    for (const auto& f : Ks) ks.push_back(f.items_sorted());

    SparseFunction out(shape);
    std::function<void(size_t, const LatticeElement&, Complex)> walk =
        [&](size_t j, const LatticeElement& word, Complex weight) {
            if (j == r) {
                out.add(word, weight);
                return;
            }
            for (const auto& [h, lv] : ls[j]) {
                LatticeElement w1 = multiply(word, inverse(h));
                Complex c1 = weight * std::conj(lv);
                for (const auto& [g, kv] : ks[j])
                    walk(j + 1, multiply(w1, g), c1 * kv);
            }
        };
    walk(0, LatticeElement(shape), Complex(1.0));
    return out;
}

} // namespace nilcircle
