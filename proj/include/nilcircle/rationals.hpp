#pragma once

// Reduced rational vectors mod 1 and the Farey-type families
//
//   R_s^m       : a/q with q in [tau^s, tau^{s+1}) and gcd(a_1,...,a_m,q) = 1
//   Rtilde_Q^m  : all a/Q (canonicalized; Q^m distinct points)
//
// Sets are stored as sorted canonical representatives in [0,1)^m, so union
// and difference are plain ordered-sequence operations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilcircle/checked_int.hpp"

namespace nilcircle {

struct RationalVector {
    std::vector<long long> num;  // components in [0, den)
    long long den = 1;

    int dim() const { return static_cast<int>(num.size()); }

    double value(int i) const { return static_cast<double>(num[i]) / static_cast<double>(den); }
    std::vector<double> as_doubles() const {
        std::vector<double> v(num.size());
        for (size_t i = 0; i < num.size(); ++i) v[i] = value(static_cast<int>(i));
        return v;
    }

    // Canonical form: components folded into [0, den), joint gcd divided out.
    static RationalVector reduced(std::vector<long long> a, long long q) {
        if (q < 1) throw std::domain_error("RationalVector: denominator must be >= 1");
        for (auto& x : a) {
            x %= q;
            if (x < 0) x += q;
        }
        long long g = q;
        for (long long x : a) g = llgcd(g, x);
        if (g > 1) {
            for (auto& x : a) x /= g;
            q /= g;
        }
        return RationalVector{std::move(a), q};
    }

    friend bool operator==(const RationalVector& a, const RationalVector& b) {
        return a.den == b.den && a.num == b.num;
    }
    // Lexicographic by exact value.
    friend bool operator<(const RationalVector& a, const RationalVector& b) {
        for (int i = 0; i < a.dim() && i < b.dim(); ++i) {
            __int128 lhs = static_cast<__int128>(a.num[i]) * b.den;
            __int128 rhs = static_cast<__int128>(b.num[i]) * a.den;
            if (lhs != rhs) return lhs < rhs;
        }
        return a.dim() < b.dim();
    }
};

class RationalSet {
public:
    RationalSet() = default;
    RationalSet(int dim, std::vector<RationalVector> elems, std::string label = "")
        : dim_(dim), elems_(std::move(elems)), label_(std::move(label)) {
        std::sort(elems_.begin(), elems_.end());
        elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
    }

    int dim() const { return dim_; }
    const std::vector<RationalVector>& elements() const { return elems_; }
    size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    const std::string& label() const { return label_; }

    bool contains(const RationalVector& v) const {
        return std::binary_search(elems_.begin(), elems_.end(), v);
    }

private:
    int dim_ = 0;
    std::vector<RationalVector> elems_;
    std::string label_;
};

namespace detail {
// Integer q range covered by [tau^s, tau^{s+1}).
inline std::pair<long long, long long> farey_q_range(int s, double tau) {
    double lo = std::pow(tau, s), hi = std::pow(tau, s + 1);
    long long qlo = static_cast<long long>(std::ceil(lo - 1e-9));
    long long qhi = static_cast<long long>(std::ceil(hi - 1e-9)) - 1;
    return {qlo, qhi};
}
} // namespace detail

inline RationalSet farey_set(int m, int s, double tau) {
    if (m < 1) throw std::domain_error("farey_set: dimension must be >= 1");
    if (s < 0) throw std::domain_error("farey_set: s must be >= 0");
    auto [qlo, qhi] = detail::farey_q_range(s, tau);
    std::vector<RationalVector> out;
    for (long long q = std::max<long long>(1, qlo); q <= qhi; ++q) {
        std::vector<long long> a(m, 0);
        for (;;) {
            long long g = q;
            for (long long x : a) g = llgcd(g, x);
            if (g == 1) out.push_back(RationalVector{a, q});
            int i = 0;
            while (i < m && ++a[i] == q) a[i++] = 0;
            if (i == m) break;
        }
    }
    return RationalSet(m, std::move(out), "R_" + std::to_string(s) + "^" + std::to_string(m));
}

// Union of R_s^m over 0 <= s <= max_s.
inline RationalSet farey_union_set(int m, int max_s, double tau) {
    std::vector<RationalVector> out;
    for (int s = 0; s <= max_s; ++s) {
        auto part = farey_set(m, s, tau);
        out.insert(out.end(), part.elements().begin(), part.elements().end());
    }
    return RationalSet(m, std::move(out), "R_<=" + std::to_string(max_s) + "^" + std::to_string(m));
}

inline RationalSet fixed_denominator_set(int m, long long Q) {
    if (Q < 1) throw std::domain_error("fixed_denominator_set: Q must be >= 1");
    double count = std::pow(static_cast<double>(Q), m);
    if (count > 4e6) throw std::length_error("fixed_denominator_set: Q^m too large to enumerate");
    std::vector<RationalVector> out;
    out.reserve(static_cast<size_t>(count));
    std::vector<long long> a(m, 0);
    for (;;) {
        out.push_back(RationalVector::reduced(a, Q));
        int i = 0;
        while (i < m && ++a[i] == Q) a[i++] = 0;
        if (i == m) break;
    }
    return RationalSet(m, std::move(out), "Rtilde_" + std::to_string(Q) + "^" + std::to_string(m));
}

inline RationalSet set_union(const RationalSet& a, const RationalSet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("set_union: dimension mismatch");
    std::vector<RationalVector> out;
    std::set_union(a.elements().begin(), a.elements().end(), b.elements().begin(),
                   b.elements().end(), std::back_inserter(out));
    return RationalSet(a.dim(), std::move(out), a.label() + "+" + b.label());
}

inline RationalSet set_difference(const RationalSet& a, const RationalSet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("set_difference: dimension mismatch");
    std::vector<RationalVector> out;
    std::set_difference(a.elements().begin(), a.elements().end(), b.elements().begin(),
                        b.elements().end(), std::back_inserter(out));
    return RationalSet(a.dim(), std::move(out), a.label() + "\\" + b.label());
}

// Membership in Rtilde_Q without enumerating it: canonical denominator divides Q.
inline bool divides_denominator(const RationalVector& v, long long Q) { return Q % v.den == 0; }

inline std::vector<RationalVector> enumerate_rationals(const RationalSet& set) {
    return set.elements();
}

} // namespace nilcircle
