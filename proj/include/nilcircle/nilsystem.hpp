#pragma once

// Finite measure-preserving nilsystems and polynomial ergodic averages.
//
// A system is a finite set X with counting measure and invertible generators
// stored as permutations.  The step-two condition [[T_i,T_j],T_l] = Id is
// verified exhaustively at construction.  The canonical example is the
// quotient J_Q of G0(d) with T_i = left translation by the i-th standard
// generator.

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilcircle/cutoffs.hpp"
#include "nilcircle/expsums.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/quadrature.hpp"
#include "nilcircle/rationals.hpp"
#include "nilcircle/sparse.hpp"
#include "nilcircle/variation.hpp"

namespace nilcircle {

struct IntPolynomial {
    std::vector<long long> coeffs;  // P(n) = c[0] n + c[1] n^2 + ...; P(0) = 0

    long long eval(long long n) const {
        __int128 acc = 0, np = 1;
        for (long long c : coeffs) {
            np *= n;
            acc += static_cast<__int128>(c) * np;
        }
        if (acc > INT64_MAX || acc < INT64_MIN)
            throw std::overflow_error("IntPolynomial: value exceeds int64");
        return static_cast<long long>(acc);
    }
    int degree() const { return static_cast<int>(coeffs.size()); }

    static IntPolynomial monomial(int j) {
        IntPolynomial p;
        p.coeffs.assign(static_cast<size_t>(j), 0);
        p.coeffs.back() = 1;
        return p;
    }
};

using Permutation = std::vector<int>;

namespace detail {
inline Permutation perm_inverse(const Permutation& p) {
    Permutation inv(p.size());
    for (size_t i = 0; i < p.size(); ++i) inv[static_cast<size_t>(p[i])] = static_cast<int>(i);
    return inv;
}
// (a o b)(x) = a[b[x]]
inline Permutation perm_compose(const Permutation& a, const Permutation& b) {
    Permutation c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = a[static_cast<size_t>(b[i])];
    return c;
}
inline bool perm_is_identity(const Permutation& p) {
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] != static_cast<int>(i)) return false;
    return true;
}
inline Permutation perm_commutator(const Permutation& s, const Permutation& t) {
    return perm_compose(perm_inverse(s), perm_compose(perm_inverse(t), perm_compose(s, t)));
}
} // namespace detail

class NilSystem {
public:
    NilSystem(size_t n_points, std::vector<Permutation> generators, std::string tag = "")
        : n_(n_points), gens_(std::move(generators)), tag_(std::move(tag)) {
        for (const auto& g : gens_) {
            if (g.size() != n_) throw std::invalid_argument("NilSystem: permutation size mismatch");
            std::vector<bool> seen(n_, false);
            for (int v : g) {
                if (v < 0 || static_cast<size_t>(v) >= n_ || seen[static_cast<size_t>(v)])
                    throw std::invalid_argument("NilSystem: generator is not a permutation");
                seen[static_cast<size_t>(v)] = true;
            }
        }
        verify_step_two();
        build_cycles();
    }

    size_t size() const { return n_; }
    int n_generators() const { return static_cast<int>(gens_.size()); }
    const Permutation& generator(int i) const { return gens_.at(static_cast<size_t>(i)); }
    const std::string& tag() const { return tag_; }

    // [T_i, T_j] as a permutation.
    Permutation commutator(int i, int j) const {
        return detail::perm_commutator(gens_.at(static_cast<size_t>(i)),
                                       gens_.at(static_cast<size_t>(j)));
    }

    // T_i^e via cycle decomposition, O(|X|) for any exponent.
    Permutation power(int i, long long e) const {
        const auto& cyc = cycles_.at(static_cast<size_t>(i));
        Permutation out(n_);
        for (const auto& cycle : cyc) {
            const long long L = static_cast<long long>(cycle.size());
            long long shift = ((e % L) + L) % L;
            for (size_t j = 0; j < cycle.size(); ++j)
                out[static_cast<size_t>(cycle[j])] =
                    cycle[static_cast<size_t>((static_cast<long long>(j) + shift) % L)];
        }
        return out;
    }

    // prod_i T_i^{e_i}, composed left to right: (T_1^{e_1} ... T_k^{e_k})(x).
    Permutation word(const std::vector<long long>& exps) const {
        if (exps.size() != gens_.size())
            throw std::invalid_argument("NilSystem: exponent count mismatch");
        Permutation acc(n_);
        std::iota(acc.begin(), acc.end(), 0);
        for (size_t i = 0; i < exps.size(); ++i)
            acc = detail::perm_compose(acc, power(static_cast<int>(i), exps[i]));
        return acc;
    }

private:
    void verify_step_two() {
        const int k = n_generators();
        std::vector<Permutation> comms;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) comms.push_back(commutator(i, j));
        for (const auto& c : comms)
            for (const auto& g : gens_)
                if (!detail::perm_is_identity(detail::perm_commutator(c, g)))
                    throw std::invalid_argument("NilSystem: generators are not step-two nilpotent");
    }
    void build_cycles() {
        for (const auto& g : gens_) {
            std::vector<std::vector<int>> cyc;
            std::vector<bool> seen(n_, false);
            for (size_t s = 0; s < n_; ++s) {
                if (seen[s]) continue;
                std::vector<int> c;
                int x = static_cast<int>(s);
                while (!seen[static_cast<size_t>(x)]) {
                    seen[static_cast<size_t>(x)] = true;
                    c.push_back(x);
                    x = g[static_cast<size_t>(x)];
                }
                cyc.push_back(std::move(c));
            }
            cycles_.push_back(std::move(cyc));
        }
    }

    size_t n_;
    std::vector<Permutation> gens_;
    std::string tag_;
    std::vector<std::vector<std::vector<int>>> cycles_;
};

inline NilSystem build_cyclic(long long M) {
    if (M < 1) throw std::domain_error("build_cyclic: M >= 1");
    Permutation t(static_cast<size_t>(M));
    for (long long i = 0; i < M; ++i) t[static_cast<size_t>(i)] = static_cast<int>((i + 1) % M);
    return NilSystem(static_cast<size_t>(M), {t}, "cyclic(" + std::to_string(M) + ")");
}

// X = J_Q for G0(d); points are mixed-radix coordinate tuples base Q, and
// T_i x = (e_i * x) reduced into J_Q (coordinate-wise mod Q).
inline NilSystem build_heisenberg_quotient(int d, long long Q) {
    GroupShape shape(d);
    double total = std::pow(static_cast<double>(Q), shape.size());
    if (total > 2e6) throw std::length_error("build_heisenberg_quotient: Q^|Y_d| too large");
    const size_t n = static_cast<size_t>(total);

    auto decode = [&](size_t idx) {
        LatticeElement g(shape);
        for (int p = 0; p < shape.size(); ++p) {
            g.coords[static_cast<size_t>(p)] = Int(static_cast<long long>(idx % Q));
            idx /= static_cast<size_t>(Q);
        }
        return g;
    };
    auto encode = [&](const LatticeElement& g) {
        size_t idx = 0;
        for (int p = shape.size() - 1; p >= 0; --p)
            idx = idx * static_cast<size_t>(Q) +
                  static_cast<size_t>(floor_mod(g.coords[static_cast<size_t>(p)], Int(Q)).to_int64());
        return idx;
    };

    std::vector<Permutation> gens;
    for (int i = 1; i <= d; ++i) {
        LatticeElement ei(shape);
        ei.coords[static_cast<size_t>(i - 1)] = Int(1);
        Permutation t(n);
        for (size_t x = 0; x < n; ++x) t[x] = static_cast<int>(encode(multiply(ei, decode(x))));
        gens.push_back(std::move(t));
    }
    return NilSystem(n, std::move(gens),
                     "heisenberg_quotient(" + std::to_string(d) + "," + std::to_string(Q) + ")");
}

inline NilSystem build_custom(size_t n, std::vector<Permutation> perms) {
    return NilSystem(n, std::move(perms), "custom");
}

// ---------------------------------------------------------------------------
// Polynomial ergodic averages.
//
//   rough:    |[-N,N] cap Z|^-1 sum_{|n|<=N}  f(T_1^{P_1(n)} ... T_d^{P_d(n)} x)
//   smoothed: sum_n N^-1 chi(N^-1 n) f(...)

inline std::vector<std::complex<double>> ergodic_average(
    const NilSystem& sys, const std::vector<std::complex<double>>& f,
    const std::vector<IntPolynomial>& polys, double N, bool smoothed = false,
    const CutoffFunction& cut = CutoffFunction{CutoffKind::Chi}) {
    if (static_cast<int>(polys.size()) != sys.n_generators())
        throw std::invalid_argument("ergodic_average: one polynomial per generator");
    if (f.size() != sys.size()) throw std::invalid_argument("ergodic_average: f size mismatch");
    if (N < 1.0) throw std::domain_error("ergodic_average: N >= 1");
    const long long span = smoothed ? static_cast<long long>(std::floor(2.0 * N))
                                    : static_cast<long long>(std::floor(N));
    const double rough_w = 1.0 / static_cast<double>(2 * static_cast<long long>(std::floor(N)) + 1);
    std::vector<std::complex<double>> out(sys.size(), 0.0);
    std::vector<long long> exps(polys.size());
    for (long long n = -span; n <= span; ++n) {
        double w = smoothed ? cut(static_cast<double>(n) / N) / N : rough_w;
        if (w == 0.0) continue;
        for (size_t i = 0; i < polys.size(); ++i) exps[i] = polys[i].eval(n);
        Permutation map = sys.word(exps);
        for (size_t x = 0; x < sys.size(); ++x) out[x] += w * f[static_cast<size_t>(map[x])];
    }
    return out;
}

inline long long order_of(const Permutation& p) {
    long long ord = 1;
    std::vector<bool> seen(p.size(), false);
    for (size_t s = 0; s < p.size(); ++s) {
        if (seen[s]) continue;
        long long len = 0;
        int x = static_cast<int>(s);
        while (!seen[static_cast<size_t>(x)]) {
            seen[static_cast<size_t>(x)] = true;
            ++len;
            x = p[static_cast<size_t>(x)];
        }
        ord = std::lcm(ord, len);
    }
    return ord;
}

// prod_i T_i^{m_i} prod_j T_j^{n_j} = prod_j T_j^{m_j+n_j} prod_{i<j} S_{ji}^{m_j n_i}
// as permutations (S_{ji} = [T_j, T_i]).
inline bool commutator_identity_check(const NilSystem& sys, const std::vector<long long>& m,
                                      const std::vector<long long>& n) {
    const int k = sys.n_generators();
    if (static_cast<int>(m.size()) != k || static_cast<int>(n.size()) != k)
        throw std::invalid_argument("commutator_identity_check: exponent count mismatch");
    Permutation lhs = detail::perm_compose(sys.word(m), sys.word(n));
    std::vector<long long> sum(m.size());
    for (size_t i = 0; i < m.size(); ++i) sum[i] = m[i] + n[i];
    Permutation rhs = sys.word(sum);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < j; ++i) {
            // S_{ji}^{m_j n_i}; S has small order, reduce the exponent first.
            Permutation s = sys.commutator(j, i);
            long long ord = order_of(s);
            long long e = m[static_cast<size_t>(j)] * n[static_cast<size_t>(i)];
            long long shift = ((e % ord) + ord) % ord;
            Permutation spow(sys.size());
            std::iota(spow.begin(), spow.end(), 0);
            for (long long q = 0; q < shift; ++q) spow = detail::perm_compose(spow, s);
            rhs = detail::perm_compose(rhs, spow);
        }
    }
    return lhs == rhs;
}

// ---------------------------------------------------------------------------
// Maximal function and rho-variation across a scale list, with L^p ratios.

struct MaximalVariationResult {
    std::vector<double> sup_values;   // pointwise sup_k |A_{N_k} f|
    std::vector<double> var_values;   // pointwise V^rho(A_{N_k} f)
    double sup_lp_ratio = 0.0;        // ||sup||_p / ||f||_p
    double var_lp_ratio = 0.0;
};

inline double lp_norm(const std::vector<std::complex<double>>& v, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (auto& x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0;
    for (auto& x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}
inline double lp_norm_real(const std::vector<double>& v, double p) {
    std::vector<std::complex<double>> c(v.begin(), v.end());
    return lp_norm(c, p);
}

inline MaximalVariationResult maximal_and_variation(
    const NilSystem& sys, const std::vector<std::complex<double>>& f,
    const std::vector<IntPolynomial>& polys, const std::vector<double>& scales, double rho,
    double p = 2.0, bool smoothed = true) {
    if (scales.empty()) throw std::invalid_argument("maximal_and_variation: empty scale list");
    std::vector<std::vector<std::complex<double>>> avgs;
    for (double N : scales) avgs.push_back(ergodic_average(sys, f, polys, N, smoothed));
    MaximalVariationResult res;
    res.sup_values.assign(sys.size(), 0.0);
    res.var_values.assign(sys.size(), 0.0);
    std::vector<std::complex<double>> traj(scales.size());
    for (size_t x = 0; x < sys.size(); ++x) {
        double m = 0.0;
        for (size_t k = 0; k < scales.size(); ++k) {
            traj[k] = avgs[k][x];
            m = std::max(m, std::abs(traj[k]));
        }
        res.sup_values[x] = m;
        res.var_values[x] = variation(traj, rho);
    }
    double fn = lp_norm(f, p);
    if (fn > 0) {
        res.sup_lp_ratio = lp_norm_real(res.sup_values, p) / fn;
        res.var_lp_ratio = lp_norm_real(res.var_values, p) / fn;
    }
    return res;
}

// Same quantities for the moment-curve averages M_N on (truncated) G0.
struct MomentMaximalResult {
    SparseFunction sup_fn;
    SparseFunction var_fn;
    double sup_l2_ratio = 0.0;
    double var_l2_ratio = 0.0;
};

inline MomentMaximalResult moment_curve_maximal(const SparseFunction& f,
                                                const std::vector<double>& scales, double rho) {
    if (scales.empty()) throw std::invalid_argument("moment_curve_maximal: empty scale list");
    std::vector<SparseFunction> avgs;
    for (double N : scales) avgs.push_back(apply_average(f, AverageParams(N, f.shape())));
    // Union support.
    SparseFunction sup_fn(f.shape()), var_fn(f.shape());
    std::unordered_map<LatticeElement, std::vector<std::complex<double>>, LatticeElementHash>
        traj;
    for (size_t k = 0; k < avgs.size(); ++k)
        for (const auto& [x, v] : avgs[k].entries()) {
            auto& t = traj[x];
            t.resize(scales.size(), 0.0);
            t[k] = v;
        }
    for (auto& [x, t] : traj) {
        t.resize(scales.size(), 0.0);
        double m = 0.0;
        for (auto& v : t) m = std::max(m, std::abs(v));
        sup_fn.add(x, m);
        var_fn.add(x, variation(t, rho));
    }
    MomentMaximalResult res;
    double fn = lp_norm(f, 2.0);
    if (fn > 0) {
        res.sup_l2_ratio = lp_norm(sup_fn, 2.0) / fn;
        res.var_l2_ratio = lp_norm(var_fn, 2.0) / fn;
    }
    res.sup_fn = std::move(sup_fn);
    res.var_fn = std::move(var_fn);
    return res;
}

// ---------------------------------------------------------------------------
// Gauss-sum operator kernel on J_Q:
//
//   V_{A,B,Q}(b) = Q^{-d-d'} { sum_{s1 in A} S(s1) e(b1.s1) }
//                          { sum_{s2 in B} e(b2.s2) },
//
// for 1-periodic rational sets A (dim d) and B (dim d') with denominators
// dividing Q.  For the full sets this collapses to
// Q^{-1} #{n in Z_Q : A0(n) = b mod Q}.

inline std::complex<double> gauss_operator_kernel(const RationalSet& A, const RationalSet& B,
                                                  long long Q, const GroupShape& shape,
                                                  const LatticeElement& b) {
    const int d = shape.degree(), dp = shape.n_central();
    if (A.dim() != d || B.dim() != dp)
        throw std::invalid_argument("gauss_operator_kernel: set dimensions must be (d, d')");
    for (const auto& v : A.elements())
        if (!divides_denominator(v, Q))
            throw std::invalid_argument("gauss_operator_kernel: A not Q-compatible");
    for (const auto& v : B.elements())
        if (!divides_denominator(v, Q))
            throw std::invalid_argument("gauss_operator_kernel: B not Q-compatible");

    auto phase_dot = [&](const std::vector<Int>& x, const RationalVector& s) {
        long long res = 0;
        for (int i = 0; i < s.dim(); ++i) {
            long long xi = floor_mod(x[static_cast<size_t>(i)], Int(s.den)).to_int64();
            res = static_cast<long long>(
                (res + static_cast<__int128>(xi) * s.num[static_cast<size_t>(i)]) % s.den);
        }
        return std::polar(1.0, kTwoPi * static_cast<double>(res) / static_cast<double>(s.den));
    };

    std::vector<Int> b1 = b.noncentral(), b2 = b.central();
    std::complex<double> first = 0.0, second = 0.0;
    for (const auto& s1 : A.elements()) first += gauss_sum_complete(s1) * phase_dot(b1, s1);
    for (const auto& s2 : B.elements()) second += phase_dot(b2, s2);
    return first * second / std::pow(static_cast<double>(Q), d + dp);
}

// Counting route for the full sets (the closed form of the same kernel).
inline double gauss_operator_kernel_counting(long long Q, const GroupShape& shape,
                                             const LatticeElement& b) {
    long long count = 0;
    for (long long n = 0; n < Q; ++n) {
        LatticeElement an = moment_curve(Int(n), shape);
        bool match = true;
        for (int p = 0; p < shape.size(); ++p)
            if (!(floor_mod(an.coords[static_cast<size_t>(p)] - b.coords[static_cast<size_t>(p)],
                            Int(Q)) == Int(0))) {
                match = false;
                break;
            }
        if (match) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(Q);
}

} // namespace nilcircle
