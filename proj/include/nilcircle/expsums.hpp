#pragma once

// Exponential sums: classical Weyl sums, complete Gauss sums S(a/q), the
// nilpotent word sums S_{P,r} and their arithmetic coefficients G(a/q), and
// a log-log decay fitter for scan experiments.
//
// Phases at rational points are reduced mod q in exact integer arithmetic
// before a single complex exponential per term; summing raw floating-point
// phases drifts badly once the monomials exceed 2^40 or so.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nilcircle/checked_int.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/rationals.hpp"

namespace nilcircle {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(-2 pi i m / q) lookup table for m in [0, q).
inline std::vector<std::complex<double>> neg_root_table(long long q) {
    std::vector<std::complex<double>> t(static_cast<size_t>(q));
    for (long long m = 0; m < q; ++m)
        t[static_cast<size_t>(m)] =
            std::polar(1.0, -kTwoPi * static_cast<double>(m) / static_cast<double>(q));
    return t;
}

inline long long pow_mod(long long base, int e, long long q) {
    base %= q;
    if (base < 0) base += q;
    long long r = 1;
    for (int i = 0; i < e; ++i) r = static_cast<long long>((static_cast<__int128>(r) * base) % q);
    return r;
}

// ---------------------------------------------------------------------------
// Classical Weyl sum: sum_n phi(n) e(-(theta_1 n + ... + theta_d n^d)),
// truncated to |n| <= 2P.  Real phases accumulate in long double mod 1.
inline std::complex<double> weyl_sum(const std::function<double(double)>& phi, double P,
                                     const std::vector<double>& theta) {
    if (P < 1.0) throw std::domain_error("weyl_sum: P must be >= 1");
    const int d = static_cast<int>(theta.size());
    const long long span = static_cast<long long>(std::floor(2.0 * P));
    std::complex<double> s = 0.0;
    for (long long n = -span; n <= span; ++n) {
        double w = phi(static_cast<double>(n));
        if (w == 0.0) continue;
        long double phase = 0.0L;
        long double npow = 1.0L;
        for (int l = 1; l <= d; ++l) {
            npow *= static_cast<long double>(n);
            phase += std::fmod(static_cast<long double>(theta[l - 1]) * npow, 1.0L);
        }
        phase = std::fmod(phase, 1.0L);
        s += w * std::polar(1.0, -kTwoPi * static_cast<double>(phase));
    }
    return s;
}

// Same sum at an exact rational phase vector a/q.
inline std::complex<double> weyl_sum_rational(const std::function<double(double)>& phi, double P,
                                              const RationalVector& a) {
    if (P < 1.0) throw std::domain_error("weyl_sum: P must be >= 1");
    const int d = a.dim();
    const long long q = a.den;
    auto roots = neg_root_table(q);
    const long long span = static_cast<long long>(std::floor(2.0 * P));
    std::complex<double> s = 0.0;
    for (long long n = -span; n <= span; ++n) {
        double w = phi(static_cast<double>(n));
        if (w == 0.0) continue;
        long long m = 0;
        for (int l = 1; l <= d; ++l)
            m = (m + static_cast<long long>(
                         (static_cast<__int128>(a.num[l - 1]) * pow_mod(n, l, q)) % q)) % q;
        s += w * roots[static_cast<size_t>(m)];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Complete normalized Gauss sum S(a/q) = q^-1 sum_{n mod q} e(-A0(n).a/q)
// with A0(n).a/q = (a_1 n + a_2 n^2 + ... + a_d n^d)/q.
inline std::complex<double> gauss_sum_complete(const RationalVector& a) {
    const long long q = a.den;
    if (q < 1) throw std::domain_error("gauss_sum_complete: q must be >= 1");
    const int d = a.dim();
    auto roots = neg_root_table(q);
    std::complex<double> s = 0.0;
    for (long long n = 0; n < q; ++n) {
        long long m = 0;
        long long npow = 1;
        for (int l = 1; l <= d; ++l) {
            npow = static_cast<long long>((static_cast<__int128>(npow) * n) % q);
            m = (m + static_cast<long long>((static_cast<__int128>(a.num[l - 1]) * npow) % q)) % q;
        }
        s += roots[static_cast<size_t>(m)];
    }
    return s / static_cast<double>(q);
}

// ---------------------------------------------------------------------------
// Nilpotent word sums.  Both S_{P,r}(theta) and G(a/q) share the same phase
// structure: with diff_l(v,w) = w^l - v^l (D) or v^l - w^l (DTilde),
//
//   D(v,w).theta = sum_l theta_{l,0} sum_j diff_l(v_j,w_j)
//     + sum_{(l1,l2), l2>=1} theta_{l1,l2} [ sum_{j1<j2} diff_{l1}(j1) diff_{l2}(j2)
//                                            + sum_j diag_{l1,l2}(v_j,w_j) ],
//
// with diag = v^{l1+l2} - v^{l1} w^{l2} (D) or w^{l1+l2} - v^{l1} w^{l2}
// (DTilde).  The cross terms factor through the running prefix sums
// U^{(l1)} = sum_{j'<j} diff_{l1}, which is what drives the layered DP: the
// amplitude of all prefixes sharing a prefix-sum vector U can be merged,
// because every future phase term depends on the past only through U.

namespace detail {

struct WordPhaseTheta {
    // theta indexed in GroupShape order.
    const GroupShape* shape;
    const std::vector<double>* theta;
    WordVariant variant;

    long double step_phase(const std::vector<long long>& U, long long v, long long w) const {
        const int d = shape->degree();
        auto diff = [&](int l) -> long double {
            long double wp = 1.0L, vp = 1.0L;
            for (int i = 0; i < l; ++i) { wp *= w; vp *= v; }
            return variant == WordVariant::D ? wp - vp : vp - wp;
        };
        auto powl = [&](long long b, int e) -> long double {
            long double r = 1.0L;
            for (int i = 0; i < e; ++i) r *= b;
            return r;
        };
        long double phase = 0.0L;
        for (int l = 1; l <= d; ++l)
            phase += std::fmod((*theta)[l - 1] * diff(l), 1.0L);
        int p = d;
        for (int l1 = 2; l1 <= d; ++l1) {
            for (int l2 = 1; l2 < l1; ++l2, ++p) {
                long double cross = static_cast<long double>(U[l1 - 2]) * diff(l2);
                long double diag = variant == WordVariant::D
                                       ? powl(v, l1 + l2) - powl(v, l1) * powl(w, l2)
                                       : powl(w, l1 + l2) - powl(v, l1) * powl(w, l2);
                phase += std::fmod((*theta)[p] * (cross + diag), 1.0L);
            }
        }
        return std::fmod(phase, 1.0L);
    }
};

struct VecHash {
    size_t operator()(const std::vector<long long>& v) const {
        size_t h = 1469598103934665603ull;
        for (long long x : v) {
            h ^= static_cast<size_t>(x) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace detail

// S_{P,r}(theta) = sum_{n,m in Z^r} e(-D(n,m).theta) prod_j phi(n_j) psi(m_j).
// method "brute": direct enumeration over all 2r-tuples (rejected when the
// count exceeds ~1e8); method "dp": layered prefix-sum DP, complexity
// r * #states * window^2.
enum class SumMethod { Brute, DP };

inline std::complex<double> nil_weyl_sum(double P, int r, const std::vector<double>& theta,
                                         WordVariant variant, const GroupShape& shape,
                                         const std::function<double(double)>& phi,
                                         const std::function<double(double)>& psi,
                                         SumMethod method = SumMethod::DP) {
    if (P < 1.0) throw std::domain_error("nil_weyl_sum: P must be >= 1");
    if (r < 1) throw std::domain_error("nil_weyl_sum: r must be >= 1");
    if (static_cast<int>(theta.size()) != shape.size())
        throw std::invalid_argument("nil_weyl_sum: theta must be indexed by Y_d");
    const long long span = static_cast<long long>(std::floor(2.0 * P));
    const long long window = 2 * span + 1;
    const int d = shape.degree();
    detail::WordPhaseTheta ph{&shape, &theta, variant};

    if (method == SumMethod::Brute) {
        double count = std::pow(static_cast<double>(window), 2 * r);
        if (count > 1e8)
            throw std::length_error("nil_weyl_sum: brute enumeration infeasible, use DP");
        // Recursive enumeration tracking prefix sums exactly like the DP does.
        std::complex<double> total = 0.0;
        std::vector<long long> U(static_cast<size_t>(std::max(0, d - 1)), 0);
        std::function<void(int, long double, double)> rec = [&](int j, long double phase,
                                                                double weight) {
            if (j == r) {
                total += weight * std::polar(1.0, -kTwoPi * static_cast<double>(
                                                        std::fmod(phase, 1.0L)));
                return;
            }
            for (long long v = -span; v <= span; ++v) {
                double wv = phi(static_cast<double>(v));
                if (wv == 0.0) continue;
                for (long long w = -span; w <= span; ++w) {
                    double ww = psi(static_cast<double>(w));
                    if (ww == 0.0) continue;
                    long double step = ph.step_phase(U, v, w);
                    std::vector<long long> saved = U;
                    for (int l1 = 2; l1 <= d; ++l1) {
                        long long wp = 1, vp = 1;
                        for (int i = 0; i < l1; ++i) { wp *= w; vp *= v; }
                        U[l1 - 2] += variant == WordVariant::D ? wp - vp : vp - wp;
                    }
                    rec(j + 1, phase + step, weight * wv * ww);
                    U = saved;
                }
            }
        };
        rec(0, 0.0L, 1.0);
        return total;
    }

    // DP over prefix-sum states.
    using State = std::vector<long long>;
    std::unordered_map<State, std::complex<double>, detail::VecHash> cur;
    cur[State(static_cast<size_t>(std::max(0, d - 1)), 0)] = 1.0;
    for (int j = 0; j < r; ++j) {
        std::unordered_map<State, std::complex<double>, detail::VecHash> next;
        for (const auto& [U, amp] : cur) {
            for (long long v = -span; v <= span; ++v) {
                double wv = phi(static_cast<double>(v));
                if (wv == 0.0) continue;
                for (long long w = -span; w <= span; ++w) {
                    double ww = psi(static_cast<double>(w));
                    if (ww == 0.0) continue;
                    long double step = ph.step_phase(U, v, w);
                    State nu = U;
                    for (int l1 = 2; l1 <= d; ++l1) {
                        long long wp = 1, vp = 1;
                        for (int i = 0; i < l1; ++i) { wp *= w; vp *= v; }
                        nu[l1 - 2] += variant == WordVariant::D ? wp - vp : vp - wp;
                    }
                    next[std::move(nu)] +=
                        amp * wv * ww *
                        std::polar(1.0, -kTwoPi * static_cast<double>(step));
                }
            }
        }
        cur = std::move(next);
    }
    std::complex<double> total = 0.0;
    for (const auto& [U, amp] : cur) total += amp;
    return total;
}

// G(a/q) = q^{-2r} sum_{v,w in Z_q^r} e(-D(v,w).a/q),  |G| <= 1 always.
// The DP state is the prefix-sum vector reduced mod q (only the powers l1
// that appear as a first index with l2 >= 1 are needed), giving
// O(r q^{d+1}) instead of q^{2r}.
inline std::complex<double> nil_gauss_sum(const RationalVector& a, int r, WordVariant variant,
                                          const GroupShape& shape,
                                          SumMethod method = SumMethod::DP) {
    if (r < 1) throw std::domain_error("nil_gauss_sum: r must be >= 1");
    if (a.dim() != shape.size())
        throw std::invalid_argument("nil_gauss_sum: phase must be indexed by Y_d");
    const long long q = a.den;
    const int d = shape.degree();
    auto roots = neg_root_table(q);

    auto modq = [&](long long x) {
        long long m = x % q;
        return m < 0 ? m + q : m;
    };
    // diff/diag tables per (v,w) pair, all mod q.
    struct Pair {
        std::vector<long long> delta;  // prefix-sum increments for powers 2..d
        long long base;                // non-central + diagonal phase
        std::vector<long long> cross;  // coefficient of U^{(l1)} per power l1
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<size_t>(q * q));
    for (long long v = 0; v < q; ++v) {
        for (long long w = 0; w < q; ++w) {
            Pair pr;
            pr.delta.assign(static_cast<size_t>(std::max(0, d - 1)), 0);
            pr.cross.assign(static_cast<size_t>(std::max(0, d - 1)), 0);
            auto diff = [&](int l) {
                long long wp = pow_mod(w, l, q), vp = pow_mod(v, l, q);
                return variant == WordVariant::D ? modq(wp - vp) : modq(vp - wp);
            };
            long long base = 0;
            for (int l = 1; l <= d; ++l)
                base = modq(base + a.num[l - 1] % q * diff(l));
            int p = d;
            for (int l1 = 2; l1 <= d; ++l1) {
                pr.delta[l1 - 2] = diff(l1);
                for (int l2 = 1; l2 < l1; ++l2, ++p) {
                    long long diag =
                        variant == WordVariant::D
                            ? modq(pow_mod(v, l1 + l2, q) -
                                   static_cast<long long>(
                                       (static_cast<__int128>(pow_mod(v, l1, q)) *
                                        pow_mod(w, l2, q)) % q))
                            : modq(pow_mod(w, l1 + l2, q) -
                                   static_cast<long long>(
                                       (static_cast<__int128>(pow_mod(v, l1, q)) *
                                        pow_mod(w, l2, q)) % q));
                    long long coef = a.num[p] % q;
                    base = modq(base + coef * diag);
                    pr.cross[l1 - 2] = modq(pr.cross[l1 - 2] + coef * diff(l2));
                }
            }
            pr.base = base;
            pairs.push_back(std::move(pr));
        }
    }

    if (method == SumMethod::Brute) {
        double count = std::pow(static_cast<double>(q), 2 * r);
        if (count > 1e8)
            throw std::length_error("nil_gauss_sum: brute enumeration infeasible, use DP");
        std::complex<double> total = 0.0;
        std::vector<long long> U(static_cast<size_t>(std::max(0, d - 1)), 0);
        std::function<void(int, long long)> rec = [&](int j, long long phase) {
            if (j == r) {
                total += roots[static_cast<size_t>(phase)];
                return;
            }
            for (const Pair& pr : pairs) {
                long long step = pr.base;
                for (size_t i = 0; i < U.size(); ++i)
                    step = modq(step + pr.cross[i] * U[i]);
                std::vector<long long> saved = U;
                for (size_t i = 0; i < U.size(); ++i) U[i] = modq(U[i] + pr.delta[i]);
                rec(j + 1, modq(phase + step));
                U = saved;
            }
        };
        rec(0, 0);
        return total / std::pow(static_cast<double>(q), 2 * r);
    }

    // Dense DP over U in [0,q)^{d-1}, amplitudes resolved by phase residue.
    const int nstates_dim = std::max(0, d - 1);
    long long nstates = 1;
    for (int i = 0; i < nstates_dim; ++i) {
        nstates *= q;
        if (nstates > 50'000'000) throw std::length_error("nil_gauss_sum: state space too large");
    }
    std::vector<std::complex<double>> cur(static_cast<size_t>(nstates), 0.0), nxt;
    cur[0] = 1.0;
    std::vector<long long> U(static_cast<size_t>(nstates_dim));
    for (int j = 0; j < r; ++j) {
        nxt.assign(static_cast<size_t>(nstates), 0.0);
        for (long long ui = 0; ui < nstates; ++ui) {
            std::complex<double> amp = cur[static_cast<size_t>(ui)];
            if (amp == std::complex<double>(0.0)) continue;
            long long t = ui;
            for (int i = 0; i < nstates_dim; ++i) { U[i] = t % q; t /= q; }
            for (const Pair& pr : pairs) {
                long long step = pr.base;
                long long target = 0, mult = 1;
                for (int i = 0; i < nstates_dim; ++i) {
                    step = modq(step + pr.cross[i] * U[i]);
                    target += modq(U[i] + pr.delta[i]) * mult;
                    mult *= q;
                }
                nxt[static_cast<size_t>(target)] += amp * roots[static_cast<size_t>(step)];
            }
        }
        cur.swap(nxt);
    }
    std::complex<double> total = 0.0;
    for (const auto& amp : cur) total += amp;
    return total / std::pow(static_cast<double>(q), 2 * r);
}

// ---------------------------------------------------------------------------
// Least-squares fit of log y against log x.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of log-space residuals
};

inline DecayFit decay_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("decay_fit: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    std::vector<std::pair<double, double>> logs;
    for (auto [x, y] : points) {
        if (x <= 0.0 || y <= 0.0) throw std::domain_error("decay_fit: values must be positive");
        double lx = std::log(x), ly = std::log(y);
        logs.emplace_back(lx, ly);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw std::domain_error("decay_fit: degenerate abscissae");
    DecayFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (auto [lx, ly] : logs) {
        double e = ly - (fit.slope * lx + fit.intercept);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

} // namespace nilcircle
