#pragma once

// The nilpotent circle-method decomposition of the averaging kernels
// K_k(g) = L_k(g1) 1_{0}(g2).
//
// Stage 1 splits the central delta through periodic multipliers
//   Xi_{k,s}(xi2) = sum_{a/q in R_s^{d'}} eta_{<= delta k}(tau^k o (xi2 - a/q)),
//   Xi_k^c = 1 - sum_s Xi_{k,s},
// giving K_k = K_k^c + sum_{s <= delta k} K_{k,s} with
// K_{k,s} = L_k(g1) N_{k,s}(g2).  Stage 2 splits L_k through multipliers over
// R_t^d relative to a highly divisible modulus Q_s.  Generalized kernels
// K_{k,w,A,B} take arbitrary 1-periodic rational sets A, B and S-source
// S_k, S_{k+1} or their difference.
//
// Torus integrals are uniform sums over a frequency lattice with per-axis
// power-of-two sizes.  All lattice phases are reduced to exact integer
// residues before a single complex exponential, so the DFT of the constant 1
// is an exact delta and the reconstruction identities hold to rounding.
// Grids too small for the probed window are detected and rejected.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilcircle/checked_int.hpp"
#include "nilcircle/cutoffs.hpp"
#include "nilcircle/frequency.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/parallel.hpp"
#include "nilcircle/rationals.hpp"

namespace nilcircle {

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecompositionParams {
    GroupShape shape;
    double tau = 2.0;
    double delta = 0.4;
    double delta_prime = 0.6;
    int D = 4;
    // Desk-scale stand-in for the factorial modulus Q_s (a highly divisible
    // number such as lcm(1..L)); 0 means evaluate the factorial exactly.
    long long qs_modulus = 0;

    void validate() const {
        if (tau <= 1.0 || tau > 2.0) throw std::domain_error("params: tau in (1,2]");
        if (!(delta > 0.0 && delta_prime > 0.0 && delta <= delta_prime && delta_prime < 1.0))
            throw std::domain_error("params: need 0 < delta <= delta' < 1");
        if (D < 1) throw std::domain_error("params: D >= 1");
    }
};

// kappa_s = 2^{(D/ln tau)(s+1)^2}, the scale from which the second-stage
// split of K_{k,s} is active.
inline double kappa_s(const DecompositionParams& p, int s) {
    return std::pow(2.0, static_cast<double>(p.D) / std::log(p.tau) * (s + 1.0) * (s + 1.0));
}

// Q_s = floor(tau^{D(s+1)})! exactly; overflows for all but tiny arguments.
inline Int q_s_factorial(const DecompositionParams& p, int s) {
    long long top = static_cast<long long>(std::floor(std::pow(p.tau, p.D * (s + 1.0))));
    Int r(1);
    for (long long i = 2; i <= top; ++i) r *= Int(i);
    return r;
}

inline long long q_s(const DecompositionParams& p, int s) {
    if (p.qs_modulus > 0) return p.qs_modulus;
    return q_s_factorial(p, s).to_int64();
}

// ---------------------------------------------------------------------------
// Frequency lattice with per-axis sizes (powers of two).

struct FreqGrid {
    std::vector<long long> M;  // size per axis
    std::vector<int> weight;   // dilation exponent per axis

    int dims() const { return static_cast<int>(M.size()); }
    long long lambda() const {  // lcm of the (power-of-two) sizes
        long long l = 1;
        for (long long m : M) l = std::max(l, m);
        return l;
    }
    double total_points() const {
        double t = 1.0;
        for (long long m : M) t *= static_cast<double>(m);
        return t;
    }
};

namespace detail {
inline long long next_pow2(double x) {
    long long m = 1;
    while (static_cast<double>(m) < x) m <<= 1;
    return m;
}
} // namespace detail

// Non-central grid.  Axis 1 must separate every pair of summation indices
// n != n' that both carry nonzero weight: with M_1 >= 4 tau^{k+shift} any
// residue collision pairs some |n| < 2 tau^{k+shift} with |n'| >= 2
// tau^{k+shift}, where the weight chi(tau^-(k+shift) n') vanishes, so the
// lattice delta identity is exact.  shift = 1 is needed as soon as the
// S_{k+1} source enters.  Higher axes are sized to resolve the narrowest
// bump of width eta_{<= max_width}.
inline FreqGrid noncentral_grid(const DecompositionParams& p, int k, double max_width,
                                int shift = 0) {
    FreqGrid g;
    const int d = p.shape.degree();
    g.M.resize(d);
    g.weight.resize(d);
    g.M[0] = detail::next_pow2(4.0 * std::pow(p.tau, k + shift));
    g.weight[0] = 1;
    for (int l = 2; l <= d; ++l) {
        double need = 2.0 * std::pow(p.tau, k * l - std::floor(max_width));
        g.M[l - 1] = std::max<long long>(8, detail::next_pow2(need));
        g.weight[l - 1] = l;
    }
    return g;
}

inline FreqGrid central_grid(const DecompositionParams& p, int k, double max_width) {
    FreqGrid g;
    const int d = p.shape.degree();
    for (int l1 = 2; l1 <= d; ++l1) {
        for (int l2 = 1; l2 < l1; ++l2) {
            double need = 2.0 * std::pow(p.tau, k * (l1 + l2) - std::floor(max_width));
            g.M.push_back(std::max<long long>(8, detail::next_pow2(need)));
            g.weight.push_back(l1 + l2);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Periodic multiplier sampled on a frequency lattice:
//   value(xi) = sum_{a/q in set} eta_{<= width}(tau^k o (xi - a/q)),
// or 1 minus that for the complement.  Values live on the lattice; the
// off-grid evaluator exists for scaling tests and demos.

struct MultiplierGrid {
    FreqGrid grid;
    double tau = 2.0;
    int k = 0;
    double width = 0.0;
    std::vector<RationalVector> centers;
    bool complement = false;

    double bump_radius(int axis) const {
        return 2.0 * std::pow(tau, std::floor(width) - static_cast<double>(k) * grid.weight[axis]);
    }

    double value_at_point(const std::vector<double>& xi) const {
        double sum = 0.0;
        for (const auto& c : centers) {
            double u2 = 0.0;
            for (int l = 0; l < grid.dims(); ++l) {
                double d0 = xi[l] - c.value(l);
                d0 -= std::round(d0);  // centered residue mod 1
                double u = std::pow(tau, static_cast<double>(k) * grid.weight[l]) * d0;
                u2 += u * u;
            }
            sum += eta_leq(std::sqrt(u2), width, tau);
        }
        return complement ? 1.0 - sum : sum;
    }

    double value_at_indices(const std::vector<long long>& alpha) const {
        std::vector<double> xi(alpha.size());
        for (size_t l = 0; l < alpha.size(); ++l)
            xi[l] = static_cast<double>(alpha[l]) / static_cast<double>(grid.M[l]);
        // Exact centered distances: (alpha q - a M) / (M q) folds the residue
        // without double rounding as long as M q stays below 2^53.
        double sum = 0.0;
        for (const auto& c : centers) {
            double u2 = 0.0;
            for (int l = 0; l < grid.dims(); ++l) {
                __int128 num = static_cast<__int128>(alpha[l]) * c.den -
                               static_cast<__int128>(c.num[l]) * grid.M[l];
                __int128 den = static_cast<__int128>(grid.M[l]) * c.den;
                num %= den;
                if (num * 2 > den) num -= den;
                if (num * 2 <= -den) num += den;
                double d0 = static_cast<double>(num) / static_cast<double>(den);
                double u = std::pow(tau, static_cast<double>(k) * grid.weight[l]) * d0;
                u2 += u * u;
            }
            sum += eta_leq(std::sqrt(u2), width, tau);
        }
        return complement ? 1.0 - sum : sum;
    }
};

inline MultiplierGrid build_multiplier(const DecompositionParams& p, int k, double width,
                                       const RationalSet& set, FreqGrid grid,
                                       bool complement = false) {
    p.validate();
    return MultiplierGrid{std::move(grid), p.tau, k, width, set.elements(), complement};
}

// ---------------------------------------------------------------------------
// Central kernel factor
//   N(g2) = phi_k^{(2)}(g2) (1/|grid|) sum_alpha Xi(alpha) e(g2.alpha/M).

class CentralFactor {
public:
    CentralFactor(const DecompositionParams& p, int k, double width, RationalSet set,
                  bool complement, FreqGrid grid)
        : params_(p), k_(k), width_(width), set_(std::move(set)), complement_(complement),
          grid_(std::move(grid)) {
        params_.validate();
        if (grid_.dims() != params_.shape.n_central())
            throw std::invalid_argument("CentralFactor: grid must cover the central block");
    }

    const RationalSet& set() const { return set_; }

    double phi(const std::vector<Int>& g2) const {
        std::vector<double> v(g2.size());
        for (size_t i = 0; i < g2.size(); ++i)
            v[i] = g2[i].to_double() * std::pow(params_.tau, -k_ * grid_.weight[i]);
        return eta_leq(norm2(v), params_.delta * k_, params_.tau);
    }

    // Grid average of the bump part of the multiplier (the zero Fourier mode).
    double multiplier_grid_mean() const {
        double mass = 0.0;
        for_each_support_point([&](const std::vector<long long>&, double eta, long long) {
            mass += eta;
        });
        double mean = mass / grid_.total_points();
        return complement_ ? 1.0 - mean : mean;
    }

    std::complex<double> value(const std::vector<Int>& g2, bool apply_phi = true) const {
        if (static_cast<int>(g2.size()) != grid_.dims())
            throw std::invalid_argument("CentralFactor: central coordinate count mismatch");
        const long long lambda = grid_.lambda();
        // Residues of g2 modulo the per-axis sizes, premultiplied for phases.
        std::vector<long long> gmod(g2.size());
        bool all_zero_mod = true, all_zero = true;
        for (size_t l = 0; l < g2.size(); ++l) {
            gmod[l] = floor_mod(g2[l], Int(grid_.M[l])).to_int64();
            if (gmod[l] != 0) all_zero_mod = false;
            if (!(g2[l] == Int(0))) all_zero = false;
        }
        if (all_zero_mod && !all_zero)
            throw GridError("CentralFactor: probe aliases to zero; enlarge the grid");

        std::complex<double> bump = 0.0;
        for_each_support_point([&](const std::vector<long long>& alpha, double eta,
                                   long long /*unused*/) {
            long long res = 0;
            for (size_t l = 0; l < alpha.size(); ++l) {
                long long stride = lambda / grid_.M[l];
                __int128 term = static_cast<__int128>(gmod[l]) * stride % lambda * alpha[l];
                res = static_cast<long long>((res + term) % lambda);
            }
            bump += eta * std::polar(1.0, 2.0 * M_PI * static_cast<double>(res) /
                                              static_cast<double>(lambda));
        });
        bump /= grid_.total_points();
        std::complex<double> val = complement_ ? (all_zero ? 1.0 : 0.0) - bump : bump;
        return apply_phi ? phi(g2) * val : val;
    }

private:
    // Visit every lattice point inside some bump rectangle, with the exact
    // eta value there.  Points covered by several bumps are visited once per
    // bump; multiplier values add.
    template <typename Fn>
    void for_each_support_point(Fn&& fn) const {
        const int m = grid_.dims();
        for (const auto& c : set_.elements()) {
            // Per-axis index windows around the (unwrapped) center.
            std::vector<long long> lo(m), hi(m);
            for (int l = 0; l < m; ++l) {
                double rad = 2.0 * std::pow(params_.tau,
                                            std::floor(width_) -
                                                static_cast<double>(k_) * grid_.weight[l]);
                double cm = c.value(l) * static_cast<double>(grid_.M[l]);
                double rm = rad * static_cast<double>(grid_.M[l]);
                lo[l] = static_cast<long long>(std::floor(cm - rm)) - 1;
                hi[l] = static_cast<long long>(std::ceil(cm + rm)) + 1;
                if (hi[l] - lo[l] + 1 >= grid_.M[l]) { lo[l] = 0; hi[l] = grid_.M[l] - 1; }
            }
            std::vector<long long> idx = lo;
            std::vector<long long> wrapped(m);
            for (;;) {
                double u2 = 0.0;
                for (int l = 0; l < m; ++l) {
                    __int128 num = static_cast<__int128>(idx[l]) * c.den -
                                   static_cast<__int128>(c.num[l]) * grid_.M[l];
                    __int128 den = static_cast<__int128>(grid_.M[l]) * c.den;
                    num %= den;
                    if (num * 2 > den) num -= den;
                    if (num * 2 <= -den) num += den;
                    double d0 = static_cast<double>(num) / static_cast<double>(den);
                    double u = std::pow(params_.tau, static_cast<double>(k_) * grid_.weight[l]) * d0;
                    u2 += u * u;
                    wrapped[l] = ((idx[l] % grid_.M[l]) + grid_.M[l]) % grid_.M[l];
                }
                double eta = eta_leq(std::sqrt(u2), width_, params_.tau);
                if (eta != 0.0) fn(wrapped, eta, 0ll);
                int l = 0;
                while (l < m && ++idx[l] > hi[l]) idx[l] = lo[l], ++l;
                if (l == m) break;
            }
        }
    }

    DecompositionParams params_;
    int k_;
    double width_;
    RationalSet set_;
    bool complement_;
    FreqGrid grid_;
};

// ---------------------------------------------------------------------------
// Non-central kernel factor, batch engine.
//
//   L(g1) = phi_k^{(1)}(g1) (1/|grid|) sum_alpha S(alpha) Psi(alpha) e(g1.alpha/M)
//
// The grid is never materialized.  Bump supports are enumerated as
// rectangles; for each "line" (a fixed choice of the higher-axis indices)
// the symbol S is restored on the whole of axis 1 by folding the moment
// curve modulo M_1 and running one FFT, and every component and probe then
// consumes that row.

enum class SSource { Sk, SkPlus1, DeltaSk };

struct NoncentralComponentSpec {
    std::string name;
    RationalSet set;        // bump centers
    double width = 0.0;     // eta_{<= width}
    bool complement = false;
    SSource source = SSource::Sk;
};

class NoncentralEngine {
public:
    // max_shift = 1 widens the summation window to cover the S_{k+1} source;
    // components using SkPlus1 or DeltaSk on a shift-0 engine are rejected.
    NoncentralEngine(const DecompositionParams& p, int k, FreqGrid grid, int max_shift = 0)
        : params_(p), k_(k), grid_(std::move(grid)), max_shift_(max_shift) {
        params_.validate();
        const int d = params_.shape.degree();
        if (grid_.dims() != d)
            throw std::invalid_argument("NoncentralEngine: grid must cover the non-central block");
        if (max_shift_ < 0 || max_shift_ > 1)
            throw std::domain_error("NoncentralEngine: max_shift in {0,1}");
        span_ = static_cast<long long>(std::floor(2.0 * std::pow(params_.tau, k_ + max_shift_)));
        // With M_1 >= 2 * span every nonzero-weight index has a unique
        // residue (colliding partners carry chi = 0 at the window edge).
        if (static_cast<double>(grid_.M[0]) < 4.0 * std::pow(params_.tau, k_ + max_shift_) - 0.5)
            throw GridError("NoncentralEngine: axis-1 grid smaller than the summation window");
        // Weights per source; index offset span_.
        auto fill = [&](int kk, std::vector<double>& c) {
            double scale = std::pow(params_.tau, -kk);
            c.assign(static_cast<size_t>(2 * span_ + 1), 0.0);
            for (long long n = -span_; n <= span_; ++n)
                c[static_cast<size_t>(n + span_)] = scale * chi(scale * static_cast<double>(n));
        };
        fill(k_, coeff_k_);
        if (max_shift_ >= 1) fill(k_ + 1, coeff_k1_);
    }

    const FreqGrid& grid() const { return grid_; }

    double phi(const std::vector<Int>& g1) const {
        std::vector<double> v(g1.size());
        for (size_t i = 0; i < g1.size(); ++i)
            v[i] = g1[i].to_double() * std::pow(params_.tau, -k_ * grid_.weight[i]);
        return eta_leq(norm2(v), params_.delta * k_, params_.tau);
    }

    // phi * sum_n c_n 1_{g1 = A0(n)}; also the exact value of the full-grid
    // lattice sum phi * (1/|grid|) sum_alpha S(alpha) e(g1.alpha/M) whenever
    // no aliasing occurs (which is checked).
    std::complex<double> direct_value(SSource src, const std::vector<Int>& g1,
                                      bool apply_phi = true) const {
        double c = direct_coefficient(src, g1);
        return apply_phi ? phi(g1) * c : c;
    }

    std::vector<std::vector<std::complex<double>>> evaluate(
        const std::vector<NoncentralComponentSpec>& comps,
        const std::vector<std::vector<Int>>& probes, bool apply_phi = true) const {
        const int d = params_.shape.degree();
        const long long M1 = grid_.M[0];
        const long long lambda_tail = tail_lambda();
        for (const auto& c : comps) check_source(c.source);

        // Probe tables: g mod M per axis.
        const size_t P = probes.size();
        std::vector<long long> g1mod(P);
        std::vector<std::vector<long long>> gtail(P);
        for (size_t p = 0; p < P; ++p) {
            if (static_cast<int>(probes[p].size()) != d)
                throw std::invalid_argument("NoncentralEngine: probe must have d coordinates");
            g1mod[p] = floor_mod(probes[p][0], Int(M1)).to_int64();
            gtail[p].resize(static_cast<size_t>(d - 1));
            for (int l = 1; l < d; ++l)
                gtail[p][static_cast<size_t>(l - 1)] =
                    floor_mod(probes[p][static_cast<size_t>(l)], Int(grid_.M[l])).to_int64();
        }
        // e(+2 pi i t / M1) table.
        std::vector<std::complex<double>> e1(static_cast<size_t>(M1));
        for (long long t = 0; t < M1; ++t)
            e1[static_cast<size_t>(t)] =
                std::polar(1.0, 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(M1));

        // Collect bump slices grouped by line (higher-axis index tuple).
        struct Slice {
            int comp;
            double utail2;
            long long a1lo, a1hi;    // unwrapped axis-1 index range
            long long num_den[2];    // center fraction on axis 1: a1, q
        };
        std::map<std::vector<long long>, std::vector<Slice>> lines;
        for (size_t ci = 0; ci < comps.size(); ++ci)
            collect_slices(static_cast<int>(ci), comps[ci], lines);

        std::vector<std::pair<std::vector<long long>, std::vector<Slice>>> line_list(
            lines.begin(), lines.end());

        const size_t C = comps.size();
        using Acc = std::vector<std::vector<std::complex<double>>>;
        Acc zero(C, std::vector<std::complex<double>>(P, 0.0));

        Acc bump_acc = chunked_reduce<Acc>(
            static_cast<long long>(line_list.size()), zero,
            [&](long long li) {
                Acc acc(C, std::vector<std::complex<double>>(P, 0.0));
                const auto& [tail, slices] = line_list[static_cast<size_t>(li)];
                // Rows of S on this line for each source that appears.
                std::vector<std::vector<std::complex<double>>> rows(3);
                auto row_for = [&](SSource src) -> const std::vector<std::complex<double>>& {
                    int idx = static_cast<int>(src);
                    if (rows[idx].empty()) rows[idx] = make_row(src, tail);
                    return rows[idx];
                };
                // Line phase per probe: e(sum_{l>=2} g_l alpha_l / M_l).
                std::vector<std::complex<double>> linephase(P);
                for (size_t p = 0; p < P; ++p) {
                    long long res = 0;
                    for (size_t l = 0; l < tail.size(); ++l) {
                        long long stride = lambda_tail / grid_.M[l + 1];
                        __int128 term = static_cast<__int128>(gtail[p][l]) * stride % lambda_tail *
                                        tail[l];
                        res = static_cast<long long>((res + term) % lambda_tail);
                    }
                    linephase[p] = std::polar(1.0, 2.0 * M_PI * static_cast<double>(res) /
                                                       static_cast<double>(lambda_tail));
                }
                // Per component: accumulate the multiplier row on the union of
                // slices, then push to all probes.
                std::vector<double> W(static_cast<size_t>(M1), 0.0);
                std::vector<std::complex<double>> WS(static_cast<size_t>(M1));
                const double tk = std::pow(params_.tau, k_);
                for (size_t ci = 0; ci < C; ++ci) {
                    const double wscale =
                        std::pow(params_.tau, std::floor(comps[ci].width));
                    const double R2 = 4.0 * wscale * wscale;   // eta support
                    const double F2 = wscale * wscale;         // eta == 1 inside
                    std::vector<long long> touched;
                    for (const Slice& s : slices) {
                        if (s.comp != static_cast<int>(ci)) continue;
                        double rem = R2 - s.utail2;
                        if (rem <= 0.0) continue;
                        // Narrow the axis-1 window to where the bump survives
                        // the tail distance.
                        double b = std::sqrt(rem) / tk;
                        double c1 = static_cast<double>(s.num_den[0]) /
                                    static_cast<double>(s.num_den[1]);
                        long long lo = std::max(
                            s.a1lo, static_cast<long long>(
                                        std::floor((c1 - b) * static_cast<double>(M1))) - 1);
                        long long hi = std::min(
                            s.a1hi, static_cast<long long>(
                                        std::ceil((c1 + b) * static_cast<double>(M1))) + 1);
                        for (long long a1 = lo; a1 <= hi; ++a1) {
                            // exact distance (a1 q - c1 M1)/(M1 q), unwrapped
                            __int128 num = static_cast<__int128>(a1) * s.num_den[1] -
                                           static_cast<__int128>(s.num_den[0]) * M1;
                            double dist = static_cast<double>(num) /
                                          (static_cast<double>(M1) * static_cast<double>(s.num_den[1]));
                            double u1 = tk * dist;
                            double u2 = u1 * u1 + s.utail2;
                            if (u2 >= R2) continue;
                            double eta = u2 <= F2 ? 1.0
                                                  : eta0(std::sqrt(u2) / wscale);
                            if (eta == 0.0) continue;  // underflow near the edge
                            long long w = ((a1 % M1) + M1) % M1;
                            if (W[static_cast<size_t>(w)] == 0.0) touched.push_back(w);
                            W[static_cast<size_t>(w)] += eta;
                        }
                    }
                    if (touched.empty()) continue;
                    std::sort(touched.begin(), touched.end());
                    const auto& row = row_for(comps[ci].source);
                    for (long long w : touched)
                        WS[static_cast<size_t>(w)] = W[static_cast<size_t>(w)] *
                                                     row[static_cast<size_t>(w)];
                    for (size_t p = 0; p < P; ++p) {
                        std::complex<double> s = 0.0;
                        for (long long w : touched) {
                            long long t = static_cast<long long>(
                                (static_cast<__int128>(g1mod[p]) * w) % M1);
                            s += WS[static_cast<size_t>(w)] * e1[static_cast<size_t>(t)];
                        }
                        acc[ci][p] += s * linephase[p];
                    }
                    for (long long w : touched) W[static_cast<size_t>(w)] = 0.0;
                }
                return acc;
            },
            [&](Acc a, const Acc& b) {
                for (size_t ci = 0; ci < C; ++ci)
                    for (size_t p = 0; p < P; ++p) a[ci][p] += b[ci][p];
                return a;
            });

        const double norm = grid_.total_points();
        std::vector<std::vector<std::complex<double>>> out(
            C, std::vector<std::complex<double>>(P, 0.0));
        for (size_t ci = 0; ci < C; ++ci) {
            for (size_t p = 0; p < P; ++p) {
                std::complex<double> bump = bump_acc[ci][p] / norm;
                std::complex<double> val =
                    comps[ci].complement
                        ? direct_coefficient(comps[ci].source, probes[p]) - bump
                        : bump;
                out[ci][p] = apply_phi ? phi(probes[p]) * val : val;
            }
        }
        return out;
    }

private:
    long long tail_lambda() const {
        long long l = 1;
        for (int a = 1; a < grid_.dims(); ++a) l = std::max(l, grid_.M[a]);
        return l;
    }

    void check_source(SSource src) const {
        if (src != SSource::Sk && max_shift_ < 1)
            throw GridError("NoncentralEngine: engine built without the S_{k+1} window");
    }

    double coeff(SSource src, long long n) const {
        size_t i = static_cast<size_t>(n + span_);
        switch (src) {
            case SSource::Sk: return coeff_k_[i];
            case SSource::SkPlus1: return coeff_k1_[i];
            case SSource::DeltaSk: return coeff_k1_[i] - coeff_k_[i];
        }
        return 0.0;
    }

    // sum_n c_n 1_{g1 = A0(n) mod M}; a congruent-but-unequal hit with a
    // nonzero weight means the probe aliases a live moment-curve point.
    double direct_coefficient(SSource src, const std::vector<Int>& g1) const {
        check_source(src);
        const int d = params_.shape.degree();
        const long long M1 = grid_.M[0];
        long long r = floor_mod(g1[0], Int(M1)).to_int64();
        double total = 0.0;
        for (long long n : {r, r - M1}) {
            if (n < -span_ || n > span_) continue;
            bool congruent = true, equal = true;
            for (int l = 1; l <= d; ++l) {
                Int pw = ipow(Int(n), l);
                if (!(g1[static_cast<size_t>(l - 1)] == pw)) equal = false;
                if (!(floor_mod(g1[static_cast<size_t>(l - 1)] - pw, Int(grid_.M[l - 1])) ==
                      Int(0)))
                    congruent = false;
            }
            if (equal) total += coeff(src, n);
            else if (congruent && coeff(src, n) != 0.0)
                throw GridError("NoncentralEngine: probe aliases a moment-curve point");
        }
        return total;
    }

    // Fold the moment curve modulo M_1 with the line phases, then FFT:
    //   row[alpha1] = sum_n c_n e(-(n alpha1/M1 + sum_{l>=2} n^l alpha_l/M_l)).
    std::vector<std::complex<double>> make_row(SSource src,
                                               const std::vector<long long>& tail) const {
        const int d = params_.shape.degree();
        const long long M1 = grid_.M[0];
        const long long lambda = tail_lambda();
        std::vector<std::complex<double>> h(static_cast<size_t>(M1), 0.0);
        for (long long n = -span_; n <= span_; ++n) {
            double c = coeff(src, n);
            if (c == 0.0) continue;
            long long res = 0;
            for (int l = 2; l <= d; ++l) {
                long long stride = lambda / grid_.M[l - 1];
                long long npow = pow_mod_ll(n, l, grid_.M[l - 1]);
                __int128 term = static_cast<__int128>(npow) * stride % lambda *
                                tail[static_cast<size_t>(l - 2)];
                res = static_cast<long long>((res + term) % lambda);
            }
            size_t m = static_cast<size_t>(((n % M1) + M1) % M1);
            h[m] += c * std::polar(1.0, -2.0 * M_PI * static_cast<double>(res) /
                                            static_cast<double>(lambda));
        }
        fft_pow2(h);  // forward: row[a1] = sum_m h[m] e(-2 pi i m a1 / M1)
        return h;
    }

    static long long pow_mod_ll(long long base, int e, long long m) {
        long long b = ((base % m) + m) % m, r = 1;
        for (int i = 0; i < e; ++i) r = static_cast<long long>((static_cast<__int128>(r) * b) % m);
        return r;
    }

    template <typename Lines>
    void collect_slices(int ci, const NoncentralComponentSpec& comp, Lines& lines) const {
        const int d = params_.shape.degree();
        for (const auto& c : comp.set.elements()) {
            // Axis windows.
            std::vector<long long> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
            for (int l = 0; l < d; ++l) {
                double rad = 2.0 * std::pow(params_.tau,
                                            std::floor(comp.width) -
                                                static_cast<double>(k_) * grid_.weight[l]);
                double cm = c.value(l) * static_cast<double>(grid_.M[l]);
                double rm = rad * static_cast<double>(grid_.M[l]);
                lo[static_cast<size_t>(l)] = static_cast<long long>(std::floor(cm - rm)) - 1;
                hi[static_cast<size_t>(l)] = static_cast<long long>(std::ceil(cm + rm)) + 1;
                if (hi[static_cast<size_t>(l)] - lo[static_cast<size_t>(l)] + 1 >= grid_.M[l]) {
                    lo[static_cast<size_t>(l)] = 0;
                    hi[static_cast<size_t>(l)] = grid_.M[l] - 1;
                }
            }
            // Enumerate tail tuples; keep the exact tail distance squared.
            std::vector<long long> idx(lo.begin() + 1, lo.end());
            std::vector<long long> tlo(lo.begin() + 1, lo.end()), thi(hi.begin() + 1, hi.end());
            const int td = d - 1;
            for (;;) {
                double utail2 = 0.0;
                std::vector<long long> key(static_cast<size_t>(td));
                for (int l = 0; l < td; ++l) {
                    long long Ml = grid_.M[l + 1];
                    __int128 num = static_cast<__int128>(idx[static_cast<size_t>(l)]) * c.den -
                                   static_cast<__int128>(c.num[static_cast<size_t>(l + 1)]) * Ml;
                    __int128 den = static_cast<__int128>(Ml) * c.den;
                    num %= den;
                    if (num * 2 > den) num -= den;
                    if (num * 2 <= -den) num += den;
                    double d0 = static_cast<double>(num) / static_cast<double>(den);
                    double u = std::pow(params_.tau,
                                        static_cast<double>(k_) * grid_.weight[l + 1]) *
                               d0;
                    utail2 += u * u;
                    key[static_cast<size_t>(l)] =
                        ((idx[static_cast<size_t>(l)] % Ml) + Ml) % Ml;
                }
                lines[key].push_back({ci, utail2, lo[0], hi[0],
                                      {c.num[0], c.den}});
                int l = 0;
                while (l < td && ++idx[static_cast<size_t>(l)] > thi[static_cast<size_t>(l)])
                    idx[static_cast<size_t>(l)] = tlo[static_cast<size_t>(l)], ++l;
                if (l == td) break;
            }
        }
    }

    DecompositionParams params_;
    int k_;
    FreqGrid grid_;
    int max_shift_;
    long long span_;
    std::vector<double> coeff_k_, coeff_k1_;
};

} // namespace nilcircle
