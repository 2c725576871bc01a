#pragma once

// Anisotropic quasi-geometry on G0 adapted to the dilations:
//
//   q_beta(x) = sup_{(l1,l2)} (beta_{l1,l2} |x_{l1,l2}|)^{1/(l1+l2)},
//
// homogeneous of degree 1 under the group dilations.  Quasi-balls in H_Q are
// counted through the twisted coordinate conditions of x * y^{-1}, and the
// shifted maximal function takes averages over balls recentered along the
// moment curve.

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "nilcircle/group.hpp"

namespace nilcircle {

struct QuasiGeometry {
    GroupShape shape;
    std::vector<double> beta;  // one weight per coordinate position
    long long Q = 1;

    // Weights 2^{floor(delta' w)} on non-central coordinates and
    // 2^{floor(delta w)} on central ones (delta <= delta').
    static QuasiGeometry from_scales(GroupShape shape, long long Q, int w, double delta,
                                     double delta_prime) {
        QuasiGeometry g;
        g.shape = shape;
        g.Q = Q;
        g.beta.assign(static_cast<size_t>(shape.size()), 1.0);
        for (int p = 0; p < shape.size(); ++p) {
            bool central = shape.pair_at(p).l2 != 0;
            double expo = std::floor((central ? delta : delta_prime) * w);
            g.beta[static_cast<size_t>(p)] = std::pow(2.0, expo);
        }
        return g;
    }

    void validate() const {
        if (static_cast<int>(beta.size()) != shape.size())
            throw std::invalid_argument("QuasiGeometry: beta size mismatch");
        for (double b : beta)
            if (!(b >= 1.0)) throw std::domain_error("QuasiGeometry: beta >= 1 required");
    }
};

inline double quasi_norm(const QuasiGeometry& geom, const std::vector<double>& coords) {
    if (static_cast<int>(coords.size()) != geom.shape.size())
        throw std::invalid_argument("quasi_norm: coordinate count mismatch");
    double m = 0.0;
    for (int p = 0; p < geom.shape.size(); ++p) {
        double v = geom.beta[static_cast<size_t>(p)] * std::abs(coords[static_cast<size_t>(p)]);
        m = std::max(m, std::pow(v, 1.0 / geom.shape.weight_at(p)));
    }
    return m;
}

inline std::vector<double> to_doubles(const LatticeElement& g) {
    std::vector<double> v(g.coords.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = g.coords[i].to_double();
    return v;
}

inline double quasi_norm(const QuasiGeometry& geom, const LatticeElement& g) {
    return quasi_norm(geom, to_doubles(g));
}

namespace detail {
// Number of multiples of Q in the open interval (lo, hi).
inline long long multiples_in_open(double lo, double hi, long long Q) {
    if (!(lo < hi)) return 0;
    double qlo = lo / static_cast<double>(Q), qhi = hi / static_cast<double>(Q);
    long long first = static_cast<long long>(std::floor(qlo)) + 1;  // smallest m with m > qlo
    long long last = static_cast<long long>(std::ceil(qhi)) - 1;    // largest m with m < qhi
    return last >= first ? last - first + 1 : 0;
}
} // namespace detail

// |B_{beta,H_Q}(x, r)| = #{y in H_Q : q_beta(x * y^{-1}) < r}.
//
// From (x y^{-1})^{(1)} = x^{(1)} - y^{(1)} and
// (x y^{-1})^{(2)} = x^{(2)} - y^{(2)} + R0(y^{(1)} - x^{(1)}, y^{(1)}),
// the non-central coordinates of y range over plain intervals and, once
// y^{(1)} is fixed, so does every central coordinate (around a twisted
// center).  The count is the sum over y^{(1)} of a product of interval
// counts; only y^{(1)} is enumerated.
inline long long ball_count(const QuasiGeometry& geom, const std::vector<double>& center,
                            double r) {
    geom.validate();
    if (!(r > 0.0)) throw std::domain_error("ball_count: r must be positive");
    const GroupShape& shape = geom.shape;
    const int d = shape.degree();
    if (static_cast<int>(center.size()) != shape.size())
        throw std::invalid_argument("ball_count: center size mismatch");
    const long long Q = geom.Q;

    // Candidate lists for the non-central coordinates of y.
    std::vector<std::vector<long long>> ranges(static_cast<size_t>(d));
    double window = 1.0;
    for (int l = 1; l <= d; ++l) {
        double rad = std::pow(r, l) / geom.beta[static_cast<size_t>(l - 1)];
        double c = center[static_cast<size_t>(l - 1)];
        long long first = static_cast<long long>(std::floor((c - rad) / Q)) + 1;
        long long last = static_cast<long long>(std::ceil((c + rad) / Q)) - 1;
        for (long long m = first; m <= last; ++m)
            ranges[static_cast<size_t>(l - 1)].push_back(m * Q);
        window *= static_cast<double>(ranges[static_cast<size_t>(l - 1)].size());
        if (window > 2e7) throw std::length_error("ball_count: enumeration window overflow");
    }

    long long total = 0;
    std::vector<size_t> idx(static_cast<size_t>(d), 0);
    std::vector<long long> y1(static_cast<size_t>(d));
    for (int l = 0; l < d; ++l)
        if (ranges[static_cast<size_t>(l)].empty()) return 0;
    for (;;) {
        for (int l = 0; l < d; ++l) y1[static_cast<size_t>(l)] = ranges[static_cast<size_t>(l)][idx[static_cast<size_t>(l)]];
        long long prod = 1;
        int p = d;
        for (int l1 = 2; l1 <= d && prod > 0; ++l1) {
            for (int l2 = 1; l2 < l1; ++l2, ++p) {
                double rad = std::pow(r, l1 + l2) / geom.beta[static_cast<size_t>(p)];
                // twist = R0(y1 - x1, y1)_{l1,l2}
                double twist = (static_cast<double>(y1[static_cast<size_t>(l1 - 1)]) -
                                center[static_cast<size_t>(l1 - 1)]) *
                               static_cast<double>(y1[static_cast<size_t>(l2 - 1)]);
                double c = center[static_cast<size_t>(p)] + twist;
                prod *= detail::multiples_in_open(c - rad, c + rad, Q);
            }
        }
        total += prod;
        int l = 0;
        while (l < d && ++idx[static_cast<size_t>(l)] == ranges[static_cast<size_t>(l)].size())
            idx[static_cast<size_t>(l)] = 0, ++l;
        if (l == d) break;
    }
    return total;
}

inline long long ball_count(const QuasiGeometry& geom, const LatticeElement& center, double r) {
    return ball_count(geom, to_doubles(center), r);
}

// ---------------------------------------------------------------------------
// Shifted maximal function on H_Q:
//
//   M_{Q,w,u} f(h) = sup over admissible k (2^{k/2} >= 8 Q 2^{w/8}) of
//     (prod Q beta 2^{-k(l1+l2)}) * sum_{y : q_beta(h y^{-1} - A0(2^k u)) < 2^k} |f(y)|.

struct ShiftedMaximalParams {
    double u = 0.0;  // shift parameter in [-2, 2]
    int w = 0;       // scale parameter behind beta
    int extra_scales = 6;  // number of admissible k beyond the smallest
};

inline int shifted_min_scale(long long Q, int w) {
    // smallest k in N with 2^{k/2} >= 8 Q 2^{w/8}
    double need = 2.0 * (3.0 + std::log2(static_cast<double>(Q)) + w / 8.0);
    return static_cast<int>(std::ceil(need - 1e-12));
}

inline double shifted_scale_factor(const QuasiGeometry& geom, int k) {
    double f = 1.0;
    for (int p = 0; p < geom.shape.size(); ++p)
        f *= static_cast<double>(geom.Q) * geom.beta[static_cast<size_t>(p)] *
             std::pow(2.0, -static_cast<double>(k) * geom.shape.weight_at(p));
    return f;
}

inline double shifted_maximal_value(const QuasiGeometry& geom,
                                    const std::vector<std::pair<LatticeElement, double>>& f,
                                    const LatticeElement& h, const ShiftedMaximalParams& prm) {
    geom.validate();
    if (prm.u < -2.0 || prm.u > 2.0) throw std::domain_error("shifted_maximal: u in [-2,2]");
    const int kmin = shifted_min_scale(geom.Q, prm.w);
    if (prm.extra_scales < 0) throw std::domain_error("shifted_maximal: empty scale range");
    double best = 0.0;
    for (int k = kmin; k <= kmin + prm.extra_scales; ++k) {
        const double radius = std::pow(2.0, k);
        const double shift = radius * prm.u;
        double mass = 0.0;
        for (const auto& [y, fy] : f) {
            LatticeElement z = multiply(h, inverse(y));
            std::vector<double> v = to_doubles(z);
            for (int l = 1; l <= geom.shape.degree(); ++l)
                v[static_cast<size_t>(l - 1)] -= std::pow(shift, l);
            if (quasi_norm(geom, v) < radius) mass += std::abs(fy);
        }
        best = std::max(best, shifted_scale_factor(geom, k) * mass);
    }
    return best;
}

// Exact level-set count |{h in H_Q : M f(h) >= lambda}| for d = 2, sweeping
// h^{(1)} over the union of candidate boxes and counting the central
// coordinate by interval arithmetic.  The twisted central condition for a
// source point y reads |h21 - c(y, h^{(1)})| < 2^{3k}/beta21 with
// c = y21 - (y10 - h10) y10, so for fixed h^{(1)} the qualifying h21 form a
// union of intervals weighted by |f(y)|.
inline long long shifted_levelset_count(const QuasiGeometry& geom,
                                        const std::vector<std::pair<LatticeElement, double>>& f,
                                        const ShiftedMaximalParams& prm, double lambda) {
    geom.validate();
    if (geom.shape.degree() != 2)
        throw std::invalid_argument("shifted_levelset_count: implemented for d = 2");
    if (!(lambda > 0.0)) throw std::domain_error("shifted_levelset_count: lambda > 0");
    const long long Q = geom.Q;
    const double b10 = geom.beta[0], b20 = geom.beta[1], b21 = geom.beta[2];
    const int kmin = shifted_min_scale(Q, prm.w);

    struct Candidate { long long h10, h20; };
    std::set<std::pair<long long, long long>> candidates;
    std::vector<int> ks;
    for (int k = kmin; k <= kmin + prm.extra_scales; ++k) {
        double total_mass = 0.0;
        for (const auto& [y, fy] : f) total_mass += std::abs(fy);
        if (shifted_scale_factor(geom, k) * total_mass < lambda) continue;  // scale cannot reach
        ks.push_back(k);
        const double radius = std::pow(2.0, k);
        const double shift = radius * prm.u;
        for (const auto& [y, fy] : f) {
            double c10 = y.coords[0].to_double() + shift;
            double c20 = y.coords[1].to_double() + shift * shift;
            double r10 = radius / b10, r20 = radius * radius / b20;
            long long f10 = static_cast<long long>(std::floor((c10 - r10) / Q)) + 1;
            long long l10 = static_cast<long long>(std::ceil((c10 + r10) / Q)) - 1;
            long long f20 = static_cast<long long>(std::floor((c20 - r20) / Q)) + 1;
            long long l20 = static_cast<long long>(std::ceil((c20 + r20) / Q)) - 1;
            if ((l10 - f10 + 1) * (l20 - f20 + 1) > 4'000'000)
                throw std::length_error("shifted_levelset_count: candidate window overflow");
            for (long long a = f10; a <= l10; ++a)
                for (long long b = f20; b <= l20; ++b) candidates.insert({a * Q, b * Q});
        }
    }

    long long count = 0;
    std::vector<std::pair<double, double>> qualified;  // merged h21 intervals
    for (const auto& [h10, h20] : candidates) {
        qualified.clear();
        for (int k : ks) {
            const double radius = std::pow(2.0, k);
            const double shift = radius * prm.u;
            const double need = lambda / shifted_scale_factor(geom, k);
            // Events: interval (c - r21, c + r21) with weight |f(y)| for each
            // y passing the non-central conditions.
            std::vector<std::pair<double, double>> events;  // position, +/- weight
            const double r21 = radius * radius * radius / b21;
            for (const auto& [y, fy] : f) {
                double z10 = static_cast<double>(h10) - y.coords[0].to_double() - shift;
                double z20 = static_cast<double>(h20) - y.coords[1].to_double() - shift * shift;
                if (!(b10 * std::abs(z10) < radius && b20 * std::abs(z20) < radius * radius))
                    continue;
                double c = y.coords[2].to_double() -
                           (y.coords[0].to_double() - static_cast<double>(h10)) *
                               y.coords[0].to_double();
                events.push_back({c - r21, std::abs(fy)});
                events.push_back({c + r21, -std::abs(fy)});
            }
            if (events.empty()) continue;
            std::sort(events.begin(), events.end());
            double run = 0.0, open_at = 0.0;
            bool open = false;
            for (const auto& [x, wgt] : events) {
                double prev = run;
                run += wgt;
                if (!open && prev < need && run >= need) { open = true; open_at = x; }
                else if (open && run < need) { open = false; qualified.push_back({open_at, x}); }
            }
        }
        if (qualified.empty()) continue;
        std::sort(qualified.begin(), qualified.end());
        double lo = qualified[0].first, hi = qualified[0].second;
        for (size_t i = 1; i < qualified.size(); ++i) {
            if (qualified[i].first <= hi) hi = std::max(hi, qualified[i].second);
            else {
                count += detail::multiples_in_open(lo, hi, Q);
                lo = qualified[i].first;
                hi = qualified[i].second;
            }
        }
        count += detail::multiples_in_open(lo, hi, Q);
    }
    return count;
}

} // namespace nilcircle
