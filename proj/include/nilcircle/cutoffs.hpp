#pragma once

// Smooth cutoff family used everywhere:
//
//   eta0 : even, C-infinity, 1 on [-1,1], 0 outside [-2,2], values in [0,1]
//   eta_j(t)    = eta0(tau^-j t) - eta0(tau^-j+1 t)   (j >= 1, eta_0 = eta0)
//   eta_leq(A)  = sum_{0<=j<=A} eta_j = eta0(tau^-floor(A) t)
//   chi         = eta0 (the averaging weight)
//   chi'(t)     = (1/tau) chi(t/tau) - chi(t), mean zero
//
// Radial extensions evaluate at the Euclidean norm of the argument.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nilcircle {

namespace detail {
inline double bump_h(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
} // namespace detail

// Smooth step: 0 for u <= 0, 1 for u >= 1.
inline double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = detail::bump_h(u);
    double b = detail::bump_h(1.0 - u);
    return a / (a + b);
}

inline double eta0(double t) { return smooth_step(2.0 - std::abs(t)); }

inline double chi(double t) { return eta0(t); }

inline double chi_prime(double t, double tau) { return chi(t / tau) / tau - chi(t); }

inline double chi_iota(double t, int iota, double tau) {
    return iota == 0 ? chi(t) : chi_prime(t, tau);
}

inline double eta_j(double t, int j, double tau) {
    if (j < 0) throw std::domain_error("eta_j: j must be >= 0");
    if (j == 0) return eta0(t);
    return eta0(std::pow(tau, -j) * t) - eta0(std::pow(tau, -j + 1) * t);
}

// Telescoped closed form of the dyadic partial sum.
inline double eta_leq(double t, double A, double tau) {
    if (A < 0.0) return 0.0;
    return eta0(std::pow(tau, -std::floor(A)) * t) ;
}

inline double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double eta_leq_radial(const std::vector<double>& x, double A, double tau) {
    return eta_leq(norm2(x), A, tau);
}

inline double eta_j_radial(const std::vector<double>& x, int j, double tau) {
    return eta_j(norm2(x), j, tau);
}

// Descriptor form, for places that carry a cutoff around as data.
enum class CutoffKind { Eta0, EtaJ, EtaLeq, Chi, ChiPrime };

struct CutoffFunction {
    CutoffKind kind = CutoffKind::Chi;
    double tau = 2.0;
    int j = 0;       // EtaJ
    double A = 0.0;  // EtaLeq

    double operator()(double t) const {
        switch (kind) {
            case CutoffKind::Eta0: return eta0(t);
            case CutoffKind::EtaJ: return eta_j(t, j, tau);
            case CutoffKind::EtaLeq: return eta_leq(t, A, tau);
            case CutoffKind::Chi: return chi(t);
            case CutoffKind::ChiPrime: return chi_prime(t, tau);
        }
        return 0.0;
    }

    double radial(const std::vector<double>& x) const { return (*this)(norm2(x)); }
};

} // namespace nilcircle
