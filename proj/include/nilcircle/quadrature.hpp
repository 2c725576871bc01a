#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature for complex integrands, plus a
// fixed-panel Gauss-Legendre rule for tensor-product integrals where the
// oscillation is known in advance.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nilcircle {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
// K15 abscissae on [0,1] side (symmetric) and weights; odd entries form G7.
inline constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};
} // namespace detail

struct GKResult {
    std::complex<double> integral;
    double error;
};

inline GKResult gk15(const std::function<std::complex<double>(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::complex<double> k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 8; ++i) {
        double x = detail::kK15Nodes[i];
        std::complex<double> fv = (i == 7) ? f(c) : f(c - h * x) + f(c + h * x);
        k15 += detail::kK15Weights[i] * fv;
        if (i % 2 == 1) g7 += detail::kG7Weights[i / 2] * fv;
    }
    k15 *= h;
    g7 *= h;
    double err = std::abs(k15 - g7);
    return {k15, std::pow(200.0 * err, 1.5) * std::sqrt(std::abs(h)) + 1e-300};
}

inline std::complex<double> integrate_adaptive(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double abs_tol = 1e-8, int max_depth = 40) {
    std::complex<double> total = 0.0;
    std::function<void(double, double, double, int)> rec = [&](double lo, double hi, double tol,
                                                               int depth) {
        GKResult r = gk15(f, lo, hi);
        double mid = 0.5 * (lo + hi);
        if (r.error < tol || hi - lo < 1e-14 * (std::abs(lo) + std::abs(hi) + 1.0)) {
            if (depth > max_depth && r.error > tol)
                throw QuadratureError("integrate_adaptive: did not converge");
            total += r.integral;
            return;
        }
        if (depth > max_depth) throw QuadratureError("integrate_adaptive: did not converge");
        rec(lo, mid, tol * 0.5, depth + 1);
        rec(mid, hi, tol * 0.5, depth + 1);
    };
    rec(a, b, abs_tol, 0);
    return total;
}

// Fixed-panel composite Gauss-Legendre, 8 nodes per panel.
inline void gl8_nodes(double a, double b, int panels, std::vector<double>& nodes,
                      std::vector<double>& weights) {
    static const double x[4] = {0.183434642495650, 0.525532409916329, 0.796666477413627,
                                0.960289856497536};
    static const double w[4] = {0.362683783378362, 0.313706645877887, 0.222381034453374,
                                0.101228536290376};
    nodes.clear();
    weights.clear();
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h, s = 0.5 * h;
        for (int i = 0; i < 4; ++i) {
            nodes.push_back(c - s * x[i]);
            weights.push_back(w[i] * s);
            nodes.push_back(c + s * x[i]);
            weights.push_back(w[i] * s);
        }
    }
}

// Panel count heuristic for integrands oscillating like e(freq * x) on [a,b].
inline int panels_for_oscillation(double a, double b, double freq) {
    double cycles = std::abs(freq) * (b - a);
    int p = static_cast<int>(std::ceil(2.0 + cycles * 1.5));
    return std::min(p, 1 << 20);
}

} // namespace nilcircle
