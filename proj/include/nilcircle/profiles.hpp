#pragma once

// Continuous oscillatory profiles:
//
//   J^iota(xi)  = int chi^iota(y) e(-A0(y).xi) dy          (xi scaled, length d)
//   P^iota(z)   = int prod_j chi^iota(w_j) chi^iota(y_j) e(-z.D(w,y)) dw dy
//
// with chi^0 = chi and chi^1 = chi' (mean zero).  J is a 1-d adaptive
// quadrature; P is a 2r-dimensional tensor integral, feasible for r <= 2.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nilcircle/cutoffs.hpp"
#include "nilcircle/group.hpp"
#include "nilcircle/quadrature.hpp"

namespace nilcircle {

namespace detail {
inline constexpr double kProfTwoPi = 6.283185307179586476925286766559;
}

inline std::complex<double> continuous_profile_J(const std::vector<double>& xi, int iota,
                                                 double tau = 2.0, double tol = 1e-8) {
    const int d = static_cast<int>(xi.size());
    const double lim = 2.0 * tau;
    auto f = [&](double y) -> std::complex<double> {
        double w = chi_iota(y, iota, tau);
        if (w == 0.0) return 0.0;
        double phase = 0.0, yp = 1.0;
        for (int l = 1; l <= d; ++l) {
            yp *= y;
            phase += xi[l - 1] * yp;
        }
        return w * std::polar(1.0, -detail::kProfTwoPi * phase);
    };
    return integrate_adaptive(f, -lim, lim, tol);
}

enum class OscVariant { P, PTilde };

// zeta is indexed by Y_d in GroupShape order.
inline std::complex<double> oscillatory_P(const std::vector<double>& zeta, int r, int iota,
                                          OscVariant variant, const GroupShape& shape,
                                          double tau = 2.0, double tol = 1e-7) {
    if (r < 1) throw std::domain_error("oscillatory_P: r must be >= 1");
    if (r > 2) throw std::length_error("oscillatory_P: tensor quadrature limited to r <= 2");
    if (static_cast<int>(zeta.size()) != shape.size())
        throw std::invalid_argument("oscillatory_P: zeta must be indexed by Y_d");
    const double lim = 2.0 * tau;
    WordVariant wv = variant == OscVariant::P ? WordVariant::D : WordVariant::DTilde;

    auto phase_dot = [&](const std::vector<double>& w, const std::vector<double>& y) {
        GroupElement<double> el = d_form<double>(w, y, wv, shape);
        double s = 0.0;
        for (int p = 0; p < shape.size(); ++p) s += zeta[p] * el.coords[p];
        return s;
    };

    if (r == 1) {
        auto inner = [&](double w) -> std::complex<double> {
            double cw = chi_iota(w, iota, tau);
            if (cw == 0.0) return 0.0;
            auto g = [&](double y) -> std::complex<double> {
                double cy = chi_iota(y, iota, tau);
                if (cy == 0.0) return 0.0;
                return cy * std::polar(1.0, -detail::kProfTwoPi * phase_dot({w}, {y}));
            };
            return cw * integrate_adaptive(g, -lim, lim, tol * 0.1);
        };
        return integrate_adaptive(inner, -lim, lim, tol);
    }

    // r == 2: fixed-panel tensor rule sized by the phase oscillation, then one
    // refinement for an error estimate.
    double freq = 0.0;
    for (int p = 0; p < shape.size(); ++p) {
        int wgt = shape.weight_at(p);
        freq += std::abs(zeta[p]) * wgt * std::pow(lim, wgt - 1) * 2.0 * r;
    }
    auto tensor_value = [&](int panels) -> std::complex<double> {
        std::vector<double> nodes, weights;
        gl8_nodes(-lim, lim, panels, nodes, weights);
        const size_t n = nodes.size();
        std::vector<double> cvals(n);
        for (size_t i = 0; i < n; ++i) cvals[i] = chi_iota(nodes[i], iota, tau);
        std::complex<double> total = 0.0;
        std::vector<double> w(2), y(2);
        for (size_t i1 = 0; i1 < n; ++i1) {
            if (cvals[i1] == 0.0) continue;
            for (size_t i2 = 0; i2 < n; ++i2) {
                if (cvals[i2] == 0.0) continue;
                for (size_t i3 = 0; i3 < n; ++i3) {
                    if (cvals[i3] == 0.0) continue;
                    double wpart = weights[i1] * cvals[i1] * weights[i2] * cvals[i2] *
                                   weights[i3] * cvals[i3];
                    for (size_t i4 = 0; i4 < n; ++i4) {
                        if (cvals[i4] == 0.0) continue;
                        w[0] = nodes[i1]; w[1] = nodes[i2];
                        y[0] = nodes[i3]; y[1] = nodes[i4];
                        total += wpart * weights[i4] * cvals[i4] *
                                 std::polar(1.0, -detail::kProfTwoPi * phase_dot(w, y));
                    }
                }
            }
        }
        return total;
    };
    int panels = std::max(3, panels_for_oscillation(-lim, lim, freq / detail::kProfTwoPi));
    if (panels > 15)
        throw std::length_error("oscillatory_P: phase too oscillatory for r = 2 tensor rule");
    std::complex<double> coarse = tensor_value(panels);
    std::complex<double> fine = tensor_value(panels + (panels + 1) / 2);
    if (std::abs(fine - coarse) > tol * (1.0 + std::abs(fine)) * 100.0)
        throw QuadratureError("oscillatory_P: tensor rule did not converge");
    return fine;
}

} // namespace nilcircle
