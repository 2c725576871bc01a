#pragma once

// Weight kernel on H_Q:
//
//   W_{k,w,Q}(h) = Q^{d+d'} phi_k(h)
//       int eta_{<= delta' w}(tau^k o xi) eta_{<= delta w}(tau^k o theta)
//           e(h.(xi,theta)) J_k(xi) dxi dtheta.
//
// After u = tau^k o xi, v = tau^k o theta this factors through the scaled
// profiles as
//
//   W(h) = Q^{d+d'} tau^{-k H} phi_k(h) I1(tau^-k o h1) I2(tau^-k o h2),
//   I1(a) = int eta_{<= delta' w}(u) Jt(u) e(a.u) du,
//   I2(b) = int eta_{<= delta w}(v) e(b.v) dv,
//
// with H the homogeneous dimension and Jt(u) = int chi(y) e(-A0(y).u) dy.
// I1 and I2 are evaluated on a fixed Gauss-Legendre tensor grid shared by
// all probe points, with Jt cached on the grid.

#include <cmath>
#include <complex>
#include <vector>

#include "nilcircle/decomposition.hpp"
#include "nilcircle/profiles.hpp"

namespace nilcircle {

class WeightKernel {
public:
    WeightKernel(DecompositionParams p, int k, int w, long long Q, int panels_per_cycle = 3)
        : params_(std::move(p)), k_(k), w_(w), Q_(Q) {
        params_.validate();
        if (w_ < 0 || w_ > k_) throw std::domain_error("WeightKernel: need 0 <= w <= k");
        const int d = params_.shape.degree();
        if (d != 2) throw std::length_error("WeightKernel: quadrature implemented for d = 2");

        // Outer grids sized by the largest frequency that survives phi_k:
        // |tau^-k o h| <= 2 tau^{floor(delta k)} on each axis.
        const double vmax = 2.0 * std::pow(params_.tau, std::floor(params_.delta * k_) + 1);
        r1_ = 2.0 * std::pow(params_.tau, std::floor(params_.delta_prime * w_));
        r2_ = 2.0 * std::pow(params_.tau, std::floor(params_.delta * w_));
        int panels1 = std::max(4, static_cast<int>(std::ceil(r1_ * vmax / 3.0)) * panels_per_cycle);
        int panels2 = std::max(4, static_cast<int>(std::ceil(r2_ * vmax / 3.0)) * panels_per_cycle);
        gl8_nodes(-r1_, r1_, panels1, nodes1_, weights1_);
        gl8_nodes(-r2_, r2_, panels2, nodes2_, weights2_);

        // Cache Jt and the radial cutoff on the (u1,u2) grid.
        const size_t n1 = nodes1_.size();
        jt_.assign(n1 * n1, 0.0);
        cut1_.assign(n1 * n1, 0.0);
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n1; ++j) {
                double u1 = nodes1_[i], u2 = nodes1_[j];
                double c = eta_leq(std::sqrt(u1 * u1 + u2 * u2), params_.delta_prime * w_,
                                   params_.tau);
                cut1_[i * n1 + j] = c;
                if (c != 0.0)
                    jt_[i * n1 + j] = continuous_profile_J({u1, u2}, 0, params_.tau, 1e-9);
            }
        }
        for (size_t j = 0; j < nodes2_.size(); ++j)
            cut2_.push_back(eta_leq(std::abs(nodes2_[j]), params_.delta * w_, params_.tau));
    }

    double phi(const LatticeElement& h) const {
        std::vector<double> v1(2), v2(1);
        v1[0] = h.coords[0].to_double() * std::pow(params_.tau, -k_);
        v1[1] = h.coords[1].to_double() * std::pow(params_.tau, -2.0 * k_);
        v2[0] = h.coords[2].to_double() * std::pow(params_.tau, -3.0 * k_);
        return eta_leq(norm2(v1), params_.delta * k_, params_.tau) *
               eta_leq(norm2(v2), params_.delta * k_, params_.tau);
    }

    // W(h); the integrand is conjugate-symmetric, so the value is real.
    double value(const LatticeElement& h) const {
        const double a1 = h.coords[0].to_double() * std::pow(params_.tau, -k_);
        const double a2 = h.coords[1].to_double() * std::pow(params_.tau, -2.0 * k_);
        const double b1 = h.coords[2].to_double() * std::pow(params_.tau, -3.0 * k_);

        const size_t n1 = nodes1_.size();
        std::complex<double> I1 = 0.0;
        for (size_t i = 0; i < n1; ++i) {
            std::complex<double> rowsum = 0.0;
            for (size_t j = 0; j < n1; ++j) {
                double c = cut1_[i * n1 + j];
                if (c == 0.0) continue;
                rowsum += weights1_[j] * c * jt_[i * n1 + j] *
                          std::polar(1.0, kTwoPi * a2 * nodes1_[j]);
            }
            I1 += weights1_[i] * std::polar(1.0, kTwoPi * a1 * nodes1_[i]) * rowsum;
        }
        std::complex<double> I2 = 0.0;
        for (size_t j = 0; j < nodes2_.size(); ++j) {
            if (cut2_[j] == 0.0) continue;
            I2 += weights2_[j] * cut2_[j] * std::polar(1.0, kTwoPi * b1 * nodes2_[j]);
        }
        const int H = params_.shape.homogeneous_dimension();
        double scale = std::pow(static_cast<double>(Q_), params_.shape.size()) *
                       std::pow(params_.tau, -static_cast<double>(k_) * H);
        return scale * phi(h) * std::real(I1 * I2);
    }

    // |W| <= Q^{d+d'} tau^{-kH} * int |Jt| eta * int eta.
    double mass_bound() const {
        const size_t n1 = nodes1_.size();
        double m1 = 0.0;
        for (size_t i = 0; i < n1; ++i)
            for (size_t j = 0; j < n1; ++j)
                m1 += weights1_[i] * weights1_[j] * cut1_[i * n1 + j] * std::abs(jt_[i * n1 + j]);
        double m2 = 0.0;
        for (size_t j = 0; j < nodes2_.size(); ++j) m2 += weights2_[j] * cut2_[j];
        const int H = params_.shape.homogeneous_dimension();
        return std::pow(static_cast<double>(Q_), params_.shape.size()) *
               std::pow(params_.tau, -static_cast<double>(k_) * H) * m1 * m2;
    }

    // Window sum over H_Q via the factorization; used as the Poisson check:
    // the total should be close to Q^{d+d'} * tau^{-kH} * I1(0) I2(0) ... with
    // the zero frequency carrying all the mass.
    double window_sum(long long extent1, long long extent2, long long extent_c) const {
        double s1 = 0.0;
        for (long long x1 = -extent1; x1 <= extent1; x1 += Q_) {
            for (long long x2 = -extent2; x2 <= extent2; x2 += Q_) {
                LatticeElement h(params_.shape);
                h.coords[0] = Int(x1);
                h.coords[1] = Int(x2);
                // central coordinate handled in the inner factor below; here
                // we exploit the product structure W = W1(h1) W2(h21).
                s1 += partial1(x1, x2);
            }
        }
        double s2 = 0.0;
        for (long long z = -extent_c; z <= extent_c; z += Q_) s2 += partial2(z);
        const int H = params_.shape.homogeneous_dimension();
        double scale = std::pow(static_cast<double>(Q_), params_.shape.size()) *
                       std::pow(params_.tau, -static_cast<double>(k_) * H);
        return scale * s1 * s2;
    }

    // Non-central factor phi1 * I1 and central factor phi2 * I2 separately.
    double partial1(long long x1, long long x2) const {
        const double a1 = static_cast<double>(x1) * std::pow(params_.tau, -k_);
        const double a2 = static_cast<double>(x2) * std::pow(params_.tau, -2.0 * k_);
        const size_t n1 = nodes1_.size();
        std::complex<double> I1 = 0.0;
        for (size_t i = 0; i < n1; ++i) {
            std::complex<double> rowsum = 0.0;
            for (size_t j = 0; j < n1; ++j) {
                double c = cut1_[i * n1 + j];
                if (c == 0.0) continue;
                rowsum += weights1_[j] * c * jt_[i * n1 + j] *
                          std::polar(1.0, kTwoPi * a2 * nodes1_[j]);
            }
            I1 += weights1_[i] * std::polar(1.0, kTwoPi * a1 * nodes1_[i]) * rowsum;
        }
        double phi1 = eta_leq(std::sqrt(a1 * a1 + a2 * a2), params_.delta * k_, params_.tau);
        return phi1 * std::real(I1);
    }
    double partial2(long long z) const {
        const double b1 = static_cast<double>(z) * std::pow(params_.tau, -3.0 * k_);
        std::complex<double> I2 = 0.0;
        for (size_t j = 0; j < nodes2_.size(); ++j) {
            if (cut2_[j] == 0.0) continue;
            I2 += weights2_[j] * cut2_[j] * std::polar(1.0, kTwoPi * b1 * nodes2_[j]);
        }
        double phi2 = eta_leq(std::abs(b1), params_.delta * k_, params_.tau);
        return phi2 * std::real(I2);
    }

private:
    DecompositionParams params_;
    int k_, w_;
    long long Q_;
    double r1_ = 0.0, r2_ = 0.0;
    std::vector<double> nodes1_, weights1_, nodes2_, weights2_;
    std::vector<std::complex<double>> jt_;
    std::vector<double> cut1_, cut2_;
};

} // namespace nilcircle
