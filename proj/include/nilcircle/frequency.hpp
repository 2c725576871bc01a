#pragma once

// Frequency-side helpers: partial dilations, the symbol
//
//   S_k(xi) = sum_n tau^-k chi(tau^-k n) e(-A0(n).xi),   xi in T^d,
//
// its difference Delta_k S_k = S_{k+1} - S_k, and a power-of-two FFT used by
// the kernel decomposition engine.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nilcircle/cutoffs.hpp"
#include "nilcircle/group.hpp"

namespace nilcircle {

// Partial dilation on the non-central block: (Lambda^l x_l)_{l=1..d}.
inline std::vector<double> partial_dilate_noncentral(double lambda, std::vector<double> x) {
    double p = 1.0;
    for (auto& v : x) { p *= lambda; v *= p; }
    return x;
}

// Partial dilation on the central block, exponents l1+l2 in shape order.
inline std::vector<double> partial_dilate_central(double lambda, std::vector<double> x,
                                                  const GroupShape& shape) {
    const int d = shape.degree();
    int i = 0;
    for (int l1 = 2; l1 <= d; ++l1)
        for (int l2 = 1; l2 < l1; ++l2, ++i) x[i] *= std::pow(lambda, l1 + l2);
    return x;
}

// Continuous evaluation (long-double phase folding); iota = 1 selects the
// difference Delta_k S_k.
inline std::complex<double> frequency_kernel_S(const std::vector<double>& xi, int k, int iota,
                                               double tau = 2.0) {
    if (iota != 0 && iota != 1) throw std::domain_error("frequency_kernel_S: iota in {0,1}");
    const int d = static_cast<int>(xi.size());
    auto eval = [&](int kk) {
        const double scale = std::pow(tau, -kk);
        const long long span = static_cast<long long>(std::floor(2.0 / scale));
        std::complex<double> s = 0.0;
        for (long long n = -span; n <= span; ++n) {
            double w = scale * chi(scale * static_cast<double>(n));
            if (w == 0.0) continue;
            long double phase = 0.0L, np = 1.0L;
            for (int l = 1; l <= d; ++l) {
                np *= static_cast<long double>(n);
                phase += std::fmod(static_cast<long double>(xi[l - 1]) * np, 1.0L);
            }
            s += w * std::polar(1.0, -2.0 * M_PI * static_cast<double>(std::fmod(phase, 1.0L)));
        }
        return s;
    };
    return iota == 0 ? eval(k) : eval(k + 1) - eval(k);
}

// In-place iterative radix-2 FFT; forward kernel e^{-2 pi i jm / M}.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse = false) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size must be 2^k");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

} // namespace nilcircle
