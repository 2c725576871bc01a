#pragma once

// rho-variation seminorms.
//
//   V^rho(a) = sup over finite increasing sample times t_0 < ... < t_J of
//              ( sum_j |a(t_{j+1}) - a(t_j)|^rho )^{1/rho}
//
// computed exactly by dynamic programming over subsequence endpoints:
// M[j] = best rho-power sum over increasing subsequences ending at j, with
// M[j] >= 0 so a singleton start contributes nothing (a jump needs two
// points).  O(n^2).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace nilcircle {

struct IndexedSequence {
    std::vector<double> indices;                // strictly increasing
    std::vector<std::complex<double>> values;   // same length

    void validate() const {
        if (indices.size() != values.size())
            throw std::invalid_argument("IndexedSequence: length mismatch");
        for (size_t i = 1; i < indices.size(); ++i)
            if (!(indices[i - 1] < indices[i]))
                throw std::invalid_argument("IndexedSequence: indices must be strictly increasing");
    }
};

inline double variation(const std::vector<std::complex<double>>& a, double rho) {
    if (rho < 1.0) throw std::domain_error("variation: rho must be >= 1");
    const size_t n = a.size();
    if (n < 2) return 0.0;
    std::vector<double> best(n, 0.0);
    double overall = 0.0;
    for (size_t j = 1; j < n; ++j) {
        double m = 0.0;
        for (size_t i = 0; i < j; ++i) {
            double cand = best[i] + std::pow(std::abs(a[j] - a[i]), rho);
            if (cand > m) m = cand;
        }
        best[j] = m;
        if (m > overall) overall = m;
    }
    return std::pow(overall, 1.0 / rho);
}

inline double variation(const IndexedSequence& seq, double rho) {
    seq.validate();
    return variation(seq.values, rho);
}

// Vtilde^rho = sup_t |a_t| + V^rho; a genuine norm.
inline double variation_tilde(const std::vector<std::complex<double>>& a, double rho) {
    double sup = 0.0;
    for (const auto& v : a) sup = std::max(sup, std::abs(v));
    return sup + variation(a, rho);
}

inline double variation_tilde(const IndexedSequence& seq, double rho) {
    seq.validate();
    return variation_tilde(seq.values, rho);
}

// Rademacher-Menshov right-hand side for a sequence indexed by [j0, 2^m]:
//
//   sqrt(2) * sum_{i=0}^m ( sum_j |a_{(j+1)2^i} - a_{j 2^i}|^2 )^{1/2},
//   j in [j0 2^-i, 2^{m-i} - 1] cap Z.
//
// Dominates V^rho for every rho >= 2.
inline double rademacher_menshov_rhs(const std::vector<std::complex<double>>& a, int j0, int m) {
    if (m < 0 || j0 < 0 || j0 >= (1 << m))
        throw std::out_of_range("rademacher_menshov_rhs: need 0 <= j0 < 2^m");
    if (a.size() < static_cast<size_t>((1 << m) + 1))
        throw std::out_of_range("rademacher_menshov_rhs: sequence must cover [0, 2^m]");
    double total = 0.0;
    for (int i = 0; i <= m; ++i) {
        const long long step = 1ll << i;
        const long long jlo = (j0 + step - 1) / step;  // ceil(j0 / 2^i)
        const long long jhi = (1ll << (m - i)) - 1;
        double sq = 0.0;
        for (long long j = jlo; j <= jhi; ++j) {
            std::complex<double> diff = a[static_cast<size_t>((j + 1) * step)] -
                                        a[static_cast<size_t>(j * step)];
            sq += std::norm(diff);
        }
        total += std::sqrt(sq);
    }
    return std::sqrt(2.0) * total;
}

} // namespace nilcircle
