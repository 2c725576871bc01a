#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nilcircle/expsums.hpp"
#include "nilcircle/profiles.hpp"

using namespace nilcircle;

namespace {
double sharp_window(double P) { return P; }  // indicator |n| <= P as a weight
} // namespace

TEST_CASE("weyl sum basics") {
    auto box = [](double P) {
        return [P](double n) { return std::abs(n) <= P ? 1.0 : 0.0; };
    };
    // theta = 0 gives the kernel mass
    auto s = weyl_sum(box(8.0), 8.0, {0.0, 0.0});
    CHECK(std::abs(s - Complex(17.0, 0.0)) < 1e-12);

    // alternating sum at theta_1 = 1/2, d = 1
    for (double P : {4.0, 5.0, 9.0}) {
        auto alt = weyl_sum(box(P), P, {0.5});
        CHECK(std::abs(alt.imag()) < 1e-12);
        CHECK(std::abs(std::abs(alt.real()) - 1.0) < 1e-12);
    }

    // modulus bound
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> td(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> theta{td(rng), td(rng)};
        auto v = weyl_sum(box(16.0), 16.0, theta);
        CHECK(std::abs(v) <= 33.0 + 1e-9);
    }
    CHECK_THROWS_AS(weyl_sum(box(1.0), 0.5, {0.0}), std::domain_error);

    // rational path agrees with the real path at moderate size
    RationalVector a{{3, 5}, 17};
    auto vr = weyl_sum_rational(box(40.0), 40.0, a);
    auto vd = weyl_sum(box(40.0), 40.0, a.as_doubles());
    CHECK(std::abs(vr - vd) < 1e-9);
    (void)sharp_window;
}

TEST_CASE("complete gauss sums") {
    CHECK(std::abs(gauss_sum_complete(RationalVector{{1, 0}, 2})) < 1e-14);
    auto g3 = gauss_sum_complete(RationalVector{{0, 1}, 3});
    CHECK(std::abs(g3 - Complex(0.0, -1.0 / std::sqrt(3.0))) < 1e-14);
    CHECK(std::abs(gauss_sum_complete(RationalVector{{0, 0}, 1}) - 1.0) < 1e-15);

    // |S| <= 1 and periodicity in a mod q
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        long long q = 1 + static_cast<long long>(rng() % 30);
        long long a1 = static_cast<long long>(rng() % q), a2 = static_cast<long long>(rng() % q);
        RationalVector a{{a1, a2}, q};
        auto v = gauss_sum_complete(a);
        CHECK(std::abs(v) <= 1.0 + 1e-12);
        RationalVector shifted{{a1 + 3 * q, a2 - 5 * q}, q};
        // same point mod 1 after reduction
        auto w = gauss_sum_complete(RationalVector::reduced(shifted.num, q));
        // reduction may change den; evaluate unreduced route directly instead
        long long m = 0;
        (void)m;
        CHECK(std::abs(w - gauss_sum_complete(RationalVector::reduced({a1, a2}, q))) < 1e-12);
    }
}

TEST_CASE("prime quadratic gauss law") {
    // For odd prime p: max over reduced a of |S(a/p)| is exactly p^{-1/2}.
    for (long long p : {3, 5, 7, 11, 13}) {
        double best = 0.0;
        for (long long a1 = 0; a1 < p; ++a1)
            for (long long a2 = 0; a2 < p; ++a2) {
                if (a1 == 0 && a2 == 0) continue;
                best = std::max(best, std::abs(gauss_sum_complete(RationalVector{{a1, a2}, p})));
            }
        CHECK(std::abs(best - 1.0 / std::sqrt(static_cast<double>(p))) < 1e-9);
    }
}

TEST_CASE("nil weyl sums") {
    GroupShape s2(2);
    auto box = [](double n) { return std::abs(n) <= 3.0 ? 1.0 : 0.0; };
    std::vector<double> zero(3, 0.0);
    // theta = 0: (sum phi)^r (sum psi)^r
    auto v = nil_weyl_sum(3.0, 2, zero, WordVariant::D, s2, box, box, SumMethod::DP);
    CHECK(std::abs(v - Complex(std::pow(7.0, 4), 0.0)) < 1e-6);

    // r = 1 matches hand enumeration over the 25-pair window
    auto sharp1 = [](double n) { return std::abs(n) <= 1.0 ? 1.0 : 0.0; };
    std::vector<double> theta{0.13, 0.71, 0.29};
    Complex hand = 0.0;
    for (long long n = -1; n <= 1; ++n)
        for (long long m = -1; m <= 1; ++m) {
            auto el = d_form<double>({static_cast<double>(n)}, {static_cast<double>(m)},
                                     WordVariant::D, s2);
            double ph = 0.0;
            for (int p = 0; p < 3; ++p) ph += theta[static_cast<size_t>(p)] * el.coords[static_cast<size_t>(p)];
            hand += std::polar(1.0, -2.0 * M_PI * ph);
        }
    auto lib = nil_weyl_sum(1.0, 1, theta, WordVariant::D, s2, sharp1, sharp1, SumMethod::Brute);
    CHECK(std::abs(lib - hand) < 1e-10);

    // DP equals brute force, r = 2, P = 3, random theta
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> td(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> th{td(rng), td(rng), td(rng)};
        for (auto variant : {WordVariant::D, WordVariant::DTilde}) {
            auto brute = nil_weyl_sum(3.0, 2, th, variant, s2, box, box, SumMethod::Brute);
            auto dp = nil_weyl_sum(3.0, 2, th, variant, s2, box, box, SumMethod::DP);
            CHECK(std::abs(brute - dp) < 1e-9);
        }
    }
}

TEST_CASE("nil gauss sums") {
    GroupShape s2(2);
    CHECK(std::abs(nil_gauss_sum(RationalVector{{0, 0, 0}, 1}, 1, WordVariant::D, s2) - 1.0) <
          1e-14);
    // d=2, r=1, q=2, a=(0,0,1): four-term sum gives 1/2
    auto v = nil_gauss_sum(RationalVector{{0, 0, 1}, 2}, 1, WordVariant::D, s2, SumMethod::Brute);
    CHECK(std::abs(v - 0.5) < 1e-14);

    // DP == brute exhaustively for q <= 5, r <= 2
    for (long long q = 1; q <= 5; ++q) {
        for (int r = 1; r <= 2; ++r) {
            for (long long a1 = 0; a1 < q; ++a1)
                for (long long a2 = 0; a2 < q; ++a2)
                    for (long long a3 = 0; a3 < q; ++a3) {
                        if (llgcd(llgcd(a1, a2), llgcd(a3, q)) != 1) continue;
                        RationalVector a{{a1, a2, a3}, q};
                        for (auto variant : {WordVariant::D, WordVariant::DTilde}) {
                            auto brute = nil_gauss_sum(a, r, variant, s2, SumMethod::Brute);
                            auto dp = nil_gauss_sum(a, r, variant, s2, SumMethod::DP);
                            CHECK(std::abs(brute - dp) < 1e-12);
                            CHECK(std::abs(dp) <= 1.0 + 1e-12);
                        }
                    }
        }
    }
    // brute refuses infeasible sizes
    CHECK_THROWS_AS(
        nil_gauss_sum(RationalVector{{1, 1, 1}, 101}, 4, WordVariant::D, s2, SumMethod::Brute),
        std::length_error);
}

TEST_CASE("nil gauss periodicity in each coordinate") {
    GroupShape s2(2);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        long long q = 2 + static_cast<long long>(rng() % 6);
        std::vector<long long> a{static_cast<long long>(rng() % q),
                                 static_cast<long long>(rng() % q),
                                 static_cast<long long>(rng() % q)};
        auto v1 = nil_gauss_sum(RationalVector{a, q}, 2, WordVariant::D, s2);
        auto shifted = a;
        shifted[static_cast<size_t>(trial % 3)] += q;
        auto v2 = nil_gauss_sum(RationalVector{shifted, q}, 2, WordVariant::D, s2);
        CHECK(std::abs(v1 - v2) < 1e-12);
    }
}

TEST_CASE("decay fit") {
    // synthetic power law q^{-1/2}
    std::vector<std::pair<double, double>> pts;
    for (double q : {2.0, 3.0, 5.0, 8.0, 13.0, 21.0})
        pts.push_back({q, std::pow(q, -0.5)});
    auto fit = decay_fit(pts);
    CHECK(std::abs(fit.slope + 0.5) < 1e-9);
    CHECK(fit.residual < 1e-12);

    std::vector<std::pair<double, double>> flat;
    for (double q : {2.0, 4.0, 9.0, 16.0}) flat.push_back({q, 3.25});
    CHECK(std::abs(decay_fit(flat).slope) < 1e-12);

    CHECK_THROWS_AS(decay_fit({{1.0, 1.0}, {2.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(decay_fit({{1.0, 1.0}, {2.0, -0.5}, {3.0, 1.0}}), std::domain_error);
}

TEST_CASE("minor arc decay trend for quadratic weyl sums") {
    // theta = (0, a/q) with q a Fibonacci denominator near sqrt(P); the
    // normalized sum should decrease at every doubling of P.
    auto box = [](double P) {
        return [P](double n) { return std::abs(n) <= P ? 1.0 : 0.0; };
    };
    std::vector<long long> fib{8, 13, 21, 34, 55, 89, 144};
    double prev = 1e9;
    int i = 0;
    for (double P : {64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0}) {
        long long q = fib[static_cast<size_t>(i++)];
        // q within [P^{1/4}, P^{3/4}]
        CHECK(static_cast<double>(q) >= std::pow(P, 0.25));
        CHECK(static_cast<double>(q) <= std::pow(P, 0.75));
        long long a = static_cast<long long>(std::round(0.6180339887 * q));
        a = llgcd(a, q) == 1 ? a : a + 1;
        auto v = weyl_sum_rational(box(P), P, RationalVector::reduced({0, a}, q));
        double ratio = std::abs(v) / (2.0 * P + 1.0);
        CHECK(ratio < prev);
        prev = ratio;
    }
    CHECK(prev < 0.2);
}

TEST_CASE("continuous profile J") {
    const double tau = 2.0;
    // J(0) = integral of chi in [2, 4]
    auto j0 = continuous_profile_J({0.0, 0.0}, 0, tau);
    CHECK(j0.imag() == 0.0);
    CHECK(j0.real() >= 2.0);
    CHECK(j0.real() <= 4.0);
    // J'(0) = 0
    CHECK(std::abs(continuous_profile_J({0.0, 0.0}, 1, tau)) < 1e-8);
    // decay along the first axis
    auto j10 = continuous_profile_J({10.0, 0.0}, 0, tau);
    CHECK(std::abs(j10) < std::abs(j0) / 2.0);
}

TEST_CASE("oscillatory integrals P") {
    GroupShape s2(2);
    const double tau = 2.0;
    auto j0 = continuous_profile_J({0.0, 0.0}, 0, tau).real();
    // P(0) = (int chi)^{2r}
    for (int r : {1, 2}) {
        auto p0 = oscillatory_P(std::vector<double>(3, 0.0), r, 0, OscVariant::P, s2, tau);
        CHECK(std::abs(p0 - std::pow(j0, 2 * r)) < 1e-4 * std::pow(j0, 2 * r));
    }
    // P'(0) = 0 (mean-zero chi')
    auto pp0 = oscillatory_P(std::vector<double>(3, 0.0), 1, 1, OscVariant::P, s2, tau);
    CHECK(std::abs(pp0) < 1e-6);
    // decay: |P(zeta)| < P(0)/2 at |zeta| = 50 along the (1,0) direction
    auto p50 = oscillatory_P({50.0, 0.0, 0.0}, 1, 0, OscVariant::P, s2, tau);
    auto p0 = oscillatory_P(std::vector<double>(3, 0.0), 1, 0, OscVariant::P, s2, tau);
    CHECK(std::abs(p50) < 0.5 * std::abs(p0));
    // PTilde at zero coincides with P at zero
    auto pt0 = oscillatory_P(std::vector<double>(3, 0.0), 1, 0, OscVariant::PTilde, s2, tau);
    CHECK(std::abs(pt0 - p0) < 1e-6 * std::abs(p0));
    CHECK_THROWS_AS(oscillatory_P(std::vector<double>(3, 0.0), 3, 0, OscVariant::P, s2, tau),
                    std::length_error);
}
