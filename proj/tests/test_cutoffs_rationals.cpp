#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nilcircle/cutoffs.hpp"
#include "nilcircle/rationals.hpp"

using namespace nilcircle;

TEST_CASE("eta0 sandwich and smoothness basics") {
    CHECK(eta0(0.5) == 1.0);
    CHECK(eta0(-1.0) == 1.0);
    CHECK(eta0(3.0) == 0.0);
    CHECK(eta0(-2.0) == 0.0);
    for (double t = -3.0; t <= 3.0; t += 0.01) {
        double v = eta0(t);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(eta0(-t) == v);  // even
    }
    // strictly between 0 and 1 in the transition zone
    CHECK(eta0(1.5) > 0.0);
    CHECK(eta0(1.5) < 1.0);
}

TEST_CASE("dyadic pieces sum to one") {
    const double tau = 2.0;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> td(-300.0, 300.0);
    for (int trial = 0; trial < 100; ++trial) {
        double t = td(rng);
        double sum = 0.0;
        for (int j = 0; j <= 60; ++j) sum += eta_j(t, j, tau);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("eta_leq telescopes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> td(-100.0, 100.0);
    std::uniform_real_distribution<double> ad(0.0, 12.0);
    for (double tau : {2.0, 1.5}) {
        for (int trial = 0; trial < 50; ++trial) {
            double t = td(rng), A = ad(rng);
            double sum = 0.0;  // explicit partial sum oracle
            for (int j = 0; j <= static_cast<int>(std::floor(A)); ++j) sum += eta_j(t, j, tau);
            CHECK(std::abs(eta_leq(t, A, tau) - sum) < 1e-12);
        }
    }
    CHECK(eta_leq(0.5, -1.0, 2.0) == 0.0);
}

TEST_CASE("chi_prime has mean zero") {
    const double tau = 2.0;
    // Riemann sum of chi' over its support [-2 tau, 2 tau]
    double sum = 0.0;
    const int n = 400000;
    const double h = 4.0 * tau / n;
    for (int i = 0; i < n; ++i) sum += chi_prime(-2.0 * tau + (i + 0.5) * h, tau) * h;
    CHECK(std::abs(sum) < 1e-8);

    CutoffFunction cp{CutoffKind::ChiPrime, tau};
    CHECK(cp(0.0) == chi_prime(0.0, tau));
}

TEST_CASE("farey sets") {
    auto r0 = farey_set(1, 0, 2.0);
    REQUIRE(r0.size() == 1);
    CHECK(r0.elements()[0].num[0] == 0);
    CHECK(r0.elements()[0].den == 1);

    auto r1 = farey_set(1, 1, 2.0);  // q in {2,3}
    REQUIRE(r1.size() == 3);
    CHECK(r1.contains(RationalVector{{1}, 2}));
    CHECK(r1.contains(RationalVector{{1}, 3}));
    CHECK(r1.contains(RationalVector{{2}, 3}));

    auto rt = fixed_denominator_set(2, 2);
    REQUIRE(rt.size() == 4);
    CHECK(rt.contains(RationalVector{{0, 0}, 1}));
    CHECK(rt.contains(RationalVector{{0, 1}, 2}));
    CHECK(rt.contains(RationalVector{{1, 0}, 2}));
    CHECK(rt.contains(RationalVector{{1, 1}, 2}));

    // enumeration is sorted and duplicate-free
    auto all = enumerate_rationals(farey_union_set(2, 3, 2.0));
    for (size_t i = 1; i < all.size(); ++i) {
        CHECK(all[i - 1] < all[i]);
    }
    // joint reduction: every element has gcd(nums, den) = 1
    for (const auto& v : all) {
        long long g = v.den;
        for (long long a : v.num) g = llgcd(g, a);
        CHECK(g == 1);
    }
    CHECK(farey_set(1, 0, 2.0).contains(RationalVector{{0}, 1}));
    CHECK_FALSE(farey_set(1, 1, 2.0).contains(RationalVector{{0}, 1}));
}

TEST_CASE("farey families partition by denominator range") {
    // R_s are disjoint and their union is all reduced fractions with
    // denominator < 2^{smax+1}
    const int smax = 4;
    size_t total = 0;
    for (int s = 0; s <= smax; ++s) total += farey_set(1, s, 2.0).size();
    CHECK(farey_union_set(1, smax, 2.0).size() == total);

    size_t expect = 0;  // sum of Euler phi over q < 32 (phi(1) counts the zero fraction)
    for (long long q = 1; q < 32; ++q) {
        long long phi = 0;
        for (long long a = 0; a < q; ++a)
            if (llgcd(a, q) == 1) ++phi;
        expect += static_cast<size_t>(phi);
    }
    CHECK(total == expect);
}

TEST_CASE("set algebra") {
    auto a = farey_union_set(1, 2, 2.0);
    auto b = fixed_denominator_set(1, 6);
    auto diff = set_difference(a, b);
    for (const auto& v : diff.elements()) {
        CHECK(a.contains(v));
        CHECK_FALSE(divides_denominator(v, 6));
    }
    auto uni = set_union(diff, b);
    // b covers dens {1,2,3,6}; a covers q < 8; union should cover both
    CHECK(uni.size() == a.size() + b.size() - (a.size() - diff.size()));
    CHECK_THROWS_AS(set_union(a, fixed_denominator_set(2, 2)), std::invalid_argument);
}

TEST_CASE("rational vector canonicalization") {
    auto v = RationalVector::reduced({6, 4}, 12);
    CHECK(v.den == 6);
    CHECK(v.num == std::vector<long long>{3, 2});
    auto w = RationalVector::reduced({-1, 14}, 12);
    CHECK(w.num[0] == 11);  // folded into [0, den)
    CHECK(w.num[1] == 2);
}
