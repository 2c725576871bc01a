#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nilcircle/serialize.hpp"
#include "nilcircle/sparse.hpp"

using namespace nilcircle;

namespace {

LatticeElement elem(int d, std::vector<long long> c) {
    std::vector<Int> v(c.begin(), c.end());
    return LatticeElement(GroupShape(d), std::move(v));
}

SparseFunction random_sparse(const GroupShape& s, std::mt19937_64& rng, int n, long long range,
                             bool complex_values = true) {
    std::uniform_int_distribution<long long> dist(-range, range);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    SparseFunction f(s);
    for (int i = 0; i < n; ++i) {
        LatticeElement g(s);
        for (auto& c : g.coords) c = Int(dist(rng));
        f.add(g, complex_values ? Complex(val(rng), val(rng)) : Complex(val(rng), 0.0));
    }
    return f;
}

} // namespace

TEST_CASE("delta convolution and unit") {
    GroupShape s(2);
    auto a = elem(2, {1, 0, 0});
    auto b = elem(2, {0, 1, 0});
    auto conv = convolve(SparseFunction::delta(a), SparseFunction::delta(b));
    REQUIRE(conv.support_size() == 1);
    // delta_a * delta_b = delta_{b.a}
    CHECK(std::abs(conv.value(elem(2, {1, 1, 1})) - 1.0) < 1e-15);

    std::mt19937_64 rng(5);
    auto f = random_sparse(s, rng, 20, 50);
    auto same = convolve(f, SparseFunction::delta(LatticeElement(s)));
    REQUIRE(same.support_size() == f.support_size());
    for (const auto& [g, v] : f.entries()) CHECK(std::abs(same.value(g) - v) < 1e-14);
}

TEST_CASE("both convolution displays agree") {
    // sum_y f(y^-1 x) g(y) = sum_z f(z) g(x z^-1)
    GroupShape s(2);
    std::mt19937_64 rng(17);
    auto f = random_sparse(s, rng, 15, 20);
    auto g = random_sparse(s, rng, 15, 20);
    auto conv = convolve(f, g);
    for (const auto& [x, v] : conv.items_sorted()) {
        Complex alt = 0.0;
        for (const auto& [z, fz] : f.entries()) alt += fz * g.value(multiply(x, inverse(z)));
        CHECK(std::abs(alt - v) < 1e-12);
    }
}

TEST_CASE("convolution associativity and Young") {
    GroupShape s(2);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_sparse(s, rng, 12, 30);
        auto g = random_sparse(s, rng, 12, 30);
        auto h = random_sparse(s, rng, 12, 30);
        auto lhs = convolve(convolve(f, g), h);
        auto rhs = convolve(f, convolve(g, h));
        for (const auto& [x, v] : lhs.items_sorted()) CHECK(std::abs(rhs.value(x) - v) < 1e-12);
        CHECK(lhs.support_size() == rhs.support_size());
        CHECK(lp_norm(convolve(f, g), 1.0) <= lp_norm(f, 1.0) * lp_norm(g, 1.0) + 1e-12);
    }
    // exact on integer-valued functions
    SparseFunction fi(s), gi(s), hi(s);
    std::uniform_int_distribution<long long> dist(-9, 9);
    for (int i = 0; i < 10; ++i) {
        LatticeElement a(s), b(s), c(s);
        for (auto& x : a.coords) x = Int(dist(rng));
        for (auto& x : b.coords) x = Int(dist(rng));
        for (auto& x : c.coords) x = Int(dist(rng));
        fi.add(a, static_cast<double>(dist(rng)));
        gi.add(b, static_cast<double>(dist(rng)));
        hi.add(c, static_cast<double>(dist(rng)));
    }
    auto l = convolve(convolve(fi, gi), hi), r = convolve(fi, convolve(gi, hi));
    for (const auto& [x, v] : l.items_sorted()) CHECK(r.value(x) == v);
}

TEST_CASE("lp norms") {
    GroupShape s(2);
    auto d = SparseFunction::delta(elem(2, {3, 1, -2}));
    for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(d, p) == 1.0);
    CHECK(lp_norm(d, std::numeric_limits<double>::infinity()) == 1.0);

    SparseFunction f(s);
    f.add(elem(2, {0, 0, 0}), 1.0);
    f.add(elem(2, {1, 0, 0}), Complex(0.0, 1.0));
    f.add(elem(2, {2, 0, 0}), -1.0);
    CHECK(std::abs(lp_norm(f, 2.0) - std::sqrt(3.0)) < 1e-15);

    std::mt19937_64 rng(3);
    auto g = random_sparse(s, rng, 25, 10);
    CHECK(lp_norm(g, 1.0) >= lp_norm(g, 2.0));
    CHECK(lp_norm(g, 2.0) >= lp_norm(g, std::numeric_limits<double>::infinity()));
    CHECK_THROWS_AS(lp_norm(g, 0.5), std::domain_error);
}

TEST_CASE("average kernel structure") {
    GroupShape s(2);
    for (double N : {1.0, 2.0, 5.0, 16.0}) {
        AverageParams prm(N, s);
        auto G = average_kernel(prm);
        // value at A0(0): chi(0)/N = 1/N
        CHECK(std::abs(G.value(LatticeElement(s)) - 1.0 / N) < 1e-15);
        // support on the moment curve, |n| <= 2N
        double mass = 0.0;
        for (const auto& [g, v] : G.entries()) {
            long long n = g.coords[0].to_int64();
            CHECK(std::abs(static_cast<double>(n)) <= 2.0 * N);
            CHECK(g == moment_curve(Int(n), s));
            CHECK(v.imag() == 0.0);
            CHECK(v.real() >= 0.0);
            mass += v.real();
        }
        // sandwich: mass in [2 + 1/N, 4 + 1/N]
        CHECK(mass >= 2.0 + 1.0 / N - 1e-12);
        CHECK(mass <= 4.0 + 1.0 / N + 1e-12);
    }
}

TEST_CASE("apply_average equals convolution with the kernel") {
    GroupShape s(2);
    std::mt19937_64 rng(77);
    AverageParams prm(4.0, s);
    auto f = random_sparse(s, rng, 18, 25);
    auto direct = apply_average(f, prm);
    auto via_conv = convolve(f, average_kernel(prm));
    CHECK(direct.support_size() == via_conv.support_size());
    for (const auto& [x, v] : direct.items_sorted())
        CHECK(std::abs(via_conv.value(x) - v) < 1e-13);

    // positivity
    SparseFunction pos(s);
    std::uniform_int_distribution<long long> dist(-10, 10);
    for (int i = 0; i < 12; ++i) {
        LatticeElement g(s);
        for (auto& c : g.coords) c = Int(dist(rng));
        pos.add(g, std::abs(dist(rng)) + 1.0);
    }
    auto avg = apply_average(pos, prm);
    for (const auto& [x, v] : avg.entries()) CHECK(v.real() >= -1e-15);

    // N = 1, f = delta_0: M_1 f at A0(-1) equals chi(1)
    auto d0 = SparseFunction::delta(LatticeElement(s));
    auto m1 = apply_average(d0, AverageParams(1.0, s));
    CHECK(std::abs(m1.value(moment_curve(Int(-1), s)) - chi(1.0)) < 1e-15);
}

TEST_CASE("adjoint kernel law") {
    GroupShape s(2);
    std::mt19937_64 rng(41);
    auto K = random_sparse(s, rng, 10, 15);
    auto Kadj = adjoint_kernel(K);
    for (int trial = 0; trial < 6; ++trial) {
        auto f = random_sparse(s, rng, 12, 15);
        auto g = random_sparse(s, rng, 12, 15);
        Complex lhs = inner_product(convolve(f, K), g);
        Complex rhs = inner_product(f, convolve(g, Kadj));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    CHECK(adjoint_kernel(Kadj).support_size() == K.support_size());
}

TEST_CASE("ttstar kernel identities") {
    GroupShape s(2);
    auto zero = LatticeElement(s);
    // r = 1, L = K = delta_0: A^1 = delta_0
    auto d0 = SparseFunction::delta(zero);
    auto a1 = ttstar_kernel({d0}, {d0});
    REQUIRE(a1.support_size() == 1);
    CHECK(std::abs(a1.value(zero) - 1.0) < 1e-15);

    // operator composition oracle: S^*T f = f * A^1 with L = K = G_2
    std::mt19937_64 rng(4242);
    auto G2 = average_kernel(AverageParams(2.0, s));
    auto f = random_sparse(s, rng, 10, 8);
    auto oracle = convolve(convolve(f, adjoint_kernel(G2)), G2);
    auto viaA = convolve(f, ttstar_kernel({G2}, {G2}));
    for (const auto& [x, v] : oracle.items_sorted()) CHECK(std::abs(viaA.value(x) - v) < 1e-12);
    CHECK(oracle.support_size() == viaA.support_size());

    // real kernels: A^r(0) >= 0 (matched words come in |.|^2 pairs)
    CHECK(ttstar_kernel({G2}, {G2}).value(zero).real() >= 0.0);

    CHECK_THROWS_AS(ttstar_kernel({}, {}), std::invalid_argument);
}

TEST_CASE("ttstar matches r-fold composition") {
    GroupShape s(2);
    std::mt19937_64 rng(99);
    for (int r : {2, 3}) {
        std::vector<SparseFunction> Ls, Ks;
        for (int j = 0; j < r; ++j) {
            // small moment-curve kernels keep the word enumeration tame
            Ls.push_back(average_kernel(AverageParams(r == 3 ? 1.0 : 2.0, s)));
            Ks.push_back(random_sparse(s, rng, 5, 2));
        }
        auto f = random_sparse(s, rng, 8, 4);
        SparseFunction oracle = f;
        for (int j = 0; j < r; ++j)
            oracle = convolve(convolve(oracle, adjoint_kernel(Ls[static_cast<size_t>(j)])),
                              Ks[static_cast<size_t>(j)]);
        auto viaA = convolve(f, ttstar_kernel(Ls, Ks));
        for (const auto& [x, v] : oracle.items_sorted())
            CHECK(std::abs(viaA.value(x) - v) < 1e-12);
    }
}

TEST_CASE("sparse text and json round trip") {
    GroupShape s(2);
    std::mt19937_64 rng(8);
    auto f = random_sparse(s, rng, 9, 12);
    auto g = sparse_from_text(to_text(f));
    REQUIRE(g.support_size() == f.support_size());
    for (const auto& [x, v] : f.entries()) CHECK(std::abs(g.value(x) - v) < 1e-15);
    auto j = to_json(f);
    CHECK(j["support"] == f.support_size());
}
