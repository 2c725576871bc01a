#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nilcircle/group.hpp"

using namespace nilcircle;

namespace {

LatticeElement elem(int d, std::vector<long long> c) {
    GroupShape s(d);
    std::vector<Int> v(c.begin(), c.end());
    return LatticeElement(s, std::move(v));
}

LatticeElement random_element(const GroupShape& s, std::mt19937_64& rng, long long range) {
    std::uniform_int_distribution<long long> dist(-range, range);
    LatticeElement g(s);
    for (auto& c : g.coords) c = Int(dist(rng));
    return g;
}

} // namespace

TEST_CASE("shape indexing") {
    GroupShape s(3);
    CHECK(s.size() == 6);
    CHECK(s.n_central() == 3);
    auto idx = s.index_set();
    REQUIRE(idx.size() == 6);
    CHECK(idx[0] == IndexPair{1, 0});
    CHECK(idx[2] == IndexPair{3, 0});
    CHECK(idx[3] == IndexPair{2, 1});
    CHECK(idx[5] == IndexPair{3, 2});
    for (int p = 0; p < s.size(); ++p) {
        auto pr = s.pair_at(p);
        CHECK(s.position(pr.l1, pr.l2) == p);
    }
    CHECK(GroupShape(2).homogeneous_dimension() == 1 + 2 + 3);
}

TEST_CASE("group law examples") {
    auto x = elem(2, {1, 1, 0});
    CHECK(multiply(x, x) == elem(2, {2, 2, 1}));
    CHECK(multiply(elem(2, {0, 1, 0}), elem(2, {1, 0, 0})) == elem(2, {1, 1, 1}));

    LatticeElement zero(GroupShape(2));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto g = random_element(GroupShape(2), rng, 100);
        CHECK(multiply(g, zero) == g);
        CHECK(multiply(zero, g) == g);
    }
    CHECK_THROWS_AS(multiply(elem(2, {0, 0, 0}), LatticeElement(GroupShape(3))),
                    std::invalid_argument);
}

TEST_CASE("inverse examples") {
    CHECK(inverse(elem(2, {1, 1, 0})) == elem(2, {-1, -1, 1}));
    LatticeElement zero(GroupShape(2));
    CHECK(inverse(zero) == zero);
    // A0(n)^{-1} = (-n, -n^2, n^3) at d = 2
    for (long long n : {-3ll, 2ll, 5ll}) {
        auto inv = inverse(moment_curve(Int(n), GroupShape(2)));
        CHECK(inv == elem(2, {-n, -n * n, n * n * n}));
    }
}

TEST_CASE("dilation examples") {
    CHECK(dilate(Int(2), elem(2, {1, 1, 1})) == elem(2, {2, 4, 8}));
    std::mt19937_64 rng(11);
    auto g = random_element(GroupShape(3), rng, 50);
    CHECK(dilate(Int(1), g) == g);
    CHECK(dilate(Int(2), moment_curve(Int(3), GroupShape(2))) ==
          moment_curve(Int(6), GroupShape(2)));
    CHECK(dilate(Int(2), moment_curve(Int(3), GroupShape(2))) == elem(2, {6, 36, 0}));
    CHECK_THROWS_AS(dilate(Int(0), g), std::domain_error);
}

TEST_CASE("moment curve examples") {
    CHECK(moment_curve(Int(3), GroupShape(3)) == elem(3, {3, 9, 27, 0, 0, 0}));
    CHECK(moment_curve(Int(0), GroupShape(2)).is_zero());
    CHECK(moment_curve(Int(-1), GroupShape(2)) == elem(2, {-1, 1, 0}));
}

TEST_CASE("bilinear form R0") {
    GroupShape s2(2);
    auto r = bilinear_r0<Int>({Int(1), Int(2)}, {Int(3), Int(4)}, s2);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == Int(6));  // x_{20} y_{10} = 2*3

    auto z = bilinear_r0<Int>({Int(0), Int(0)}, {Int(5), Int(7)}, s2);
    CHECK(z[0] == Int(0));

    GroupShape s3(3);
    auto r3 = bilinear_r0<Int>({Int(1), Int(1), Int(1)}, {Int(2), Int(2), Int(2)}, s3);
    REQUIRE(r3.size() == 3);
    for (auto& v : r3) CHECK(v == Int(2));

    CHECK_THROWS_AS(bilinear_r0<Int>({Int(1)}, {Int(1), Int(2)}, s2), std::invalid_argument);
}

TEST_CASE("word form closed forms") {
    GroupShape s2(2);
    CHECK(d_form<Int>({Int(1)}, {Int(2)}, WordVariant::D, s2) == elem(2, {1, 3, -1}));
    CHECK(d_form<Int>({Int(5)}, {Int(5)}, WordVariant::D, s2).is_zero());
    CHECK(d_form<Int>({Int(1)}, {Int(2)}, WordVariant::DTilde, s2) == elem(2, {-1, -3, 6}));
}

TEST_CASE("group invariants on random elements") {
    std::mt19937_64 rng(2024);
    for (int d : {2, 3, 4}) {
        GroupShape s(d);
        LatticeElement zero(s);
        for (int i = 0; i < 400; ++i) {
            auto x = random_element(s, rng, 1000);
            auto y = random_element(s, rng, 1000);
            auto z = random_element(s, rng, 1000);
            // associativity, exactly
            CHECK(multiply(multiply(x, y), z) == multiply(x, multiply(y, z)));
            // identity and inverse
            CHECK(multiply(x, inverse(x)) == zero);
            CHECK(multiply(inverse(x), x) == zero);
            // central commutation: h with h^{(1)} = 0 commutes with everything
            auto h = random_element(s, rng, 1000);
            for (int l = 0; l < d; ++l) h.coords[static_cast<size_t>(l)] = Int(0);
            CHECK(multiply(x, h) == multiply(h, x));
            // dilation is a homomorphism
            auto lam = Int(1 + static_cast<long long>(rng() % 5));
            CHECK(dilate(lam, multiply(x, y)) == multiply(dilate(lam, x), dilate(lam, y)));
        }
        // dilation is compatible with the moment curve
        for (long long n = -10; n <= 10; ++n)
            CHECK(dilate(Int(3), moment_curve(Int(n), s)) == moment_curve(Int(3 * n), s));
    }
}

TEST_CASE("alternating words match the closed forms") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long long> dist(-12, 12);
    for (int d : {2, 3}) {
        GroupShape s(d);
        for (int r = 1; r <= 4; ++r) {
            for (int trial = 0; trial < 125; ++trial) {
                std::vector<Int> x(static_cast<size_t>(r)), y(static_cast<size_t>(r));
                for (auto& v : x) v = Int(dist(rng));
                for (auto& v : y) v = Int(dist(rng));
                CHECK(d_form(x, y, WordVariant::D, s) ==
                      alternating_word(x, y, WordVariant::D, s));
                CHECK(d_form(x, y, WordVariant::DTilde, s) ==
                      alternating_word(x, y, WordVariant::DTilde, s));
            }
        }
    }
}

// The expansions of h_1^{-1} g_1 ... h_r^{-1} g_r hold for arbitrary group
// elements, not only moment-curve points:
//   first block:  sum_j (-h_j + g_j)
//   second block: sum_j { -(h_j2 - g_j2) + R0(h_j1, h_j1 - g_j1) }
//                 + sum_{l<j} R0(-h_l1 + g_l1, -h_j1 + g_j1)
TEST_CASE("general word expansion") {
    std::mt19937_64 rng(512);
    for (int d : {2, 3}) {
        GroupShape s(d);
        for (int r = 1; r <= 4; ++r) {
            for (int trial = 0; trial < 60; ++trial) {
                std::vector<LatticeElement> h, g;
                for (int j = 0; j < r; ++j) {
                    h.push_back(random_element(s, rng, 40));
                    g.push_back(random_element(s, rng, 40));
                }
                LatticeElement word(s);
                for (int j = 0; j < r; ++j)
                    word = multiply(multiply(word, inverse(h[static_cast<size_t>(j)])),
                                    g[static_cast<size_t>(j)]);
                // closed form
                LatticeElement expect(s);
                for (int l = 0; l < d; ++l) {
                    Int sum(0);
                    for (int j = 0; j < r; ++j)
                        sum += g[static_cast<size_t>(j)].coords[static_cast<size_t>(l)] -
                               h[static_cast<size_t>(j)].coords[static_cast<size_t>(l)];
                    expect.coords[static_cast<size_t>(l)] = sum;
                }
                std::vector<std::vector<Int>> diffs;  // -h_j1 + g_j1 per j
                for (int j = 0; j < r; ++j) {
                    std::vector<Int> v(static_cast<size_t>(d));
                    for (int l = 0; l < d; ++l)
                        v[static_cast<size_t>(l)] =
                            g[static_cast<size_t>(j)].coords[static_cast<size_t>(l)] -
                            h[static_cast<size_t>(j)].coords[static_cast<size_t>(l)];
                    diffs.push_back(std::move(v));
                }
                int p = d;
                for (int l1 = 2; l1 <= d; ++l1) {
                    for (int l2 = 1; l2 < l1; ++l2, ++p) {
                        Int sum(0);
                        for (int j = 0; j < r; ++j) {
                            const auto& hj = h[static_cast<size_t>(j)];
                            const auto& gj = g[static_cast<size_t>(j)];
                            sum += -(hj.coords[static_cast<size_t>(p)] -
                                     gj.coords[static_cast<size_t>(p)]) +
                                   hj.coords[static_cast<size_t>(l1 - 1)] *
                                       (hj.coords[static_cast<size_t>(l2 - 1)] -
                                        gj.coords[static_cast<size_t>(l2 - 1)]);
                        }
                        for (int l = 0; l < r; ++l)
                            for (int j = l + 1; j < r; ++j)
                                sum += diffs[static_cast<size_t>(l)][static_cast<size_t>(l1 - 1)] *
                                       diffs[static_cast<size_t>(j)][static_cast<size_t>(l2 - 1)];
                        expect.coords[static_cast<size_t>(p)] = sum;
                    }
                }
                CHECK(word == expect);
            }
        }
    }
}

TEST_CASE("coset decomposition") {
    GroupShape s2(2);
    // Q = 1: box is zero, lattice carries everything
    auto g = elem(2, {5, -3, 7});
    auto cp = coset_decompose(g, 1);
    CHECK(cp.box.is_zero());
    CHECK(multiply(cp.box, cp.lattice) == g);

    // worked example
    auto cp2 = coset_decompose(elem(2, {3, 3, 3}), 2);
    CHECK(cp2.box == elem(2, {1, 1, 1}));
    CHECK(multiply(cp2.box, cp2.lattice) == elem(2, {3, 3, 3}));

    CHECK_THROWS_AS(coset_decompose(g, 0), std::domain_error);

    // round trip on random elements
    std::mt19937_64 rng(31337);
    for (int d : {2, 3}) {
        GroupShape s(d);
        for (int i = 0; i < 10000 / 2; ++i) {
            auto x = random_element(s, rng, 10000);
            long long Q = 1 + static_cast<long long>(rng() % 9);
            auto c = coset_decompose(x, Q);
            for (const auto& v : c.box.coords) {
                CHECK(Int(0) <= v);
                CHECK(v < Int(Q));
            }
            for (const auto& v : c.lattice.coords) CHECK(floor_mod(v, Int(Q)) == Int(0));
            CHECK(multiply(c.box, c.lattice) == x);
        }
    }
}

TEST_CASE("coset bijection exhaustive") {
    // Injectivity and recomposition over a full window, d = 2, |coords| <= 8.
    GroupShape s(2);
    for (long long Q : {2, 3, 4}) {
        std::set<std::string> seen;
        long long count = 0;
        for (long long a = -8; a <= 8; ++a)
            for (long long b = -8; b <= 8; ++b)
                for (long long c = -8; c <= 8; ++c) {
                    auto g = elem(2, {a, b, c});
                    auto cp = coset_decompose(g, Q);
                    CHECK(multiply(cp.box, cp.lattice) == g);
                    seen.insert(to_text(cp.box) + "|" + to_text(cp.lattice));
                    ++count;
                }
        CHECK(static_cast<long long>(seen.size()) == count);
    }
}

TEST_CASE("element text form") {
    auto g = elem(2, {1, 1, 0});
    CHECK(to_text(g) == "d=2:[1,1,0]");
    CHECK(element_from_text("d=2:[1,1,0]") == g);
    auto h = elem(3, {-4, 0, 12, 5, -6, 7});
    CHECK(element_from_text(to_text(h)) == h);
}

TEST_CASE("overflow is detected, not wrapped") {
    Int big = ipow(Int(10), 37);
    CHECK_THROWS_AS(big * big, std::overflow_error);
    CHECK_NOTHROW(ipow(Int(2), 126));
    CHECK_THROWS_AS(ipow(Int(2), 127), std::overflow_error);
}
