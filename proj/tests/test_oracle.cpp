#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cyc4/matmul.hpp"
#include "cyc4/oracle.hpp"

using namespace cyc4;
using namespace cyc4::oracle;

namespace {
UpdateEvent ev(Op op, Matrix m, Vid lo, Vid hi) {
    UpdateEvent e;
    e.op = op;
    e.matrix = m;
    e.lo = {lower_layer(m), lo};
    e.hi = {upper_layer(m), hi};
    return e;
}

LayeredGraph fig1() {
    LayeredGraph g;
    for (auto [u, v] : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 2}, {3, 2}})
        g.apply(ev(Op::Insert, Matrix::A, Vid(u), Vid(v)));
    for (auto [u, v] : {std::pair{1, 1}, {2, 1}, {3, 1}, {3, 3}})
        g.apply(ev(Op::Insert, Matrix::B, Vid(u), Vid(v)));
    return g;
}
}  // namespace

TEST_CASE("general 4-cycle counts on the named fixtures") {
    GeneralGraph square;
    square.insert(0, 1);
    square.insert(1, 2);
    square.insert(2, 3);
    square.insert(3, 0);
    CHECK(brute_4cycles_general(square) == 1);
    CHECK(brute_4cycles_general_ref(square) == 1);

    GeneralGraph k4;
    for (Vid u = 0; u < 4; ++u)
        for (Vid v = u + 1; v < 4; ++v) k4.insert(u, v);
    CHECK(brute_4cycles_general(k4) == 3);
    CHECK(brute_4cycles_general_ref(k4) == 3);

    // K_{2,2} plus a pendant edge still holds exactly one 4-cycle
    GeneralGraph k22;
    k22.insert(0, 2);
    k22.insert(0, 3);
    k22.insert(1, 2);
    k22.insert(1, 3);
    k22.insert(3, 4);
    CHECK(brute_4cycles_general(k22) == 1);
    CHECK(brute_4cycles_general_ref(k22) == 1);
}

TEST_CASE("both general counters agree on random graphs") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        GeneralGraph g;
        int n = 5 + int(rng() % 10);
        for (int i = 0; i < 2 * n; ++i) {
            Vid u = Vid(rng() % n), v = Vid(rng() % n);
            if (u != v && !g.has(u, v)) g.insert(u, v);
        }
        CHECK(brute_4cycles_general(g) == brute_4cycles_general_ref(g));
    }
}

TEST_CASE("layered 4-cycle fixtures") {
    LayeredGraph one;
    one.apply(ev(Op::Insert, Matrix::A, 0, 0));
    one.apply(ev(Op::Insert, Matrix::B, 0, 0));
    one.apply(ev(Op::Insert, Matrix::C, 0, 0));
    one.apply(ev(Op::Insert, Matrix::D, 0, 0));
    CHECK(brute_layered_4cycles(one) == 1);

    CHECK(brute_layered_4cycles(fig1()) == 0);  // C and D empty
}

TEST_CASE("random layered graphs match the quadruple-loop recount") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        LayeredGraph g;
        for (int i = 0; i < 30; ++i) {
            Matrix m = Matrix(rng() % 4);
            Vid lo = Vid(rng() % 6), hi = Vid(rng() % 6);
            if (!g.has_edge(m, lo, hi)) g.apply(ev(Op::Insert, m, lo, hi));
        }
        CHECK(brute_layered_4cycles(g) == brute_layered_4cycles_ref(g));
    }
}

TEST_CASE("3-path counting") {
    // two parallel wedges into one L3 vertex, then an exit edge
    LayeredGraph g;
    g.apply(ev(Op::Insert, Matrix::A, 0, 0));  // a - b1
    g.apply(ev(Op::Insert, Matrix::A, 0, 1));  // a - b2
    g.apply(ev(Op::Insert, Matrix::B, 0, 0));  // b1 - c
    g.apply(ev(Op::Insert, Matrix::B, 1, 0));  // b2 - c
    g.apply(ev(Op::Insert, Matrix::C, 0, 0));  // c - d
    CHECK(brute_3paths(g, {1, 0}, {4, 0}) == 2);
    CHECK_THROWS_AS(brute_3paths(g, {2, 0}, {4, 0}), Error);

    LayeredGraph empty_b;
    empty_b.apply(ev(Op::Insert, Matrix::A, 0, 0));
    empty_b.apply(ev(Op::Insert, Matrix::C, 0, 0));
    CHECK(brute_3paths(empty_b, {1, 0}, {4, 0}) == 0);
}

TEST_CASE("3-paths match the matrix product entry") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        LayeredGraph g;
        std::vector<std::tuple<Vid, Vid, std::int64_t>> ta, tb, tc;
        for (int i = 0; i < 25; ++i) {
            Vid lo = Vid(rng() % 6), hi = Vid(rng() % 6);
            Matrix m = Matrix(rng() % 3);
            if (g.has_edge(m, lo, hi)) continue;
            g.apply(ev(Op::Insert, m, lo, hi));
            (m == Matrix::A ? ta : m == Matrix::B ? tb : tc).emplace_back(lo, hi, 1);
        }
        auto a = CountMatrix::from_triples(ta), b = CountMatrix::from_triples(tb),
             c = CountMatrix::from_triples(tc);
        auto abc = multiply(multiply(a, b), c);
        for (Vid u = 0; u < 6; ++u)
            for (Vid v = 0; v < 6; ++v)
                CHECK(brute_3paths(g, {1, u}, {4, v}) == abc.get(u, v));
    }
}

TEST_CASE("figure-1 wedge counts") {
    auto g = fig1();
    CHECK(brute_2paths(g, {1, 1}, {3, 1}) == 3);
    CHECK(brute_2paths_total(g) == 6);
    CHECK(brute_2paths(g, {1, 2}, {3, 3}) == 0);
}

TEST_CASE("summation identity: layered cycles = sum of 3-paths over D edges") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        LayeredGraph g;
        for (int i = 0; i < 40; ++i) {
            Matrix m = Matrix(rng() % 4);
            Vid lo = Vid(rng() % 8), hi = Vid(rng() % 8);
            if (!g.has_edge(m, lo, hi)) g.apply(ev(Op::Insert, m, lo, hi));
        }
        std::int64_t sum = 0;
        for (auto k : g.edge_set(Matrix::D))
            sum += brute_3paths(g, {1, pair_second(k)}, {4, pair_first(k)});
        CHECK(sum == brute_layered_4cycles(g));
    }
}

TEST_CASE("2-path rows equal A*B matrix rows") {
    auto g = fig1();
    std::vector<std::tuple<Vid, Vid, std::int64_t>> ta, tb;
    for (auto k : g.edge_set(Matrix::A)) ta.emplace_back(pair_first(k), pair_second(k), 1);
    for (auto k : g.edge_set(Matrix::B)) tb.emplace_back(pair_first(k), pair_second(k), 1);
    auto ab = multiply(CountMatrix::from_triples(ta), CountMatrix::from_triples(tb));
    for (Vid x = 0; x < 4; ++x)
        for (Vid y = 0; y < 4; ++y) CHECK(brute_2paths(g, {1, x}, {3, y}) == ab.get(x, y));
}
