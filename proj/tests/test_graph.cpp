#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cyc4/graph.hpp"
#include "cyc4/oracle.hpp"

using namespace cyc4;

namespace {
UpdateEvent ev(Op op, Matrix m, Vid lo, Vid hi) {
    UpdateEvent e;
    e.op = op;
    e.matrix = m;
    e.lo = {lower_layer(m), lo};
    e.hi = {upper_layer(m), hi};
    return e;
}
}  // namespace

TEST_CASE("single insert and inverse pair") {
    LayeredGraph g;
    g.apply(ev(Op::Insert, Matrix::A, 0, 0));
    CHECK(g.edge_count() == 1);
    CHECK(g.deg_in_A(0) == 1);
    g.apply(ev(Op::Delete, Matrix::A, 0, 0));
    CHECK(g == LayeredGraph{});
    CHECK(g.edge_count() == 0);
}

TEST_CASE("duplicate insert and missing delete are hard errors") {
    LayeredGraph g;
    g.apply(ev(Op::Insert, Matrix::B, 1, 2));
    CHECK_THROWS_AS(g.apply(ev(Op::Insert, Matrix::B, 1, 2)), Error);
    CHECK_THROWS_AS(g.apply(ev(Op::Delete, Matrix::B, 1, 3)), Error);
    CHECK_THROWS_AS(g.apply(UpdateEvent{Op::Insert, Matrix::A, {2, 0}, {2, 1}}), Error);
}

TEST_CASE("figure-1 edge lists give the stated degrees") {
    // A: (1,1) (1,2) (1,3) (2,2) (3,2); B: (1,1) (2,1) (3,1) (3,3)
    LayeredGraph g;
    for (auto [u, v] : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 2}, {3, 2}})
        g.apply(ev(Op::Insert, Matrix::A, Vid(u), Vid(v)));
    for (auto [u, v] : {std::pair{1, 1}, {2, 1}, {3, 1}, {3, 3}})
        g.apply(ev(Op::Insert, Matrix::B, Vid(u), Vid(v)));
    CHECK(g.deg_in_A(1) == 3);
    CHECK(g.deg_lo(Matrix::B, 3) == 2);
    CHECK(g.combined_l2(2) == 3 + 1);  // three A edges at L2:2, one B edge at L2:2? none
}

TEST_CASE("degree counters equal recomputed incidence sizes on a random stream") {
    std::mt19937_64 rng(7);
    LayeredGraph g;
    std::vector<UpdateEvent> live;
    for (int i = 0; i < 1000; ++i) {
        bool del = !live.empty() && rng() % 10 < 3;
        if (del) {
            std::size_t j = rng() % live.size();
            UpdateEvent e = live[j];
            e.op = Op::Delete;
            g.apply(e);
            live[j] = live.back();
            live.pop_back();
        } else {
            Matrix m = Matrix(rng() % 4);
            UpdateEvent e = ev(Op::Insert, m, Vid(rng() % 12), Vid(rng() % 12));
            if (g.has_edge(m, e.lo.index, e.hi.index)) continue;
            g.apply(e);
            live.push_back(e);
        }
    }
    for (int m = 0; m < 4; ++m) {
        Matrix mm = Matrix(m);
        std::unordered_map<Vid, std::size_t> lo_count, hi_count;
        for (auto k : g.edge_set(mm)) {
            ++lo_count[pair_first(k)];
            ++hi_count[pair_second(k)];
        }
        for (Vid v = 0; v < 12; ++v) {
            CHECK(g.deg_lo(mm, v) == lo_count[v]);
            CHECK(g.deg_hi(mm, v) == hi_count[v]);
        }
    }
}

TEST_CASE("general reduction: event order and the square example") {
    auto ins = general_to_layered({Op::Insert, 1, 2});
    REQUIRE(ins.size() == 4);
    CHECK(ins[0].matrix == Matrix::D);
    CHECK(ins[0].is_query_point);
    CHECK(ins[1].matrix == Matrix::C);
    CHECK(ins[2].matrix == Matrix::B);
    CHECK(ins[3].matrix == Matrix::A);
    auto del = general_to_layered({Op::Delete, 1, 2});
    CHECK(del[0].matrix == Matrix::A);
    CHECK(del[3].matrix == Matrix::D);
    CHECK(del[3].is_query_point);
    CHECK_THROWS_AS(general_to_layered({Op::Insert, 3, 3}), Error);
}

TEST_CASE("walks equal paths under the replicated reduction") {
    // random general graphs with <= 20 vertices; compare layered 3-walks with
    // general 3-paths for a query pair without the connecting edge
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        GeneralGraph gg;
        LayeredGraph lg;
        int n = 6 + int(rng() % 14);
        for (int i = 0; i < 3 * n; ++i) {
            Vid u = Vid(rng() % n), v = Vid(rng() % n);
            if (u == v || gg.has(u, v)) continue;
            gg.insert(u, v);
            for (auto& e : general_to_layered({Op::Insert, u, v})) {
                lg.apply(e);
                UpdateEvent mir = e;
                mir.lo.index = e.hi.index;
                mir.hi.index = e.lo.index;
                lg.apply(mir);
            }
        }
        for (int q = 0; q < 20; ++q) {
            Vid u = Vid(rng() % n), v = Vid(rng() % n);
            if (u == v || gg.has(u, v)) continue;
            CHECK(oracle::brute_3walks_layered(lg, u, v) == oracle::brute_3paths_general(gg, u, v));
        }
    }
}
