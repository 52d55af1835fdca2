#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cyc4/counter.hpp"
#include "cyc4/engine_main.hpp"
#include "cyc4/oracle.hpp"
#include "cyc4/stream.hpp"

using namespace cyc4;

namespace {

Thresholds desk_thresholds(std::uint64_t phase = 48, std::uint64_t budget = 1 << 20) {
    Thresholds t;
    t.mhat = 4096;
    t.tiny = 2;
    t.medium = 6;
    t.high = 14;
    t.chunk_size = 10;
    t.chunk_sparse = 2;
    t.phase_size = phase;
    t.chunk_job_work_cap = 1 << 14;
    t.phase_job_work_cap = 1 << 18;
    t.per_update_budget = budget;
    return t;
}

UpdateEvent ev(Op op, Matrix m, Vid lo, Vid hi) {
    UpdateEvent e;
    e.op = op;
    e.matrix = m;
    e.lo = {lower_layer(m), lo};
    e.hi = {upper_layer(m), hi};
    return e;
}

// Replays a layered A/B/C/D stream through the engine and the brute oracle,
// checking the query at every step.
void replay_against_oracle(MainEngine& e, const std::vector<UpdateEvent>& evs, Vid n,
                           std::uint64_t check_every = 1) {
    LayeredGraph shadow;
    std::mt19937_64 rng(99);
    std::uint64_t i = 0;
    for (const auto& up : evs) {
        e.apply(up);
        shadow.apply(up);
        if (++i % check_every != 0) continue;
        for (int q = 0; q < 4; ++q) {
            Vid u = Vid(rng() % n), v = Vid(rng() % n);
            std::int64_t want = oracle::brute_3paths(shadow, {1, u}, {4, v});
            std::int64_t got = e.query3(u, v);
            if (got != want) {
                CAPTURE(i);
                CAPTURE(u);
                CAPTURE(v);
                REQUIRE(got == want);
            }
        }
    }
}

std::vector<UpdateEvent> random_abc_stream(std::mt19937_64& rng, Vid n, int steps,
                                           double delete_frac, bool hub = false) {
    std::vector<UpdateEvent> evs;
    std::array<std::unordered_set<std::uint64_t>, 3> live;
    std::array<std::vector<std::uint64_t>, 3> list;
    std::uniform_real_distribution<double> coin(0, 1);
    for (int i = 0; i < steps; ++i) {
        int m = int(rng() % 3);
        if (!list[m].empty() && coin(rng) < delete_frac) {
            std::size_t j = rng() % list[m].size();
            auto k = list[m][j];
            list[m][j] = list[m].back();
            list[m].pop_back();
            live[m].erase(k);
            evs.push_back(ev(Op::Delete, Matrix(m), pair_first(k), pair_second(k)));
            continue;
        }
        Vid lo = Vid(rng() % n), hi = Vid(rng() % n);
        if (hub && coin(rng) < 0.5) {
            if (m == 0) hi = 0;       // pressure on L2:0
            else if (m == 1) lo = 0;  // and its B side
        }
        auto k = pack_pair(lo, hi);
        if (live[m].count(k)) continue;
        live[m].insert(k);
        list[m].push_back(k);
        evs.push_back(ev(Op::Insert, Matrix(m), lo, hi));
    }
    return evs;
}

}  // namespace

TEST_CASE("canonical all-tiny fixture answers two") {
    MainEngine e(desk_thresholds());
    e.apply(ev(Op::Insert, Matrix::A, 0, 0));
    e.apply(ev(Op::Insert, Matrix::A, 0, 1));
    e.apply(ev(Op::Insert, Matrix::B, 0, 0));
    e.apply(ev(Op::Insert, Matrix::B, 1, 0));
    e.apply(ev(Op::Insert, Matrix::C, 0, 0));
    CHECK(e.query3(0, 0) == 2);
    CHECK(e.query3(5, 9) == 0);  // degree-zero endpoint
}

TEST_CASE("single insert touching no dense or high vertices moves only tiny stores") {
    MainEngine e(desk_thresholds());
    auto before = e.ops();
    e.apply(ev(Op::Insert, Matrix::A, 0, 0));
    CHECK(e.ops() >= before);
    auto audit = e.audit_stores();
    for (auto& s : audit) {
        CAPTURE(s.name);
        CHECK(s.value == s.expected);
    }
}

TEST_CASE("insert plus delete of one B edge restores every store") {
    MainEngine e(desk_thresholds());
    e.apply(ev(Op::Insert, Matrix::A, 0, 0));
    e.apply(ev(Op::Insert, Matrix::C, 0, 0));
    auto before = e.state_digest();
    e.apply(ev(Op::Insert, Matrix::B, 0, 0));
    e.apply(ev(Op::Delete, Matrix::B, 0, 0));
    CHECK(e.state_digest() == before);
}

TEST_CASE("store audit after every update on random multi-phase streams") {
    for (std::uint64_t seed : {4ull, 11ull}) {
        std::mt19937_64 rng(seed);
        auto th = desk_thresholds(40);
        MainEngine e(th);
        auto evs = random_abc_stream(rng, 14, 140, 0.3);
        std::uint64_t i = 0;
        for (auto& up : evs) {
            e.apply(up);
            if (++i % 7 != 0) continue;
            for (auto& s : e.audit_stores()) {
                CAPTURE(i);
                CAPTURE(s.name);
                REQUIRE(s.value == s.expected);
            }
        }
        CHECK(e.phase_boundaries() >= 3);
    }
}

TEST_CASE("oracle equivalence across phases, deletions and transitions") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 5ull, 8ull}) {
        std::mt19937_64 rng(seed);
        auto th = desk_thresholds(36);
        MainEngine e(th);
        auto evs = random_abc_stream(rng, 16, 150, 0.3, seed % 2 == 0);
        replay_against_oracle(e, evs, 16);
        CHECK(e.deadline_missed() == 0);
    }
}

TEST_CASE("hub workload forces class transitions and stays exact") {
    std::mt19937_64 rng(6);
    auto th = desk_thresholds(32);
    MainEngine e(th);
    auto evs = random_abc_stream(rng, 18, 220, 0.2, true);
    replay_against_oracle(e, evs, 18, 3);
    CHECK(e.transitions_completed() > 0);
    CHECK(e.deadline_missed() == 0);
}

TEST_CASE("oscillating inside a band never switches classes") {
    auto th = desk_thresholds();
    MainEngine e(th);
    // drive L1:0 into the L/M band [6, 12) and wiggle there
    for (Vid y = 0; y < 7; ++y) e.apply(ev(Op::Insert, Matrix::A, 0, y));
    CHECK(e.side_class(1, 0) == SideCls::L);
    auto done_before = e.transitions_completed();
    for (int i = 0; i < 10; ++i) {
        e.apply(ev(Op::Delete, Matrix::A, 0, 6));
        e.apply(ev(Op::Insert, Matrix::A, 0, 6));
    }
    CHECK(e.side_class(1, 0) == SideCls::L);
    CHECK(e.transitions_completed() == done_before);
    // leaving the band on the far side forces the switch
    for (Vid y = 7; y < 12; ++y) e.apply(ev(Op::Insert, Matrix::A, 0, y));
    CHECK(e.side_class(1, 0) == SideCls::M);
}

TEST_CASE("transition switch installs exactly the recomputed rows") {
    auto th = desk_thresholds();
    MainEngine e(th);
    std::mt19937_64 rng(14);
    // background structure
    for (int i = 0; i < 30; ++i) {
        e.apply(ev(Op::Insert, Matrix::B, Vid(rng() % 8), Vid(rng() % 8)));
        Vid w = Vid(rng() % 8), v = Vid(rng() % 8);
        if (!e.graph().has_edge(Matrix::C, w, v)) e.apply(ev(Op::Insert, Matrix::C, w, v));
    }
    // drive L1:0 from T through L into M
    for (Vid y = 0; y < 12; ++y)
        if (!e.graph().has_edge(Matrix::A, 0, y)) e.apply(ev(Op::Insert, Matrix::A, 0, y));
    CHECK(e.side_class(1, 0) == SideCls::M);
    for (auto& s : e.audit_stores()) {
        CAPTURE(s.name);
        REQUIRE(s.value == s.expected);
    }
}

TEST_CASE("inverse stream restores the digest inside one phase window") {
    for (std::uint64_t seed : {3ull, 7ull, 9ull, 13ull, 17ull}) {
        std::mt19937_64 rng(seed);
        auto th = desk_thresholds(1000);  // keep everything inside one window
        MainEngine e(th);
        auto base = e.state_digest();
        auto evs = random_abc_stream(rng, 12, 90, 0.25, true);
        std::vector<UpdateEvent> applied;
        for (auto& up : evs) {
            e.apply(up);
            applied.push_back(up);
        }
        for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
            UpdateEvent inv = *it;
            inv.op = inv.op == Op::Insert ? Op::Delete : Op::Insert;
            e.apply(inv);
        }
        REQUIRE(e.state_digest() == base);
    }
}

TEST_CASE("four-copy layered counter with main engines equals layered brute counts") {
    GenOptions opt;
    opt.layered = true;
    opt.n = 10;
    opt.steps = 200;
    opt.delete_fraction = 0.3;
    opt.seed = 77;
    auto s = generate_stream(opt);
    EngineConfig cfg{EngineKind::Main, desk_thresholds(40), false, true};
    LayeredFourCopyCounter counter(make_engine_factory(cfg));
    LayeredGraph shadow;
    for (auto& e : s.layered_events) {
        std::int64_t total = counter.apply(e);
        shadow.apply(e);
        REQUIRE(total == oracle::brute_layered_4cycles(shadow));
    }
}

TEST_CASE("general counter with the main engine tracks general 4-cycles") {
    GenOptions opt;
    opt.n = 12;
    opt.steps = 160;
    opt.delete_fraction = 0.3;
    opt.seed = 5;
    opt.kind = GenKind::Hub;
    auto s = generate_stream(opt);
    EngineConfig cfg{EngineKind::Main, desk_thresholds(64), false, true};
    GeneralCounter counter(make_engine_factory(cfg));
    GeneralGraph shadow;
    for (auto& up : s.general) {
        std::int64_t total = counter.apply(up);
        if (up.op == Op::Insert) shadow.insert(up.u, up.v);
        else shadow.erase(up.u, up.v);
        REQUIRE(total == oracle::brute_4cycles_general(shadow));
    }
}

TEST_CASE("bucket attribution matches an independent path enumerator") {
    std::mt19937_64 rng(23);
    auto th = desk_thresholds(36);
    MainEngine e(th);
    auto evs = random_abc_stream(rng, 12, 120, 0.25, true);
    LayeredGraph shadow;
    std::uint64_t i = 0;
    for (auto& up : evs) {
        e.apply(up);
        shadow.apply(up);
        if (++i % 5 != 0) continue;
        Vid u = Vid(rng() % 12), v = Vid(rng() % 12);
        BucketMap got;
        std::int64_t total = e.query3_attributed(u, v, got);
        REQUIRE(total == oracle::brute_3paths(shadow, {1, u}, {4, v}));
        // independent enumeration over the engine's phase view and classes
        BucketMap want;
        for (Vid y = 0; y < 12; ++y)
            for (auto [pa, sa] : e.edge_memberships(Matrix::A, u, y))
                for (Vid w = 0; w < 12; ++w)
                    for (auto [pb, sb] : e.edge_memberships(Matrix::B, y, w))
                        for (auto [pc, sc] : e.edge_memberships(Matrix::C, w, v)) {
                            PathBucket b{int(e.mid_class(2, y)), int(e.mid_class(3, w)), pa, pb,
                                         pc};
                            want[b] += sa * sb * sc;
                            if (want[b] == 0) want.erase(b);
                        }
        CAPTURE(i);
        REQUIRE(got == want);
    }
}

TEST_CASE("bootstrap mode below feasible bands behaves like the naive engine") {
    Thresholds bad{};
    MainEngine e(bad);
    CHECK(e.bootstrap_mode());
    e.apply(ev(Op::Insert, Matrix::A, 0, 0));
    e.apply(ev(Op::Insert, Matrix::B, 0, 0));
    e.apply(ev(Op::Insert, Matrix::C, 0, 0));
    CHECK(e.query3(0, 0) == 1);
}

TEST_CASE("drift rebuild fires when m leaves the reference band") {
    auto th = desk_thresholds();
    th.mhat = 8;
    MainEngine e(th, false, /*mhat_fixed=*/false);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 40; ++i) {
        Vid lo = Vid(rng() % 8), hi = Vid(rng() % 8);
        Matrix m = Matrix(rng() % 3);
        if (!e.graph().has_edge(m, lo, hi)) e.apply(ev(Op::Insert, m, lo, hi));
    }
    CHECK(e.rebuild_events() > 0);
    LayeredGraph shadow;
    for (int m = 0; m < 4; ++m)
        for (auto k : e.graph().edge_set(Matrix(m)))
            shadow.apply(ev(Op::Insert, Matrix(m), pair_first(k), pair_second(k)));
    for (Vid u = 0; u < 8; ++u)
        for (Vid v = 0; v < 8; ++v)
            REQUIRE(e.query3(u, v) == oracle::brute_3paths(shadow, {1, u}, {4, v}));
}
