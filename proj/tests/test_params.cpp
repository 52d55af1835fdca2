#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cyc4/params.hpp"

using namespace cyc4;

TEST_CASE("best-possible omega model is the exact lower envelope") {
    auto m = OmegaModel::best_possible();
    CHECK(m(Rat(1), Rat(1), Rat(1)) == Rat(2));
    CHECK(m(Rat(1, 3), Rat(2, 3), Rat(1, 3)) == Rat(1));
    CHECK(m(Rat(1, 2), Rat(1, 4), Rat(3, 4)) == Rat(1));
}

TEST_CASE("table model is monotone and at least the read bound") {
    auto m = OmegaModel::paper_table_2371339();
    Rat a(1, 3), b(2, 3);
    CHECK(m(a, b, a) >= a + b);
    CHECK(m(a, b, a) <= m(a + Rat(1, 10), b, a));
    CHECK(m(Rat(1), Rat(1), Rat(1)) == Rat(2371339, 1000000));
}

TEST_CASE("reference best-possible set satisfies everything, C4 tight") {
    auto p = params_best_possible();
    auto v = violations(p);
    CHECK(v.empty());
    for (auto& c : check_constraints(p))
        if (c.name == "C4-phase") {
            CHECK(c.lhs == Rat(7, 8));
            CHECK(c.rhs == Rat(7, 8));
            CHECK(c.slack() == Rat(0));
        }
}

TEST_CASE("reference current-omega set satisfies everything with razor-thin C4 slack") {
    auto p = params_current_omega();
    auto v = violations(p);
    for (auto& c : v) CAPTURE(c.name);
    CHECK(v.empty());
    for (auto& c : check_constraints(p))
        if (c.name == "C4-phase") {
            CHECK(c.slack() > 0);
            CHECK(c.slack() < Rat(1, 100000));  // about 1.4e-6 / (6w+12) scaling
        }
}

TEST_CASE("eps too large violates the ordering constraint") {
    auto p = params_best_possible();
    p.eps = Rat(1, 5);
    bool c7 = false;
    for (auto& c : violations(p))
        if (c.name == "C7-order") c7 = true;
    CHECK(c7);
}

TEST_CASE("solver reproduces the best-possible optimum at resolution 1/24") {
    auto p = solve_params(OmegaModel::best_possible(), Rat(1, 24));
    CHECK(p.eps == Rat(1, 24));
    CHECK(p.delta == Rat(1, 8));
    CHECK(p.eps1 == Rat(1, 24));
    CHECK(p.eps2 == Rat(5, 24));
}

TEST_CASE("square-interpolated omega = 3 is infeasible") {
    CHECK_THROWS_AS(solve_params(OmegaModel::square_interp(Rat(3)), Rat(1, 24)), Error);
}

TEST_CASE("resolution 1 with strict positivity is infeasible") {
    CHECK_THROWS_AS(solve_params(OmegaModel::best_possible(), Rat(1)), Error);
    auto p = solve_params(OmegaModel::best_possible(), Rat(1), false);
    CHECK(p.eps == Rat(0));
}

TEST_CASE("solver output always passes the checker") {
    for (auto res : {Rat(1, 24), Rat(1, 48)}) {
        auto p = solve_params(OmegaModel::best_possible(), res);
        CHECK(violations(p).empty());
    }
    // too coarse a grid has no positive feasible point
    CHECK_THROWS_AS(solve_params(OmegaModel::best_possible(), Rat(1, 8)), Error);
}

TEST_CASE("threshold formulas at a power of two") {
    auto p = params_best_possible();
    auto t = thresholds_for(std::uint64_t(1) << 24, p);
    CHECK(t.high == (std::uint64_t(1) << 15));               // 2^(24 * 5/8)
    CHECK(t.medium == (std::uint64_t(1) << 9));              // 2^(24 * 3/8)
    CHECK(t.tiny == (std::uint64_t(1) << 6));                // 2^(24 * 1/4)
    CHECK(t.chunk_size == (std::uint64_t(1) << 15));         // 2^(24 * 5/8)
    CHECK(t.phase_size == (std::uint64_t(1) << 21));         // 2^(24 * 7/8)
    CHECK(t.tiny < t.medium);
    CHECK(t.medium < t.high);
    CHECK(t.chunk_size * t.per_update_budget >= t.chunk_job_work_cap);
    CHECK(t.phase_size * t.per_update_budget >= t.phase_job_work_cap);
}

TEST_CASE("thresholds are monotone in mhat and bands stay ordered down to the minimum") {
    auto p = params_best_possible();
    std::uint64_t mmin = min_feasible_mhat(p);
    auto tmin = thresholds_for(mmin, p);
    CHECK(tmin.bands_feasible());
    CHECK_THROWS_AS(thresholds_for(mmin - 1, p), Error);

    // ceil rounding may re-degenerate a band at isolated points; thresholds
    // themselves are monotone wherever defined
    std::uint64_t prev_high = 0;
    for (std::uint64_t m = mmin; m < mmin * 4096; m = m * 3 / 2 + 1) {
        try {
            auto t = thresholds_for(m, p);
            CHECK(t.high >= prev_high);
            prev_high = t.high;
        } catch (const Error& e) {
            CHECK(e.kind() == ErrKind::BootstrapRange);
        }
    }
    // large reference counts give well-separated bands
    CHECK(thresholds_for(std::uint64_t(1) << 24, p).bands_separated());
}

TEST_CASE("paper-eps threshold at a power of ten") {
    auto p = params_current_omega();
    auto t = thresholds_for(1000000, p);
    // exponent 2/3 - eps = 0.6568557666...; 10^(6 * 0.65685...) = 8732.42
    CHECK(t.high == 8733);
}
