#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cyc4/matmul.hpp"
#include "cyc4/product_job.hpp"

using namespace cyc4;

namespace {

CountMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m, int lo, int hi,
                          Vid row_base = 0, Vid col_base = 0) {
    std::vector<Vid> rids, cids;
    for (std::size_t i = 0; i < n; ++i) rids.push_back(Vid(row_base + i));
    for (std::size_t j = 0; j < m; ++j) cids.push_back(Vid(col_base + j));
    CountMatrix a(rids, cids);
    std::uniform_int_distribution<int> d(lo, hi);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) a.at_dense(i, j) = d(rng);
    return a;
}

// independent schoolbook oracle
CountMatrix schoolbook(const CountMatrix& a, const CountMatrix& b) {
    CountMatrix c(a.row_ids(), b.col_ids());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::int64_t acc = 0;
            for (Vid mid : a.col_ids())
                acc += a.get(a.row_ids()[i], mid) * b.get(mid, b.col_ids()[j]);
            c.at_dense(i, j) = acc;
        }
    return c;
}

}  // namespace

TEST_CASE("identity operands") {
    std::vector<Vid> ids{3, 7, 9};
    auto i3 = CountMatrix::identity(ids);
    CHECK(multiply(i3, i3) == i3);
}

TEST_CASE("figure-1 biadjacency product entry") {
    auto a = CountMatrix::from_triples({{1, 1, 1}, {1, 2, 1}, {1, 3, 1}, {2, 2, 1}, {3, 2, 1}});
    auto b = CountMatrix::from_triples({{1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {3, 3, 1}});
    auto ab = multiply(a, b);
    CHECK(ab.get(1, 1) == 3);
}

TEST_CASE("all backends agree with the schoolbook oracle") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 12; ++t) {
        std::size_t n = 1 + rng() % 9, k = 1 + rng() % 9, m = 1 + rng() % 9;
        auto a = random_matrix(rng, n, k, -4, 4);
        auto b = random_matrix(rng, k, m, -4, 4);
        auto want = schoolbook(a, b);
        for (auto bk : {MatmulBackend::Serial, MatmulBackend::Parallel, MatmulBackend::Blocked,
                        MatmulBackend::Strassen})
            CHECK(multiply(a, b, bk) == want);
    }
}

TEST_CASE("strassen above the cutoff agrees with the serial kernel") {
    std::mt19937_64 rng(33);
    auto a = random_matrix(rng, 96, 96, -3, 3);
    auto b = random_matrix(rng, 96, 96, -3, 3);
    CHECK(multiply(a, b, MatmulBackend::Strassen) == multiply(a, b, MatmulBackend::Serial));
}

TEST_CASE("index universes: zero-padding over the id intersection") {
    // a's columns {0,1,2}, b's rows {1,2,5}: only 1 and 2 contribute
    auto a = CountMatrix::from_triples({{0, 0, 2}, {0, 1, 3}, {0, 2, 5}});
    auto b = CountMatrix::from_triples({{1, 0, 7}, {2, 0, 1}, {5, 0, 100}});
    auto ab = multiply(a, b);
    CHECK(ab.get(0, 0) == 3 * 7 + 5 * 1);
}

TEST_CASE("submatrix restriction and zero-line dropping") {
    auto a = CountMatrix::from_triples({{1, 1, 1}, {1, 2, 1}, {1, 3, 1}, {2, 2, 1}, {3, 2, 1}});
    auto r = a.submatrix({1}, {1, 2, 3});
    CHECK(r.rows() == 1);
    CHECK(r.cols() == 3);
    CHECK(r.get(1, 1) == 1);
    CHECK(r.get(1, 2) == 1);
    CHECK(r.get(1, 3) == 1);

    auto empty = a.submatrix({}, {1, 2, 3});
    CHECK(empty.rows() == 0);

    // complementary splits re-sum to the original product
    std::mt19937_64 rng(4);
    auto x = random_matrix(rng, 6, 6, -2, 2);
    auto y = random_matrix(rng, 6, 6, -2, 2);
    std::unordered_set<Vid> left{0, 1, 2}, right{3, 4, 5}, all{0, 1, 2, 3, 4, 5};
    auto full = multiply(x, y);
    auto xl = multiply(x.submatrix(all, left), y.submatrix(left, all));
    auto xr = multiply(x.submatrix(all, right), y.submatrix(right, all));
    for (Vid i = 0; i < 6; ++i)
        for (Vid j = 0; j < 6; ++j) CHECK(full.get(i, j) == xl.get(i, j) + xr.get(i, j));
}

TEST_CASE("associativity on random triples") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 8; ++t) {
        auto a = random_matrix(rng, 5, 5, -3, 3);
        auto b = random_matrix(rng, 5, 5, -3, 3);
        auto c = random_matrix(rng, 5, 5, -3, 3);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    }
}

TEST_CASE("signed cancellation splits") {
    std::mt19937_64 rng(15);
    auto a = random_matrix(rng, 5, 5, -3, 3);
    auto pos = random_matrix(rng, 5, 5, 0, 3);
    auto neg = random_matrix(rng, 5, 5, -3, 0);
    CountMatrix sum(pos.row_ids(), pos.col_ids());
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) sum.at_dense(i, j) = pos.at_dense(i, j) + neg.at_dense(i, j);
    auto lhs = multiply(a, sum);
    auto p = multiply(a, pos);
    auto n = multiply(a, neg);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(lhs.at_dense(i, j) == p.at_dense(i, j) + n.at_dense(i, j));
}

TEST_CASE("overflow detection is a hard error") {
    auto a = CountMatrix::from_triples({{0, 0, std::int64_t(1) << 62}});
    auto b = CountMatrix::from_triples({{0, 0, 4}});
    CHECK_THROWS_AS(multiply(a, b, MatmulBackend::Serial), Error);
    CHECK_THROWS_AS(multiply(a, b, MatmulBackend::Parallel), Error);
}

TEST_CASE("job: budget covering all work finishes in one step") {
    std::mt19937_64 rng(2);
    auto a = random_matrix(rng, 4, 4, -3, 3);
    auto b = random_matrix(rng, 4, 4, -3, 3);
    ProductJob j(a, b);
    CHECK(j.step(j.ops_total()) == ProductJob::Status::Done);
    CHECK(j.result() == multiply(a, b));
}

TEST_CASE("job: unit budget on a 3x3 product takes at most 27 steps") {
    std::mt19937_64 rng(6);
    auto a = random_matrix(rng, 3, 3, -2, 2);
    auto b = random_matrix(rng, 3, 3, -2, 2);
    ProductJob j(a, b);
    int steps = 0;
    while (j.step(1) == ProductJob::Status::Running) ++steps;
    CHECK(steps + 1 <= 27);
    CHECK(j.result() == multiply(a, b));
}

TEST_CASE("two interleaved jobs are both exact") {
    std::mt19937_64 rng(19);
    auto a = random_matrix(rng, 5, 6, -2, 2);
    auto b = random_matrix(rng, 6, 4, -2, 2);
    auto c = random_matrix(rng, 4, 4, -2, 2, 100, 100);
    auto d = random_matrix(rng, 4, 5, -2, 2, 100, 200);
    ProductJob j1(a, b), j2(c, d);
    while (!j1.done() || !j2.done()) {
        j1.step(3);
        j2.step(5);
    }
    CHECK(j1.result() == multiply(a, b));
    CHECK(j2.result() == multiply(c, d));
}

TEST_CASE("step-invariance across 100 random budget schedules") {
    std::mt19937_64 rng(27);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + rng() % 6, k = 1 + rng() % 6, m = 1 + rng() % 6;
        auto a = random_matrix(rng, n, k, -3, 3);
        auto b = random_matrix(rng, k, m, -3, 3);
        bool three = rng() % 2 == 0;
        CountMatrix c = three ? random_matrix(rng, m, 1 + rng() % 6, -3, 3) : CountMatrix{};
        auto run = [&](bool oneshot) {
            ProductJob j = three ? ProductJob(a, b, c) : ProductJob(a, b);
            if (oneshot) j.run_to_completion();
            else
                while (!j.done()) j.step(1 + rng() % 7);
            return j.result();
        };
        auto sliced = run(false);
        ProductJob ref = three ? ProductJob(a, b, c) : ProductJob(a, b);
        ref.run_to_completion();
        CHECK(sliced == ref.result());
        CHECK(ref.result() == (three ? multiply(multiply(a, b), c) : multiply(a, b)));
    }
}
