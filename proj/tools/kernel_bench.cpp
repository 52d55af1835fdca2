// Kernel benchmark: the OpenMP-parallel multiply and oracle kernels against
// their serial references, on synthetic inputs.
#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cyc4/matmul.hpp"
#include "cyc4/oracle.hpp"

using namespace cyc4;

namespace {

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

CountMatrix random_square(std::mt19937_64& rng, std::size_t n) {
    std::vector<Vid> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = Vid(i);
    CountMatrix m(ids, ids);
    std::uniform_int_distribution<int> d(-3, 3);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.at_dense(i, j) = d(rng);
    return m;
}

template <class F>
double time_of(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return seconds(t0, t1);
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = argc > 1 ? std::size_t(std::stoul(argv[1])) : 384;
    std::mt19937_64 rng(1);
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#endif
    std::printf("matmul %zux%zu (int64):\n", n, n);
    auto a = random_square(rng, n), b = random_square(rng, n);
    CountMatrix serial, parallel, blocked, strassen;
    double ts = time_of([&] { serial = multiply(a, b, MatmulBackend::Serial); });
    double tp = time_of([&] { parallel = multiply(a, b, MatmulBackend::Parallel); });
    double tb = time_of([&] { blocked = multiply(a, b, MatmulBackend::Blocked); });
    double tt = time_of([&] { strassen = multiply(a, b, MatmulBackend::Strassen); });
    bool ok = parallel == serial && blocked == serial && strassen == serial;
    std::printf("  serial   %8.3f s\n  parallel %8.3f s  (x%.2f)\n", ts, tp, ts / tp);
    std::printf("  blocked  %8.3f s  (x%.2f)\n  strassen %8.3f s  (x%.2f)\n", tb, ts / tb, tt,
                ts / tt);
    std::printf("  results identical: %s\n", ok ? "yes" : "NO");

    std::printf("4-cycle oracle on G(n=400, m=6000):\n");
    GeneralGraph g;
    std::uniform_int_distribution<Vid> pick(0, 399);
    while (g.m() < 6000) {
        Vid u = pick(rng), v = pick(rng);
        if (u != v && !g.has(u, v)) g.insert(u, v);
    }
    std::int64_t c1 = 0, c2 = 0;
    double to = time_of([&] { c1 = oracle::brute_4cycles_general(g); });
    double tr = time_of([&] { c2 = oracle::brute_4cycles_general_ref(g); });
    std::printf("  pair-formula (omp) %8.3f s   quadruple-loop %8.3f s  (x%.2f)\n", to, tr,
                tr / to);
    std::printf("  counts: %lld vs %lld (%s)\n", (long long)c1, (long long)c2,
                c1 == c2 ? "equal" : "DIFFER");
    return ok && c1 == c2 ? 0 : 1;
}
