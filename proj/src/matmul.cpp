#include "cyc4/matmul.hpp"

#include <algorithm>
#include <atomic>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cyc4 {

namespace {

using i64 = std::int64_t;

void kernel_serial(const i64* a, const i64* b, i64* c, std::size_t n, std::size_t k,
                   std::size_t m) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            i64 av = a[i * k + l];
            if (av == 0) continue;
            for (std::size_t j = 0; j < m; ++j)
                c[i * m + j] = checked_add(c[i * m + j], checked_mul(av, b[l * m + j]));
        }
}

void kernel_parallel(const i64* a, const i64* b, i64* c, std::size_t n, std::size_t k,
                     std::size_t m) {
    std::atomic<bool> overflow{false};
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(n); ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            i64 av = a[i * k + l];
            if (av == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                i64 prod, sum;
                if (__builtin_mul_overflow(av, b[l * m + j], &prod) ||
                    __builtin_add_overflow(c[i * m + j], prod, &sum))
                    overflow.store(true, std::memory_order_relaxed);
                else
                    c[i * m + j] = sum;
            }
        }
    }
    if (overflow.load()) fail(ErrKind::Overflow, "int64 overflow in matrix product");
}

void kernel_blocked(const i64* a, const i64* b, i64* c, std::size_t n, std::size_t k,
                    std::size_t m) {
    constexpr std::size_t T = 64;
    std::atomic<bool> overflow{false};
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i0 = 0; i0 < std::int64_t(n); i0 += T) {
        for (std::size_t l0 = 0; l0 < k; l0 += T)
            for (std::size_t j0 = 0; j0 < m; j0 += T) {
                std::size_t ie = std::min(std::size_t(i0) + T, n);
                std::size_t le = std::min(l0 + T, k);
                std::size_t je = std::min(j0 + T, m);
                for (std::size_t i = std::size_t(i0); i < ie; ++i)
                    for (std::size_t l = l0; l < le; ++l) {
                        i64 av = a[i * k + l];
                        if (av == 0) continue;
                        for (std::size_t j = j0; j < je; ++j) {
                            i64 prod, sum;
                            if (__builtin_mul_overflow(av, b[l * m + j], &prod) ||
                                __builtin_add_overflow(c[i * m + j], prod, &sum))
                                overflow.store(true, std::memory_order_relaxed);
                            else
                                c[i * m + j] = sum;
                        }
                    }
            }
    }
    if (overflow.load()) fail(ErrKind::Overflow, "int64 overflow in matrix product");
}

constexpr std::size_t kStrassenCutoff = 64;

void strassen_rec(const std::vector<i64>& a, const std::vector<i64>& b, std::vector<i64>& c,
                  std::size_t n) {
    if (n <= kStrassenCutoff) {
        std::fill(c.begin(), c.end(), 0);
        kernel_serial(a.data(), b.data(), c.data(), n, n, n);
        return;
    }
    std::size_t h = n / 2;
    auto quad = [&](const std::vector<i64>& src, int qi, int qj) {
        std::vector<i64> q(h * h);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < h; ++j) q[i * h + j] = src[(i + qi * h) * n + (j + qj * h)];
        return q;
    };
    auto add = [&](const std::vector<i64>& x, const std::vector<i64>& y, int sign) {
        std::vector<i64> r(h * h);
        for (std::size_t i = 0; i < h * h; ++i)
            r[i] = checked_add(x[i], sign > 0 ? y[i] : -y[i]);
        return r;
    };
    auto a11 = quad(a, 0, 0), a12 = quad(a, 0, 1), a21 = quad(a, 1, 0), a22 = quad(a, 1, 1);
    auto b11 = quad(b, 0, 0), b12 = quad(b, 0, 1), b21 = quad(b, 1, 0), b22 = quad(b, 1, 1);
    std::vector<i64> m1(h * h), m2(h * h), m3(h * h), m4(h * h), m5(h * h), m6(h * h), m7(h * h);
    strassen_rec(add(a11, a22, 1), add(b11, b22, 1), m1, h);
    strassen_rec(add(a21, a22, 1), b11, m2, h);
    strassen_rec(a11, add(b12, b22, -1), m3, h);
    strassen_rec(a22, add(b21, b11, -1), m4, h);
    strassen_rec(add(a11, a12, 1), b22, m5, h);
    strassen_rec(add(a21, a11, -1), add(b11, b12, 1), m6, h);
    strassen_rec(add(a12, a22, -1), add(b21, b22, 1), m7, h);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j) {
            std::size_t q = i * h + j;
            c[i * n + j] = checked_add(checked_add(m1[q], m4[q]), checked_add(-m5[q], m7[q]));
            c[i * n + (j + h)] = checked_add(m3[q], m5[q]);
            c[(i + h) * n + j] = checked_add(m2[q], m4[q]);
            c[(i + h) * n + (j + h)] = checked_add(checked_add(m1[q], -m2[q]), checked_add(m3[q], m6[q]));
        }
}

void kernel_strassen(const i64* a, const i64* b, i64* c, std::size_t n, std::size_t k,
                     std::size_t m) {
    std::size_t top = std::max({n, k, m});
    std::size_t p = 1;
    while (p < top) p <<= 1;
    if (p <= kStrassenCutoff) {
        kernel_serial(a, b, c, n, k, m);
        return;
    }
    std::vector<i64> pa(p * p, 0), pb(p * p, 0), pc(p * p, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) pa[i * p + l] = a[i * k + l];
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < m; ++j) pb[l * p + j] = b[l * m + j];
    strassen_rec(pa, pb, pc, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) c[i * m + j] = pc[i * p + j];
}

}  // namespace

CountMatrix multiply_aligned(const CountMatrix& a, const CountMatrix& b, int backend) {
    // Inner dimension = intersection of a's column ids and b's row ids.
    std::vector<Vid> inner;
    inner.reserve(std::min(a.cols(), b.rows()));
    for (Vid c : a.col_ids())
        if (b.has_row(c)) inner.push_back(c);

    const std::size_t n = a.rows(), k = inner.size(), m = b.cols();
    std::vector<i64> abuf(n * k), bbuf(k * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) abuf[i * k + l] = a.get(a.row_ids()[i], inner[l]);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < m; ++j) bbuf[l * m + j] = b.get(inner[l], b.col_ids()[j]);

    CountMatrix out(a.row_ids(), b.col_ids());
    if (n == 0 || m == 0) return out;
    std::vector<i64> cbuf(n * m, 0);
    switch (MatmulBackend(backend)) {
        case MatmulBackend::Serial:   kernel_serial(abuf.data(), bbuf.data(), cbuf.data(), n, k, m); break;
        case MatmulBackend::Parallel: kernel_parallel(abuf.data(), bbuf.data(), cbuf.data(), n, k, m); break;
        case MatmulBackend::Blocked:  kernel_blocked(abuf.data(), bbuf.data(), cbuf.data(), n, k, m); break;
        case MatmulBackend::Strassen: kernel_strassen(abuf.data(), bbuf.data(), cbuf.data(), n, k, m); break;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out.at_dense(i, j) = cbuf[i * m + j];
    return out;
}

CountMatrix multiply(const CountMatrix& a, const CountMatrix& b, MatmulBackend backend) {
    return multiply_aligned(a, b, int(backend));
}

}  // namespace cyc4
