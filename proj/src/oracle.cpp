#include "cyc4/oracle.hpp"

#include <algorithm>

namespace cyc4 {

void GeneralGraph::insert(Vid u, Vid v) {
    if (u == v) fail(ErrKind::SelfLoop, "self loop");
    if (has(u, v)) fail(ErrKind::DuplicateInsert, "duplicate insert");
    Vid top = std::max(u, v);
    if (top >= adj_.size()) adj_.resize(std::size_t(top) + 1);
    edges_.insert(key(u, v));
    adj_[u].push_back(v);
    adj_[v].push_back(u);
}

void GeneralGraph::erase(Vid u, Vid v) {
    if (!has(u, v)) fail(ErrKind::MissingDelete, "delete of absent edge");
    edges_.erase(key(u, v));
    auto drop = [](std::vector<Vid>& vec, Vid x) {
        auto it = std::find(vec.begin(), vec.end(), x);
        *it = vec.back();
        vec.pop_back();
    };
    drop(adj_[u], v);
    drop(adj_[v], u);
}

namespace oracle {

// cycles = sum over pairs {i,k} of C(|N(i) & N(k)|, 2) / 2: each 4-cycle has
// two opposite pairs, each contributing one common-neighbor pair.
std::int64_t brute_4cycles_general(const GeneralGraph& g) {
    const std::int64_t n = std::int64_t(g.n());
    std::int64_t twice = 0;
#pragma omp parallel for schedule(dynamic, 4) reduction(+ : twice)
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t k = i + 1; k < n; ++k) {
            std::int64_t c = 0;
            for (Vid w : g.adj(Vid(i)))
                if (g.has(w, Vid(k))) ++c;
            twice += c * (c - 1) / 2;
        }
    }
    return twice / 2;
}

std::int64_t brute_4cycles_general_ref(const GeneralGraph& g) {
    const Vid n = Vid(g.n());
    std::int64_t count = 0;
    // a is the smallest vertex of the cycle; b < d breaks the reflection.
    for (Vid a = 0; a < n; ++a)
        for (Vid b = a + 1; b < n; ++b) {
            if (!g.has(a, b)) continue;
            for (Vid c = a + 1; c < n; ++c) {
                if (c == b || !g.has(b, c)) continue;
                for (Vid d = b + 1; d < n; ++d) {
                    if (d == a || d == c) continue;
                    if (g.has(c, d) && g.has(d, a)) ++count;
                }
            }
        }
    return count;
}

std::int64_t brute_layered_4cycles(const LayeredGraph& g) {
    std::int64_t total = 0;
    std::vector<std::uint64_t> a_edges(g.edge_set(Matrix::A).begin(), g.edge_set(Matrix::A).end());
    const std::int64_t na = std::int64_t(a_edges.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total)
    for (std::int64_t i = 0; i < na; ++i) {
        Vid v1 = pair_first(a_edges[i]), v2 = pair_second(a_edges[i]);
        for (Vid v3 : g.adj_lo(Matrix::B, v2))
            for (Vid v4 : g.adj_lo(Matrix::C, v3))
                if (g.has_edge(Matrix::D, v4, v1)) ++total;
    }
    return total;
}

std::int64_t brute_layered_4cycles_ref(const LayeredGraph& g) {
    std::int64_t total = 0;
    for (Vid v1 = 0; v1 < g.layer_capacity(1); ++v1)
        for (Vid v2 = 0; v2 < g.layer_capacity(2); ++v2) {
            if (!g.has_edge(Matrix::A, v1, v2)) continue;
            for (Vid v3 = 0; v3 < g.layer_capacity(3); ++v3) {
                if (!g.has_edge(Matrix::B, v2, v3)) continue;
                for (Vid v4 = 0; v4 < g.layer_capacity(4); ++v4)
                    if (g.has_edge(Matrix::C, v3, v4) && g.has_edge(Matrix::D, v4, v1)) ++total;
            }
        }
    return total;
}

std::int64_t brute_3paths(const LayeredGraph& g, VertexRef u, VertexRef v) {
    if (u.layer != 1 || v.layer != 4) fail(ErrKind::LayerMismatch, "3-path query wants (L1, L4)");
    std::int64_t total = 0;
    for (Vid w2 : g.adj_lo(Matrix::A, u.index))
        for (Vid w3 : g.adj_lo(Matrix::B, w2))
            if (g.has_edge(Matrix::C, w3, v.index)) ++total;
    return total;
}

std::int64_t brute_2paths(const LayeredGraph& g, VertexRef x, VertexRef y) {
    if (x.layer != 1 || y.layer != 3) fail(ErrKind::LayerMismatch, "2-path query wants (L1, L3)");
    std::int64_t total = 0;
    for (Vid w : g.adj_lo(Matrix::A, x.index))
        if (g.has_edge(Matrix::B, w, y.index)) ++total;
    return total;
}

std::int64_t brute_2paths_total(const LayeredGraph& g) {
    std::int64_t total = 0;
    for (std::uint64_t key : g.edge_set(Matrix::A))
        total += std::int64_t(g.deg_lo(Matrix::B, pair_second(key)));
    return total;
}

std::int64_t brute_3paths_general(const GeneralGraph& g, Vid u, Vid v) {
    std::int64_t total = 0;
    for (Vid x : g.adj(u)) {
        if (x == v) continue;
        for (Vid y : g.adj(x)) {
            if (y == u || y == v) continue;
            if (g.has(y, v)) ++total;
        }
    }
    return total;
}

std::int64_t brute_3walks_layered(const LayeredGraph& g, Vid u, Vid v) {
    std::int64_t total = 0;
    for (Vid x : g.adj_lo(Matrix::A, u))
        for (Vid y : g.adj_lo(Matrix::B, x))
            if (g.has_edge(Matrix::C, y, v)) ++total;
    return total;
}

}  // namespace oracle
}  // namespace cyc4
