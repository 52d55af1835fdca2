#include "cyc4/graph.hpp"

#include <algorithm>

namespace cyc4 {

void LayeredGraph::grow(int layer, Vid v) {
    std::size_t need = std::size_t(v) + 1;
    auto& c = cap_[layer - 1];
    if (need > c) c = need;
    for (int m = 0; m < 4; ++m) {
        if (lower_layer(Matrix(m)) == layer && adj_lo_[m].size() < need) adj_lo_[m].resize(need);
        if (upper_layer(Matrix(m)) == layer && adj_hi_[m].size() < need) adj_hi_[m].resize(need);
    }
}

void LayeredGraph::erase_one(std::vector<Vid>& vec, Vid v) {
    auto it = std::find(vec.begin(), vec.end(), v);
    *it = vec.back();
    vec.pop_back();
}

void LayeredGraph::apply(const UpdateEvent& e) {
    int m = int(e.matrix);
    if (e.lo.layer != lower_layer(e.matrix) || e.hi.layer != upper_layer(e.matrix))
        fail(ErrKind::LayerMismatch, "event endpoints do not match matrix " +
                                         std::string(1, matrix_name(e.matrix)));
    Vid lo = e.lo.index, hi = e.hi.index;
    std::uint64_t key = pack_pair(lo, hi);
    if (e.op == Op::Insert) {
        if (edges_[m].count(key)) fail(ErrKind::DuplicateInsert, "duplicate insert");
        grow(e.lo.layer, lo);
        grow(e.hi.layer, hi);
        edges_[m].insert(key);
        adj_lo_[m][lo].push_back(hi);
        adj_hi_[m][hi].push_back(lo);
        ++m_;
    } else {
        if (!edges_[m].count(key)) fail(ErrKind::MissingDelete, "delete of absent edge");
        edges_[m].erase(key);
        erase_one(adj_lo_[m][lo], hi);
        erase_one(adj_hi_[m][hi], lo);
        --m_;
    }
}

std::vector<UpdateEvent> general_to_layered(const GeneralUpdate& e) {
    if (e.u == e.v) fail(ErrKind::SelfLoop, "self loop in general update");
    auto ev = [&](Matrix m, Vid lo, Vid hi) {
        UpdateEvent r;
        r.op = e.op;
        r.matrix = m;
        r.lo = {lower_layer(m), lo};
        r.hi = {upper_layer(m), hi};
        return r;
    };
    std::vector<UpdateEvent> out;
    if (e.op == Op::Insert) {
        // D first: the query must see A, B, C without copies of (u, v).
        out.push_back(ev(Matrix::D, e.v, e.u));  // D edge (L4:v, L1:u), queried as (u in L1, v in L4)
        out.push_back(ev(Matrix::C, e.u, e.v));
        out.push_back(ev(Matrix::B, e.u, e.v));
        out.push_back(ev(Matrix::A, e.u, e.v));
        out[0].is_query_point = true;
    } else {
        // Path edges come out first so the D query again excludes (u, v).
        out.push_back(ev(Matrix::A, e.u, e.v));
        out.push_back(ev(Matrix::B, e.u, e.v));
        out.push_back(ev(Matrix::C, e.u, e.v));
        out.push_back(ev(Matrix::D, e.v, e.u));
        out[3].is_query_point = true;
    }
    return out;
}

}  // namespace cyc4
