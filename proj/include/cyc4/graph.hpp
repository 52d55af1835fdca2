#pragma once

#include <array>
#include <unordered_set>
#include <vector>

#include "cyc4/common.hpp"

namespace cyc4 {

// The 4-layered graph: four biadjacency edge sets with per-vertex adjacency
// lists on both sides. Vertex ids are dense per layer; capacity grows on use.
class LayeredGraph {
public:
    void apply(const UpdateEvent& e);

    bool has_edge(Matrix m, Vid lo, Vid hi) const {
        return edges_[int(m)].count(pack_pair(lo, hi)) != 0;
    }

    // Neighbors of a lower-layer vertex in the upper layer.
    const std::vector<Vid>& adj_lo(Matrix m, Vid lo) const {
        return at_or_empty(adj_lo_[int(m)], lo);
    }
    // Neighbors of an upper-layer vertex in the lower layer.
    const std::vector<Vid>& adj_hi(Matrix m, Vid hi) const {
        return at_or_empty(adj_hi_[int(m)], hi);
    }

    std::size_t deg_lo(Matrix m, Vid lo) const { return adj_lo(m, lo).size(); }
    std::size_t deg_hi(Matrix m, Vid hi) const { return adj_hi(m, hi).size(); }

    // Degrees the class partitions are based on.
    std::size_t deg_in_A(Vid l1) const { return deg_lo(Matrix::A, l1); }   // L1
    std::size_t deg_in_C(Vid l4) const { return deg_hi(Matrix::C, l4); }   // L4
    std::size_t combined_l2(Vid l2) const {                                // L2: deg_A + deg_B
        return deg_hi(Matrix::A, l2) + deg_lo(Matrix::B, l2);
    }
    std::size_t combined_l3(Vid l3) const {                                // L3: deg_B + deg_C
        return deg_hi(Matrix::B, l3) + deg_lo(Matrix::C, l3);
    }

    std::int64_t edge_count() const { return m_; }
    std::int64_t edge_count(Matrix m) const { return std::int64_t(edges_[int(m)].size()); }
    std::size_t layer_capacity(int layer) const { return cap_[layer - 1]; }

    const std::unordered_set<std::uint64_t>& edge_set(Matrix m) const { return edges_[int(m)]; }

    bool operator==(const LayeredGraph& o) const { return edges_ == o.edges_; }

private:
    static const std::vector<Vid>& at_or_empty(const std::vector<std::vector<Vid>>& adj, Vid v) {
        static const std::vector<Vid> kEmpty;
        return v < adj.size() ? adj[v] : kEmpty;
    }
    void grow(int layer, Vid v);
    static void erase_one(std::vector<Vid>& vec, Vid v);

    std::array<std::vector<std::vector<Vid>>, 4> adj_lo_, adj_hi_;
    std::array<std::unordered_set<std::uint64_t>, 4> edges_;
    std::array<std::size_t, 4> cap_ = {0, 0, 0, 0};
    std::int64_t m_ = 0;
};

// Expands a general-graph update into the four layered events of the
// replicated-vertex reduction. Insertions go D, C, B, A; deletions A, B, C, D.
// The D event carries the query mark: its 3-path answer is the delta for the
// general 4-cycle total. Every event is applied symmetrically (both
// orientations of the vertex pair) by the counter driving the reduction.
std::vector<UpdateEvent> general_to_layered(const GeneralUpdate& e);

}  // namespace cyc4
