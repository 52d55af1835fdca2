#pragma once

#include <cstdint>
#include <vector>

#include "cyc4/graph.hpp"

namespace cyc4 {

// Simple general graph used by the oracles and the naive engine driver.
class GeneralGraph {
public:
    void insert(Vid u, Vid v);
    void erase(Vid u, Vid v);
    bool has(Vid u, Vid v) const { return u < adj_.size() && edges_.count(key(u, v)); }
    const std::vector<Vid>& adj(Vid u) const {
        static const std::vector<Vid> kEmpty;
        return u < adj_.size() ? adj_[u] : kEmpty;
    }
    std::size_t n() const { return adj_.size(); }
    std::int64_t m() const { return std::int64_t(edges_.size()); }
    bool operator==(const GeneralGraph& o) const { return edges_ == o.edges_; }

private:
    static std::uint64_t key(Vid u, Vid v) { return u < v ? pack_pair(u, v) : pack_pair(v, u); }
    std::vector<std::vector<Vid>> adj_;
    std::unordered_set<std::uint64_t> edges_;
};

namespace oracle {

// Number of distinct 4-cycle subgraphs. Common-neighbor formula, OpenMP over
// vertex pairs.
std::int64_t brute_4cycles_general(const GeneralGraph& g);

// Independent reference: canonicalized enumeration over vertex quadruples.
// O(n^4); only for small graphs.
std::int64_t brute_4cycles_general_ref(const GeneralGraph& g);

// Number of layered 4-cycles (one vertex per layer).
std::int64_t brute_layered_4cycles(const LayeredGraph& g);

// Independent reference: quadruple loop over layer capacities.
std::int64_t brute_layered_4cycles_ref(const LayeredGraph& g);

// 3-paths from u in L1 to v in L4 through A, B, C.
std::int64_t brute_3paths(const LayeredGraph& g, VertexRef u, VertexRef v);

// 2-paths from x in L1 to y in L3 through A, B.
std::int64_t brute_2paths(const LayeredGraph& g, VertexRef x, VertexRef y);

// Total 2-path count over all (L1, L3) pairs, the size of the join A |><| B.
std::int64_t brute_2paths_total(const LayeredGraph& g);

// 3-paths u-v in the general graph (used by the reduction checks).
std::int64_t brute_3paths_general(const GeneralGraph& g, Vid u, Vid v);

// Length-3 walks from L1:u to L4:v in a layered graph, for the
// walks-equal-paths check of the reduction.
std::int64_t brute_3walks_layered(const LayeredGraph& g, Vid u, Vid v);

}  // namespace oracle

}  // namespace cyc4
