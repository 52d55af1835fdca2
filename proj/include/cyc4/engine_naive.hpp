#pragma once

#include <memory>
#include <sstream>

#include "cyc4/engine.hpp"
#include "cyc4/graph.hpp"
#include "cyc4/oracle.hpp"

namespace cyc4 {

// The O(n)-per-update baseline on general graphs: an all-pairs wedge table.
// Queries are answered before the table sees the edge on insertion and after
// it forgot the edge on deletion, so the counted 3-paths never use the
// updated edge itself.
class GeneralNaiveEngine {
public:
    // Applies the update and returns the running 4-cycle total.
    std::int64_t apply(const GeneralUpdate& e);

    std::int64_t total() const { return total_; }
    std::int64_t wedge_count(Vid a, Vid b) const {
        return a <= b ? wedges_.get(a, b) : wedges_.get(b, a);
    }
    const GeneralGraph& graph() const { return g_; }
    std::uint64_t ops() const { return ops_; }
    std::uint64_t last_update_ops() const { return last_ops_; }

    std::string state_digest() const;

    // Recomputed |N(a) & N(b)| for the consistency checks.
    std::int64_t recount_wedges(Vid a, Vid b) const;

private:
    void bump(Vid a, Vid b, std::int64_t d) {
        a <= b ? wedges_.add(a, b, d) : wedges_.add(b, a, d);
    }
    std::int64_t query_paths(Vid u, Vid v);

    GeneralGraph g_;
    PairCount wedges_;
    std::int64_t total_ = 0;
    std::uint64_t ops_ = 0, last_ops_ = 0;
};

// The same idea on the 4-layered graph: maintained wedge tables A*B and B*C.
// Serves as the bootstrap engine below threshold feasibility and as the
// naive selection for layered streams.
class LayeredNaiveEngine final : public ILayeredEngine {
public:
    void apply(const UpdateEvent& e) override;
    std::int64_t query3(Vid u_l1, Vid v_l4) override;

    std::uint64_t ops() const override { return ops_; }
    std::string state_digest() const override;

    const LayeredGraph& graph() const { return g_; }
    const PairCount& wedges_ab() const { return wab_; }
    const PairCount& wedges_bc() const { return wbc_; }

private:
    LayeredGraph g_;
    PairCount wab_;  // (L1, L3) 2-path counts through L2
    PairCount wbc_;  // (L2, L4) 2-path counts through L3
    std::uint64_t ops_ = 0;
};

}  // namespace cyc4
