#pragma once

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cyc4/engine.hpp"
#include "cyc4/graph.hpp"
#include "cyc4/params.hpp"
#include "cyc4/product_job.hpp"

namespace cyc4 {

// Frozen bipartite matrices handed to a warm-up instance.
struct FrozenAC {
    std::vector<std::vector<Vid>> a_by_l1, a_by_l2;  // A: L1-L2
    std::vector<std::vector<Vid>> c_by_l3, c_by_l4;  // C: L3-L4
    std::unordered_set<std::uint64_t> a_edges, c_edges;  // (l1,l2) / (l3,l4)

    void add_a(Vid l1, Vid l2);
    void add_c(Vid l3, Vid l4);
    bool has_a(Vid l1, Vid l2) const { return a_edges.count(pack_pair(l1, l2)) != 0; }
    bool has_c(Vid l3, Vid l4) const { return c_edges.count(pack_pair(l3, l4)) != 0; }
    const std::vector<Vid>& a_of_l1(Vid v) const { return at(a_by_l1, v); }
    const std::vector<Vid>& a_of_l2(Vid v) const { return at(a_by_l2, v); }
    const std::vector<Vid>& c_of_l3(Vid v) const { return at(c_by_l3, v); }
    const std::vector<Vid>& c_of_l4(Vid v) const { return at(c_by_l4, v); }

private:
    static const std::vector<Vid>& at(const std::vector<std::vector<Vid>>& adj, Vid v) {
        static const std::vector<Vid> kEmpty;
        return v < adj.size() ? adj[v] : kEmpty;
    }
};

// Dynamic 3-path counting with A and C fixed and updates only in B.
// L1/L4 vertices are classed H/M/L once, from their frozen degrees. B updates
// arrive in chunks; per sealed chunk the Table-1 products run as deferred
// jobs with the next seal as their deadline, and queries cover the last two
// chunks by a lazy signed scan.
class WarmupEngine final : public ILayeredEngine {
public:
    WarmupEngine(FrozenAC ac, Thresholds th, bool strict_deadlines = false);

    // ILayeredEngine: accepts B updates (validated against the live B set);
    // A/C updates are rejected, D updates are ignored bookkeeping.
    void apply(const UpdateEvent& e) override;
    std::int64_t query3(Vid u_l1, Vid v_l4) override;

    // Raw signed feed used when embedded as the A_old*B_new*C_old subroutine;
    // no live-set validation (negative edges are the caller's business).
    void apply_b(Vid y, Vid w, int sign);

    std::uint64_t ops() const override { return ops_; }
    std::uint64_t deadline_missed() const override { return deadline_missed_; }
    std::uint64_t backlog() const override;

    // Fold-equivalent view of the stores: what every store would hold with
    // all chunks sealed and all jobs folded, plus the netted B multiset.
    // This is the state that must cancel back to empty under inverse streams.
    std::string state_digest() const override;

    std::uint64_t sealed_chunks() const { return sealed_chunks_; }
    bool bootstrap_mode() const { return bootstrap_; }
    std::uint64_t lazy_scan_length() const { return prev_.size() + cur_.size(); }

    // One-shot recomputation of every folded store, for the exactness checks.
    struct StoreSnapshot {
        PairCount hb, bh, mb, bm, hbc;
        PairCount lb_dd, lb_ss, lb_sd, bl_dd, bl_ss, bl_ds;
        bool operator==(const StoreSnapshot&) const = default;
    };
    StoreSnapshot stores() const;
    StoreSnapshot recompute_stores() const;

private:
    enum WCls { WL = 0, WM = 1, WH = 2 };
    struct BEdge {
        Vid y, w;
        int sign;
    };
    struct SealedChunk {
        std::vector<BEdge> edges;
        std::unordered_map<Vid, bool> dense_l2, dense_l3;  // within-chunk labels
    };

    WCls cls1(Vid v) const { return v < cls1_.size() ? cls1_[v] : WL; }
    WCls cls4(Vid v) const { return v < cls4_.size() ? cls4_[v] : WL; }
    void seal_chunk();
    void fold_pending();
    void step_jobs(std::uint64_t budget);
    std::int64_t lazy_paths(Vid u, Vid v, const std::vector<BEdge>& chunk);
    SealedChunk label_chunk(const std::vector<BEdge>& edges,
                            const std::unordered_map<Vid, std::uint32_t>& deg2,
                            const std::unordered_map<Vid, std::uint32_t>& deg3) const;
    // One-shot Table-1 products of a labeled chunk, added into a snapshot.
    void accumulate_chunk_products(const SealedChunk& ch, StoreSnapshot& out) const;

    FrozenAC ac_;
    Thresholds th_;
    bool strict_;
    bool bootstrap_ = false;

    std::vector<WCls> cls1_, cls4_;

    std::vector<BEdge> cur_, prev_;
    std::unordered_map<Vid, std::uint32_t> cur_deg_l2_, cur_deg_l3_;  // event counts

    // on-the-fly pair slices of the current and the last sealed chunk
    PairCount hb_cur_, bh_cur_, mb_cur_, bm_cur_;
    PairCount hb_prev_, bh_prev_, mb_prev_, bm_prev_;

    // folded stores over all chunks before the last sealed one
    PairCount hb_, bh_, mb_, bm_, hbc_;
    PairCount lb_dd_, lb_ss_, lb_sd_, bl_dd_, bl_ss_, bl_ds_;

    struct Pending {
        ProductJob job;
        PairCount* target;
    };
    std::vector<Pending> pending_;

    std::vector<SealedChunk> history_;  // all sealed chunks, oldest first

    // live B set for validated ILayeredEngine use
    std::unordered_set<std::uint64_t> live_b_;

    // bootstrap fallback: the netted signed B multiset, scanned per query
    std::unordered_map<std::uint64_t, int> all_b_;

    std::uint64_t sealed_chunks_ = 0;
    std::uint64_t ops_ = 0, deadline_missed_ = 0;
};

}  // namespace cyc4
