#pragma once

#include <array>
#include <functional>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cyc4/engine.hpp"
#include "cyc4/engine_warmup.hpp"
#include "cyc4/graph.hpp"
#include "cyc4/params.hpp"
#include "cyc4/product_job.hpp"

namespace cyc4 {

enum class SideCls : std::uint8_t { T = 0, L = 1, M = 2, H = 3 };  // L1 / L4
enum class MidCls : std::uint8_t { T = 0, S = 1, D = 2 };          // L2 / L3

// The full dynamic 3-path engine: degree classes with factor-2 hysteresis
// bands, phases with deferred whole-matrix products, on-the-fly class pair
// stores (phase-split for attribution), the six high-high triple stores, the
// tiny-vertex stores, an embedded fixed-A/C subroutine per class pair for the
// old*new*old combination, and budget-sliced class transition rebuilds.
class MainEngine final : public ILayeredEngine {
public:
    // rederive, when given, recomputes thresholds for a new reference edge
    // count on drift rebuilds; without it the manual thresholds persist.
    MainEngine(Thresholds th, bool strict_deadlines = false, bool mhat_fixed = true,
               std::function<Thresholds(std::uint64_t)> rederive = nullptr);

    void apply(const UpdateEvent& e) override;
    std::int64_t query3(Vid u_l1, Vid v_l4) override;
    std::int64_t query3_attributed(Vid u_l1, Vid v_l4, BucketMap& out) override;

    std::uint64_t ops() const override { return ops_; }
    std::uint64_t deadline_missed() const override { return deadline_missed_; }
    std::uint64_t backlog() const override;
    std::uint64_t rebuild_events() const override { return rebuilds_; }
    std::string state_digest() const override;

    // introspection for tests and metrics
    bool bootstrap_mode() const { return bootstrap_; }
    SideCls side_class(int layer, Vid v) const;  // layer 1 or 4
    MidCls mid_class(int layer, Vid v) const;    // layer 2 or 3
    std::uint64_t phase_boundaries() const { return boundaries_; }
    std::uint64_t transitions_completed() const { return transitions_done_; }
    std::uint64_t active_transitions() const { return transitions_.size(); }
    std::uint64_t boundary_ops() const { return boundary_ops_; }
    std::uint64_t last_update_ops() const { return last_ops_; }
    bool last_update_was_boundary() const { return last_boundary_; }
    const LayeredGraph& graph() const { return g_; }
    const Thresholds& thresholds() const { return th_; }

    // Phase view used by the independent bucket oracle: the phase an edge of
    // A/B/C currently counts under, as (phase, sign) memberships.
    struct Membership {
        int phase;  // PH_OLD / PH_NEW
        int sign;
    };
    std::vector<Membership> edge_memberships(Matrix m, Vid lo, Vid hi) const;

    // Store-exactness hooks: every live pair/triple store and its defining
    // signed product recomputed from the phase adjacency.
    struct StoreDump {
        std::string name;
        PairCount value, expected;
    };
    std::vector<StoreDump> audit_stores() const;

private:
    // ---- adjacency bookkeeping -------------------------------------------
    struct Adj01 {  // 0/1 edge set with adjacency on both sides
        std::vector<std::vector<Vid>> lo, hi;
        std::unordered_set<std::uint64_t> set;
        bool has(Vid l, Vid h) const { return set.count(pack_pair(l, h)) != 0; }
        void add(Vid l, Vid h);
        void remove(Vid l, Vid h);
        const std::vector<Vid>& of_lo(Vid l) const { return at(lo, l); }
        const std::vector<Vid>& of_hi(Vid h) const { return at(hi, h); }
        static const std::vector<Vid>& at(const std::vector<std::vector<Vid>>& a, Vid v);
        void clear();
    };
    struct SignedAdj {  // netted signed window edges
        std::vector<std::unordered_map<Vid, int>> lo, hi;
        std::unordered_map<std::uint64_t, int> set;
        void add(Vid l, Vid h, int s);
        int get(Vid l, Vid h) const;
        const std::unordered_map<Vid, int>& of_lo(Vid l) const { return at(lo, l); }
        const std::unordered_map<Vid, int>& of_hi(Vid h) const { return at(hi, h); }
        static const std::unordered_map<Vid, int>& at(
            const std::vector<std::unordered_map<Vid, int>>& a, Vid v);
        void clear();
    };
    struct PhasedEvent {
        Matrix m;
        Vid lo, hi;
        int sign;
    };

    // ---- classes ----------------------------------------------------------
    SideCls c1(Vid v) const { return v < cls1_.size() ? cls1_[v] : SideCls::T; }
    SideCls c4(Vid v) const { return v < cls4_.size() ? cls4_[v] : SideCls::T; }
    MidCls c2(Vid v) const { return v < cls2_.size() ? cls2_[v] : MidCls::T; }
    MidCls c3(Vid v) const { return v < cls3_.size() ? cls3_[v] : MidCls::T; }
    MidCls cls0_2(Vid v) const { return v < cls0_2_.size() ? cls0_2_[v] : MidCls::T; }
    MidCls cls0_3(Vid v) const { return v < cls0_3_.size() ? cls0_3_[v] : MidCls::T; }

    // settled degree range of a class: [lo, 2*hi); band exits force switches
    std::uint64_t side_lo(SideCls c) const;
    std::uint64_t side_hi(SideCls c) const;
    std::uint64_t mid_lo(MidCls c) const;
    std::uint64_t mid_hi(MidCls c) const;
    std::size_t degree_of(int layer, Vid v) const;

    // ---- transitions -------------------------------------------------------
    struct Transition {
        int layer;
        Vid v;
        bool up;  // direction
        int from, to;  // SideCls or MidCls as int
        struct Task {
            std::vector<Vid> hops;
            std::unordered_set<Vid> hop_set, processed;
            std::size_t cursor = 0;
            // full sub-iteration for one first-hop neighbor
            std::function<void(Vid)> process;
            // marginal for an edge arriving mid-rebuild
            std::function<void(Matrix, Vid, Vid, int)> on_edge;
            // matrix whose (v-incident) edges extend the first-hop list
            Matrix hop_matrix;
            bool hop_from_lo;  // v sits on the lo side of hop_matrix
        };
        std::vector<Task> tasks;
        // staged deltas: (slot id, phase combo) -> pairs
        std::map<std::pair<int, int>, PairCount> staged;
        bool complete() const {
            for (auto& t : tasks)
                if (t.cursor < t.hops.size()) return false;
            return true;
        }
    };
    using TransKey = std::uint64_t;
    static TransKey trans_key(int layer, Vid v) { return pack_pair(Vid(layer), v); }

    void check_transition(int layer, Vid v);
    void start_transition(int layer, Vid v, int from, int to, bool up);
    void cancel_transition(int layer, Vid v);
    void restart_all_transitions();
    void build_tasks(Transition& t);
    void step_transitions(std::uint64_t budget);
    void force_switch(int layer, Vid v);
    void complete_switch(Transition& t);
    void apply_staged(Transition& t);
    void erase_class_rows(int layer, Vid v, int cls);
    void on_edge_hooks(Matrix m, Vid lo, Vid hi, int sign);
    void mark_dirty_mid(int layer, Vid v);

    // ---- store update recipes ----------------------------------------------
    void update_stores_a(Vid u, Vid y, int s);
    void update_stores_b(Vid y, Vid w, int s);
    void update_stores_c(Vid w, Vid v, int s);

    // phase membership iteration helpers
    template <class F>
    void for_mem(Matrix m, Vid lo, Vid hi, F&& f) const {  // f(phase, sign)
        if (old_[int(m)].has(lo, hi)) f(PH_OLD, 1);
        if (int s = win_[int(m)].get(lo, hi); s != 0) f(PH_NEW, s);
    }
    template <class F>
    void for_adj_lo(Matrix m, Vid lo, F&& f) const {  // f(hi, phase, sign)
        for (Vid h : old_[int(m)].of_lo(lo)) f(h, PH_OLD, 1);
        for (auto& [h, s] : win_[int(m)].of_lo(lo)) f(h, PH_NEW, s);
    }
    template <class F>
    void for_adj_hi(Matrix m, Vid hi, F&& f) const {  // f(lo, phase, sign)
        for (Vid l : old_[int(m)].of_hi(hi)) f(l, PH_OLD, 1);
        for (auto& [l, s] : win_[int(m)].of_hi(hi)) f(l, PH_NEW, s);
    }

    // ---- phases -------------------------------------------------------------
    void boundary();
    void enqueue_phase_jobs();
    void fold_phase_jobs();
    void seed_old_slices();
    void correct_old_tables();
    void rebuild_tiny_old_slices();
    void make_warmups();
    void replay_window();
    void step_jobs(std::uint64_t budget);
    CountMatrix old_matrix(Matrix m, int mid_filter /*MidCls or -1*/, bool plus_prev) const;

    void rebuild(std::uint64_t new_mhat);
    void maybe_drift_rebuild();

    // ---- query assembly -----------------------------------------------------
    using Sink = std::function<void(MidCls, MidCls, int, int, int, std::int64_t)>;
    void query_assemble(Vid u, Vid v, const Sink& sink);
    void tiny_mid_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink);
    void tiny_endpoint_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink);
    void sd_mid_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink);
    void ll_dd_paths(Vid u, Vid v, const Sink& sink);
    std::int64_t ono_with_corrections(bool dd, Vid u, Vid v);

    // ---- state ---------------------------------------------------------------
    Thresholds th_;
    bool strict_;
    bool mhat_fixed_;
    std::function<Thresholds(std::uint64_t)> rederive_;
    bool bootstrap_ = false;
    bool replaying_ = false;

    LayeredGraph g_;
    PairCount boot_wab_, boot_wbc_;  // bootstrap wedge tables

    std::array<Adj01, 3> old_;    // A, B, C old-phase snapshots
    std::array<SignedAdj, 3> win_;  // two-phase window, netted
    std::vector<PhasedEvent> prev_events_, cur_events_;
    std::uint64_t abc_events_ = 0;

    std::vector<SideCls> cls1_, cls4_;
    std::vector<MidCls> cls2_, cls3_;
    std::vector<MidCls> cls0_2_, cls0_3_;   // classes at the window boundary
    std::vector<MidCls> enq_cls2_, enq_cls3_;  // classes at job enqueue
    std::unordered_set<Vid> l1h_, l1m_, l4h_, l4m_, l2d_, l3d_;

    PhasedPair ab_s_, bc_s_, ab_t_, bc_t_;
    PhasedPair ab_d_h_, ab_d_m_;  // rows L1 H / M, cols L3 (D)
    PhasedPair bc_d_h_, bc_d_m_;  // rows L2 (D), cols L4 H / M
    PairCount eq9_ab_;            // A_new^{*D} . B_old^{DD}  (L1 x L3)
    PairCount eq9_bc_;            // B_old^{DD} . C_new^{D*}  (L2 x L4)
    std::array<PairCount, 8> eq11_;  // by PhasedTriple::idx; ooo and ono unused
    PhasedTriple t13a_, t13b_, t13c_, t14a_, t14b_;
    PairCount old_ab_d_, old_bc_d_;  // unrestricted-row D-mid old tables
    PairCount old_triple_ss_;        // A_old^{*S} . B_old^{SS} . C_old^{S*}

    std::unique_ptr<WarmupEngine> w_ss_, w_dd_;
    struct WinB {
        Vid y, w;
        int sign;
    };
    std::vector<WinB> win_b_events_;
    std::unordered_set<Vid> dirty_l2_, dirty_l3_;
    std::unordered_set<std::size_t> dirty_b_idx_;

    struct PhJob {
        ProductJob job;
        int kind;  // 0..5 pair tables (AB/BC x S/D/T), 6 triple
    };
    std::vector<PhJob> phase_jobs_;

    std::map<TransKey, Transition> transitions_;

    std::uint64_t ops_ = 0, last_ops_ = 0, deadline_missed_ = 0, rebuilds_ = 0;
    std::uint64_t boundaries_ = 0, transitions_done_ = 0, boundary_ops_ = 0;
    bool last_boundary_ = false;
};

}  // namespace cyc4
