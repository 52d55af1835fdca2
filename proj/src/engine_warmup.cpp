#include "cyc4/engine_warmup.hpp"

#include <algorithm>
#include <sstream>

#include "cyc4/matmul.hpp"

namespace cyc4 {

void FrozenAC::add_a(Vid l1, Vid l2) {
    if (!a_edges.insert(pack_pair(l1, l2)).second) return;
    if (a_by_l1.size() <= l1) a_by_l1.resize(l1 + 1);
    if (a_by_l2.size() <= l2) a_by_l2.resize(l2 + 1);
    a_by_l1[l1].push_back(l2);
    a_by_l2[l2].push_back(l1);
}

void FrozenAC::add_c(Vid l3, Vid l4) {
    if (!c_edges.insert(pack_pair(l3, l4)).second) return;
    if (c_by_l3.size() <= l3) c_by_l3.resize(l3 + 1);
    if (c_by_l4.size() <= l4) c_by_l4.resize(l4 + 1);
    c_by_l3[l3].push_back(l4);
    c_by_l4[l4].push_back(l3);
}

WarmupEngine::WarmupEngine(FrozenAC ac, Thresholds th, bool strict)
    : ac_(std::move(ac)), th_(th), strict_(strict) {
    bootstrap_ = !th_.bands_feasible();
    cls1_.resize(ac_.a_by_l1.size(), WL);
    for (Vid v = 0; v < cls1_.size(); ++v) {
        std::size_t d = ac_.a_by_l1[v].size();
        cls1_[v] = d >= th_.high ? WH : (d >= th_.medium ? WM : WL);
    }
    cls4_.resize(ac_.c_by_l4.size(), WL);
    for (Vid v = 0; v < cls4_.size(); ++v) {
        std::size_t d = ac_.c_by_l4[v].size();
        cls4_[v] = d >= th_.high ? WH : (d >= th_.medium ? WM : WL);
    }
}

void WarmupEngine::apply(const UpdateEvent& e) {
    switch (e.matrix) {
        case Matrix::B: {
            auto key = pack_pair(e.lo.index, e.hi.index);
            if (e.op == Op::Insert) {
                if (!live_b_.insert(key).second) fail(ErrKind::DuplicateInsert, "duplicate B edge");
            } else if (live_b_.erase(key) == 0)
                fail(ErrKind::MissingDelete, "delete of absent B edge");
            apply_b(e.lo.index, e.hi.index, e.op == Op::Insert ? 1 : -1);
            break;
        }
        case Matrix::D:
            break;  // queries only; nothing to maintain
        default:
            fail(ErrKind::InvalidParam, "warm-up engine: A and C are fixed");
    }
}

void WarmupEngine::apply_b(Vid y, Vid w, int sign) {
    if (bootstrap_) {
        auto key = pack_pair(y, w);
        auto [it, fresh] = all_b_.try_emplace(key, 0);
        it->second += sign;
        if (it->second == 0) all_b_.erase(it);
        ++ops_;
        return;
    }
    // On-the-fly pair slices for H and M rows (Claims H-online/M-online).
    for (Vid u : ac_.a_of_l2(y)) {
        ++ops_;
        if (cls1(u) == WH) hb_cur_.add(u, w, sign);
        else if (cls1(u) == WM) mb_cur_.add(u, w, sign);
    }
    for (Vid v : ac_.c_of_l3(w)) {
        ++ops_;
        if (cls4(v) == WH) bh_cur_.add(y, v, sign);
        else if (cls4(v) == WM) bm_cur_.add(y, v, sign);
    }
    cur_.push_back({y, w, sign});
    ++cur_deg_l2_[y];
    ++cur_deg_l3_[w];
    step_jobs(th_.per_update_budget);
    if (cur_.size() >= th_.chunk_size) seal_chunk();
}

void WarmupEngine::step_jobs(std::uint64_t budget) {
    std::vector<Pending*> open;
    for (auto& p : pending_)
        if (!p.job.done()) open.push_back(&p);
    if (open.empty()) return;
    std::uint64_t share = budget / open.size();
    std::uint64_t extra = budget % open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
        std::uint64_t before = open[i]->job.ops_done();
        open[i]->job.step(share + (i < extra ? 1 : 0));
        ops_ += open[i]->job.ops_done() - before;
    }
}

void WarmupEngine::fold_pending() {
    for (auto& p : pending_) {
        if (!p.job.done()) {
            ++deadline_missed_;
            if (strict_) fail(ErrKind::DeadlineMissed, "chunk product unfinished at fold point");
            std::uint64_t before = p.job.ops_done();
            p.job.run_to_completion();
            ops_ += p.job.ops_done() - before;
        }
        const CountMatrix& r = p.job.result();
        for (std::size_t i = 0; i < r.rows(); ++i)
            for (std::size_t j = 0; j < r.cols(); ++j)
                if (auto v = r.at_dense(i, j); v != 0) p.target->add(r.row_ids()[i], r.col_ids()[j], v);
    }
    pending_.clear();
    hb_.add_all(hb_prev_);
    bh_.add_all(bh_prev_);
    mb_.add_all(mb_prev_);
    bm_.add_all(bm_prev_);
    hb_prev_.clear();
    bh_prev_.clear();
    mb_prev_.clear();
    bm_prev_.clear();
}

WarmupEngine::SealedChunk WarmupEngine::label_chunk(
    const std::vector<BEdge>& edges, const std::unordered_map<Vid, std::uint32_t>& deg2,
    const std::unordered_map<Vid, std::uint32_t>& deg3) const {
    SealedChunk ch;
    ch.edges = edges;
    for (auto& [v, d] : deg2) ch.dense_l2[v] = d > th_.chunk_sparse;
    for (auto& [v, d] : deg3) ch.dense_l3[v] = d > th_.chunk_sparse;
    return ch;
}

namespace {

CountMatrix chunk_matrix(const std::vector<std::tuple<Vid, Vid, std::int64_t>>& triples) {
    return CountMatrix::from_triples(triples);
}

}  // namespace

void WarmupEngine::seal_chunk() {
    fold_pending();

    SealedChunk ch = label_chunk(cur_, cur_deg_l2_, cur_deg_l3_);

    // Partition the chunk by within-chunk labels.
    std::vector<std::tuple<Vid, Vid, std::int64_t>> t_dd, t_ss, t_sd, t_ds;
    std::unordered_set<Vid> support_l2;
    for (const auto& e : ch.edges) {
        support_l2.insert(e.y);
        bool dy = ch.dense_l2.at(e.y), dw = ch.dense_l3.at(e.w);
        auto& dst = dy ? (dw ? t_dd : t_ds) : (dw ? t_sd : t_ss);
        dst.emplace_back(e.y, e.w, e.sign);
    }
    CountMatrix b_dd = chunk_matrix(t_dd), b_ss = chunk_matrix(t_ss), b_sd = chunk_matrix(t_sd),
                b_ds = chunk_matrix(t_ds);

    // A^{L*} restricted to the chunk's L2 support; C^{*H}, C^{*L} as frozen.
    std::vector<std::tuple<Vid, Vid, std::int64_t>> t_al, t_ch, t_cl;
    for (Vid y : support_l2)
        for (Vid u : ac_.a_of_l2(y))
            if (cls1(u) == WL) t_al.emplace_back(u, y, 1);
    for (auto key : ac_.c_edges) {
        Vid w = pair_first(key), v = pair_second(key);
        if (cls4(v) == WH) t_ch.emplace_back(w, v, 1);
        else if (cls4(v) == WL) t_cl.emplace_back(w, v, 1);
    }
    CountMatrix a_l = chunk_matrix(t_al), c_h = chunk_matrix(t_ch), c_l = chunk_matrix(t_cl);

    // Table-1 products of the just-sealed chunk, due at the next seal.
    std::uint64_t due = sealed_chunks_ + 2;
    pending_.push_back({ProductJob(CountMatrix::from_pair_count(hb_cur_), c_h, due), &hbc_});
    pending_.push_back({ProductJob(a_l, b_dd, due), &lb_dd_});
    pending_.push_back({ProductJob(a_l, b_ss, due), &lb_ss_});
    pending_.push_back({ProductJob(a_l, b_sd, due), &lb_sd_});
    pending_.push_back({ProductJob(b_dd, c_l, due), &bl_dd_});
    pending_.push_back({ProductJob(b_ss, c_l, due), &bl_ss_});
    pending_.push_back({ProductJob(b_ds, c_l, due), &bl_ds_});

    history_.push_back(std::move(ch));
    ++sealed_chunks_;
    prev_ = std::move(cur_);
    cur_.clear();
    cur_deg_l2_.clear();
    cur_deg_l3_.clear();
    hb_prev_ = std::move(hb_cur_);
    bh_prev_ = std::move(bh_cur_);
    mb_prev_ = std::move(mb_cur_);
    bm_prev_ = std::move(bm_cur_);
    hb_cur_ = PairCount{};
    bh_cur_ = PairCount{};
    mb_cur_ = PairCount{};
    bm_cur_ = PairCount{};
}

std::int64_t WarmupEngine::lazy_paths(Vid u, Vid v, const std::vector<BEdge>& chunk) {
    std::int64_t total = 0;
    for (const auto& e : chunk) {
        ++ops_;
        if (ac_.has_a(u, e.y) && ac_.has_c(e.w, v)) total += e.sign;
    }
    return total;
}

std::int64_t WarmupEngine::query3(Vid u, Vid v) {
    if (bootstrap_) {
        std::int64_t total = 0;
        for (auto& [key, sign] : all_b_) {
            ++ops_;
            if (ac_.has_a(u, pair_first(key)) && ac_.has_c(pair_second(key), v)) total += sign;
        }
        return total;
    }
    std::int64_t total = lazy_paths(u, v, prev_) + lazy_paths(u, v, cur_);
    WCls cu = cls1(u), cv = cls4(v);
    if (cu == WH && cv == WH) {
        total = checked_add(total, hbc_.get(u, v));
    } else if ((cu == WH || cu == WM) && cv != WH) {
        const PairCount& ab = cu == WH ? hb_ : mb_;
        for (Vid w : ac_.c_of_l4(v)) {
            ++ops_;
            total = checked_add(total, ab.get(u, w));
        }
    } else if (cv == WH || cv == WM) {
        const PairCount& bc = cv == WH ? bh_ : bm_;
        for (Vid y : ac_.a_of_l1(u)) {
            ++ops_;
            total = checked_add(total, bc.get(y, v));
        }
    } else {  // LL
        for (Vid w : ac_.c_of_l4(v)) {
            ++ops_;
            total = checked_add(total, lb_dd_.get(u, w) + lb_ss_.get(u, w) + lb_sd_.get(u, w));
        }
        for (Vid y : ac_.a_of_l1(u)) {
            ++ops_;
            total = checked_add(total, bl_ds_.get(y, v));
        }
    }
    return total;
}

std::uint64_t WarmupEngine::backlog() const {
    std::uint64_t b = 0;
    for (const auto& p : pending_) b += p.job.ops_total() - p.job.ops_done();
    return b;
}

WarmupEngine::StoreSnapshot WarmupEngine::stores() const {
    return {hb_, bh_, mb_, bm_, hbc_, lb_dd_, lb_ss_, lb_sd_, bl_dd_, bl_ss_, bl_ds_};
}

void WarmupEngine::accumulate_chunk_products(const SealedChunk& ch, StoreSnapshot& out) const {
    std::vector<std::tuple<Vid, Vid, std::int64_t>> t_all, t_dd, t_ss, t_sd, t_ds;
    std::unordered_set<Vid> support_l2;
    for (const auto& e : ch.edges) {
        support_l2.insert(e.y);
        t_all.emplace_back(e.y, e.w, e.sign);
        bool dy = ch.dense_l2.at(e.y), dw = ch.dense_l3.at(e.w);
        (dy ? (dw ? t_dd : t_ds) : (dw ? t_sd : t_ss)).emplace_back(e.y, e.w, e.sign);
    }
    CountMatrix b_all = chunk_matrix(t_all), b_dd = chunk_matrix(t_dd), b_ss = chunk_matrix(t_ss),
                b_sd = chunk_matrix(t_sd), b_ds = chunk_matrix(t_ds);

    std::vector<std::tuple<Vid, Vid, std::int64_t>> t_ah, t_am, t_al, t_ch, t_cm, t_cl;
    for (Vid y : support_l2)
        for (Vid u : ac_.a_of_l2(y)) {
            auto c = cls1(u);
            (c == WH ? t_ah : c == WM ? t_am : t_al).emplace_back(u, y, 1);
        }
    for (auto key : ac_.c_edges) {
        Vid w = pair_first(key), v = pair_second(key);
        auto c = cls4(v);
        (c == WH ? t_ch : c == WM ? t_cm : t_cl).emplace_back(w, v, 1);
    }
    CountMatrix a_h = chunk_matrix(t_ah), a_m = chunk_matrix(t_am), a_l = chunk_matrix(t_al);
    CountMatrix c_h = chunk_matrix(t_ch), c_m = chunk_matrix(t_cm), c_l = chunk_matrix(t_cl);

    auto fold = [](PairCount& dst, const CountMatrix& m) { dst.add_all(m.to_pair_count()); };
    CountMatrix hb_chunk = multiply(a_h, b_all, MatmulBackend::Serial);
    fold(out.hb, hb_chunk);
    fold(out.bh, multiply(b_all, c_h, MatmulBackend::Serial));
    fold(out.mb, multiply(a_m, b_all, MatmulBackend::Serial));
    fold(out.bm, multiply(b_all, c_m, MatmulBackend::Serial));
    fold(out.hbc, multiply(hb_chunk, c_h, MatmulBackend::Serial));
    fold(out.lb_dd, multiply(a_l, b_dd, MatmulBackend::Serial));
    fold(out.lb_ss, multiply(a_l, b_ss, MatmulBackend::Serial));
    fold(out.lb_sd, multiply(a_l, b_sd, MatmulBackend::Serial));
    fold(out.bl_dd, multiply(b_dd, c_l, MatmulBackend::Serial));
    fold(out.bl_ss, multiply(b_ss, c_l, MatmulBackend::Serial));
    fold(out.bl_ds, multiply(b_ds, c_l, MatmulBackend::Serial));
}

WarmupEngine::StoreSnapshot WarmupEngine::recompute_stores() const {
    StoreSnapshot out;
    if (history_.empty()) return out;
    for (std::size_t i = 0; i + 1 < history_.size(); ++i)
        accumulate_chunk_products(history_[i], out);
    return out;
}

std::string WarmupEngine::state_digest() const {
    // Fold-equivalent view: folded stores plus the one-shot products of the
    // pending chunk and of the current chunk under provisional labels.
    // accumulate_chunk_products covers the pair stores of those chunks too,
    // so the live prev/cur slices must not be added on top.
    StoreSnapshot eff = stores();
    if (!history_.empty()) accumulate_chunk_products(history_.back(), eff);
    if (!cur_.empty()) accumulate_chunk_products(label_chunk(cur_, cur_deg_l2_, cur_deg_l3_), eff);

    std::unordered_map<std::uint64_t, int> netted = all_b_;
    auto net = [&](const std::vector<BEdge>& chunk) {
        for (const auto& e : chunk) {
            auto [it, fresh] = netted.try_emplace(pack_pair(e.y, e.w), 0);
            it->second += e.sign;
            if (it->second == 0) netted.erase(it);
        }
    };
    for (const auto& ch : history_) net(ch.edges);
    net(cur_);

    std::ostringstream os;
    PairCount netted_pc;
    for (auto& [k, s] : netted) netted_pc.add(pair_first(k), pair_second(k), s);
    os << "b-netted\n";
    netted_pc.dump(os);
    auto dump = [&](const char* name, const PairCount& pc) {
        os << name << '\n';
        pc.dump(os);
    };
    dump("hb", eff.hb);
    dump("bh", eff.bh);
    dump("mb", eff.mb);
    dump("bm", eff.bm);
    dump("hbc", eff.hbc);
    dump("lb_dd", eff.lb_dd);
    dump("lb_ss", eff.lb_ss);
    dump("lb_sd", eff.lb_sd);
    dump("bl_dd", eff.bl_dd);
    dump("bl_ss", eff.bl_ss);
    dump("bl_ds", eff.bl_ds);
    return os.str();
}

}  // namespace cyc4
