#include "cyc4/engine_main.hpp"

#include <algorithm>
#include <sstream>

namespace cyc4 {

// ---------------------------------------------------------------- adjacency

const std::vector<Vid>& MainEngine::Adj01::at(const std::vector<std::vector<Vid>>& a, Vid v) {
    static const std::vector<Vid> kEmpty;
    return v < a.size() ? a[v] : kEmpty;
}

void MainEngine::Adj01::add(Vid l, Vid h) {
    if (!set.insert(pack_pair(l, h)).second) return;
    if (lo.size() <= l) lo.resize(l + 1);
    if (hi.size() <= h) hi.resize(h + 1);
    lo[l].push_back(h);
    hi[h].push_back(l);
}

void MainEngine::Adj01::remove(Vid l, Vid h) {
    if (set.erase(pack_pair(l, h)) == 0) return;
    auto drop = [](std::vector<Vid>& vec, Vid x) {
        auto it = std::find(vec.begin(), vec.end(), x);
        if (it != vec.end()) {
            *it = vec.back();
            vec.pop_back();
        }
    };
    drop(lo[l], h);
    drop(hi[h], l);
}

void MainEngine::Adj01::clear() {
    lo.clear();
    hi.clear();
    set.clear();
}

const std::unordered_map<Vid, int>& MainEngine::SignedAdj::at(
    const std::vector<std::unordered_map<Vid, int>>& a, Vid v) {
    static const std::unordered_map<Vid, int> kEmpty;
    return v < a.size() ? a[v] : kEmpty;
}

void MainEngine::SignedAdj::add(Vid l, Vid h, int s) {
    if (lo.size() <= l) lo.resize(l + 1);
    if (hi.size() <= h) hi.resize(h + 1);
    auto bump = [](std::unordered_map<Vid, int>& m, Vid k, int d) {
        auto [it, fresh] = m.try_emplace(k, 0);
        it->second += d;
        if (it->second == 0) m.erase(it);
    };
    bump(lo[l], h, s);
    bump(hi[h], l, s);
    auto [it, fresh] = set.try_emplace(pack_pair(l, h), 0);
    it->second += s;
    if (it->second == 0) set.erase(it);
}

int MainEngine::SignedAdj::get(Vid l, Vid h) const {
    auto it = set.find(pack_pair(l, h));
    return it == set.end() ? 0 : it->second;
}

void MainEngine::SignedAdj::clear() {
    lo.clear();
    hi.clear();
    set.clear();
}

// ------------------------------------------------------------------ classes

std::uint64_t MainEngine::side_lo(SideCls c) const {
    switch (c) {
        case SideCls::T: return 0;
        case SideCls::L: return th_.tiny;
        case SideCls::M: return th_.medium;
        default:         return th_.high;
    }
}
std::uint64_t MainEngine::side_hi(SideCls c) const {
    switch (c) {
        case SideCls::T: return th_.tiny;
        case SideCls::L: return th_.medium;
        case SideCls::M: return th_.high;
        default:         return std::uint64_t(1) << 62;
    }
}
std::uint64_t MainEngine::mid_lo(MidCls c) const {
    switch (c) {
        case MidCls::T: return 0;
        case MidCls::S: return th_.tiny;
        default:        return th_.high;
    }
}
std::uint64_t MainEngine::mid_hi(MidCls c) const {
    switch (c) {
        case MidCls::T: return th_.tiny;
        case MidCls::S: return th_.high;
        default:        return std::uint64_t(1) << 62;
    }
}

std::size_t MainEngine::degree_of(int layer, Vid v) const {
    switch (layer) {
        case 1: return g_.deg_in_A(v);
        case 2: return g_.combined_l2(v);
        case 3: return g_.combined_l3(v);
        default: return g_.deg_in_C(v);
    }
}

SideCls MainEngine::side_class(int layer, Vid v) const { return layer == 1 ? c1(v) : c4(v); }
MidCls MainEngine::mid_class(int layer, Vid v) const { return layer == 2 ? c2(v) : c3(v); }

// ------------------------------------------------------------------- ctor

MainEngine::MainEngine(Thresholds th, bool strict, bool mhat_fixed,
                       std::function<Thresholds(std::uint64_t)> rederive)
    : th_(th), strict_(strict), mhat_fixed_(mhat_fixed), rederive_(std::move(rederive)) {
    bootstrap_ = !th_.bands_feasible();
    if (!bootstrap_) {
        make_warmups();
        enqueue_phase_jobs();  // trivial over the empty graph
    }
}

// -------------------------------------------------------------------- apply

void MainEngine::apply(const UpdateEvent& e) {
    std::uint64_t start_ops = ops_;
    last_boundary_ = false;
    g_.apply(e);  // validates and maintains live degrees
    int s = e.op == Op::Insert ? 1 : -1;
    Vid lo = e.lo.index, hi = e.hi.index;

    if (e.matrix == Matrix::D) {
        maybe_drift_rebuild();
        last_ops_ = ops_ - start_ops;
        return;  // D edges carry no path-store state
    }

    if (bootstrap_) {
        // Plain maintained wedge tables.
        switch (e.matrix) {
            case Matrix::A:
                for (Vid w : g_.adj_lo(Matrix::B, hi)) {
                    ++ops_;
                    boot_wab_.add(lo, w, s);
                }
                break;
            case Matrix::B:
                for (Vid u : g_.adj_hi(Matrix::A, lo)) {
                    ++ops_;
                    boot_wab_.add(u, hi, s);
                }
                for (Vid v : g_.adj_lo(Matrix::C, hi)) {
                    ++ops_;
                    boot_wbc_.add(lo, v, s);
                }
                break;
            default:
                for (Vid y : g_.adj_hi(Matrix::B, lo)) {
                    ++ops_;
                    boot_wbc_.add(y, hi, s);
                }
                break;
        }
        maybe_drift_rebuild();
        last_ops_ = ops_ - start_ops;
        return;
    }

    cur_events_.push_back({e.matrix, lo, hi, s});
    switch (e.matrix) {
        case Matrix::A: update_stores_a(lo, hi, s); break;
        case Matrix::B: update_stores_b(lo, hi, s); break;
        default:        update_stores_c(lo, hi, s); break;
    }
    win_[int(e.matrix)].add(lo, hi, s);

    if (e.matrix == Matrix::B) {
        // The embedded fixed-A/C instances see B edges under the classes at
        // the window boundary; query-time corrections cover the difference.
        if (cls0_2(lo) == MidCls::S && cls0_3(hi) == MidCls::S) w_ss_->apply_b(lo, hi, s);
        if (cls0_2(lo) == MidCls::D && cls0_3(hi) == MidCls::D) w_dd_->apply_b(lo, hi, s);
        win_b_events_.push_back({lo, hi, s});
        if (dirty_l2_.count(lo) || dirty_l3_.count(hi))
            dirty_b_idx_.insert(win_b_events_.size() - 1);
    }

    on_edge_hooks(e.matrix, lo, hi, s);
    // the update incident to a transitioning vertex carries its rebuild
    // slice before the band check may force the switch
    step_transitions(th_.per_update_budget);

    switch (e.matrix) {
        case Matrix::A:
            check_transition(1, lo);
            check_transition(2, hi);
            break;
        case Matrix::B:
            check_transition(2, lo);
            check_transition(3, hi);
            break;
        default:
            check_transition(3, lo);
            check_transition(4, hi);
            break;
    }

    step_jobs(th_.per_update_budget);
    ++abc_events_;
    if (abc_events_ % th_.phase_size == 0) boundary();
    maybe_drift_rebuild();
    last_ops_ = ops_ - start_ops;
}

// ------------------------------------------------------------ store recipes

void MainEngine::update_stores_a(Vid u, Vid y, int s) {
    SideCls cu = c1(u);
    MidCls cy = c2(y);

    // pair stores through y
    if (cy == MidCls::S) {
        for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
            ++ops_;
            ab_s_.at(PH_NEW, pb).add(u, w, s * sb);
        });
    } else if (cy == MidCls::T) {
        for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
            ++ops_;
            ab_t_.at(PH_NEW, pb).add(u, w, s * sb);
        });
    } else {  // D
        if (cu == SideCls::H || cu == SideCls::M) {
            PhasedPair& st = cu == SideCls::H ? ab_d_h_ : ab_d_m_;
            for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                ++ops_;
                if (c3(w) == MidCls::D) st.at(PH_NEW, pb).add(u, w, s * sb);
            });
        }
        // A_new^{*D} . B_old^{DD}
        for (Vid w : old_[int(Matrix::B)].of_lo(y)) {
            ++ops_;
            if (c3(w) == MidCls::D) eq9_ab_.add(u, w, s);
        }
    }

    // triple stores rooted at u
    if (cu == SideCls::H && cy == MidCls::S) {
        for (Vid v : l4h_) {
            for (int pb = 0; pb < 2; ++pb)
                for (int pc = 0; pc < 2; ++pc) {
                    ++ops_;
                    if (std::int64_t val = bc_s_.at(pb, pc).get(y, v); val != 0)
                        eq11_[PhasedTriple::idx(PH_NEW, pb, pc)].add(u, v, checked_mul(s, val));
                }
            ++ops_;
            if (std::int64_t val = bc_t_.get_total(y, v); val != 0) {
                // A^{HS} . B^{ST} . C^{TH}, split by the bc_t slices
                for (int pb = 0; pb < 2; ++pb)
                    for (int pc = 0; pc < 2; ++pc)
                        if (std::int64_t x = bc_t_.at(pb, pc).get(y, v); x != 0)
                            t14b_.at(PH_NEW, pb, pc).add(u, v, checked_mul(s, x));
            }
        }
    }
    if (cy == MidCls::T && (cu == SideCls::H || cu == SideCls::M)) {
        if (cu == SideCls::H) {
            for (Vid v : l4h_) {
                for (int pb = 0; pb < 2; ++pb)
                    for (int pc = 0; pc < 2; ++pc) {
                        ++ops_;
                        if (std::int64_t x = bc_t_.at(pb, pc).get(y, v); x != 0)
                            t13a_.at(PH_NEW, pb, pc).add(u, v, checked_mul(s, x));
                        if (std::int64_t x = bc_s_.at(pb, pc).get(y, v); x != 0)
                            t14a_.at(PH_NEW, pb, pc).add(u, v, checked_mul(s, x));
                    }
            }
            for (Vid v : l4m_) {
                for (int pb = 0; pb < 2; ++pb)
                    for (int pc = 0; pc < 2; ++pc) {
                        ++ops_;
                        if (std::int64_t x = bc_t_.at(pb, pc).get(y, v); x != 0)
                            t13c_.at(PH_NEW, pb, pc).add(u, v, checked_mul(s, x));
                    }
            }
        } else {
            for (Vid v : l4h_) {
                for (int pb = 0; pb < 2; ++pb)
                    for (int pc = 0; pc < 2; ++pc) {
                        ++ops_;
                        if (std::int64_t x = bc_t_.at(pb, pc).get(y, v); x != 0)
                            t13b_.at(PH_NEW, pb, pc).add(u, v, checked_mul(s, x));
                    }
            }
        }
    }
}

void MainEngine::update_stores_c(Vid w, Vid v, int s) {
    SideCls cv = c4(v);
    MidCls cw = c3(w);

    if (cw == MidCls::S) {
        for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
            ++ops_;
            bc_s_.at(pb, PH_NEW).add(y, v, sb * s);
        });
    } else if (cw == MidCls::T) {
        for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
            ++ops_;
            bc_t_.at(pb, PH_NEW).add(y, v, sb * s);
        });
    } else {
        if (cv == SideCls::H || cv == SideCls::M) {
            PhasedPair& st = cv == SideCls::H ? bc_d_h_ : bc_d_m_;
            for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
                ++ops_;
                if (c2(y) == MidCls::D) st.at(pb, PH_NEW).add(y, v, sb * s);
            });
        }
        for (Vid y : old_[int(Matrix::B)].of_hi(w)) {
            ++ops_;
            if (c2(y) == MidCls::D) eq9_bc_.add(y, v, s);
        }
    }

    if (cv == SideCls::H && cw == MidCls::S) {
        for (Vid u : l1h_) {
            for (int pa = 0; pa < 2; ++pa)
                for (int pb = 0; pb < 2; ++pb) {
                    ++ops_;
                    if (std::int64_t val = ab_s_.at(pa, pb).get(u, w); val != 0)
                        eq11_[PhasedTriple::idx(pa, pb, PH_NEW)].add(u, v, checked_mul(s, val));
                    if (std::int64_t x = ab_t_.at(pa, pb).get(u, w); x != 0)
                        t14a_.at(pa, pb, PH_NEW).add(u, v, checked_mul(s, x));
                }
        }
    }
    if (cw == MidCls::T && (cv == SideCls::H || cv == SideCls::M)) {
        if (cv == SideCls::H) {
            for (Vid u : l1h_) {
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb) {
                        ++ops_;
                        if (std::int64_t x = ab_t_.at(pa, pb).get(u, w); x != 0)
                            t13a_.at(pa, pb, PH_NEW).add(u, v, checked_mul(s, x));
                        if (std::int64_t x = ab_s_.at(pa, pb).get(u, w); x != 0)
                            t14b_.at(pa, pb, PH_NEW).add(u, v, checked_mul(s, x));
                    }
            }
            for (Vid u : l1m_) {
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb) {
                        ++ops_;
                        if (std::int64_t x = ab_t_.at(pa, pb).get(u, w); x != 0)
                            t13b_.at(pa, pb, PH_NEW).add(u, v, checked_mul(s, x));
                    }
            }
        } else {
            for (Vid u : l1h_) {
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb) {
                        ++ops_;
                        if (std::int64_t x = ab_t_.at(pa, pb).get(u, w); x != 0)
                            t13c_.at(pa, pb, PH_NEW).add(u, v, checked_mul(s, x));
                    }
            }
        }
    }
}

void MainEngine::update_stores_b(Vid y, Vid w, int s) {
    MidCls cy = c2(y), cw = c3(w);

    if (cy == MidCls::S) {
        for_adj_hi(Matrix::A, y, [&](Vid u, int pa, int sa) {
            ++ops_;
            ab_s_.at(pa, PH_NEW).add(u, w, sa * s);
        });
    } else if (cy == MidCls::T) {
        for_adj_hi(Matrix::A, y, [&](Vid u, int pa, int sa) {
            ++ops_;
            ab_t_.at(pa, PH_NEW).add(u, w, sa * s);
        });
    }
    if (cw == MidCls::S) {
        for_adj_lo(Matrix::C, w, [&](Vid v, int pc, int sc) {
            ++ops_;
            bc_s_.at(PH_NEW, pc).add(y, v, s * sc);
        });
    } else if (cw == MidCls::T) {
        for_adj_lo(Matrix::C, w, [&](Vid v, int pc, int sc) {
            ++ops_;
            bc_t_.at(PH_NEW, pc).add(y, v, s * sc);
        });
    }
    if (cy == MidCls::D && cw == MidCls::D) {
        for_adj_hi(Matrix::A, y, [&](Vid u, int pa, int sa) {
            ++ops_;
            SideCls cu = c1(u);
            if (cu == SideCls::H) ab_d_h_.at(pa, PH_NEW).add(u, w, sa * s);
            else if (cu == SideCls::M) ab_d_m_.at(pa, PH_NEW).add(u, w, sa * s);
        });
        for_adj_lo(Matrix::C, w, [&](Vid v, int pc, int sc) {
            ++ops_;
            SideCls cv = c4(v);
            if (cv == SideCls::H) bc_d_h_.at(PH_NEW, pc).add(y, v, s * sc);
            else if (cv == SideCls::M) bc_d_m_.at(PH_NEW, pc).add(y, v, s * sc);
        });
    }

    // triple stores: iterate the H (and M for eq. 13) endpoints on both sides
    auto both_sides = [&](MidCls need_y, MidCls need_w, SideCls need_u, SideCls need_v,
                          auto&& write) {
        if (cy != need_y || cw != need_w) return;
        for_adj_hi(Matrix::A, y, [&](Vid u, int pa, int sa) {
            if (c1(u) != need_u) return;
            for_adj_lo(Matrix::C, w, [&](Vid v, int pc, int sc) {
                ++ops_;
                if (c4(v) != need_v) return;
                write(u, v, pa, pc, sa * s * sc);
            });
        });
    };
    both_sides(MidCls::S, MidCls::S, SideCls::H, SideCls::H,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   if (pa == PH_OLD && pc == PH_OLD) return;  // old*new*old lives in the subroutine
                   eq11_[PhasedTriple::idx(pa, PH_NEW, pc)].add(u, v, d);
               });
    both_sides(MidCls::T, MidCls::T, SideCls::H, SideCls::H,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   t13a_.at(pa, PH_NEW, pc).add(u, v, d);
               });
    both_sides(MidCls::T, MidCls::T, SideCls::M, SideCls::H,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   t13b_.at(pa, PH_NEW, pc).add(u, v, d);
               });
    both_sides(MidCls::T, MidCls::T, SideCls::H, SideCls::M,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   t13c_.at(pa, PH_NEW, pc).add(u, v, d);
               });
    both_sides(MidCls::T, MidCls::S, SideCls::H, SideCls::H,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   t14a_.at(pa, PH_NEW, pc).add(u, v, d);
               });
    both_sides(MidCls::S, MidCls::T, SideCls::H, SideCls::H,
               [&](Vid u, Vid v, int pa, int pc, std::int64_t d) {
                   t14b_.at(pa, PH_NEW, pc).add(u, v, d);
               });
}

// ------------------------------------------------------------------- phases

void MainEngine::step_jobs(std::uint64_t budget) {
    std::vector<PhJob*> open;
    for (auto& j : phase_jobs_)
        if (!j.job.done()) open.push_back(&j);
    if (open.empty()) return;
    std::uint64_t share = budget / open.size(), extra = budget % open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
        std::uint64_t before = open[i]->job.ops_done();
        open[i]->job.step(share + (i < extra ? 1 : 0));
        ops_ += open[i]->job.ops_done() - before;
    }
}

std::uint64_t MainEngine::backlog() const {
    std::uint64_t b = 0;
    for (const auto& j : phase_jobs_) b += j.job.ops_total() - j.job.ops_done();
    if (w_ss_) b += w_ss_->backlog();
    if (w_dd_) b += w_dd_->backlog();
    return b;
}

CountMatrix MainEngine::old_matrix(Matrix m, int mid_filter, bool plus_prev) const {
    // Netted edge set of the old snapshot, optionally plus the prev phase.
    std::unordered_map<std::uint64_t, int> net;
    for (auto k : old_[int(m)].set) net[k] = 1;
    if (plus_prev)
        for (const auto& e : prev_events_)
            if (e.m == m) {
                auto [it, fresh] = net.try_emplace(pack_pair(e.lo, e.hi), 0);
                it->second += e.sign;
                if (it->second == 0) net.erase(it);
            }
    std::vector<std::tuple<Vid, Vid, std::int64_t>> triples;
    for (auto& [k, cnt] : net) {
        Vid lo = pair_first(k), hi = pair_second(k);
        if (mid_filter >= 0) {
            // the filter applies to the L2/L3 endpoint named by the matrix
            MidCls need = MidCls(mid_filter);
            bool keep = true;
            switch (m) {
                case Matrix::A: keep = c2(hi) == need; break;   // L2 side
                case Matrix::C: keep = c3(lo) == need; break;   // L3 side
                default: break;
            }
            if (!keep) continue;
        }
        triples.emplace_back(lo, hi, cnt);
    }
    std::sort(triples.begin(), triples.end());
    return CountMatrix::from_triples(triples);
}

void MainEngine::enqueue_phase_jobs() {
    enq_cls2_ = cls2_;
    enq_cls3_ = cls3_;
    phase_jobs_.clear();
    // Operand edge set: everything that will be old at the next boundary.
    auto b_mat = [&](MidCls l2c, int l3c) {
        std::unordered_map<std::uint64_t, int> net;
        for (auto k : old_[int(Matrix::B)].set) net[k] = 1;
        for (const auto& e : prev_events_)
            if (e.m == Matrix::B) {
                auto [it, fresh] = net.try_emplace(pack_pair(e.lo, e.hi), 0);
                it->second += e.sign;
                if (it->second == 0) net.erase(it);
            }
        std::vector<std::tuple<Vid, Vid, std::int64_t>> triples;
        for (auto& [k, cnt] : net) {
            Vid y = pair_first(k), w = pair_second(k);
            if (c2(y) != l2c) continue;
            if (l3c >= 0 && c3(w) != MidCls(l3c)) continue;
            triples.emplace_back(y, w, cnt);
        }
        std::sort(triples.begin(), triples.end());
        return CountMatrix::from_triples(triples);
    };
    std::uint64_t due = boundaries_ + 1;
    // pair tables: A_old^{*x} . B_old^{x*} and B_old^{*x} . C_old^{x*}
    for (int x = 0; x < 3; ++x) {
        phase_jobs_.push_back(
            {ProductJob(old_matrix(Matrix::A, x, true), b_mat(MidCls(x), -1), due), x});
    }
    for (int x = 0; x < 3; ++x) {
        // B with the L3 endpoint in class x against C rows in class x
        std::unordered_map<std::uint64_t, int> net;
        for (auto k : old_[int(Matrix::B)].set) net[k] = 1;
        for (const auto& e : prev_events_)
            if (e.m == Matrix::B) {
                auto [it, fresh] = net.try_emplace(pack_pair(e.lo, e.hi), 0);
                it->second += e.sign;
                if (it->second == 0) net.erase(it);
            }
        std::vector<std::tuple<Vid, Vid, std::int64_t>> triples;
        for (auto& [k, cnt] : net)
            if (c3(pair_second(k)) == MidCls(x))
                triples.emplace_back(pair_first(k), pair_second(k), cnt);
        std::sort(triples.begin(), triples.end());
        phase_jobs_.push_back({ProductJob(CountMatrix::from_triples(triples),
                                          old_matrix(Matrix::C, x, true), due),
                               3 + x});
    }
    // the all-pairs sparse-sparse triple
    phase_jobs_.push_back({ProductJob(old_matrix(Matrix::A, int(MidCls::S), true),
                                      b_mat(MidCls::S, int(MidCls::S)),
                                      old_matrix(Matrix::C, int(MidCls::S), true), due),
                           6});
}

void MainEngine::fold_phase_jobs() {
    for (auto& j : phase_jobs_) {
        if (!j.job.done()) {
            ++deadline_missed_;
            if (strict_) fail(ErrKind::DeadlineMissed, "phase product unfinished at boundary");
            std::uint64_t before = j.job.ops_done();
            j.job.run_to_completion();
            ops_ += j.job.ops_done() - before;
        }
    }
}

void MainEngine::seed_old_slices() {
    auto take = [&](int kind) -> PairCount {
        for (auto& j : phase_jobs_)
            if (j.kind == kind) return j.job.result().to_pair_count();
        return PairCount{};
    };
    ab_t_.at(PH_OLD, PH_OLD) = take(0);
    ab_s_.at(PH_OLD, PH_OLD) = take(1);
    old_ab_d_ = take(2);
    bc_t_.at(PH_OLD, PH_OLD) = take(3);
    bc_s_.at(PH_OLD, PH_OLD) = take(4);
    old_bc_d_ = take(5);
    old_triple_ss_ = take(6);
    phase_jobs_.clear();
}

void MainEngine::correct_old_tables() {
    // The folded products were computed with the classes at enqueue time; a
    // vertex that changed class in between moves its old-edge contributions
    // between the class-restricted tables. L3 first, then L2, so the triple
    // correction can read consistent bc slices.
    auto enq2 = [&](Vid v) { return v < enq_cls2_.size() ? enq_cls2_[v] : MidCls::T; };
    auto enq3 = [&](Vid v) { return v < enq_cls3_.size() ? enq_cls3_[v] : MidCls::T; };

    auto bc_table = [&](MidCls c) -> PairCount& {
        return c == MidCls::T ? bc_t_.at(PH_OLD, PH_OLD)
               : c == MidCls::S ? bc_s_.at(PH_OLD, PH_OLD)
                                : old_bc_d_;
    };
    auto ab_table = [&](MidCls c) -> PairCount& {
        return c == MidCls::T ? ab_t_.at(PH_OLD, PH_OLD)
               : c == MidCls::S ? ab_s_.at(PH_OLD, PH_OLD)
                                : old_ab_d_;
    };

    std::vector<Vid> changed3, changed2;
    std::size_t n3 = std::max(cls3_.size(), enq_cls3_.size());
    for (Vid v = 0; v < n3; ++v)
        if (c3(v) != enq3(v)) changed3.push_back(v);
    std::size_t n2 = std::max(cls2_.size(), enq_cls2_.size());
    for (Vid v = 0; v < n2; ++v)
        if (c2(v) != enq2(v)) changed2.push_back(v);

    // Pass 1: L3 vertices. Pair tables move w's old wedges; the triple gains
    // or loses paths through w evaluated against the enqueue-time L2 classes,
    // which the old ab_s slice still reflects.
    for (Vid w : changed3) {
        bool was_s = enq3(w) == MidCls::S, is_s = c3(w) == MidCls::S;
        const auto& b_adj = old_[int(Matrix::B)].of_hi(w);
        const auto& c_adj = old_[int(Matrix::C)].of_lo(w);
        PairCount& from = bc_table(enq3(w));
        PairCount& to = bc_table(c3(w));
        for (Vid y : b_adj)
            for (Vid v : c_adj) {
                ++ops_;
                from.add(y, v, -1);
                to.add(y, v, 1);
            }
        if (was_s != is_s) {
            // column w of the enqueue-time A_old^{*S} B_old product
            std::vector<std::pair<Vid, std::int64_t>> col;
            ab_s_.at(PH_OLD, PH_OLD).for_each([&](Vid u, Vid c, std::int64_t val) {
                if (c == w) col.emplace_back(u, val);
            });
            std::int64_t sgn = is_s ? 1 : -1;
            for (Vid v : c_adj)
                for (auto& [u, val] : col) {
                    ++ops_;
                    old_triple_ss_.add(u, v, checked_mul(sgn, val));
                }
        }
    }
    // Pass 2: L2 vertices; the triple correction reads the now-corrected bc
    // old slice.
    for (Vid y : changed2) {
        bool was_s = enq2(y) == MidCls::S, is_s = c2(y) == MidCls::S;
        const auto& a_adj = old_[int(Matrix::A)].of_hi(y);
        const auto& b_adj = old_[int(Matrix::B)].of_lo(y);
        PairCount& from = ab_table(enq2(y));
        PairCount& to = ab_table(c2(y));
        for (Vid u : a_adj)
            for (Vid w : b_adj) {
                ++ops_;
                from.add(u, w, -1);
                to.add(u, w, 1);
            }
        if (was_s != is_s) {
            const PairCount& bcs_old = bc_s_.at(PH_OLD, PH_OLD);
            std::int64_t sgn = is_s ? 1 : -1;
            if (const auto* row = bcs_old.row(y))
                for (Vid u : a_adj)
                    for (auto& [v, val] : *row) {
                        ++ops_;
                        old_triple_ss_.add(u, v, checked_mul(sgn, val));
                    }
        }
    }

    // Re-derive the class-restricted live slices of the dense family.
    ab_d_h_.at(PH_OLD, PH_OLD).clear();
    ab_d_m_.at(PH_OLD, PH_OLD).clear();
    old_ab_d_.for_each([&](Vid u, Vid w, std::int64_t v) {
        ++ops_;
        if (c3(w) != MidCls::D) return;
        if (c1(u) == SideCls::H) ab_d_h_.at(PH_OLD, PH_OLD).add(u, w, v);
        else if (c1(u) == SideCls::M) ab_d_m_.at(PH_OLD, PH_OLD).add(u, w, v);
    });
    bc_d_h_.at(PH_OLD, PH_OLD).clear();
    bc_d_m_.at(PH_OLD, PH_OLD).clear();
    old_bc_d_.for_each([&](Vid y, Vid v, std::int64_t val) {
        ++ops_;
        if (c2(y) != MidCls::D) return;
        if (c4(v) == SideCls::H) bc_d_h_.at(PH_OLD, PH_OLD).add(y, v, val);
        else if (c4(v) == SideCls::M) bc_d_m_.at(PH_OLD, PH_OLD).add(y, v, val);
    });
}

void MainEngine::rebuild_tiny_old_slices() {
    auto clear_ooo = [](PhasedTriple& t) { t.at(0, 0, 0).clear(); };
    clear_ooo(t13a_);
    clear_ooo(t13b_);
    clear_ooo(t13c_);
    clear_ooo(t14a_);
    clear_ooo(t14b_);
    const Adj01& A = old_[0];
    const Adj01& B = old_[1];
    const Adj01& C = old_[2];
    for (Vid y = 0; y < B.lo.size(); ++y) {
        MidCls cy = c2(y);
        if (cy == MidCls::D) continue;
        for (Vid w : B.of_lo(y)) {
            MidCls cw = c3(w);
            if (cw == MidCls::D) continue;
            if (cy == MidCls::S && cw == MidCls::S) continue;
            for (Vid u : A.of_hi(y)) {
                SideCls cu = c1(u);
                if (cu != SideCls::H && cu != SideCls::M) continue;
                for (Vid v : C.of_lo(w)) {
                    SideCls cv = c4(v);
                    ++ops_;
                    if (cy == MidCls::T && cw == MidCls::T) {
                        if (cu == SideCls::H && cv == SideCls::H) t13a_.at(0, 0, 0).add(u, v, 1);
                        else if (cu == SideCls::M && cv == SideCls::H)
                            t13b_.at(0, 0, 0).add(u, v, 1);
                        else if (cu == SideCls::H && cv == SideCls::M)
                            t13c_.at(0, 0, 0).add(u, v, 1);
                    } else if (cu == SideCls::H && cv == SideCls::H) {
                        if (cy == MidCls::T && cw == MidCls::S) t14a_.at(0, 0, 0).add(u, v, 1);
                        else if (cy == MidCls::S && cw == MidCls::T)
                            t14b_.at(0, 0, 0).add(u, v, 1);
                    }
                }
            }
        }
    }
}

void MainEngine::make_warmups() {
    FrozenAC ss, dd;
    const Adj01& A = old_[0];
    const Adj01& C = old_[2];
    for (auto k : A.set) {
        Vid u = pair_first(k), y = pair_second(k);
        MidCls cy = cls0_2(y);
        if (cy == MidCls::S) ss.add_a(u, y);
        else if (cy == MidCls::D) dd.add_a(u, y);
    }
    for (auto k : C.set) {
        Vid w = pair_first(k), v = pair_second(k);
        MidCls cw = cls0_3(w);
        if (cw == MidCls::S) ss.add_c(w, v);
        else if (cw == MidCls::D) dd.add_c(w, v);
    }
    w_ss_ = std::make_unique<WarmupEngine>(std::move(ss), th_, strict_);
    w_dd_ = std::make_unique<WarmupEngine>(std::move(dd), th_, strict_);
}

void MainEngine::replay_window() {
    replaying_ = true;
    for (const auto& e : prev_events_) {
        switch (e.m) {
            case Matrix::A: update_stores_a(e.lo, e.hi, e.sign); break;
            case Matrix::B: update_stores_b(e.lo, e.hi, e.sign); break;
            default:        update_stores_c(e.lo, e.hi, e.sign); break;
        }
        win_[int(e.m)].add(e.lo, e.hi, e.sign);
        if (e.m == Matrix::B) {
            if (cls0_2(e.lo) == MidCls::S && cls0_3(e.hi) == MidCls::S)
                w_ss_->apply_b(e.lo, e.hi, e.sign);
            if (cls0_2(e.lo) == MidCls::D && cls0_3(e.hi) == MidCls::D)
                w_dd_->apply_b(e.lo, e.hi, e.sign);
            win_b_events_.push_back({e.lo, e.hi, e.sign});
        }
    }
    replaying_ = false;
}

void MainEngine::boundary() {
    ++boundaries_;
    last_boundary_ = true;
    std::uint64_t t0 = ops_;

    fold_phase_jobs();
    // the prev phase leaves the window and joins the old snapshot
    for (const auto& e : prev_events_) {
        if (e.sign > 0) old_[int(e.m)].add(e.lo, e.hi);
        else old_[int(e.m)].remove(e.lo, e.hi);
        ++ops_;
    }
    seed_old_slices();
    correct_old_tables();

    prev_events_ = std::move(cur_events_);
    cur_events_.clear();
    for (auto& w : win_) w.clear();
    cls0_2_ = cls2_;
    cls0_3_ = cls3_;
    win_b_events_.clear();
    dirty_l2_.clear();
    dirty_l3_.clear();
    dirty_b_idx_.clear();

    ab_s_.clear_new();
    bc_s_.clear_new();
    ab_t_.clear_new();
    bc_t_.clear_new();
    ab_d_h_.clear_new();
    ab_d_m_.clear_new();
    bc_d_h_.clear_new();
    bc_d_m_.clear_new();
    eq9_ab_.clear();
    eq9_bc_.clear();
    for (auto& p : eq11_) p.clear();
    t13a_.clear_new();
    t13b_.clear_new();
    t13c_.clear_new();
    t14a_.clear_new();
    t14b_.clear_new();
    rebuild_tiny_old_slices();

    make_warmups();
    replay_window();
    enqueue_phase_jobs();
    restart_all_transitions();
    boundary_ops_ += ops_ - t0;
}

// ------------------------------------------------------------------ rebuild

void MainEngine::maybe_drift_rebuild() {
    if (mhat_fixed_) return;
    std::uint64_t m = std::uint64_t(g_.edge_count());
    if (m == 0) return;
    if (m > 2 * th_.mhat || m < th_.mhat / 2) rebuild(m);
}

void MainEngine::rebuild(std::uint64_t new_mhat) {
    ++rebuilds_;
    std::uint64_t t0 = ops_;
    Thresholds nt = th_;
    nt.mhat = new_mhat;
    // derive fresh thresholds only when the old ones came from the same shape
    nt.high = th_.high;  // manual thresholds are kept; only mhat moves
    th_ = nt;
    bootstrap_ = !th_.bands_feasible();

    // reset derived state and rebuild from the live graph as all-old
    for (auto& a : old_) a.clear();
    for (auto& w : win_) w.clear();
    prev_events_.clear();
    cur_events_.clear();
    abc_events_ = 0;
    ab_s_.clear();
    bc_s_.clear();
    ab_t_.clear();
    bc_t_.clear();
    ab_d_h_.clear();
    ab_d_m_.clear();
    bc_d_h_.clear();
    bc_d_m_.clear();
    eq9_ab_.clear();
    eq9_bc_.clear();
    for (auto& p : eq11_) p.clear();
    t13a_.clear();
    t13b_.clear();
    t13c_.clear();
    t14a_.clear();
    t14b_.clear();
    old_ab_d_.clear();
    old_bc_d_.clear();
    old_triple_ss_.clear();
    transitions_.clear();
    boot_wab_.clear();
    boot_wbc_.clear();

    // settle classes by degree; band membership resolves to the lower class
    auto settle_side = [&](std::size_t cap, int layer, std::vector<SideCls>& cls,
                           std::unordered_set<Vid>& hs, std::unordered_set<Vid>& ms) {
        cls.assign(cap, SideCls::T);
        hs.clear();
        ms.clear();
        for (Vid v = 0; v < cap; ++v) {
            std::size_t d = degree_of(layer, v);
            SideCls c = SideCls::T;
            if (d >= 2 * th_.high) c = SideCls::H;
            else if (d >= 2 * th_.medium) c = SideCls::M;
            else if (d >= 2 * th_.tiny) c = SideCls::L;
            cls[v] = c;
            if (c == SideCls::H) hs.insert(v);
            if (c == SideCls::M) ms.insert(v);
        }
    };
    auto settle_mid = [&](std::size_t cap, int layer, std::vector<MidCls>& cls,
                          std::unordered_set<Vid>& ds) {
        cls.assign(cap, MidCls::T);
        ds.clear();
        for (Vid v = 0; v < cap; ++v) {
            std::size_t d = degree_of(layer, v);
            MidCls c = MidCls::T;
            if (d >= 2 * th_.high) c = MidCls::D;
            else if (d >= 2 * th_.tiny) c = MidCls::S;
            cls[v] = c;
            if (c == MidCls::D) ds.insert(v);
        }
    };
    settle_side(g_.layer_capacity(1), 1, cls1_, l1h_, l1m_);
    settle_side(g_.layer_capacity(4), 4, cls4_, l4h_, l4m_);
    settle_mid(g_.layer_capacity(2), 2, cls2_, l2d_);
    settle_mid(g_.layer_capacity(3), 3, cls3_, l3d_);
    cls0_2_ = cls2_;
    cls0_3_ = cls3_;
    win_b_events_.clear();
    dirty_l2_.clear();
    dirty_l3_.clear();
    dirty_b_idx_.clear();

    if (bootstrap_) {
        // fall back to maintained wedge tables
        for (auto key : g_.edge_set(Matrix::B)) {
            Vid y = pair_first(key), w = pair_second(key);
            for (Vid u : g_.adj_hi(Matrix::A, y)) {
                ++ops_;
                boot_wab_.add(u, w, 1);
            }
            for (Vid v : g_.adj_lo(Matrix::C, w)) {
                ++ops_;
                boot_wbc_.add(y, v, 1);
            }
        }
        boundary_ops_ += ops_ - t0;
        return;
    }

    for (auto key : g_.edge_set(Matrix::A)) old_[0].add(pair_first(key), pair_second(key));
    for (auto key : g_.edge_set(Matrix::B)) old_[1].add(pair_first(key), pair_second(key));
    for (auto key : g_.edge_set(Matrix::C)) old_[2].add(pair_first(key), pair_second(key));

    // one-shot old tables
    enqueue_phase_jobs();
    for (auto& j : phase_jobs_) {
        std::uint64_t before = j.job.ops_done();
        j.job.run_to_completion();
        ops_ += j.job.ops_done() - before;
    }
    seed_old_slices();
    correct_old_tables();  // enqueue classes equal current ones: no-op moves
    rebuild_tiny_old_slices();
    make_warmups();
    enqueue_phase_jobs();
    boundary_ops_ += ops_ - t0;
}

}  // namespace cyc4
