#include <algorithm>
#include <cstdio>

#include "cyc4/engine_main.hpp"

namespace cyc4 {

namespace {
constexpr MidCls kT = MidCls::T;
constexpr MidCls kS = MidCls::S;
constexpr MidCls kD = MidCls::D;

enum Slot {
    SLOT_AB_S,    // combo pa*2+pb
    SLOT_AB_T,
    SLOT_AB_D_H,
    SLOT_AB_D_M,
    SLOT_BC_S,    // combo pb*2+pc
    SLOT_BC_T,
    SLOT_BC_D_H,
    SLOT_BC_D_M,
    SLOT_EQ9_AB,  // combo 0
    SLOT_EQ9_BC,
    SLOT_EQ11,    // combo PhasedTriple::idx
    SLOT_T13A,
    SLOT_T13B,
    SLOT_T13C,
    SLOT_T14A,
    SLOT_T14B,
    SLOT_OLD_AB_D,
    SLOT_OLD_BC_D,
    SLOT_OLD_TRIPLE,
};

bool eq11_combo_stored(int pa, int pb, int pc) {
    if (pa == PH_OLD && pb == PH_OLD && pc == PH_OLD) return false;  // the old triple table
    if (pa == PH_OLD && pb == PH_NEW && pc == PH_OLD) return false;  // the subroutine
    return true;
}
}  // namespace

// --------------------------------------------------------------- plumbing

void MainEngine::mark_dirty_mid(int layer, Vid v) {
    auto& dirty = layer == 2 ? dirty_l2_ : dirty_l3_;
    MidCls boundary_cls = layer == 2 ? cls0_2(v) : cls0_3(v);
    MidCls now = layer == 2 ? c2(v) : c3(v);
    if (boundary_cls == now) {
        dirty.erase(v);
        return;
    }
    if (!dirty.insert(v).second) return;
    for (std::size_t i = 0; i < win_b_events_.size(); ++i) {
        ++ops_;
        if ((layer == 2 && win_b_events_[i].y == v) || (layer == 3 && win_b_events_[i].w == v))
            dirty_b_idx_.insert(i);
    }
}

void MainEngine::check_transition(int layer, Vid v) {
    if (bootstrap_ || replaying_) return;
    std::size_t d = degree_of(layer, v);
    bool side = layer == 1 || layer == 4;
    int cur = side ? int(side_class(layer, v)) : int(mid_class(layer, v));
    std::uint64_t lo = side ? side_lo(SideCls(cur)) : mid_lo(MidCls(cur));
    std::uint64_t hi = side ? side_hi(SideCls(cur)) : mid_hi(MidCls(cur));

    auto ensure = [&](int to, bool up) {
        auto it = transitions_.find(trans_key(layer, v));
        if (it != transitions_.end()) {
            if (it->second.to == to) return;
            transitions_.erase(it);
        }
        start_transition(layer, v, cur, to, up);
    };

    if (d >= 2 * hi) {
        ensure(cur + 1, true);
        force_switch(layer, v);
    } else if (d < lo) {
        ensure(cur - 1, false);
        force_switch(layer, v);
    } else if (d >= hi) {
        ensure(cur + 1, true);
    } else if (d < 2 * lo) {
        ensure(cur - 1, false);
    } else {
        cancel_transition(layer, v);
    }
}

void MainEngine::start_transition(int layer, Vid v, int from, int to, bool up) {
    Transition t;
    t.layer = layer;
    t.v = v;
    t.up = up;
    t.from = from;
    t.to = to;
    auto [it, fresh] = transitions_.emplace(trans_key(layer, v), std::move(t));
    build_tasks(it->second);
}

void MainEngine::cancel_transition(int layer, Vid v) { transitions_.erase(trans_key(layer, v)); }

void MainEngine::restart_all_transitions() {
    for (auto& [key, t] : transitions_) {
        t.tasks.clear();
        t.staged.clear();
        build_tasks(t);
    }
}

void MainEngine::step_transitions(std::uint64_t budget) {
    if (transitions_.empty()) return;
    std::uint64_t share = std::max<std::uint64_t>(1, budget / transitions_.size());
    for (auto& [key, t] : transitions_) {
        std::uint64_t start = ops_;
        for (auto& task : t.tasks) {
            while (task.cursor < task.hops.size() && ops_ - start < share) {
                Vid y = task.hops[task.cursor++];
                if (!task.processed.insert(y).second) continue;
                task.process(y);
            }
            if (ops_ - start >= share) break;
        }
    }
}

void MainEngine::on_edge_hooks(Matrix m, Vid lo, Vid hi, int sign) {
    if (replaying_) return;
    for (auto& [key, t] : transitions_)
        for (auto& task : t.tasks)
            if (task.on_edge) task.on_edge(m, lo, hi, sign);
}

void MainEngine::force_switch(int layer, Vid v) {
    auto it = transitions_.find(trans_key(layer, v));
    if (it == transitions_.end()) return;
    Transition& t = it->second;
    if (!t.complete()) {
        ++deadline_missed_;
#ifdef CYC4_DEBUG_MISS
        std::size_t done=0, tot=0;
        for (auto& task : t.tasks) { done+=task.cursor; tot+=task.hops.size(); }
        std::fprintf(stderr, "MISS layer=%d v=%u from=%d to=%d tasks=%zu done=%zu tot=%zu\n",
                     t.layer, t.v, t.from, t.to, t.tasks.size(), done, tot);
#endif
        if (strict_) fail(ErrKind::DeadlineMissed, "transition rebuild unfinished at class switch");
        for (auto& task : t.tasks)
            while (task.cursor < task.hops.size()) {
                Vid y = task.hops[task.cursor++];
                if (task.processed.insert(y).second) task.process(y);
            }
    }
    complete_switch(t);
}

void MainEngine::apply_staged(Transition& t) {
    auto slice = [&](PhasedPair& p, int combo) -> PairCount& { return p.s[combo >> 1][combo & 1]; };
    for (auto& [key, pc] : t.staged) {
        auto [slot, combo] = key;
        PairCount* dst = nullptr;
        switch (Slot(slot)) {
            case SLOT_AB_S: dst = &slice(ab_s_, combo); break;
            case SLOT_AB_T: dst = &slice(ab_t_, combo); break;
            case SLOT_AB_D_H: dst = &slice(ab_d_h_, combo); break;
            case SLOT_AB_D_M: dst = &slice(ab_d_m_, combo); break;
            case SLOT_BC_S: dst = &slice(bc_s_, combo); break;
            case SLOT_BC_T: dst = &slice(bc_t_, combo); break;
            case SLOT_BC_D_H: dst = &slice(bc_d_h_, combo); break;
            case SLOT_BC_D_M: dst = &slice(bc_d_m_, combo); break;
            case SLOT_EQ9_AB: dst = &eq9_ab_; break;
            case SLOT_EQ9_BC: dst = &eq9_bc_; break;
            case SLOT_EQ11: dst = &eq11_[combo]; break;
            case SLOT_T13A: dst = &t13a_.s[combo]; break;
            case SLOT_T13B: dst = &t13b_.s[combo]; break;
            case SLOT_T13C: dst = &t13c_.s[combo]; break;
            case SLOT_T14A: dst = &t14a_.s[combo]; break;
            case SLOT_T14B: dst = &t14b_.s[combo]; break;
            case SLOT_OLD_AB_D: dst = &old_ab_d_; break;
            case SLOT_OLD_BC_D: dst = &old_bc_d_; break;
            case SLOT_OLD_TRIPLE: dst = &old_triple_ss_; break;
        }
        dst->add_all(pc);
        ops_ += pc.entry_count();
    }
}

void MainEngine::erase_class_rows(int layer, Vid v, int cls) {
    auto erase_pair_rows = [&](PhasedPair& p) {
        for (auto& a : p.s)
            for (auto& q : a) q.erase_row(v);
    };
    auto erase_pair_cols = [&](PhasedPair& p) {
        for (auto& a : p.s)
            for (auto& q : a) q.erase_col(v);
    };
    auto erase_triple_rows = [&](PhasedTriple& p) {
        for (auto& q : p.s) q.erase_row(v);
    };
    auto erase_triple_cols = [&](PhasedTriple& p) {
        for (auto& q : p.s) q.erase_col(v);
    };
    if (layer == 1) {
        if (SideCls(cls) == SideCls::M) {
            erase_pair_rows(ab_d_m_);
            erase_triple_rows(t13b_);
        } else if (SideCls(cls) == SideCls::H) {
            erase_pair_rows(ab_d_h_);
            for (auto& p : eq11_) p.erase_row(v);
            erase_triple_rows(t13a_);
            erase_triple_rows(t13c_);
            erase_triple_rows(t14a_);
            erase_triple_rows(t14b_);
        }
    } else if (layer == 4) {
        if (SideCls(cls) == SideCls::M) {
            erase_pair_cols(bc_d_m_);
            erase_triple_cols(t13c_);
        } else if (SideCls(cls) == SideCls::H) {
            erase_pair_cols(bc_d_h_);
            for (auto& p : eq11_) p.erase_col(v);
            erase_triple_cols(t13a_);
            erase_triple_cols(t13b_);
            erase_triple_cols(t14a_);
            erase_triple_cols(t14b_);
        }
    } else if (layer == 2) {
        if (MidCls(cls) == kD) {
            for (auto& a : bc_d_h_.s)
                for (auto& q : a) q.erase_row(v);
            for (auto& a : bc_d_m_.s)
                for (auto& q : a) q.erase_row(v);
            eq9_bc_.erase_row(v);
        }
    } else {
        if (MidCls(cls) == kD) {
            for (auto& a : ab_d_h_.s)
                for (auto& q : a) q.erase_col(v);
            for (auto& a : ab_d_m_.s)
                for (auto& q : a) q.erase_col(v);
            eq9_ab_.erase_col(v);
        }
    }
}

void MainEngine::complete_switch(Transition& tr) {
    int layer = tr.layer;
    Vid v = tr.v;
    int from = tr.from, to = tr.to;
    apply_staged(tr);
    erase_class_rows(layer, v, from);
    transitions_.erase(trans_key(layer, v));

    // install the new class
    if (layer == 1 || layer == 4) {
        auto& cls = layer == 1 ? cls1_ : cls4_;
        if (cls.size() <= v) cls.resize(v + 1, SideCls::T);
        cls[v] = SideCls(to);
        auto& hs = layer == 1 ? l1h_ : l4h_;
        auto& ms = layer == 1 ? l1m_ : l4m_;
        hs.erase(v);
        ms.erase(v);
        if (SideCls(to) == SideCls::H) hs.insert(v);
        if (SideCls(to) == SideCls::M) ms.insert(v);
    } else {
        auto& cls = layer == 2 ? cls2_ : cls3_;
        if (cls.size() <= v) cls.resize(v + 1, MidCls::T);
        cls[v] = MidCls(to);
        auto& ds = layer == 2 ? l2d_ : l3d_;
        ds.erase(v);
        if (MidCls(to) == kD) ds.insert(v);
        mark_dirty_mid(layer, v);
    }
    ++transitions_done_;
    // staged values read classes, so concurrent rebuilds restart against the
    // new assignment; they get an immediate slice in case this same update
    // forces them too
    restart_all_transitions();
    step_transitions(th_.per_update_budget);
}

// ------------------------------------------------------------ task recipes

namespace {
// collect the distinct neighbor set across both phases
template <class Old, class Win>
std::vector<Vid> hop_list(const Old& old_adj, const Win& win_adj) {
    std::vector<Vid> out(old_adj.begin(), old_adj.end());
    std::unordered_set<Vid> seen(out.begin(), out.end());
    for (auto& [v, s] : win_adj)
        if (seen.insert(v).second) out.push_back(v);
    return out;
}
}  // namespace

void MainEngine::build_tasks(Transition& t) {
    Vid v = t.v;
    auto stage = [&t](int slot, int combo, Vid r, Vid c, std::int64_t val) {
        if (val != 0) t.staged[{slot, combo}].add(r, c, val);
    };

    if (t.layer == 1 || t.layer == 4) {
        bool is_l1 = t.layer == 1;
        SideCls target = SideCls(t.to);
        if (target != SideCls::M && target != SideCls::H) {
            t.tasks.clear();  // L and T rows exist nowhere
            return;
        }
        // one path worth of staging for the target class rows/cols of v
        auto stage_path = [this, stage, target, is_l1, v](Vid y, Vid w, Vid other, int pa, int pb,
                                                          int pc, std::int64_t sgn) {
            MidCls cy = c2(y), cw = c3(w);
            SideCls co = is_l1 ? c4(other) : c1(other);
            Vid row = is_l1 ? v : other, col = is_l1 ? other : v;
            int combo = PhasedTriple::idx(pa, pb, pc);
            if (target == SideCls::H) {
                if (cy == kS && cw == kS && co == SideCls::H && eq11_combo_stored(pa, pb, pc))
                    stage(SLOT_EQ11, combo, row, col, sgn);
                if (cy == kT && cw == kT && co == SideCls::H) stage(SLOT_T13A, combo, row, col, sgn);
                if (cy == kT && cw == kT && co == SideCls::M)
                    stage(is_l1 ? SLOT_T13C : SLOT_T13B, combo, row, col, sgn);
                if (cy == kT && cw == kS && co == SideCls::H) stage(SLOT_T14A, combo, row, col, sgn);
                if (cy == kS && cw == kT && co == SideCls::H) stage(SLOT_T14B, combo, row, col, sgn);
            } else {  // target M
                if (cy == kT && cw == kT && co == SideCls::H)
                    stage(is_l1 ? SLOT_T13B : SLOT_T13C, combo, row, col, sgn);
            }
        };
        auto stage_wedge = [this, stage, target, is_l1, v](Vid y, Vid w, int p1, int p2,
                                                           std::int64_t sgn) {
            if (c2(y) != kD || c3(w) != kD) return;
            if (is_l1)
                stage(target == SideCls::H ? SLOT_AB_D_H : SLOT_AB_D_M, p1 * 2 + p2, v, w, sgn);
            else
                stage(target == SideCls::H ? SLOT_BC_D_H : SLOT_BC_D_M, p1 * 2 + p2, y, v, sgn);
        };

        Transition::Task task;
        task.hop_matrix = is_l1 ? Matrix::A : Matrix::C;
        task.hop_from_lo = !is_l1;  // v is the hi side of C
        if (is_l1)
            task.hops = hop_list(old_[0].of_lo(v), win_[0].of_lo(v));
        else
            task.hops = hop_list(old_[2].of_hi(v), win_[2].of_hi(v));
        task.hop_set.insert(task.hops.begin(), task.hops.end());

        if (is_l1) {
            task.process = [this, v, stage_path, stage_wedge](Vid y) {
                for_mem(Matrix::A, v, y, [&](int pa, int sa) {
                    for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                        ++ops_;
                        stage_wedge(y, w, pa, pb, std::int64_t(sa) * sb);
                        for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                            ++ops_;
                            stage_path(y, w, v2, pa, pb, pc, std::int64_t(sa) * sb * sc);
                        });
                    });
                });
            };
            task.on_edge = [this, v, stage_path, stage_wedge, key = trans_key(1, v)](
                               Matrix m, Vid lo, Vid hi, int s) {
                auto it = transitions_.find(key);
                if (it == transitions_.end()) return;
                auto& task0 = it->second.tasks[0];
                if (m == Matrix::A && lo == v) {
                    if (!task0.hop_set.count(hi)) {
                        task0.hops.push_back(hi);
                        task0.hop_set.insert(hi);
                        return;
                    }
                    if (!task0.processed.count(hi)) return;
                    // marginal for the new membership only
                    Vid y = hi;
                    for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                        ++ops_;
                        stage_wedge(y, w, PH_NEW, pb, std::int64_t(s) * sb);
                        for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                            ++ops_;
                            stage_path(y, w, v2, PH_NEW, pb, pc, std::int64_t(s) * sb * sc);
                        });
                    });
                } else if (m == Matrix::B) {
                    Vid y = lo, w = hi;
                    if (!task0.processed.count(y)) return;
                    for_mem(Matrix::A, v, y, [&](int pa, int sa) {
                        ++ops_;
                        stage_wedge(y, w, pa, PH_NEW, std::int64_t(sa) * s);
                        for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                            ++ops_;
                            stage_path(y, w, v2, pa, PH_NEW, pc, std::int64_t(sa) * s * sc);
                        });
                    });
                } else if (m == Matrix::C) {
                    Vid w = lo, v2 = hi;
                    for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
                        ++ops_;
                        if (!task0.processed.count(y)) return;
                        for_mem(Matrix::A, v, y, [&](int pa, int sa) {
                            stage_path(y, w, v2, pa, pb, PH_NEW, std::int64_t(sa) * sb * s);
                        });
                    });
                }
            };
        } else {
            task.process = [this, v, stage_path, stage_wedge](Vid w) {
                for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                    for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
                        ++ops_;
                        stage_wedge(y, w, pb, pc, std::int64_t(sb) * sc);
                        for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                            ++ops_;
                            stage_path(y, w, u2, pa, pb, pc, std::int64_t(sa) * sb * sc);
                        });
                    });
                });
            };
            task.on_edge = [this, v, stage_path, stage_wedge, key = trans_key(4, v)](
                               Matrix m, Vid lo, Vid hi, int s) {
                auto it = transitions_.find(key);
                if (it == transitions_.end()) return;
                auto& task0 = it->second.tasks[0];
                if (m == Matrix::C && hi == v) {
                    if (!task0.hop_set.count(lo)) {
                        task0.hops.push_back(lo);
                        task0.hop_set.insert(lo);
                        return;
                    }
                    if (!task0.processed.count(lo)) return;
                    Vid w = lo;
                    for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
                        ++ops_;
                        stage_wedge(y, w, pb, PH_NEW, std::int64_t(sb) * s);
                        for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                            ++ops_;
                            stage_path(y, w, u2, pa, pb, PH_NEW, std::int64_t(sa) * sb * s);
                        });
                    });
                } else if (m == Matrix::B) {
                    Vid y = lo, w = hi;
                    if (!task0.processed.count(w)) return;
                    for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                        ++ops_;
                        stage_wedge(y, w, PH_NEW, pc, std::int64_t(s) * sc);
                        for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                            ++ops_;
                            stage_path(y, w, u2, pa, PH_NEW, pc, std::int64_t(sa) * s * sc);
                        });
                    });
                } else if (m == Matrix::A) {
                    Vid u2 = lo, y = hi;
                    for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                        ++ops_;
                        if (!task0.processed.count(w)) return;
                        for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                            stage_path(y, w, u2, PH_NEW, pb, pc, std::int64_t(s) * sb * sc);
                        });
                    });
                }
            };
        }
        t.tasks.push_back(std::move(task));
        return;
    }

    // ---- middle layers: value moves between the class families ----
    bool is_l2 = t.layer == 2;
    MidCls from = MidCls(t.from), to = MidCls(t.to);

    // per-family staging of one wedge and one path, with a sign
    auto fam_pair_slot = [is_l2](MidCls fam) {
        if (is_l2) return fam == kT ? SLOT_AB_T : SLOT_AB_S;  // D handled separately
        return fam == kT ? SLOT_BC_T : SLOT_BC_S;
    };
    auto stage_wedge_fam = [this, stage, is_l2, fam_pair_slot](MidCls fam, std::int64_t sgn,
                                                               Vid other, Vid far, int p_near,
                                                               int p_far) {
        // other = the L1 (resp. L4) endpoint, far = the L3 (resp. L2) endpoint
        if (is_l2) {
            Vid u2 = other, w = far;
            int combo = p_near * 2 + p_far;  // pa, pb
            if (fam != kD) stage(fam_pair_slot(fam), combo, u2, w, sgn);
            else {
                if (c3(w) == kD) {
                    SideCls cu = c1(u2);
                    if (cu == SideCls::H) stage(SLOT_AB_D_H, combo, u2, w, sgn);
                    else if (cu == SideCls::M) stage(SLOT_AB_D_M, combo, u2, w, sgn);
                    if (p_near == PH_NEW && p_far == PH_OLD) stage(SLOT_EQ9_AB, 0, u2, w, sgn);
                }
                if (p_near == PH_OLD && p_far == PH_OLD) stage(SLOT_OLD_AB_D, 0, u2, w, sgn);
            }
        } else {
            Vid v2 = other, y = far;
            int combo = p_far * 2 + p_near;  // pb, pc
            if (fam != kD) stage(fam_pair_slot(fam), combo, y, v2, sgn);
            else {
                if (c2(y) == kD) {
                    SideCls cv = c4(v2);
                    if (cv == SideCls::H) stage(SLOT_BC_D_H, combo, y, v2, sgn);
                    else if (cv == SideCls::M) stage(SLOT_BC_D_M, combo, y, v2, sgn);
                    if (p_far == PH_OLD && p_near == PH_NEW) stage(SLOT_EQ9_BC, 0, y, v2, sgn);
                }
                if (p_near == PH_OLD && p_far == PH_OLD) stage(SLOT_OLD_BC_D, 0, y, v2, sgn);
            }
        }
    };
    auto stage_path_fam = [this, stage, is_l2](MidCls fam, std::int64_t sgn, Vid u2, Vid other_mid,
                                               Vid v2, int pa, int pb, int pc) {
        // the transitioning vertex is the L2 (resp. L3) middle; other_mid the
        // other one
        SideCls cu = c1(u2), cv = c4(v2);
        MidCls com = is_l2 ? c3(other_mid) : c2(other_mid);
        int combo = PhasedTriple::idx(pa, pb, pc);
        MidCls m2 = is_l2 ? fam : com;  // L2 class of the path
        MidCls m3 = is_l2 ? com : fam;  // L3 class of the path
        if (m2 == kS && m3 == kS) {
            if (cu == SideCls::H && cv == SideCls::H && eq11_combo_stored(pa, pb, pc))
                stage(SLOT_EQ11, combo, u2, v2, sgn);
            if (pa == PH_OLD && pb == PH_OLD && pc == PH_OLD)
                stage(SLOT_OLD_TRIPLE, 0, u2, v2, sgn);
        } else if (m2 == kT && m3 == kT) {
            if (cu == SideCls::H && cv == SideCls::H) stage(SLOT_T13A, combo, u2, v2, sgn);
            else if (cu == SideCls::M && cv == SideCls::H) stage(SLOT_T13B, combo, u2, v2, sgn);
            else if (cu == SideCls::H && cv == SideCls::M) stage(SLOT_T13C, combo, u2, v2, sgn);
        } else if (m2 == kT && m3 == kS) {
            if (cu == SideCls::H && cv == SideCls::H) stage(SLOT_T14A, combo, u2, v2, sgn);
        } else if (m2 == kS && m3 == kT) {
            if (cu == SideCls::H && cv == SideCls::H) stage(SLOT_T14B, combo, u2, v2, sgn);
        }
    };

    // move one (near-edge, far-structure) unit between the two families
    auto stage_move = [from, to, stage_wedge_fam, stage_path_fam](bool wedge, Vid a, Vid b, Vid c,
                                                                  int p1, int p2, int p3,
                                                                  std::int64_t mag) {
        if (wedge) {
            stage_wedge_fam(from, -mag, a, b, p1, p2);
            stage_wedge_fam(to, mag, a, b, p1, p2);
        } else {
            stage_path_fam(from, -mag, a, b, c, p1, p2, p3);
            stage_path_fam(to, mag, a, b, c, p1, p2, p3);
        }
    };

    Transition::Task task;
    if (is_l2) {
        task.hop_matrix = Matrix::A;
        task.hop_from_lo = false;  // v is the hi side of A
        task.hops = hop_list(old_[0].of_hi(v), win_[0].of_hi(v));
        task.hop_set.insert(task.hops.begin(), task.hops.end());
        task.process = [this, v, stage_move](Vid u2) {
            for_mem(Matrix::A, u2, v, [&](int pa, int sa) {
                for_adj_lo(Matrix::B, v, [&](Vid w, int pb, int sb) {
                    ++ops_;
                    stage_move(true, u2, w, 0, pa, pb, 0, std::int64_t(sa) * sb);
                    for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                        ++ops_;
                        stage_move(false, u2, w, v2, pa, pb, pc, std::int64_t(sa) * sb * sc);
                    });
                });
            });
        };
        task.on_edge = [this, v, stage_move, key = trans_key(2, v)](Matrix m, Vid lo, Vid hi,
                                                                    int s) {
            auto it = transitions_.find(key);
            if (it == transitions_.end()) return;
            auto& task0 = it->second.tasks[0];
            if (m == Matrix::A && hi == v) {
                if (!task0.hop_set.count(lo)) {
                    task0.hops.push_back(lo);
                    task0.hop_set.insert(lo);
                    return;
                }
                if (!task0.processed.count(lo)) return;
                Vid u2 = lo;
                for_adj_lo(Matrix::B, v, [&](Vid w, int pb, int sb) {
                    ++ops_;
                    stage_move(true, u2, w, 0, PH_NEW, pb, 0, std::int64_t(s) * sb);
                    for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                        ++ops_;
                        stage_move(false, u2, w, v2, PH_NEW, pb, pc, std::int64_t(s) * sb * sc);
                    });
                });
            } else if (m == Matrix::B && lo == v) {
                Vid w = hi;
                for (Vid u2 : task0.hops) {
                    if (!task0.processed.count(u2)) continue;
                    for_mem(Matrix::A, u2, v, [&](int pa, int sa) {
                        ++ops_;
                        stage_move(true, u2, w, 0, pa, PH_NEW, 0, std::int64_t(sa) * s);
                        for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                            ++ops_;
                            stage_move(false, u2, w, v2, pa, PH_NEW, pc, std::int64_t(sa) * s * sc);
                        });
                    });
                }
            } else if (m == Matrix::C) {
                Vid w = lo, v2 = hi;
                for_mem(Matrix::B, v, w, [&](int pb, int sb) {
                    for (Vid u2 : task0.hops) {
                        if (!task0.processed.count(u2)) continue;
                        for_mem(Matrix::A, u2, v, [&](int pa, int sa) {
                            ++ops_;
                            stage_move(false, u2, w, v2, pa, pb, PH_NEW,
                                       std::int64_t(sa) * sb * s);
                        });
                    }
                });
            }
        };
    } else {
        task.hop_matrix = Matrix::C;
        task.hop_from_lo = true;  // v is the lo side of C
        task.hops = hop_list(old_[2].of_lo(v), win_[2].of_lo(v));
        task.hop_set.insert(task.hops.begin(), task.hops.end());
        task.process = [this, v, stage_move](Vid v2) {
            for_mem(Matrix::C, v, v2, [&](int pc, int sc) {
                for_adj_hi(Matrix::B, v, [&](Vid y, int pb, int sb) {
                    ++ops_;
                    stage_move(true, v2, y, 0, pc, pb, 0, std::int64_t(sc) * sb);
                    for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                        ++ops_;
                        stage_move(false, u2, y, v2, pa, pb, pc, std::int64_t(sa) * sb * sc);
                    });
                });
            });
        };
        task.on_edge = [this, v, stage_move, key = trans_key(3, v)](Matrix m, Vid lo, Vid hi,
                                                                    int s) {
            auto it = transitions_.find(key);
            if (it == transitions_.end()) return;
            auto& task0 = it->second.tasks[0];
            if (m == Matrix::C && lo == v) {
                if (!task0.hop_set.count(hi)) {
                    task0.hops.push_back(hi);
                    task0.hop_set.insert(hi);
                    return;
                }
                if (!task0.processed.count(hi)) return;
                Vid v2 = hi;
                for_adj_hi(Matrix::B, v, [&](Vid y, int pb, int sb) {
                    ++ops_;
                    stage_move(true, v2, y, 0, PH_NEW, pb, 0, std::int64_t(s) * sb);
                    for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                        ++ops_;
                        stage_move(false, u2, y, v2, pa, pb, PH_NEW, std::int64_t(sa) * sb * s);
                    });
                });
            } else if (m == Matrix::B && hi == v) {
                Vid y = lo;
                for (Vid v2 : task0.hops) {
                    if (!task0.processed.count(v2)) continue;
                    for_mem(Matrix::C, v, v2, [&](int pc, int sc) {
                        ++ops_;
                        stage_move(true, v2, y, 0, pc, PH_NEW, 0, std::int64_t(sc) * s);
                        for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                            ++ops_;
                            stage_move(false, u2, y, v2, pa, PH_NEW, pc, std::int64_t(sa) * s * sc);
                        });
                    });
                }
            } else if (m == Matrix::A) {
                Vid u2 = lo, y = hi;
                for_mem(Matrix::B, y, v, [&](int pb, int sb) {
                    for (Vid v2 : task0.hops) {
                        if (!task0.processed.count(v2)) continue;
                        for_mem(Matrix::C, v, v2, [&](int pc, int sc) {
                            ++ops_;
                            stage_move(false, u2, y, v2, PH_NEW, pb, pc,
                                       std::int64_t(s) * sb * sc);
                        });
                    }
                });
            }
        };
    }
    t.tasks.push_back(std::move(task));

    // Entering the dense class also creates rows (resp. columns) in the
    // stores keyed by the vertex itself; leaving it only erases them.
    if (to != kD) return;
    Transition::Task dtask;
    if (is_l2) {
        dtask.hop_matrix = Matrix::B;
        dtask.hop_from_lo = true;
        dtask.hops = hop_list(old_[1].of_lo(v), win_[1].of_lo(v));
        dtask.hop_set.insert(dtask.hops.begin(), dtask.hops.end());
        dtask.process = [this, v, stage](Vid w) {
            for_mem(Matrix::B, v, w, [&](int pb, int sb) {
                if (c3(w) != kD) return;
                for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                    ++ops_;
                    SideCls cv = c4(v2);
                    std::int64_t val = std::int64_t(sb) * sc;
                    if (cv == SideCls::H) stage(SLOT_BC_D_H, pb * 2 + pc, v, v2, val);
                    else if (cv == SideCls::M) stage(SLOT_BC_D_M, pb * 2 + pc, v, v2, val);
                });
                if (pb == PH_OLD)
                    for (auto& [v2, sc] : win_[2].of_lo(w)) {
                        ++ops_;
                        stage(SLOT_EQ9_BC, 0, v, v2, sc);
                    }
            });
        };
        dtask.on_edge = [this, v, stage, key = trans_key(2, v)](Matrix m, Vid lo, Vid hi, int s) {
            auto it = transitions_.find(key);
            if (it == transitions_.end() || it->second.tasks.size() < 2) return;
            auto& task1 = it->second.tasks[1];
            if (m == Matrix::B && lo == v) {
                if (!task1.hop_set.count(hi)) {
                    task1.hops.push_back(hi);
                    task1.hop_set.insert(hi);
                    return;
                }
                if (!task1.processed.count(hi)) return;
                Vid w = hi;
                if (c3(w) != kD) return;
                for_adj_lo(Matrix::C, w, [&](Vid v2, int pc, int sc) {
                    ++ops_;
                    SideCls cv = c4(v2);
                    std::int64_t val = std::int64_t(s) * sc;
                    if (cv == SideCls::H) stage(SLOT_BC_D_H, PH_NEW * 2 + pc, v, v2, val);
                    else if (cv == SideCls::M) stage(SLOT_BC_D_M, PH_NEW * 2 + pc, v, v2, val);
                });
            } else if (m == Matrix::C) {
                Vid w = lo, v2 = hi;
                if (!task1.processed.count(w) || c3(w) != kD) return;
                for_mem(Matrix::B, v, w, [&](int pb, int sb) {
                    ++ops_;
                    SideCls cv = c4(v2);
                    std::int64_t val = std::int64_t(sb) * s;
                    if (cv == SideCls::H) stage(SLOT_BC_D_H, pb * 2 + PH_NEW, v, v2, val);
                    else if (cv == SideCls::M) stage(SLOT_BC_D_M, pb * 2 + PH_NEW, v, v2, val);
                    if (pb == PH_OLD) stage(SLOT_EQ9_BC, 0, v, v2, s);
                });
            }
        };
    } else {
        dtask.hop_matrix = Matrix::B;
        dtask.hop_from_lo = false;
        dtask.hops = hop_list(old_[1].of_hi(v), win_[1].of_hi(v));
        dtask.hop_set.insert(dtask.hops.begin(), dtask.hops.end());
        dtask.process = [this, v, stage](Vid y) {
            for_mem(Matrix::B, y, v, [&](int pb, int sb) {
                if (c2(y) != kD) return;
                for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                    ++ops_;
                    SideCls cu = c1(u2);
                    std::int64_t val = std::int64_t(sa) * sb;
                    if (cu == SideCls::H) stage(SLOT_AB_D_H, pa * 2 + pb, u2, v, val);
                    else if (cu == SideCls::M) stage(SLOT_AB_D_M, pa * 2 + pb, u2, v, val);
                });
                if (pb == PH_OLD)
                    for (auto& [u2, sa] : win_[0].of_hi(y)) {
                        ++ops_;
                        stage(SLOT_EQ9_AB, 0, u2, v, sa);
                    }
            });
        };
        dtask.on_edge = [this, v, stage, key = trans_key(3, v)](Matrix m, Vid lo, Vid hi, int s) {
            auto it = transitions_.find(key);
            if (it == transitions_.end() || it->second.tasks.size() < 2) return;
            auto& task1 = it->second.tasks[1];
            if (m == Matrix::B && hi == v) {
                if (!task1.hop_set.count(lo)) {
                    task1.hops.push_back(lo);
                    task1.hop_set.insert(lo);
                    return;
                }
                if (!task1.processed.count(lo)) return;
                Vid y = lo;
                if (c2(y) != kD) return;
                for_adj_hi(Matrix::A, y, [&](Vid u2, int pa, int sa) {
                    ++ops_;
                    SideCls cu = c1(u2);
                    std::int64_t val = std::int64_t(sa) * s;
                    if (cu == SideCls::H) stage(SLOT_AB_D_H, pa * 2 + PH_NEW, u2, v, val);
                    else if (cu == SideCls::M) stage(SLOT_AB_D_M, pa * 2 + PH_NEW, u2, v, val);
                });
            } else if (m == Matrix::A) {
                Vid u2 = lo, y = hi;
                if (!task1.processed.count(y) || c2(y) != kD) return;
                for_mem(Matrix::B, y, v, [&](int pb, int sb) {
                    ++ops_;
                    SideCls cu = c1(u2);
                    std::int64_t val = std::int64_t(s) * sb;
                    if (cu == SideCls::H) stage(SLOT_AB_D_H, PH_NEW * 2 + pb, u2, v, val);
                    else if (cu == SideCls::M) stage(SLOT_AB_D_M, PH_NEW * 2 + pb, u2, v, val);
                    if (pb == PH_OLD) stage(SLOT_EQ9_AB, 0, u2, v, s);
                });
            }
        };
    }
    t.tasks.push_back(std::move(dtask));
}

}  // namespace cyc4
