#include <sstream>

#include "cyc4/engine_main.hpp"

namespace cyc4 {

namespace {
constexpr MidCls kT = MidCls::T;
constexpr MidCls kS = MidCls::S;
constexpr MidCls kD = MidCls::D;
}  // namespace

std::int64_t MainEngine::ono_with_corrections(bool dd, Vid u, Vid v) {
    WarmupEngine& w = dd ? *w_dd_ : *w_ss_;
    std::uint64_t before = w.ops();
    std::int64_t base = w.query3(u, v);
    ops_ += w.ops() - before;
    MidCls want = dd ? kD : kS;
    for (std::size_t idx : dirty_b_idx_) {
        ++ops_;
        const WinB& e = win_b_events_[idx];
        bool fed = cls0_2(e.y) == want && cls0_3(e.w) == want;
        bool belongs = c2(e.y) == want && c3(e.w) == want;
        if (fed == belongs) continue;
        if (!old_[int(Matrix::A)].has(u, e.y) || !old_[int(Matrix::C)].has(e.w, v)) continue;
        base += belongs ? e.sign : -e.sign;
    }
    return base;
}

// Paths through a tiny middle vertex, for queries whose endpoints are not tiny.
void MainEngine::tiny_mid_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink) {
    auto ab_lookup = [&](const PhasedPair& st, Vid r, Vid c, MidCls my, MidCls mw, int pc,
                         int sc) {
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
                ++ops_;
                if (std::int64_t x = st.at(pa, pb).get(r, c); x != 0)
                    sink(my, mw, pa, pb, pc, checked_mul(x, sc));
            }
    };
    auto bc_lookup = [&](const PhasedPair& st, Vid r, Vid c, MidCls my, MidCls mw, int pa,
                         int sa) {
        for (int pb = 0; pb < 2; ++pb)
            for (int pc = 0; pc < 2; ++pc) {
                ++ops_;
                if (std::int64_t x = st.at(pb, pc).get(r, c); x != 0)
                    sink(my, mw, pa, pb, pc, checked_mul(x, sa));
            }
    };
    auto triple_lookup = [&](const PhasedTriple& st, MidCls my, MidCls mw) {
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb)
                for (int pc = 0; pc < 2; ++pc) {
                    ++ops_;
                    if (std::int64_t x = st.at(pa, pb, pc).get(u, v); x != 0)
                        sink(my, mw, pa, pb, pc, x);
                }
    };
    bool uh = cu == SideCls::H, vh = cv == SideCls::H;

    if (!uh && !vh) {
        // iterate both low/medium endpoints
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            bc_lookup(bc_t_, y, v, c2(y), kT, pa, sa);
        });
        for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
            if (c3(w) != kT) ab_lookup(ab_t_, u, w, kT, c3(w), pc, sc);
        });
        return;
    }
    if (uh && vh) {
        triple_lookup(t13a_, kT, kT);
        triple_lookup(t14a_, kT, kS);
        triple_lookup(t14b_, kS, kT);
        for (Vid w : l3d_)
            for_mem(Matrix::C, w, v, [&](int pc, int sc) { ab_lookup(ab_t_, u, w, kT, kD, pc, sc); });
        for (Vid y : l2d_)
            for_mem(Matrix::A, u, y, [&](int pa, int sa) { bc_lookup(bc_t_, y, v, kD, kT, pa, sa); });
        return;
    }
    if (uh) {  // H vs M or L
        if (cv == SideCls::M) {
            triple_lookup(t13c_, kT, kT);
            for (Vid w : l3d_)
                for_mem(Matrix::C, w, v,
                        [&](int pc, int sc) { ab_lookup(ab_t_, u, w, kT, kD, pc, sc); });
            for (Vid y : l2d_)
                for_mem(Matrix::A, u, y,
                        [&](int pa, int sa) { bc_lookup(bc_t_, y, v, kD, kT, pa, sa); });
            for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
                if (c3(w) == kT) ab_lookup(ab_s_, u, w, kS, kT, pc, sc);
                else if (c3(w) == kS) ab_lookup(ab_t_, u, w, kT, kS, pc, sc);
            });
        } else {  // HL: v iterable
            for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
                ab_lookup(ab_t_, u, w, kT, c3(w), pc, sc);  // tiny L2 middle
                if (c3(w) == kT) {
                    // non-tiny L2 middle, tiny L3 middle
                    for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
                        ++ops_;
                        if (c2(y) == kT) return;
                        for_mem(Matrix::A, u, y, [&](int pa, int sa) {
                            sink(c2(y), kT, pa, pb, pc, sa * sb * sc);
                        });
                    });
                }
            });
        }
        return;
    }
    // vh: mirror of the uh case
    if (cu == SideCls::M) {
        triple_lookup(t13b_, kT, kT);
        for (Vid w : l3d_)
            for_mem(Matrix::C, w, v, [&](int pc, int sc) { ab_lookup(ab_t_, u, w, kT, kD, pc, sc); });
        for (Vid y : l2d_)
            for_mem(Matrix::A, u, y, [&](int pa, int sa) { bc_lookup(bc_t_, y, v, kD, kT, pa, sa); });
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            if (c2(y) == kT) bc_lookup(bc_s_, y, v, kT, kS, pa, sa);
            else if (c2(y) == kS) bc_lookup(bc_t_, y, v, kS, kT, pa, sa);
        });
    } else {  // LH
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            bc_lookup(bc_t_, y, v, c2(y), kT, pa, sa);
            if (c2(y) == kT) {
                for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                    ++ops_;
                    if (c3(w) == kT) return;
                    for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                        sink(kT, c3(w), pa, pb, pc, sa * sb * sc);
                    });
                });
            }
        });
    }
}

// Queries with a tiny endpoint: everything is answered by iterating out of
// the tiny side, so all middle-class pairs are covered here.
void MainEngine::tiny_endpoint_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink) {
    bool u_small = cu == SideCls::T || cu == SideCls::L;
    bool v_small = cv == SideCls::T || cv == SideCls::L;
    if (u_small && v_small) {
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
                ++ops_;
                for_mem(Matrix::B, y, w, [&](int pb, int sb) {
                    sink(c2(y), c3(w), pa, pb, pc, sa * sb * sc);
                });
            });
        });
        return;
    }
    if (cu == SideCls::T) {  // other endpoint M or H
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            for_adj_lo(Matrix::B, y, [&](Vid w, int pb, int sb) {
                ++ops_;
                if (c3(w) != kD) return;
                for_mem(Matrix::C, w, v,
                        [&](int pc, int sc) { sink(c2(y), kD, pa, pb, pc, sa * sb * sc); });
            });
            for (int pb = 0; pb < 2; ++pb)
                for (int pc = 0; pc < 2; ++pc) {
                    ++ops_;
                    if (std::int64_t x = bc_s_.at(pb, pc).get(y, v); x != 0)
                        sink(c2(y), kS, pa, pb, pc, checked_mul(x, sa));
                    if (std::int64_t x = bc_t_.at(pb, pc).get(y, v); x != 0)
                        sink(c2(y), kT, pa, pb, pc, checked_mul(x, sa));
                }
        });
        return;
    }
    // cv == T, cu in {M, H}
    for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
        for_adj_hi(Matrix::B, w, [&](Vid y, int pb, int sb) {
            ++ops_;
            if (c2(y) != kD) return;
            for_mem(Matrix::A, u, y,
                    [&](int pa, int sa) { sink(kD, c3(w), pa, pb, pc, sa * sb * sc); });
        });
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
                ++ops_;
                if (std::int64_t x = ab_s_.at(pa, pb).get(u, w); x != 0)
                    sink(kS, c3(w), pa, pb, pc, checked_mul(x, sc));
                if (std::int64_t x = ab_t_.at(pa, pb).get(u, w); x != 0)
                    sink(kT, c3(w), pa, pb, pc, checked_mul(x, sc));
            }
    });
}

void MainEngine::ll_dd_paths(Vid u, Vid v, const Sink& sink) {
    // old*old on B from the u side; covers the A phases
    for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
        ++ops_;
        if (c2(y) != kD) return;
        if (std::int64_t x = old_bc_d_.get(y, v); x != 0)
            sink(kD, kD, pa, PH_OLD, PH_OLD, checked_mul(x, sa));
    });
    // old A and B, new C
    for (auto& [w, sc] : win_[int(Matrix::C)].of_hi(v)) {
        ++ops_;
        if (c3(w) != kD) continue;
        if (std::int64_t x = old_ab_d_.get(u, w); x != 0)
            sink(kD, kD, PH_OLD, PH_OLD, PH_NEW, checked_mul(x, sc));
    }
    // new A, old B, new C via the eq. 9 store
    for (auto& [y, sa] : win_[int(Matrix::A)].of_lo(u)) {
        ++ops_;
        if (c2(y) != kD) continue;
        if (std::int64_t x = eq9_bc_.get(y, v); x != 0)
            sink(kD, kD, PH_NEW, PH_OLD, PH_NEW, checked_mul(x, sa));
    }
    // new B, any other combination except old*new*old: direct enumeration
    for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
        if (c2(y) != kD) return;
        for (auto& [w, sb] : win_[int(Matrix::B)].of_lo(y)) {
            ++ops_;
            if (c3(w) != kD) continue;
            for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                if (pa == PH_OLD && pc == PH_OLD) return;
                sink(kD, kD, pa, PH_NEW, pc, sa * sb * sc);
            });
        }
    });
    // old*new*old from the fixed-A/C subroutine
    if (std::int64_t x = ono_with_corrections(true, u, v); x != 0)
        sink(kD, kD, PH_OLD, PH_NEW, PH_OLD, x);
}

void MainEngine::sd_mid_paths(Vid u, Vid v, SideCls cu, SideCls cv, const Sink& sink) {
    auto ab_lookup = [&](const PhasedPair& st, Vid w, MidCls my, MidCls mw, int pc, int sc) {
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
                ++ops_;
                if (std::int64_t x = st.at(pa, pb).get(u, w); x != 0)
                    sink(my, mw, pa, pb, pc, checked_mul(x, sc));
            }
    };
    auto bc_lookup = [&](const PhasedPair& st, Vid y, MidCls my, MidCls mw, int pa, int sa) {
        for (int pb = 0; pb < 2; ++pb)
            for (int pc = 0; pc < 2; ++pc) {
                ++ops_;
                if (std::int64_t x = st.at(pb, pc).get(y, v); x != 0)
                    sink(my, mw, pa, pb, pc, checked_mul(x, sa));
            }
    };
    bool u_hm = cu == SideCls::H || cu == SideCls::M;
    bool v_hm = cv == SideCls::H || cv == SideCls::M;

    if (u_hm && v_hm) {
        const PhasedPair& abd = cu == SideCls::H ? ab_d_h_ : ab_d_m_;
        for (Vid w : l3d_)
            for_mem(Matrix::C, w, v, [&](int pc, int sc) {
                ab_lookup(abd, w, kD, kD, pc, sc);
                ab_lookup(ab_s_, w, kS, kD, pc, sc);
            });
        for (Vid y : l2d_)
            for_mem(Matrix::A, u, y, [&](int pa, int sa) { bc_lookup(bc_s_, y, kD, kS, pa, sa); });
        if (cu == SideCls::H && cv == SideCls::H) {
            ++ops_;
            if (std::int64_t x = old_triple_ss_.get(u, v); x != 0)
                sink(kS, kS, PH_OLD, PH_OLD, PH_OLD, x);
            for (int pa = 0; pa < 2; ++pa)
                for (int pb = 0; pb < 2; ++pb)
                    for (int pc = 0; pc < 2; ++pc) {
                        if (pa == 0 && pb == 0 && pc == 0) continue;
                        if (pa == 0 && pb == 1 && pc == 0) continue;
                        ++ops_;
                        if (std::int64_t x = eq11_[PhasedTriple::idx(pa, pb, pc)].get(u, v); x != 0)
                            sink(kS, kS, pa, pb, pc, x);
                    }
            if (std::int64_t x = ono_with_corrections(false, u, v); x != 0)
                sink(kS, kS, PH_OLD, PH_NEW, PH_OLD, x);
        } else if (cu == SideCls::M) {
            for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
                if (c2(y) == kS) bc_lookup(bc_s_, y, kS, kS, pa, sa);
            });
        } else {  // cu == H, cv == M
            for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
                if (c3(w) == kS) ab_lookup(ab_s_, w, kS, kS, pc, sc);
            });
        }
        return;
    }
    if (u_hm) {  // cv == L
        const PhasedPair& abd = cu == SideCls::H ? ab_d_h_ : ab_d_m_;
        for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
            if (c3(w) == kD) {
                ab_lookup(abd, w, kD, kD, pc, sc);
                ab_lookup(ab_s_, w, kS, kD, pc, sc);
            } else if (c3(w) == kS) {
                ab_lookup(ab_s_, w, kS, kS, pc, sc);
            }
        });
        for (Vid y : l2d_)
            for_mem(Matrix::A, u, y, [&](int pa, int sa) { bc_lookup(bc_s_, y, kD, kS, pa, sa); });
        return;
    }
    if (v_hm) {  // cu == L
        const PhasedPair& bcd = cv == SideCls::H ? bc_d_h_ : bc_d_m_;
        for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
            if (c2(y) == kD) {
                bc_lookup(bcd, y, kD, kD, pa, sa);
                bc_lookup(bc_s_, y, kD, kS, pa, sa);
            } else if (c2(y) == kS) {
                bc_lookup(bc_s_, y, kS, kS, pa, sa);
            }
        });
        for (Vid w : l3d_)
            for_mem(Matrix::C, w, v, [&](int pc, int sc) { ab_lookup(ab_s_, w, kS, kD, pc, sc); });
        return;
    }
    // LL
    for_adj_hi(Matrix::C, v, [&](Vid w, int pc, int sc) {
        if (c3(w) == kS) ab_lookup(ab_s_, w, kS, kS, pc, sc);
        else if (c3(w) == kD) ab_lookup(ab_s_, w, kS, kD, pc, sc);
    });
    for_adj_lo(Matrix::A, u, [&](Vid y, int pa, int sa) {
        if (c2(y) == kD) bc_lookup(bc_s_, y, kD, kS, pa, sa);
    });
    ll_dd_paths(u, v, sink);
}

void MainEngine::query_assemble(Vid u, Vid v, const Sink& sink) {
    SideCls cu = c1(u), cv = c4(v);
    if (cu == SideCls::T || cv == SideCls::T) {
        tiny_endpoint_paths(u, v, cu, cv, sink);
        return;
    }
    tiny_mid_paths(u, v, cu, cv, sink);
    sd_mid_paths(u, v, cu, cv, sink);
}

std::int64_t MainEngine::query3(Vid u, Vid v) {
    if (bootstrap_) {
        std::int64_t total = 0;
        for (Vid y : g_.adj_lo(Matrix::A, u)) {
            ++ops_;
            total = checked_add(total, boot_wbc_.get(y, v));
        }
        return total;
    }
    std::int64_t total = 0;
    query_assemble(u, v, [&](MidCls, MidCls, int, int, int, std::int64_t x) {
        total = checked_add(total, x);
    });
    return total;
}

std::int64_t MainEngine::query3_attributed(Vid u, Vid v, BucketMap& out) {
    if (bootstrap_) {
        std::int64_t q = query3(u, v);
        if (q != 0) out[PathBucket{}] += q;
        return q;
    }
    std::int64_t total = 0;
    query_assemble(u, v, [&](MidCls my, MidCls mw, int pa, int pb, int pc, std::int64_t x) {
        total = checked_add(total, x);
        PathBucket b{int(my), int(mw), pa, pb, pc};
        out[b] += x;
        if (out[b] == 0) out.erase(b);
    });
    return total;
}

std::vector<MainEngine::Membership> MainEngine::edge_memberships(Matrix m, Vid lo, Vid hi) const {
    std::vector<Membership> out;
    for_mem(m, lo, hi, [&](int p, int s) { out.push_back({p, s}); });
    return out;
}

std::string MainEngine::state_digest() const {
    std::ostringstream os;
    auto dump_pc = [&](const char* name, const PairCount& pc) {
        os << name << '\n';
        pc.dump(os);
    };
    auto dump_phased = [&](const char* name, const PhasedPair& p) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                os << name << '[' << a << b << "]\n";
                p.at(a, b).dump(os);
            }
    };
    auto dump_triple = [&](const char* name, const PhasedTriple& t) {
        for (int i = 0; i < 8; ++i) {
            os << name << '[' << i << "]\n";
            t.s[i].dump(os);
        }
    };
    os << "m " << g_.edge_count() << "\n";
    for (int m = 0; m < 3; ++m) {
        PairCount oldpc, winpc;
        for (auto k : old_[m].set) oldpc.add(pair_first(k), pair_second(k), 1);
        for (auto& [k, s] : win_[m].set) winpc.add(pair_first(k), pair_second(k), s);
        os << "old" << m << '\n';
        oldpc.dump(os);
        os << "win" << m << '\n';
        winpc.dump(os);
    }
    dump_phased("ab_s", ab_s_);
    dump_phased("bc_s", bc_s_);
    dump_phased("ab_t", ab_t_);
    dump_phased("bc_t", bc_t_);
    dump_phased("ab_d_h", ab_d_h_);
    dump_phased("ab_d_m", ab_d_m_);
    dump_phased("bc_d_h", bc_d_h_);
    dump_phased("bc_d_m", bc_d_m_);
    dump_pc("eq9_ab", eq9_ab_);
    dump_pc("eq9_bc", eq9_bc_);
    for (int i = 0; i < 8; ++i) {
        os << "eq11[" << i << "]\n";
        eq11_[i].dump(os);
    }
    dump_triple("t13a", t13a_);
    dump_triple("t13b", t13b_);
    dump_triple("t13c", t13c_);
    dump_triple("t14a", t14a_);
    dump_triple("t14b", t14b_);
    dump_pc("old_ab_d", old_ab_d_);
    dump_pc("old_bc_d", old_bc_d_);
    dump_pc("old_triple_ss", old_triple_ss_);
    dump_pc("boot_wab", boot_wab_);
    dump_pc("boot_wbc", boot_wbc_);
    os << "dirty " << dirty_l2_.size() << ' ' << dirty_l3_.size() << '\n';
    os << "transitions " << transitions_.size() << '\n';
    if (w_ss_) os << "w_ss\n" << w_ss_->state_digest();
    if (w_dd_) os << "w_dd\n" << w_dd_->state_digest();
    return os.str();
}

std::vector<MainEngine::StoreDump> MainEngine::audit_stores() const {
    std::vector<StoreDump> out;
    if (bootstrap_) return out;

    // Expected values recomputed from the phase adjacency and live classes.
    std::array<PhasedPair, 2> exp_ab_sd{};  // [0]=S, [1]=T
    PhasedPair exp_ab_t, exp_bc_s, exp_bc_t, exp_ab_dh, exp_ab_dm, exp_bc_dh, exp_bc_dm;
    PhasedPair exp_ab_s;
    PairCount exp_eq9_ab, exp_eq9_bc, exp_triple;
    std::array<PairCount, 8> exp_eq11;
    PhasedTriple exp_t13a, exp_t13b, exp_t13c, exp_t14a, exp_t14b;
    PairCount exp_old_ab_d, exp_old_bc_d;

    auto each_edge = [&](Matrix m, auto&& f) {
        for (auto k : old_[int(m)].set) f(pair_first(k), pair_second(k), PH_OLD, 1);
        for (auto& [k, s] : win_[int(m)].set) f(pair_first(k), pair_second(k), PH_NEW, s);
    };
    each_edge(Matrix::A, [&](Vid u, Vid y, int pa, int sa) {
        each_edge(Matrix::B, [&](Vid y2, Vid w, int pb, int sb) {
            if (y2 != y) return;
            std::int64_t val = std::int64_t(sa) * sb;
            if (c2(y) == MidCls::S) exp_ab_s.at(pa, pb).add(u, w, val);
            if (c2(y) == MidCls::T) exp_ab_t.at(pa, pb).add(u, w, val);
            if (c2(y) == MidCls::D && c3(w) == MidCls::D) {
                if (c1(u) == SideCls::H) exp_ab_dh.at(pa, pb).add(u, w, val);
                if (c1(u) == SideCls::M) exp_ab_dm.at(pa, pb).add(u, w, val);
            }
            if (c2(y) == MidCls::D && pa == PH_NEW && pb == PH_OLD && c3(w) == MidCls::D)
                exp_eq9_ab.add(u, w, val);
            if (c2(y) == MidCls::D && pa == PH_OLD && pb == PH_OLD) exp_old_ab_d.add(u, w, val);
        });
    });
    each_edge(Matrix::B, [&](Vid y, Vid w, int pb, int sb) {
        each_edge(Matrix::C, [&](Vid w2, Vid v, int pc, int sc) {
            if (w2 != w) return;
            std::int64_t val = std::int64_t(sb) * sc;
            if (c3(w) == MidCls::S) exp_bc_s.at(pb, pc).add(y, v, val);
            if (c3(w) == MidCls::T) exp_bc_t.at(pb, pc).add(y, v, val);
            if (c3(w) == MidCls::D && c2(y) == MidCls::D) {
                if (c4(v) == SideCls::H) exp_bc_dh.at(pb, pc).add(y, v, val);
                if (c4(v) == SideCls::M) exp_bc_dm.at(pb, pc).add(y, v, val);
            }
            if (c3(w) == MidCls::D && pb == PH_OLD && pc == PH_NEW && c2(y) == MidCls::D)
                exp_eq9_bc.add(y, v, val);
            if (c3(w) == MidCls::D && pb == PH_OLD && pc == PH_OLD) exp_old_bc_d.add(y, v, val);
        });
    });
    each_edge(Matrix::A, [&](Vid u, Vid y, int pa, int sa) {
        each_edge(Matrix::B, [&](Vid y2, Vid w, int pb, int sb) {
            if (y2 != y) return;
            each_edge(Matrix::C, [&](Vid w2, Vid v, int pc, int sc) {
                if (w2 != w) return;
                std::int64_t val = std::int64_t(sa) * sb * sc;
                SideCls cu = c1(u), cv = c4(v);
                MidCls cy = c2(y), cw = c3(w);
                if (cy == MidCls::S && cw == MidCls::S) {
                    if (pa == PH_OLD && pb == PH_OLD && pc == PH_OLD) exp_triple.add(u, v, val);
                    else if (cu == SideCls::H && cv == SideCls::H &&
                             !(pa == PH_OLD && pb == PH_NEW && pc == PH_OLD))
                        exp_eq11[PhasedTriple::idx(pa, pb, pc)].add(u, v, val);
                }
                if (cy == MidCls::T && cw == MidCls::T) {
                    if (cu == SideCls::H && cv == SideCls::H) exp_t13a.at(pa, pb, pc).add(u, v, val);
                    if (cu == SideCls::M && cv == SideCls::H) exp_t13b.at(pa, pb, pc).add(u, v, val);
                    if (cu == SideCls::H && cv == SideCls::M) exp_t13c.at(pa, pb, pc).add(u, v, val);
                }
                if (cu == SideCls::H && cv == SideCls::H) {
                    if (cy == MidCls::T && cw == MidCls::S) exp_t14a.at(pa, pb, pc).add(u, v, val);
                    if (cy == MidCls::S && cw == MidCls::T) exp_t14b.at(pa, pb, pc).add(u, v, val);
                }
            });
        });
    });

    auto push_phased = [&](const std::string& name, const PhasedPair& got, const PhasedPair& exp) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                out.push_back({name + "[" + std::to_string(a) + std::to_string(b) + "]",
                               got.at(a, b), exp.at(a, b)});
    };
    auto push_triple = [&](const std::string& name, const PhasedTriple& got,
                           const PhasedTriple& exp) {
        for (int i = 0; i < 8; ++i)
            out.push_back({name + "[" + std::to_string(i) + "]", got.s[i], exp.s[i]});
    };
    push_phased("ab_s", ab_s_, exp_ab_s);
    push_phased("bc_s", bc_s_, exp_bc_s);
    push_phased("ab_t", ab_t_, exp_ab_t);
    push_phased("bc_t", bc_t_, exp_bc_t);
    push_phased("ab_d_h", ab_d_h_, exp_ab_dh);
    push_phased("ab_d_m", ab_d_m_, exp_ab_dm);
    push_phased("bc_d_h", bc_d_h_, exp_bc_dh);
    push_phased("bc_d_m", bc_d_m_, exp_bc_dm);
    out.push_back({"eq9_ab", eq9_ab_, exp_eq9_ab});
    out.push_back({"eq9_bc", eq9_bc_, exp_eq9_bc});
    for (int i = 0; i < 8; ++i)
        out.push_back({"eq11[" + std::to_string(i) + "]", eq11_[i], exp_eq11[i]});
    push_triple("t13a", t13a_, exp_t13a);
    push_triple("t13b", t13b_, exp_t13b);
    push_triple("t13c", t13c_, exp_t13c);
    push_triple("t14a", t14a_, exp_t14a);
    push_triple("t14b", t14b_, exp_t14b);
    out.push_back({"old_ab_d", old_ab_d_, exp_old_ab_d});
    out.push_back({"old_bc_d", old_bc_d_, exp_old_bc_d});
    out.push_back({"old_triple_ss", old_triple_ss_, exp_triple});
    return out;
}

}  // namespace cyc4
