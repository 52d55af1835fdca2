#include "cyc4/counter.hpp"

#include <sstream>

#include "cyc4/engine_main.hpp"
#include "cyc4/engine_naive.hpp"
#include "cyc4/engine_warmup.hpp"
#include "cyc4/oracle.hpp"

namespace cyc4 {

std::int64_t OracleLayeredEngine::query3(Vid u, Vid v) {
    ops_ += g_.deg_lo(Matrix::A, u);
    return oracle::brute_3paths(g_, {1, u}, {4, v});
}

std::string OracleLayeredEngine::state_digest() const {
    std::ostringstream os;
    os << "m " << g_.edge_count() << '\n';
    for (int m = 0; m < 4; ++m) {
        PairCount pc;
        for (auto k : g_.edge_set(Matrix(m))) pc.add(pair_first(k), pair_second(k), 1);
        os << "edges" << m << '\n';
        pc.dump(os);
    }
    return os.str();
}

EngineFactory make_engine_factory(const EngineConfig& cfg) {
    switch (cfg.kind) {
        case EngineKind::Naive:
            return [] { return std::make_unique<LayeredNaiveEngine>(); };
        case EngineKind::Oracle:
            return [] { return std::make_unique<OracleLayeredEngine>(); };
        case EngineKind::Main:
            return [cfg] {
                return std::make_unique<MainEngine>(cfg.thresholds, cfg.strict_deadlines,
                                                    cfg.mhat_fixed);
            };
        case EngineKind::Warmup:
            fail(ErrKind::InvalidParam,
                 "the warm-up engine runs through its standalone driver (frozen A/C)");
    }
    fail(ErrKind::InvalidParam, "unknown engine kind");
}

std::int64_t GeneralCounter::apply(const GeneralUpdate& e) {
    auto events = general_to_layered(e);
    std::int64_t q = 0;
    for (const auto& ev : events) {
        if (ev.is_query_point) {
            if (bucket_sink) q = eng_->query3_attributed(e.u, e.v, *bucket_sink);
            else q = eng_->query3(e.u, e.v);
        }
        UpdateEvent mirror = ev;
        mirror.lo.index = ev.hi.index;
        mirror.hi.index = ev.lo.index;
        eng_->apply(ev);
        eng_->apply(mirror);
    }
    last_delta_ = e.op == Op::Insert ? q : -q;
    total_ = checked_add(total_, last_delta_);
    return total_;
}

std::string GeneralCounter::state_digest() const {
    std::ostringstream os;
    os << "total " << total_ << '\n' << eng_->state_digest();
    return os.str();
}

UpdateEvent LayeredFourCopyCounter::rotate_event(const UpdateEvent& e, int k) {
    UpdateEvent r = e;
    r.matrix = Matrix((int(e.matrix) + k) % 4);
    r.lo.layer = lower_layer(r.matrix);
    r.hi.layer = upper_layer(r.matrix);
    return r;
}

std::int64_t LayeredFourCopyCounter::apply(const UpdateEvent& e) {
    int kq = (3 - int(e.matrix) + 4) % 4;  // the copy whose D role gets this event
    std::int64_t q;
    if (bucket_sink) q = copies_[kq]->query3_attributed(e.hi.index, e.lo.index, *bucket_sink);
    else q = copies_[kq]->query3(e.hi.index, e.lo.index);
    for (int k = 0; k < 4; ++k) copies_[k]->apply(rotate_event(e, k));
    last_delta_ = e.op == Op::Insert ? q : -q;
    total_ = checked_add(total_, last_delta_);
    return total_;
}

std::string LayeredFourCopyCounter::state_digest() const {
    std::ostringstream os;
    os << "total " << total_ << '\n';
    for (int k = 0; k < 4; ++k) os << "copy" << k << '\n' << copies_[k]->state_digest();
    return os.str();
}

std::int64_t WarmupStandaloneCounter::apply(const UpdateEvent& e) {
    last_delta_ = 0;
    if (!frozen_ && (e.matrix == Matrix::B || e.matrix == Matrix::D)) {
        FrozenAC ac;
        for (auto k : prefix_.edge_set(Matrix::A)) ac.add_a(pair_first(k), pair_second(k));
        for (auto k : prefix_.edge_set(Matrix::C)) ac.add_c(pair_first(k), pair_second(k));
        eng_ = std::make_unique<WarmupEngine>(std::move(ac), th_);
        frozen_ = true;
    }
    if (!frozen_) {  // still in the A/C prefix
        prefix_.apply(e);
        return total_;
    }
    switch (e.matrix) {
        case Matrix::A:
        case Matrix::C:
            fail(ErrKind::InvalidParam, "warm-up mode: A/C updates must precede B/D updates");
        case Matrix::B:
            prefix_.apply(e);
            eng_->apply(e);
            return total_;
        case Matrix::D: {
            // a D update acts as the query; the total tracks its deltas
            prefix_.apply(e);
            std::int64_t q = eng_->query3(e.hi.index, e.lo.index);
            last_delta_ = e.op == Op::Insert ? q : -q;
            total_ = checked_add(total_, last_delta_);
            return total_;
        }
    }
    return total_;
}

std::string WarmupStandaloneCounter::state_digest() const {
    std::ostringstream os;
    os << "total " << total_ << '\n';
    if (eng_) os << eng_->state_digest();
    return os.str();
}

}  // namespace cyc4
