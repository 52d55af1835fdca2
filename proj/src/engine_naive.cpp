#include "cyc4/engine_naive.hpp"

#include <algorithm>

namespace cyc4 {

std::int64_t GeneralNaiveEngine::query_paths(Vid u, Vid v) {
    std::int64_t paths = 0;
    for (Vid w : g_.adj(u)) {
        ++ops_;
        if (w == v) continue;
        paths = checked_add(paths, wedge_count(w, v));
    }
    return paths;
}

std::int64_t GeneralNaiveEngine::apply(const GeneralUpdate& e) {
    std::uint64_t start_ops = ops_;
    if (e.u == e.v) fail(ErrKind::SelfLoop, "self loop");
    if (e.op == Op::Insert) {
        if (g_.has(e.u, e.v)) fail(ErrKind::DuplicateInsert, "duplicate insert");
        std::int64_t delta = query_paths(e.u, e.v);
        for (Vid w : g_.adj(e.u)) {
            ++ops_;
            bump(w, e.v, 1);
        }
        for (Vid w : g_.adj(e.v)) {
            ++ops_;
            bump(e.u, w, 1);
        }
        g_.insert(e.u, e.v);
        total_ = checked_add(total_, delta);
    } else {
        g_.erase(e.u, e.v);  // throws MissingDelete if absent
        for (Vid w : g_.adj(e.u)) {
            ++ops_;
            bump(w, e.v, -1);
        }
        for (Vid w : g_.adj(e.v)) {
            ++ops_;
            bump(e.u, w, -1);
        }
        std::int64_t delta = query_paths(e.u, e.v);
        total_ = checked_add(total_, -delta);
    }
    last_ops_ = ops_ - start_ops;
    return total_;
}

std::int64_t GeneralNaiveEngine::recount_wedges(Vid a, Vid b) const {
    std::int64_t c = 0;
    for (Vid w : g_.adj(a))
        if (g_.has(w, b)) ++c;
    return c;
}

std::string GeneralNaiveEngine::state_digest() const {
    std::ostringstream os;
    os << "total " << total_ << "\nm " << g_.m() << "\nwedges\n";
    wedges_.dump(os);
    return os.str();
}

void LayeredNaiveEngine::apply(const UpdateEvent& e) {
    g_.apply(e);
    std::int64_t s = e.op == Op::Insert ? 1 : -1;
    Vid lo = e.lo.index, hi = e.hi.index;
    switch (e.matrix) {
        case Matrix::A:
            for (Vid w : g_.adj_lo(Matrix::B, hi)) {
                ++ops_;
                wab_.add(lo, w, s);
            }
            break;
        case Matrix::B:
            for (Vid u : g_.adj_hi(Matrix::A, lo)) {
                ++ops_;
                wab_.add(u, hi, s);
            }
            for (Vid v : g_.adj_lo(Matrix::C, hi)) {
                ++ops_;
                wbc_.add(lo, v, s);
            }
            break;
        case Matrix::C:
            for (Vid y : g_.adj_hi(Matrix::B, lo)) {
                ++ops_;
                wbc_.add(y, hi, s);
            }
            break;
        case Matrix::D:
            break;  // bookkeeping only
    }
}

std::int64_t LayeredNaiveEngine::query3(Vid u, Vid v) {
    std::int64_t paths = 0;
    for (Vid y : g_.adj_lo(Matrix::A, u)) {
        ++ops_;
        paths = checked_add(paths, wbc_.get(y, v));
    }
    return paths;
}

std::string LayeredNaiveEngine::state_digest() const {
    std::ostringstream os;
    os << "m " << g_.edge_count() << "\nwab\n";
    wab_.dump(os);
    os << "wbc\n";
    wbc_.dump(os);
    return os.str();
}

}  // namespace cyc4
