#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

#include "cyc4/common.hpp"

namespace cyc4 {

// Sparse signed map from vertex pairs to weighted path counts. Zero entries
// are erased so that an empty map compares equal to a never-touched one.
class PairCount {
public:
    using Row = std::unordered_map<Vid, std::int64_t>;

    std::int64_t get(Vid r, Vid c) const {
        auto it = rows_.find(r);
        if (it == rows_.end()) return 0;
        auto jt = it->second.find(c);
        return jt == it->second.end() ? 0 : jt->second;
    }

    void add(Vid r, Vid c, std::int64_t delta) {
        if (delta == 0) return;
        auto& row = rows_[r];
        auto [it, fresh] = row.try_emplace(c, 0);
        it->second = checked_add(it->second, delta);
        if (it->second == 0) {
            row.erase(it);
            if (row.empty()) rows_.erase(r);
        }
    }

    const Row* row(Vid r) const {
        auto it = rows_.find(r);
        return it == rows_.end() ? nullptr : &it->second;
    }

    void erase_row(Vid r) { rows_.erase(r); }

    // Erases every entry with the given column id. Linear scan over rows.
    void erase_col(Vid c) {
        for (auto it = rows_.begin(); it != rows_.end();) {
            it->second.erase(c);
            if (it->second.empty()) it = rows_.erase(it);
            else ++it;
        }
    }

    void clear() { rows_.clear(); }

    std::size_t entry_count() const {
        std::size_t n = 0;
        for (auto& [r, row] : rows_) n += row.size();
        return n;
    }
    bool empty() const { return rows_.empty(); }

    template <class F>
    void for_each(F&& f) const {
        for (auto& [r, row] : rows_)
            for (auto& [c, v] : row) f(r, c, v);
    }

    void add_all(const PairCount& other, std::int64_t scale = 1) {
        other.for_each([&](Vid r, Vid c, std::int64_t v) { add(r, c, checked_mul(v, scale)); });
    }

    bool operator==(const PairCount& o) const { return rows_ == o.rows_; }

    // Canonical dump, used by the state-restoration checks.
    void dump(std::ostream& os) const {
        std::map<std::uint64_t, std::int64_t> sorted;
        for_each([&](Vid r, Vid c, std::int64_t v) { sorted[pack_pair(r, c)] = v; });
        for (auto& [k, v] : sorted) os << pair_first(k) << ' ' << pair_second(k) << ' ' << v << '\n';
    }

private:
    std::unordered_map<Vid, Row> rows_;
};

// A path's phase within the main engine: in an old phase or in the current
// two-phase window.
enum Phase : int { PH_OLD = 0, PH_NEW = 1 };

// Pair store split by the phases of its two constituent edges; lookups that
// do not care about phases sum the four slices.
struct PhasedPair {
    std::array<std::array<PairCount, 2>, 2> s;

    PairCount& at(int p1, int p2) { return s[p1][p2]; }
    const PairCount& at(int p1, int p2) const { return s[p1][p2]; }

    std::int64_t get_total(Vid r, Vid c) const {
        return s[0][0].get(r, c) + s[0][1].get(r, c) + s[1][0].get(r, c) + s[1][1].get(r, c);
    }
    void clear() {
        for (auto& a : s)
            for (auto& p : a) p.clear();
    }
    void clear_new() {
        s[0][1].clear();
        s[1][0].clear();
        s[1][1].clear();
    }
    bool operator==(const PhasedPair&) const = default;
};

// Triple store split by the phases of all three edges.
struct PhasedTriple {
    std::array<PairCount, 8> s;

    static int idx(int pa, int pb, int pc) { return pa * 4 + pb * 2 + pc; }
    PairCount& at(int pa, int pb, int pc) { return s[idx(pa, pb, pc)]; }
    const PairCount& at(int pa, int pb, int pc) const { return s[idx(pa, pb, pc)]; }

    std::int64_t get_total(Vid r, Vid c) const {
        std::int64_t t = 0;
        for (auto& p : s) t += p.get(r, c);
        return t;
    }
    void clear() {
        for (auto& p : s) p.clear();
    }
    // Everything except the all-old slice.
    void clear_new() {
        for (int i = 1; i < 8; ++i) s[i].clear();
    }
    bool operator==(const PhasedTriple&) const = default;
};

}  // namespace cyc4
