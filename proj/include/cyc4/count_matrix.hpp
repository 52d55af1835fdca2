#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cyc4/common.hpp"
#include "cyc4/pair_count.hpp"

namespace cyc4 {

// Dense signed integer matrix with vertex-id index maps on both axes.
// Lookups for unmapped vertices are 0 by contract.
class CountMatrix {
public:
    CountMatrix() = default;
    CountMatrix(std::vector<Vid> row_ids, std::vector<Vid> col_ids);

    static CountMatrix identity(const std::vector<Vid>& ids);
    // Builds from (row id, col id, value) triples; ids appear in first-seen order.
    static CountMatrix from_triples(
        const std::vector<std::tuple<Vid, Vid, std::int64_t>>& triples);
    static CountMatrix from_pair_count(const PairCount& pc);

    std::size_t rows() const { return row_ids_.size(); }
    std::size_t cols() const { return col_ids_.size(); }

    const std::vector<Vid>& row_ids() const { return row_ids_; }
    const std::vector<Vid>& col_ids() const { return col_ids_; }

    bool has_row(Vid r) const { return row_index_.count(r) != 0; }
    bool has_col(Vid c) const { return col_index_.count(c) != 0; }

    std::int64_t get(Vid r, Vid c) const {
        auto ri = row_index_.find(r);
        if (ri == row_index_.end()) return 0;
        auto ci = col_index_.find(c);
        if (ci == col_index_.end()) return 0;
        return data_[ri->second * cols() + ci->second];
    }
    void add(Vid r, Vid c, std::int64_t delta);

    std::int64_t& at_dense(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
    std::int64_t at_dense(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }

    // Restriction to row/col id sets; rows and columns that end up all-zero
    // are dropped from the index maps.
    CountMatrix submatrix(const std::unordered_set<Vid>& rows,
                          const std::unordered_set<Vid>& cols) const;
    CountMatrix drop_zero_lines() const;

    bool operator==(const CountMatrix& o) const;

    PairCount to_pair_count() const;

private:
    friend CountMatrix multiply_aligned(const CountMatrix&, const CountMatrix&, int);

    std::vector<Vid> row_ids_, col_ids_;
    std::unordered_map<Vid, std::uint32_t> row_index_, col_index_;
    std::vector<std::int64_t> data_;
};

}  // namespace cyc4
