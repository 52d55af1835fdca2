#include "cyc4/count_matrix.hpp"

#include <algorithm>
#include <tuple>

namespace cyc4 {

CountMatrix::CountMatrix(std::vector<Vid> row_ids, std::vector<Vid> col_ids)
    : row_ids_(std::move(row_ids)), col_ids_(std::move(col_ids)) {
    row_index_.reserve(row_ids_.size());
    col_index_.reserve(col_ids_.size());
    for (std::uint32_t i = 0; i < row_ids_.size(); ++i) row_index_[row_ids_[i]] = i;
    for (std::uint32_t j = 0; j < col_ids_.size(); ++j) col_index_[col_ids_[j]] = j;
    if (row_index_.size() != row_ids_.size() || col_index_.size() != col_ids_.size())
        fail(ErrKind::InvalidParam, "duplicate id in CountMatrix index");
    data_.assign(row_ids_.size() * col_ids_.size(), 0);
}

CountMatrix CountMatrix::identity(const std::vector<Vid>& ids) {
    CountMatrix m(ids, ids);
    for (std::size_t i = 0; i < ids.size(); ++i) m.at_dense(i, i) = 1;
    return m;
}

CountMatrix CountMatrix::from_triples(
    const std::vector<std::tuple<Vid, Vid, std::int64_t>>& triples) {
    std::vector<Vid> rids, cids;
    std::unordered_set<Vid> rseen, cseen;
    for (auto& [r, c, v] : triples) {
        if (rseen.insert(r).second) rids.push_back(r);
        if (cseen.insert(c).second) cids.push_back(c);
    }
    CountMatrix m(std::move(rids), std::move(cids));
    for (auto& [r, c, v] : triples) m.add(r, c, v);
    return m;
}

CountMatrix CountMatrix::from_pair_count(const PairCount& pc) {
    std::vector<std::tuple<Vid, Vid, std::int64_t>> triples;
    pc.for_each([&](Vid r, Vid c, std::int64_t v) { triples.emplace_back(r, c, v); });
    std::sort(triples.begin(), triples.end());
    return from_triples(triples);
}

void CountMatrix::add(Vid r, Vid c, std::int64_t delta) {
    auto ri = row_index_.find(r);
    auto ci = col_index_.find(c);
    if (ri == row_index_.end() || ci == col_index_.end())
        fail(ErrKind::DimensionMismatch, "add outside CountMatrix index");
    auto& cell = data_[ri->second * cols() + ci->second];
    cell = checked_add(cell, delta);
}

CountMatrix CountMatrix::submatrix(const std::unordered_set<Vid>& rows,
                                   const std::unordered_set<Vid>& cols) const {
    std::vector<Vid> rids, cids;
    for (Vid r : row_ids_)
        if (rows.count(r)) rids.push_back(r);
    for (Vid c : col_ids_)
        if (cols.count(c)) cids.push_back(c);
    CountMatrix m(rids, cids);
    for (std::size_t i = 0; i < rids.size(); ++i)
        for (std::size_t j = 0; j < cids.size(); ++j) m.at_dense(i, j) = get(rids[i], cids[j]);
    return m.drop_zero_lines();
}

CountMatrix CountMatrix::drop_zero_lines() const {
    std::vector<Vid> rids, cids;
    for (std::size_t i = 0; i < rows(); ++i) {
        bool nz = false;
        for (std::size_t j = 0; j < cols() && !nz; ++j) nz = at_dense(i, j) != 0;
        if (nz) rids.push_back(row_ids_[i]);
    }
    for (std::size_t j = 0; j < cols(); ++j) {
        bool nz = false;
        for (std::size_t i = 0; i < rows() && !nz; ++i) nz = at_dense(i, j) != 0;
        if (nz) cids.push_back(col_ids_[j]);
    }
    CountMatrix m(rids, cids);
    for (std::size_t i = 0; i < rids.size(); ++i)
        for (std::size_t j = 0; j < cids.size(); ++j) m.at_dense(i, j) = get(rids[i], cids[j]);
    return m;
}

bool CountMatrix::operator==(const CountMatrix& o) const {
    return row_ids_ == o.row_ids_ && col_ids_ == o.col_ids_ && data_ == o.data_;
}

PairCount CountMatrix::to_pair_count() const {
    PairCount pc;
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t j = 0; j < cols(); ++j)
            if (std::int64_t v = at_dense(i, j); v != 0) pc.add(row_ids_[i], col_ids_[j], v);
    return pc;
}

}  // namespace cyc4
