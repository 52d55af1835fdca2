#include "cyc4/product_job.hpp"

#include <algorithm>

namespace cyc4 {

void ProductJob::init_stage1(const CountMatrix& a, const CountMatrix& b) {
    std::vector<Vid> inner;
    for (Vid c : a.col_ids())
        if (b.has_row(c)) inner.push_back(c);
    n_ = a.rows();
    k1_ = inner.size();
    m1_ = b.cols();
    row_ids_ = a.row_ids();
    out_col_ids_ = b.col_ids();
    abuf_.resize(n_ * k1_);
    bbuf_.resize(k1_ * m1_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t l = 0; l < k1_; ++l) abuf_[i * k1_ + l] = a.get(a.row_ids()[i], inner[l]);
    for (std::size_t l = 0; l < k1_; ++l)
        for (std::size_t j = 0; j < m1_; ++j) bbuf_[l * m1_ + j] = b.get(inner[l], b.col_ids()[j]);
    s1buf_.assign(n_ * m1_, 0);
    stage1_ops_ = std::uint64_t(n_) * k1_ * m1_;
    ops_total_ = stage1_ops_;
}

void ProductJob::init_stage2(const CountMatrix& c) {
    std::vector<Vid> inner;
    for (std::size_t j = 0; j < out_col_ids_.size(); ++j)
        if (c.has_row(out_col_ids_[j])) {
            inner.push_back(out_col_ids_[j]);
            inner2_cols_.push_back(std::uint32_t(j));
        }
    k2_ = inner.size();
    m2_ = c.cols();
    cbuf_.resize(k2_ * m2_);
    for (std::size_t l = 0; l < k2_; ++l)
        for (std::size_t j = 0; j < m2_; ++j) cbuf_[l * m2_ + j] = c.get(inner[l], c.col_ids()[j]);
    s2buf_.assign(n_ * m2_, 0);
    out_col_ids_ = c.col_ids();
    ops_total_ = stage1_ops_ + std::uint64_t(n_) * k2_ * m2_;
}

ProductJob::ProductJob(CountMatrix a, CountMatrix b, std::uint64_t deadline)
    : deadline_(deadline) {
    init_stage1(a, b);
    if (ops_total_ == 0) finish();
}

ProductJob::ProductJob(CountMatrix a, CountMatrix b, CountMatrix c, std::uint64_t deadline)
    : three_(true), deadline_(deadline) {
    init_stage1(a, b);
    init_stage2(c);
    if (ops_total_ == 0) finish();
}

ProductJob::Status ProductJob::step(std::uint64_t budget) {
    if (done()) return Status::Done;
    std::uint64_t end = std::min(ops_total_, pos_ + budget);
    while (pos_ < end) {
        if (pos_ < stage1_ops_) {
            // op index -> (i, l, j) of stage 1
            std::uint64_t q = pos_;
            std::size_t i = std::size_t(q / (k1_ * m1_));
            std::size_t r = std::size_t(q % (k1_ * m1_));
            std::size_t l = r / m1_, j = r % m1_;
            auto& cell = s1buf_[i * m1_ + j];
            cell = checked_add(cell, checked_mul(abuf_[i * k1_ + l], bbuf_[l * m1_ + j]));
        } else {
            std::uint64_t q = pos_ - stage1_ops_;
            std::size_t i = std::size_t(q / (k2_ * m2_));
            std::size_t r = std::size_t(q % (k2_ * m2_));
            std::size_t l = r / m2_, j = r % m2_;
            auto& cell = s2buf_[i * m2_ + j];
            cell = checked_add(
                cell, checked_mul(s1buf_[i * m1_ + inner2_cols_[l]], cbuf_[l * m2_ + j]));
        }
        ++pos_;
    }
    if (done()) finish();
    return done() ? Status::Done : Status::Running;
}

ProductJob::Status ProductJob::run_to_completion() {
    return step(ops_total_ - pos_);
}

void ProductJob::finish() {
    pos_ = ops_total_;
    CountMatrix out(row_ids_, out_col_ids_);
    const auto& buf = three_ ? s2buf_ : s1buf_;
    std::size_t m = three_ ? m2_ : m1_;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < m; ++j) out.at_dense(i, j) = buf[i * m + j];
    result_ = std::move(out);
}

const CountMatrix& ProductJob::result() const {
    if (!result_) fail(ErrKind::InvalidParam, "ProductJob result read before completion");
    return *result_;
}

}  // namespace cyc4
