#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cyc4/count_matrix.hpp"

namespace cyc4 {

// A two- or three-operand matrix product spread across many updates. Operands
// are frozen at creation; stepping advances a flat cursor over the dense
// multiply-accumulate schedule, so the finished matrix is identical no matter
// how the budget is sliced. The elementary operation unit is one
// multiply-accumulate over the aligned inner dimension.
class ProductJob {
public:
    enum class Status { Running, Done };

    ProductJob(CountMatrix a, CountMatrix b, std::uint64_t deadline = 0);
    ProductJob(CountMatrix a, CountMatrix b, CountMatrix c, std::uint64_t deadline = 0);

    Status step(std::uint64_t budget);
    Status run_to_completion();

    bool done() const { return pos_ == ops_total_; }
    std::uint64_t ops_done() const { return pos_; }
    std::uint64_t ops_total() const { return ops_total_; }
    std::uint64_t deadline() const { return deadline_; }

    // Valid once done().
    const CountMatrix& result() const;

private:
    void init_stage1(const CountMatrix& a, const CountMatrix& b);
    void init_stage2(const CountMatrix& c);
    void finish();

    std::vector<std::int64_t> abuf_, bbuf_, s1buf_, cbuf_, s2buf_;
    std::size_t n_ = 0, k1_ = 0, m1_ = 0, k2_ = 0, m2_ = 0;
    std::vector<std::uint32_t> inner2_cols_;  // stage-2 inner index -> stage-1 column
    std::vector<Vid> row_ids_, out_col_ids_;
    bool three_ = false;
    std::uint64_t pos_ = 0, stage1_ops_ = 0, ops_total_ = 0;
    std::uint64_t deadline_ = 0;
    std::optional<CountMatrix> result_;
};

}  // namespace cyc4
