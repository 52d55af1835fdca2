#pragma once

#include "cyc4/count_matrix.hpp"

namespace cyc4 {

enum class MatmulBackend {
    Serial,    // schoolbook triple loop, the reference kernel
    Parallel,  // OpenMP over rows
    Blocked,   // cache-tiled, OpenMP over row tiles
    Strassen,  // recursive on square blocks above a size cutoff
};

// Exact product over the intersection of a's column ids and b's row ids;
// entries outside the intersection are zero by contract. Result rows carry
// a's row ids, columns b's column ids. All backends produce identical
// integers.
CountMatrix multiply(const CountMatrix& a, const CountMatrix& b,
                     MatmulBackend backend = MatmulBackend::Parallel);

}  // namespace cyc4
