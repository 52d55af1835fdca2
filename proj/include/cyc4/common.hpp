#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cyc4 {

using Vid = std::uint32_t;

// Packed unordered/ordered pair key for hash maps.
inline std::uint64_t pack_pair(Vid a, Vid b) {
    return (std::uint64_t(a) << 32) | std::uint64_t(b);
}
inline Vid pair_first(std::uint64_t k) { return Vid(k >> 32); }
inline Vid pair_second(std::uint64_t k) { return Vid(k & 0xffffffffu); }

// Biadjacency matrices of the 4-layered graph.
// A: L1-L2, B: L2-L3, C: L3-L4, D: L4-L1.
enum class Matrix : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline int lower_layer(Matrix m) {
    switch (m) {
        case Matrix::A: return 1;
        case Matrix::B: return 2;
        case Matrix::C: return 3;
        default:        return 4;  // D edges are stored (L4, L1)
    }
}
inline int upper_layer(Matrix m) {
    switch (m) {
        case Matrix::A: return 2;
        case Matrix::B: return 3;
        case Matrix::C: return 4;
        default:        return 1;
    }
}
inline char matrix_name(Matrix m) { return "ABCD"[int(m)]; }

enum class Op : std::uint8_t { Insert, Delete };

struct VertexRef {
    int layer = 0;  // 1..4
    Vid index = 0;
    bool operator==(const VertexRef&) const = default;
};

struct UpdateEvent {
    Op op = Op::Insert;
    Matrix matrix = Matrix::A;
    VertexRef lo, hi;  // lo in lower_layer(matrix), hi in upper_layer(matrix)
    bool is_query_point = false;  // set by the general-graph reduction on the D event
};

struct GeneralUpdate {
    Op op = Op::Insert;
    Vid u = 0, v = 0;
};

enum class ErrKind {
    DuplicateInsert,
    MissingDelete,
    LayerMismatch,
    SelfLoop,
    DimensionMismatch,
    Overflow,
    DeadlineMissed,
    BootstrapRange,
    Infeasible,
    InvalidParam,
    Parse,
    Io,
    RebuildRequired,
};

class Error : public std::runtime_error {
public:
    Error(ErrKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrKind kind() const { return kind_; }

private:
    ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) { throw Error(k, msg); }

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrKind::Overflow, "int64 multiply overflow");
    return r;
}
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) fail(ErrKind::Overflow, "int64 add overflow");
    return r;
}

}  // namespace cyc4
