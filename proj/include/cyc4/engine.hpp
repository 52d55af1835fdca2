#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cyc4/common.hpp"
#include "cyc4/pair_count.hpp"

namespace cyc4 {

// Attribution bucket for a counted 3-path: the classes of its two middle
// vertices and the phase of each of its three edges. Engines without class
// or phase structure report everything in one bucket.
struct PathBucket {
    int cls_l2 = 0, cls_l3 = 0;     // Cls values, engine-specific
    int ph_a = 0, ph_b = 0, ph_c = 0;
    auto operator<=>(const PathBucket&) const = default;
};
using BucketMap = std::map<PathBucket, std::int64_t>;

// One engine copy: consumes layered updates, answers 3-path queries between
// L1 and L4. Single-writer.
class ILayeredEngine {
public:
    virtual ~ILayeredEngine() = default;

    virtual void apply(const UpdateEvent& e) = 0;
    virtual std::int64_t query3(Vid u_l1, Vid v_l4) = 0;

    // Same answer as query3, split by attribution bucket.
    virtual std::int64_t query3_attributed(Vid u_l1, Vid v_l4, BucketMap& out) {
        std::int64_t q = query3(u_l1, v_l4);
        if (q != 0) out[PathBucket{}] += q;
        return q;
    }

    virtual std::uint64_t ops() const = 0;
    virtual std::uint64_t deadline_missed() const { return 0; }
    virtual std::uint64_t backlog() const { return 0; }
    virtual std::uint64_t rebuild_events() const { return 0; }

    // Canonical dump of the semantic state: every store, every table and the
    // graph. Used by the inverse-stream restoration checks.
    virtual std::string state_digest() const = 0;
};

}  // namespace cyc4
