#pragma once

#include <array>
#include <functional>
#include <memory>

#include "cyc4/engine.hpp"
#include "cyc4/graph.hpp"
#include "cyc4/params.hpp"

namespace cyc4 {

enum class EngineKind { Naive, Warmup, Main, Oracle };

struct EngineConfig {
    EngineKind kind = EngineKind::Naive;
    Thresholds thresholds;      // required by Warmup and Main
    bool strict_deadlines = false;
    bool mhat_fixed = true;     // false: drift rebuild when m leaves [mhat/2, 2*mhat]
};

using EngineFactory = std::function<std::unique_ptr<ILayeredEngine>()>;
EngineFactory make_engine_factory(const EngineConfig& cfg);

// Oracle engine: brute-force 3-path queries against the live layered graph.
class OracleLayeredEngine final : public ILayeredEngine {
public:
    void apply(const UpdateEvent& e) override { g_.apply(e); }
    std::int64_t query3(Vid u, Vid v) override;
    std::uint64_t ops() const override { return ops_; }
    std::string state_digest() const override;
    const LayeredGraph& graph() const { return g_; }

private:
    LayeredGraph g_;
    std::uint64_t ops_ = 0;
};

// Fully dynamic 4-cycle counting on a general graph via the replicated-vertex
// reduction: every update becomes one symmetric edge pair per matrix, and the
// query at the D event is the delta for the total. The four rotated copies
// collapse to one engine here because the replicated edge multiset is
// rotation invariant.
class GeneralCounter {
public:
    explicit GeneralCounter(EngineFactory f) : eng_(f()) {}

    // Applies the update and returns the 4-cycle total of the general graph.
    std::int64_t apply(const GeneralUpdate& e);

    std::int64_t total() const { return total_; }
    std::int64_t last_delta() const { return last_delta_; }
    ILayeredEngine& engine() { return *eng_; }
    const ILayeredEngine& engine() const { return *eng_; }
    std::string state_digest() const;

    // Bucket sink for attribution runs; when set, query points are answered
    // through query3_attributed.
    BucketMap* bucket_sink = nullptr;

private:
    std::unique_ptr<ILayeredEngine> eng_;
    std::int64_t total_ = 0, last_delta_ = 0;
};

// Layered streams: four role-rotated engine copies over the same event
// stream; each event is answered by the copy whose D role received it.
class LayeredFourCopyCounter {
public:
    explicit LayeredFourCopyCounter(EngineFactory f) {
        for (auto& c : copies_) c = f();
    }

    // Applies the event to all copies and returns the layered 4-cycle total.
    std::int64_t apply(const UpdateEvent& e);

    std::int64_t total() const { return total_; }
    std::int64_t last_delta() const { return last_delta_; }
    ILayeredEngine& copy(int k) { return *copies_[k]; }
    std::string state_digest() const;

    BucketMap* bucket_sink = nullptr;

    // Role-rotated view of a physical event for copy k.
    static UpdateEvent rotate_event(const UpdateEvent& e, int k);

private:
    std::array<std::unique_ptr<ILayeredEngine>, 4> copies_;
    std::int64_t total_ = 0, last_delta_ = 0;
};

// Standalone warm-up driver: layered streams whose A/C updates all precede
// B/D updates. D updates act as queries; the total accumulates their deltas.
class WarmupStandaloneCounter {
public:
    explicit WarmupStandaloneCounter(Thresholds th) : th_(th) {}

    std::int64_t apply(const UpdateEvent& e);

    std::int64_t total() const { return total_; }
    std::int64_t last_delta() const { return last_delta_; }
    ILayeredEngine* engine() { return eng_.get(); }
    std::string state_digest() const;

private:
    Thresholds th_;
    std::unique_ptr<ILayeredEngine> eng_;  // created when the first B/D event arrives
    LayeredGraph prefix_;                  // A/C edges seen before the freeze
    bool frozen_ = false;
    std::int64_t total_ = 0, last_delta_ = 0;
};

}  // namespace cyc4
