#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cyc4/common.hpp"
#include "cyc4/graph.hpp"

namespace cyc4 {

// Update stream: either general (`+ u v` / `- u v`) or layered
// (`+ A u v` etc.). `#` comments and blank lines are ignored.
struct Stream {
    bool layered = false;
    std::vector<GeneralUpdate> general;
    std::vector<UpdateEvent> layered_events;

    std::size_t size() const { return layered ? layered_events.size() : general.size(); }
};

Stream parse_stream(std::istream& in);
Stream parse_stream_file(const std::string& path);
void write_stream(std::ostream& out, const Stream& s);

// Replays the stream against plain edge sets; throws on duplicate inserts or
// missing deletes.
void validate_stream(const Stream& s);

enum class GenKind { Uniform, Hub, SlidingWindow };

struct GenOptions {
    GenKind kind = GenKind::Uniform;
    bool layered = false;
    // Layered warm-up shape: an A/C prefix, then B updates with transient
    // D probe pairs.
    bool warmup_compat = false;
    std::uint32_t n = 16;        // vertices (per layer when layered)
    std::uint64_t steps = 100;   // events before any closing flush
    double delete_fraction = 0.0;
    std::uint64_t seed = 1;
    std::uint32_t window = 32;   // sliding-window width
    double probe_fraction = 0.15;  // warmup-compat: D probe pair frequency
};

Stream generate_stream(const GenOptions& opt);

}  // namespace cyc4
