#include "cyc4/stream.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace cyc4 {

namespace {

Matrix parse_matrix(const std::string& tok, int line) {
    if (tok.size() == 1) switch (tok[0]) {
            case 'A': return Matrix::A;
            case 'B': return Matrix::B;
            case 'C': return Matrix::C;
            case 'D': return Matrix::D;
        }
    fail(ErrKind::Parse, "line " + std::to_string(line) + ": bad matrix '" + tok + "'");
}

UpdateEvent layered_event(Op op, Matrix m, Vid lo, Vid hi) {
    UpdateEvent e;
    e.op = op;
    e.matrix = m;
    e.lo = {lower_layer(m), lo};
    e.hi = {upper_layer(m), hi};
    return e;
}

}  // namespace

Stream parse_stream(std::istream& in) {
    Stream s;
    bool shape_known = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string op_tok;
        if (!(ls >> op_tok) || op_tok[0] == '#') continue;
        if (op_tok != "+" && op_tok != "-")
            fail(ErrKind::Parse, "line " + std::to_string(lineno) + ": expected '+' or '-'");
        Op op = op_tok == "+" ? Op::Insert : Op::Delete;

        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) {
            if (t[0] == '#') break;
            toks.push_back(t);
        }
        auto as_vid = [&](const std::string& x) -> Vid {
            try {
                std::size_t pos = 0;
                unsigned long v = std::stoul(x, &pos);
                if (pos != x.size() || v > 0xffffffffUL) throw std::invalid_argument(x);
                return Vid(v);
            } catch (...) {
                fail(ErrKind::Parse, "line " + std::to_string(lineno) + ": bad vertex '" + x + "'");
            }
        };
        bool this_layered;
        if (toks.size() == 2) this_layered = false;
        else if (toks.size() == 3) this_layered = true;
        else
            fail(ErrKind::Parse, "line " + std::to_string(lineno) + ": expected 2 or 3 operands");
        if (!shape_known) {
            s.layered = this_layered;
            shape_known = true;
        } else if (s.layered != this_layered)
            fail(ErrKind::Parse, "line " + std::to_string(lineno) + ": mixed stream modes");

        if (this_layered) {
            Matrix m = parse_matrix(toks[0], lineno);
            s.layered_events.push_back(layered_event(op, m, as_vid(toks[1]), as_vid(toks[2])));
        } else {
            Vid u = as_vid(toks[0]), v = as_vid(toks[1]);
            if (u == v) fail(ErrKind::Parse, "line " + std::to_string(lineno) + ": self loop");
            s.general.push_back({op, u, v});
        }
    }
    return s;
}

Stream parse_stream_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrKind::Io, "cannot open " + path);
    return parse_stream(in);
}

void write_stream(std::ostream& out, const Stream& s) {
    if (s.layered) {
        for (const auto& e : s.layered_events)
            out << (e.op == Op::Insert ? '+' : '-') << ' ' << matrix_name(e.matrix) << ' '
                << e.lo.index << ' ' << e.hi.index << '\n';
    } else {
        for (const auto& e : s.general)
            out << (e.op == Op::Insert ? '+' : '-') << ' ' << e.u << ' ' << e.v << '\n';
    }
}

void validate_stream(const Stream& s) {
    if (s.layered) {
        LayeredGraph g;
        for (std::size_t i = 0; i < s.layered_events.size(); ++i) {
            try {
                g.apply(s.layered_events[i]);
            } catch (const Error& e) {
                fail(e.kind(), "event " + std::to_string(i + 1) + ": " + e.what());
            }
        }
    } else {
        std::unordered_set<std::uint64_t> live;
        for (std::size_t i = 0; i < s.general.size(); ++i) {
            const auto& e = s.general[i];
            auto key = e.u < e.v ? pack_pair(e.u, e.v) : pack_pair(e.v, e.u);
            if (e.op == Op::Insert && !live.insert(key).second)
                fail(ErrKind::DuplicateInsert, "event " + std::to_string(i + 1));
            if (e.op == Op::Delete && live.erase(key) == 0)
                fail(ErrKind::MissingDelete, "event " + std::to_string(i + 1));
        }
    }
}

namespace {

struct LiveEdges {
    std::unordered_set<std::uint64_t> set;
    std::vector<std::uint64_t> list;

    bool has(std::uint64_t k) const { return set.count(k) != 0; }
    void insert(std::uint64_t k) {
        set.insert(k);
        list.push_back(k);
    }
    void erase(std::uint64_t k) {
        set.erase(k);
        for (auto& x : list)
            if (x == k) {
                x = list.back();
                list.pop_back();
                break;
            }
    }
};

// General-mode generation shared by the uniform/hub kinds.
void gen_general(const GenOptions& opt, Stream& s) {
    std::mt19937_64 rng(opt.seed);
    LiveEdges live;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Vid> pick(0, opt.n - 1);

    auto key_of = [](Vid u, Vid v) { return u < v ? pack_pair(u, v) : pack_pair(v, u); };
    std::uint64_t full = std::uint64_t(opt.n) * (opt.n - 1) / 2;

    std::vector<std::uint64_t> fifo;  // sliding window order
    for (std::uint64_t step = 0; step < opt.steps; ++step) {
        bool want_delete = false;
        if (opt.kind == GenKind::SlidingWindow) {
            want_delete = fifo.size() >= opt.window;
        } else {
            want_delete = !live.list.empty() &&
                          (coin(rng) < opt.delete_fraction || live.set.size() >= full);
        }
        if (want_delete && !live.list.empty()) {
            std::uint64_t k;
            if (opt.kind == GenKind::SlidingWindow) {
                k = fifo.front();
                fifo.erase(fifo.begin());
            } else {
                k = live.list[std::uniform_int_distribution<std::size_t>(
                    0, live.list.size() - 1)(rng)];
            }
            live.erase(k);
            s.general.push_back({Op::Delete, pair_first(k), pair_second(k)});
            continue;
        }
        if (live.set.size() >= full) break;  // nothing left to insert
        Vid u, v;
        do {
            u = (opt.kind == GenKind::Hub && coin(rng) < 0.6) ? 0 : pick(rng);
            v = pick(rng);
        } while (u == v || live.has(key_of(u, v)));
        live.insert(key_of(u, v));
        if (opt.kind == GenKind::SlidingWindow) fifo.push_back(key_of(u, v));
        s.general.push_back({Op::Insert, std::min(u, v), std::max(u, v)});
    }
    if (opt.kind == GenKind::SlidingWindow) {
        for (std::uint64_t k : fifo) s.general.push_back({Op::Delete, pair_first(k), pair_second(k)});
    }
}

void gen_layered(const GenOptions& opt, Stream& s) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Vid> pick(0, opt.n - 1);
    std::array<LiveEdges, 4> live;

    auto insert_abs = [&](Matrix m, Vid lo, Vid hi) {
        live[int(m)].insert(pack_pair(lo, hi));
        s.layered_events.push_back(layered_event(Op::Insert, m, lo, hi));
    };
    auto delete_live = [&](Matrix m, std::uint64_t k) {
        live[int(m)].erase(k);
        s.layered_events.push_back(layered_event(Op::Delete, m, pair_first(k), pair_second(k)));
    };
    std::uint64_t full = std::uint64_t(opt.n) * opt.n;

    if (opt.warmup_compat) {
        // Frozen A/C prefix, then B churn with transient D probes.
        std::uint64_t prefix = std::max<std::uint64_t>(2, opt.n * 2);
        for (std::uint64_t i = 0; i < prefix; ++i) {
            Matrix m = (i % 2 == 0) ? Matrix::A : Matrix::C;
            bool hub = opt.kind == GenKind::Hub && coin(rng) < 0.6;
            for (int tries = 0; tries < 64; ++tries) {
                Vid lo = hub && m == Matrix::A ? 0 : pick(rng), hi = pick(rng);
                if (!live[int(m)].has(pack_pair(lo, hi))) {
                    insert_abs(m, lo, hi);
                    break;
                }
            }
        }
        std::vector<std::uint64_t> fifo;
        for (std::uint64_t step = 0; step < opt.steps; ++step) {
            if (coin(rng) < opt.probe_fraction) {
                Vid u = pick(rng), v = pick(rng);  // D probe: (L4:v, L1:u) pair
                if (!live[3].has(pack_pair(v, u))) {
                    insert_abs(Matrix::D, v, u);
                    delete_live(Matrix::D, pack_pair(v, u));
                    continue;
                }
            }
            bool del = !live[1].list.empty() && coin(rng) < opt.delete_fraction;
            if (del) {
                auto& l = live[1];
                delete_live(Matrix::B, l.list[std::uniform_int_distribution<std::size_t>(
                                          0, l.list.size() - 1)(rng)]);
            } else if (live[1].set.size() < full) {
                bool hub = opt.kind == GenKind::Hub && coin(rng) < 0.6;
                for (int tries = 0; tries < 64; ++tries) {
                    Vid lo = hub ? 0 : pick(rng), hi = pick(rng);
                    if (!live[1].has(pack_pair(lo, hi))) {
                        insert_abs(Matrix::B, lo, hi);
                        break;
                    }
                }
            }
        }
        return;
    }

    std::vector<std::pair<Matrix, std::uint64_t>> fifo;
    for (std::uint64_t step = 0; step < opt.steps; ++step) {
        Matrix m = Matrix(std::uniform_int_distribution<int>(0, 3)(rng));
        bool want_delete = false;
        if (opt.kind == GenKind::SlidingWindow) want_delete = fifo.size() >= opt.window;
        else
            want_delete = !live[int(m)].list.empty() && coin(rng) < opt.delete_fraction;
        if (want_delete) {
            if (opt.kind == GenKind::SlidingWindow) {
                auto [fm, k] = fifo.front();
                fifo.erase(fifo.begin());
                delete_live(fm, k);
                continue;
            }
            auto& l = live[int(m)];
            delete_live(m, l.list[std::uniform_int_distribution<std::size_t>(0, l.list.size() - 1)(
                               rng)]);
            continue;
        }
        if (live[int(m)].set.size() >= full) continue;
        bool hub = opt.kind == GenKind::Hub && coin(rng) < 0.6;
        for (int tries = 0; tries < 64; ++tries) {
            // Hub pressure lands on one L2 vertex: its combined A+B degree grows.
            Vid lo = pick(rng), hi = pick(rng);
            if (hub && m == Matrix::A) hi = 0;
            if (hub && m == Matrix::B) lo = 0;
            if (!live[int(m)].has(pack_pair(lo, hi))) {
                insert_abs(m, lo, hi);
                if (opt.kind == GenKind::SlidingWindow)
                    fifo.emplace_back(m, pack_pair(lo, hi));
                break;
            }
        }
    }
    if (opt.kind == GenKind::SlidingWindow)
        for (auto& [m, k] : fifo) delete_live(m, k);
}

}  // namespace

Stream generate_stream(const GenOptions& opt) {
    if (opt.n < 2) fail(ErrKind::InvalidParam, "need at least 2 vertices");
    if (opt.delete_fraction < 0.0 || opt.delete_fraction >= 1.0)
        fail(ErrKind::InvalidParam, "delete fraction must be in [0, 1)");
    Stream s;
    s.layered = opt.layered;
    if (opt.layered) gen_layered(opt, s);
    else gen_general(opt, s);
    validate_stream(s);
    return s;
}

}  // namespace cyc4
