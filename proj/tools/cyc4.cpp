// Command-line front end: run / gen / verify / bench / params.
#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "cyc4/counter.hpp"
#include "cyc4/engine_main.hpp"
#include "cyc4/engine_naive.hpp"
#include "cyc4/oracle.hpp"
#include "cyc4/params.hpp"
#include "cyc4/stream.hpp"

using namespace cyc4;

namespace {

struct Options {
    std::string stream_path, out_path, metrics_path, config_path;
    std::string engine = "naive";
    std::string mode = "general";
    std::string params = "best";
    std::string kind = "uniform";
    std::string wedges;
    std::uint64_t mhat = 0;  // 0: derive from the stream
    std::string mhat_policy = "fixed";
    std::uint64_t budget_mult = 2;
    bool strict = false;
    bool layered_gen = false;
    bool warmup_compat = false;
    std::uint32_t n = 16;
    std::uint64_t steps = 100;
    double delete_fraction = 0.0;
    std::uint64_t seed = 1;
    std::uint32_t window = 32;
    // manual threshold overrides (0 = derive from mhat/params)
    std::uint64_t th_tiny = 0, th_medium = 0, th_high = 0, th_chunk = 0, th_chunk_sparse = 0,
                  th_phase = 0, th_budget = 0;
    std::string solve_resolution;
};

ParamSet pick_params(const std::string& name) {
    if (name == "best") return params_best_possible();
    if (name == "current") return params_current_omega();
    if (name.rfind("square:", 0) == 0) {
        ParamSet p = params_best_possible();
        p.omega = OmegaModel::square_interp(Rat(std::stoll(name.substr(7)), 1));
        return p;
    }
    fail(ErrKind::InvalidParam, "unknown parameter set '" + name + "'");
}

// flat key=value configuration; command-line flags win
void load_config(const std::string& path, CLI::App& app) {
    std::ifstream in(path);
    if (!in) fail(ErrKind::Io, "cannot open config " + path);
    std::string line;
    std::vector<std::string> args;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrKind::Parse, "config line without '=': " + line);
        args.push_back("--" + line.substr(0, eq));
        args.push_back(line.substr(eq + 1));
    }
    std::vector<const char*> argv;
    argv.push_back("config");
    for (auto& a : args) argv.push_back(a.c_str());
    app.parse(int(argv.size()), argv.data());
}

Thresholds resolve_thresholds(const Options& o, std::uint64_t stream_m) {
    if (o.th_high != 0) {
        Thresholds t;
        t.mhat = o.mhat ? o.mhat : std::max<std::uint64_t>(stream_m, 1);
        t.tiny = o.th_tiny ? o.th_tiny : 2;
        t.medium = o.th_medium ? o.th_medium : 3 * t.tiny;
        t.high = o.th_high;
        t.chunk_size = o.th_chunk ? o.th_chunk : 16;
        t.chunk_sparse = o.th_chunk_sparse ? o.th_chunk_sparse : 2;
        t.phase_size = o.th_phase ? o.th_phase : 64;
        t.chunk_job_work_cap = t.chunk_size * t.chunk_size * 4;
        t.phase_job_work_cap = t.phase_size * t.phase_size;
        t.per_update_budget = o.th_budget ? o.th_budget : 1 << 16;
        return t;
    }
    ParamSet p = pick_params(o.params);
    std::uint64_t mhat = o.mhat;
    if (mhat == 0) mhat = std::max(stream_m, min_feasible_mhat(p));
    auto t = thresholds_for(mhat, p, o.budget_mult);
    if (o.th_budget) t.per_update_budget = o.th_budget;
    return t;
}

EngineKind engine_kind(const std::string& s) {
    if (s == "naive") return EngineKind::Naive;
    if (s == "warmup") return EngineKind::Warmup;
    if (s == "main") return EngineKind::Main;
    if (s == "oracle") return EngineKind::Oracle;
    fail(ErrKind::InvalidParam, "unknown engine '" + s + "'");
}

std::uint64_t stream_peak_m(const Stream& s) {
    std::int64_t m = 0, peak = 0;
    if (s.layered) {
        for (auto& e : s.layered_events) {
            m += e.op == Op::Insert ? 1 : -1;
            peak = std::max(peak, m);
        }
    } else {
        for (auto& e : s.general) {
            m += e.op == Op::Insert ? 8 : -8;  // the reduction stores 8 copies
            peak = std::max(peak, m);
        }
    }
    return std::uint64_t(peak);
}

struct RunSink {
    std::ostream& out;
    std::ofstream metrics;
    bool want_metrics = false;
    std::uint64_t idx = 0;

    void header() {
        if (want_metrics) metrics << "update,wall_ns,ops,backlog,rebuild\n";
    }
    void line(std::int64_t total, std::uint64_t wall_ns, std::uint64_t ops, std::uint64_t backlog,
              bool rebuild) {
        out << total << '\n';
        if (want_metrics)
            metrics << ++idx << ',' << wall_ns << ',' << ops << ',' << backlog << ','
                    << (rebuild ? 1 : 0) << '\n';
    }
};

int run_stream(const Options& o, const Stream& s, RunSink& sink) {
    EngineKind kind = engine_kind(o.engine);
    Thresholds th{};
    if (kind == EngineKind::Main || kind == EngineKind::Warmup)
        th = resolve_thresholds(o, stream_peak_m(s));
    EngineConfig cfg{kind, th, o.strict, o.mhat_policy == "fixed"};
    sink.header();

    LayeredGraph shadow;  // for --wedges probes
    auto clock = [] { return std::chrono::steady_clock::now(); };
    auto ns = [](auto a, auto b) {
        return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
    };

    if (!s.layered) {
        if (kind == EngineKind::Warmup)
            fail(ErrKind::InvalidParam, "the warm-up engine needs a layered A/C-frozen stream");
        GeneralCounter counter(make_engine_factory(cfg));
        std::uint64_t prev_ops = 0;
        for (auto& up : s.general) {
            auto t0 = clock();
            std::int64_t total = counter.apply(up);
            auto t1 = clock();
            std::uint64_t ops = counter.engine().ops();
            sink.line(total, ns(t0, t1), ops - prev_ops, counter.engine().backlog(), false);
            prev_ops = ops;
        }
        return 0;
    }
    if (kind == EngineKind::Warmup) {
        WarmupStandaloneCounter counter(th);
        std::uint64_t prev_ops = 0;
        for (auto& ev : s.layered_events) {
            auto t0 = clock();
            std::int64_t total = counter.apply(ev);
            auto t1 = clock();
            shadow.apply(ev);
            std::uint64_t ops = counter.engine() ? counter.engine()->ops() : 0;
            std::uint64_t backlog = counter.engine() ? counter.engine()->backlog() : 0;
            sink.line(total, ns(t0, t1), ops - prev_ops, backlog, false);
            prev_ops = ops;
        }
    } else {
        LayeredFourCopyCounter counter(make_engine_factory(cfg));
        std::uint64_t prev_ops = 0;
        for (auto& ev : s.layered_events) {
            auto t0 = clock();
            std::int64_t total = counter.apply(ev);
            auto t1 = clock();
            shadow.apply(ev);
            std::uint64_t ops = 0, backlog = 0, rebuilds = 0;
            for (int k = 0; k < 4; ++k) {
                ops += counter.copy(k).ops();
                backlog += counter.copy(k).backlog();
                rebuilds += counter.copy(k).rebuild_events();
            }
            static std::uint64_t prev_rebuilds = 0;
            sink.line(total, ns(t0, t1), ops - prev_ops, backlog, rebuilds != prev_rebuilds);
            prev_rebuilds = rebuilds;
            prev_ops = ops;
        }
    }
    if (!o.wedges.empty()) {
        auto comma = o.wedges.find(',');
        if (comma == std::string::npos)
            fail(ErrKind::InvalidParam, "--wedges wants 'x,y'");
        Vid x = Vid(std::stoul(o.wedges.substr(0, comma)));
        Vid y = Vid(std::stoul(o.wedges.substr(comma + 1)));
        sink.out << "wedges(" << x << ',' << y << ") = "
                 << oracle::brute_2paths(shadow, {1, x}, {3, y}) << '\n';
    }
    return 0;
}

int verify_stream(const Options& o, const Stream& s) {
    EngineKind kind = engine_kind(o.engine);
    Thresholds th{};
    if (kind == EngineKind::Main || kind == EngineKind::Warmup)
        th = resolve_thresholds(o, stream_peak_m(s));
    EngineConfig cfg{kind, th, o.strict, o.mhat_policy == "fixed"};

    if (!s.layered) {
        GeneralCounter counter(make_engine_factory(cfg));
        GeneralGraph shadow;
        for (std::size_t i = 0; i < s.general.size(); ++i) {
            auto& up = s.general[i];
            std::int64_t got = counter.apply(up);
            if (up.op == Op::Insert) shadow.insert(up.u, up.v);
            else shadow.erase(up.u, up.v);
            std::int64_t want = oracle::brute_4cycles_general(shadow);
            if (got != want) {
                std::cout << "divergence at update " << i + 1 << ": engine " << got << " oracle "
                          << want << '\n';
                return 4;
            }
        }
    } else if (kind == EngineKind::Warmup) {
        WarmupStandaloneCounter counter(th);
        LayeredGraph shadow;
        for (std::size_t i = 0; i < s.layered_events.size(); ++i) {
            auto& ev = s.layered_events[i];
            std::int64_t want_q = -1, got_q = -1;
            if (ev.matrix == Matrix::D && counter.engine() != nullptr)
                want_q = oracle::brute_3paths(shadow, {1, ev.hi.index}, {4, ev.lo.index});
            counter.apply(ev);
            shadow.apply(ev);
            if (want_q >= 0) {
                got_q = ev.op == Op::Insert ? counter.last_delta() : -counter.last_delta();
                if (got_q != want_q) {
                    std::cout << "divergence at update " << i + 1 << ": engine " << got_q
                              << " oracle " << want_q << '\n';
                    return 4;
                }
            }
        }
    } else {
        LayeredFourCopyCounter counter(make_engine_factory(cfg));
        LayeredGraph shadow;
        for (std::size_t i = 0; i < s.layered_events.size(); ++i) {
            auto& ev = s.layered_events[i];
            std::int64_t got = counter.apply(ev);
            shadow.apply(ev);
            std::int64_t want = oracle::brute_layered_4cycles(shadow);
            if (got != want) {
                std::cout << "divergence at update " << i + 1 << ": engine " << got << " oracle "
                          << want << '\n';
                return 4;
            }
        }
    }
    std::cout << "ok: " << s.size() << " updates match the oracle\n";
    return 0;
}

int params_report(const Options& o, std::ostream& out) {
    if (!o.solve_resolution.empty()) {
        Rat res;
        auto slash = o.solve_resolution.find('/');
        if (slash == std::string::npos) res = Rat(std::stoll(o.solve_resolution), 1);
        else
            res = Rat(std::stoll(o.solve_resolution.substr(0, slash)),
                      std::stoll(o.solve_resolution.substr(slash + 1)));
        auto model = pick_params(o.params).omega;
        auto p = solve_params(model, res);
        out << "eps=" << p.eps << " eps1=" << p.eps1 << " eps2=" << p.eps2
            << " delta=" << p.delta << '\n';
        return 0;
    }
    auto p = pick_params(o.params);
    out << "name,lhs,rhs,slack,ok\n";
    for (auto& c : check_constraints(p))
        out << c.name << ',' << c.lhs.convert_to<double>() << ',' << c.rhs.convert_to<double>()
            << ',' << c.slack().convert_to<double>() << ',' << (c.ok() ? 1 : 0) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact fully dynamic 4-cycle counting"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--engine", o.engine, "naive|warmup|main|oracle");
        cmd->add_option("--mode", o.mode, "general|layered (informational; streams self-describe)");
        cmd->add_option("--params", o.params, "best|current|square:W");
        cmd->add_option("--mhat", o.mhat, "reference edge count");
        cmd->add_option("--mhat-policy", o.mhat_policy, "fixed|auto");
        cmd->add_option("--budget-mult", o.budget_mult, "per-update budget multiplier");
        cmd->add_flag("--strict", o.strict, "deadline misses become hard errors");
        cmd->add_option("--config", o.config_path, "key=value config file; flags win");
        cmd->add_option("--th-tiny", o.th_tiny);
        cmd->add_option("--th-medium", o.th_medium);
        cmd->add_option("--th-high", o.th_high);
        cmd->add_option("--th-chunk", o.th_chunk);
        cmd->add_option("--th-chunk-sparse", o.th_chunk_sparse);
        cmd->add_option("--th-phase", o.th_phase);
        cmd->add_option("--th-budget", o.th_budget);
    };

    auto* run = app.add_subcommand("run", "replay a stream, print totals");
    run->add_option("--stream", o.stream_path)->required();
    run->add_option("--wedges", o.wedges, "probe: final 2-path count between L1:x and L3:y");
    add_common(run);

    auto* gen = app.add_subcommand("gen", "generate a stream");
    gen->add_option("--out", o.out_path)->required();
    gen->add_option("--kind", o.kind, "uniform|hub|sliding-window");
    gen->add_flag("--layered", o.layered_gen);
    gen->add_flag("--warmup-compat", o.warmup_compat);
    gen->add_option("--n", o.n);
    gen->add_option("--steps", o.steps);
    gen->add_option("--delete-fraction", o.delete_fraction);
    gen->add_option("--seed", o.seed);
    gen->add_option("--window", o.window);

    auto* verify = app.add_subcommand("verify", "replay against the brute-force oracle");
    verify->add_option("--stream", o.stream_path)->required();
    add_common(verify);

    auto* bench = app.add_subcommand("bench", "run with per-update metrics");
    bench->add_option("--stream", o.stream_path)->required();
    bench->add_option("--metrics", o.metrics_path)->required();
    add_common(bench);

    auto* params = app.add_subcommand("params", "constraint report (CSV) or grid solve");
    params->add_option("--params", o.params, "best|current|square:W");
    params->add_option("--solve", o.solve_resolution, "grid resolution, e.g. 1/24");

    try {
        app.parse(argc, argv);
        if (!o.config_path.empty()) {
            // re-parse: config first, then the command line wins
            CLI::App shadow_app{"config"};
            Options base = o;
            shadow_app.allow_extras();
            // minimal: read key=value pairs into o where the flag was not set
            std::ifstream in(o.config_path);
            if (!in) fail(ErrKind::Io, "cannot open config " + o.config_path);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                auto eq = line.find('=');
                if (eq == std::string::npos) fail(ErrKind::Parse, "bad config line: " + line);
                std::string key = line.substr(0, eq), val = line.substr(eq + 1);
                auto set_if_default = [&](auto& field, auto def, auto parse) {
                    if (field == def) field = parse(val);
                };
                if (key == "engine") set_if_default(o.engine, std::string("naive"),
                                                    [](const std::string& s) { return s; });
                else if (key == "params") set_if_default(o.params, std::string("best"),
                                                         [](const std::string& s) { return s; });
                else if (key == "mhat")
                    set_if_default(o.mhat, std::uint64_t(0),
                                   [](const std::string& s) { return std::stoull(s); });
                else if (key == "mhat-policy")
                    set_if_default(o.mhat_policy, std::string("fixed"),
                                   [](const std::string& s) { return s; });
                else if (key == "budget-mult")
                    set_if_default(o.budget_mult, std::uint64_t(2),
                                   [](const std::string& s) { return std::stoull(s); });
                else if (key == "seed")
                    set_if_default(o.seed, std::uint64_t(1),
                                   [](const std::string& s) { return std::stoull(s); });
                else fail(ErrKind::Parse, "unknown config key: " + key);
            }
        }

        if (app.got_subcommand("gen")) {
            GenOptions g;
            if (o.kind == "uniform") g.kind = GenKind::Uniform;
            else if (o.kind == "hub") g.kind = GenKind::Hub;
            else if (o.kind == "sliding-window") g.kind = GenKind::SlidingWindow;
            else fail(ErrKind::InvalidParam, "unknown kind '" + o.kind + "'");
            g.layered = o.layered_gen;
            g.warmup_compat = o.warmup_compat;
            g.n = o.n;
            g.steps = o.steps;
            g.delete_fraction = o.delete_fraction;
            g.seed = o.seed;
            g.window = o.window;
            auto s = generate_stream(g);
            std::ofstream out(o.out_path);
            if (!out) fail(ErrKind::Io, "cannot open " + o.out_path);
            out << "# kind=" << o.kind << " n=" << g.n << " steps=" << g.steps
                << " delete_fraction=" << g.delete_fraction << " seed=" << g.seed << '\n';
            write_stream(out, s);
            return 0;
        }
        if (app.got_subcommand("params")) return params_report(o, std::cout);

        auto s = parse_stream_file(o.stream_path);
        if (app.got_subcommand("run")) {
            RunSink sink{std::cout};
            return run_stream(o, s, sink);
        }
        if (app.got_subcommand("verify")) return verify_stream(o, s);
        if (app.got_subcommand("bench")) {
            RunSink sink{std::cout};
            sink.metrics.open(o.metrics_path);
            if (!sink.metrics) fail(ErrKind::Io, "cannot open " + o.metrics_path);
            sink.want_metrics = true;
            return run_stream(o, s, sink);
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrKind::Parse: return 2;
            case ErrKind::Io: return 2;
            case ErrKind::InvalidParam: return 1;
            default: return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
