#include "cyc4/params.hpp"

#include <algorithm>
#include <cmath>

namespace cyc4 {

namespace {
Rat rat_decimal(long long digits, long long scale) { return Rat(digits, scale); }
}  // namespace

OmegaModel OmegaModel::best_possible() {
    OmegaModel m;
    m.kind_ = Kind::BestPossible;
    m.square_omega_ = 2;
    m.name_ = "best-possible";
    return m;
}

OmegaModel OmegaModel::square_interp(const Rat& square_omega) {
    OmegaModel m;
    m.kind_ = Kind::SquareInterp;
    m.square_omega_ = square_omega;
    m.name_ = "square-interp";
    return m;
}

OmegaModel OmegaModel::table_driven(const Rat& square_omega, std::vector<Sample> samples) {
    OmegaModel m;
    m.kind_ = Kind::Table;
    m.square_omega_ = square_omega;
    m.samples_ = std::move(samples);
    m.name_ = "table";
    return m;
}

OmegaModel OmegaModel::paper_table_2371339() {
    // Endpoint bounds for the reference parameter set eps = 0.0098109,
    // eps1 = 0.04201965, eps2 = 0.14568075, pinned at the exact constraint
    // arguments.
    Rat eps = rat_decimal(98109, 10000000);
    Rat eps1 = rat_decimal(420196500, 10000000000LL);
    Rat eps2 = rat_decimal(1456807500, 10000000000LL);
    Rat third(1, 3);
    std::vector<Sample> s;
    s.push_back({third + eps1, 2 * third - eps1, third + eps1,
                 rat_decimal(110495201, 100000000)});
    s.push_back({2 * third + 2 * eps, third - eps1 + eps2, third - eps1 + eps2,
                 rat_decimal(124039952, 100000000)});
    auto m = table_driven(rat_decimal(2371339, 1000000), std::move(s));
    m.name_ = "table-2.371339";
    return m;
}

Rat OmegaModel::operator()(const Rat& a, const Rat& b, const Rat& c) const {
    Rat lower = std::max(a + b, b + c);
    Rat best;
    switch (kind_) {
        case Kind::BestPossible:
            return lower;
        case Kind::SquareInterp:
            best = std::max({a, b, c}) * square_omega_;
            break;
        case Kind::Table: {
            best = a + b + c;  // schoolbook
            best = std::min(best, std::max({a, b, c}) * square_omega_);
            for (const auto& s : samples_)
                if (a <= s.a && b <= s.b && c <= s.c) best = std::min(best, s.value);
            break;
        }
    }
    return std::max(best, lower);
}

ParamSet params_best_possible() {
    ParamSet p;
    p.eps = Rat(1, 24);
    p.eps1 = Rat(1, 24);
    p.eps2 = Rat(5, 24);
    p.delta = Rat(1, 8);
    p.omega = OmegaModel::best_possible();
    return p;
}

ParamSet params_current_omega() {
    ParamSet p;
    p.eps = rat_decimal(98109, 10000000);
    p.eps1 = rat_decimal(420196500, 10000000000LL);
    p.eps2 = rat_decimal(1456807500, 10000000000LL);
    p.delta = rat_decimal(294327, 10000000);
    p.omega = OmegaModel::paper_table_2371339();
    return p;
}

std::vector<ConstraintResult> check_constraints(const ParamSet& p) {
    const Rat third(1, 3);
    std::vector<ConstraintResult> out;
    auto range_hi = std::max(std::max(p.eps, p.eps1), std::max(p.eps2, p.delta));
    auto range_lo = std::min(std::min(p.eps, p.eps1), std::min(p.eps2, p.delta));
    out.push_back({"R0-range-high", range_hi, third});
    out.push_back({"R0-range-low", -range_lo, Rat(0)});

    Rat w = p.omega.square();
    // C1: chunk triple product for high rows finishes within a chunk.
    out.push_back({"C1-chunk-high", p.omega(third + p.eps1, 2 * third - p.eps1, third + p.eps1),
                   Rat(4, 3) - 2 * p.eps1});
    // C2: low x dense-dense chunk product finishes within a chunk.
    out.push_back({"C2-chunk-low-dd",
                   p.omega(2 * third + 2 * p.eps, third - p.eps1 + p.eps2, third - p.eps1 + p.eps2),
                   Rat(4, 3) - 2 * p.eps1});
    // C3: sparse-side chunk iteration fits the chunk work cap.
    out.push_back({"C3-chunk-sparse", 3 * p.eps1 + 2 * p.eps, p.eps2});
    // C4: a phase is long enough to multiply the full square matrices.
    out.push_back({"C4-phase", (2 * w + 1) * p.eps + (w - 1) * 2 * third, 1 - p.delta});
    // C5: iterating pairs of phase-restricted high/dense vertices fits.
    out.push_back({"C5-pairs", 3 * p.eps, p.delta});
    // C6: chunk class thresholds in increasing order.
    out.push_back({"C6a-order", p.eps1, Rat(1, 6)});
    out.push_back({"C6b-order", p.eps1 - p.eps2, third});
    // C7: main class thresholds in increasing order.
    out.push_back({"C7-order", p.eps, Rat(1, 6)});
    // C8: chunked subroutine at least as fast as the main update time.
    out.push_back({"C8-subroutine", p.eps, p.eps1});
    return out;
}

std::vector<ConstraintResult> violations(const ParamSet& p) {
    std::vector<ConstraintResult> v;
    for (auto& c : check_constraints(p))
        if (!c.ok()) v.push_back(c);
    return v;
}

ParamSet solve_params(const OmegaModel& model, const Rat& resolution, bool require_positive) {
    if (resolution <= 0) fail(ErrKind::InvalidParam, "resolution must be positive");
    const Rat third(1, 3);
    std::vector<Rat> grid;
    for (Rat v = 0; v <= third; v += resolution) grid.push_back(v);

    auto candidates = [&](bool descending) {
        std::vector<Rat> g = grid;
        if (descending) std::reverse(g.begin(), g.end());
        return g;
    };

    for (const Rat& eps : candidates(true)) {
        if (require_positive && eps == 0) continue;
        for (const Rat& delta : candidates(true)) {
            if (require_positive && delta == 0) continue;
            for (const Rat& eps2 : candidates(false)) {
                for (const Rat& eps1 : candidates(false)) {
                    ParamSet p{eps, eps1, eps2, delta, model};
                    if (violations(p).empty()) return p;
                }
            }
        }
    }
    fail(ErrKind::Infeasible, "no feasible parameter set on the grid for model " + model.name());
}

std::uint64_t ceil_pow(std::uint64_t mhat, const Rat& exponent) {
    if (mhat == 0) fail(ErrKind::InvalidParam, "mhat must be positive");
    if (exponent <= 0) return 1;
    BigInt num = boost::multiprecision::numerator(exponent);
    BigInt den = boost::multiprecision::denominator(exponent);
    if (num <= 1024 && den <= 64) {
        // Exact: smallest t with t^den >= mhat^num.
        unsigned un = num.convert_to<unsigned>(), ud = den.convert_to<unsigned>();
        BigInt target = boost::multiprecision::pow(BigInt(mhat), un);
        BigInt lo = 1, hi = 2;
        while (boost::multiprecision::pow(hi, ud) < target) hi <<= 1;
        while (lo < hi) {
            BigInt mid = (lo + hi) / 2;
            if (boost::multiprecision::pow(mid, ud) >= target) hi = mid;
            else lo = mid + 1;
        }
        return lo.convert_to<std::uint64_t>();
    }
    // Fine-grained exponents: long double evaluation with a neighborhood
    // check against the log form.
    long double x = exponent.convert_to<long double>();
    long double v = std::pow((long double)mhat, x);
    auto t = std::uint64_t(std::ceil(v - 1e-9L));
    if (t == 0) t = 1;
    long double logm = std::log((long double)mhat) * x;
    while (t > 1 && std::log((long double)(t - 1)) >= logm - 1e-12L) --t;
    while (std::log((long double)t) < logm - 1e-12L) ++t;
    return t;
}

Thresholds thresholds_for(std::uint64_t mhat, const ParamSet& p, std::uint64_t budget_multiplier) {
    const Rat third(1, 3);
    Thresholds t;
    t.mhat = mhat;
    t.high = ceil_pow(mhat, 2 * third - p.eps);
    t.medium = ceil_pow(mhat, third + p.eps);
    t.tiny = ceil_pow(mhat, third - 2 * p.eps);
    t.chunk_size = ceil_pow(mhat, 2 * third - p.eps1);
    t.chunk_sparse = ceil_pow(mhat, third - p.eps2);
    t.phase_size = ceil_pow(mhat, 1 - p.delta);
    t.chunk_job_work_cap = ceil_pow(mhat, Rat(4, 3) - 2 * p.eps1);
    t.phase_job_work_cap = ceil_pow(mhat, p.omega.square() * (2 * third + 2 * p.eps));
    std::uint64_t per_chunk = (t.chunk_job_work_cap + t.chunk_size - 1) / t.chunk_size;
    std::uint64_t per_phase = (t.phase_job_work_cap + t.phase_size - 1) / t.phase_size;
    t.per_update_budget = budget_multiplier * std::max<std::uint64_t>({per_chunk, per_phase, 1});
    if (!t.bands_feasible())
        fail(ErrKind::BootstrapRange,
             "mhat " + std::to_string(mhat) + " below feasible threshold range");
    return t;
}

std::uint64_t min_feasible_mhat(const ParamSet& p) {
    auto feasible = [&](std::uint64_t m) {
        try {
            thresholds_for(m, p);
            return true;
        } catch (const Error& e) {
            if (e.kind() == ErrKind::BootstrapRange) return false;
            throw;
        }
    };
    // Ceil rounding makes feasibility non-monotone, so scan upward for the
    // first workable reference count.
    for (std::uint64_t m = 2; m < (std::uint64_t(1) << 40); m < 65536 ? ++m : m += m / 1024)
        if (feasible(m)) return m;
    fail(ErrKind::Infeasible, "no feasible mhat");
}

}  // namespace cyc4
