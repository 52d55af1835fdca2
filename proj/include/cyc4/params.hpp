#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "cyc4/common.hpp"

namespace cyc4 {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Model of the rectangular matrix multiplication exponent omega(a, b, c) for
// an n^a x n^b by n^b x n^c product. All models are clipped from below by
// max(a+b, b+c), the cost of reading the input/output.
class OmegaModel {
public:
    struct Sample {
        Rat a, b, c, value;
    };

    // omega(a,b,c) = max(a+b, b+c), the best possible exponent.
    static OmegaModel best_possible();
    // Approximates via padding to square: omega(a,b,c) = max(a,b,c) * w.
    static OmegaModel square_interp(const Rat& square_omega);
    // User-supplied sample points; a query takes the smallest value among
    // samples that dominate it componentwise, falling back to the schoolbook
    // and padded-square bounds. Monotone by construction.
    static OmegaModel table_driven(const Rat& square_omega, std::vector<Sample> samples);
    // Table model pre-loaded with the omega = 2.371339 endpoint bounds used
    // by the reference parameter set.
    static OmegaModel paper_table_2371339();

    Rat operator()(const Rat& a, const Rat& b, const Rat& c) const;
    Rat square() const { return (*this)(1, 1, 1); }
    const std::string& name() const { return name_; }

private:
    enum class Kind { BestPossible, SquareInterp, Table };
    Kind kind_ = Kind::BestPossible;
    Rat square_omega_ = 2;
    std::vector<Sample> samples_;
    std::string name_;
};

struct ParamSet {
    Rat eps, eps1, eps2, delta;  // all in [0, 1/3]
    OmegaModel omega;
};

// Reference parameter sets.
ParamSet params_best_possible();   // eps = eps1 = 1/24, eps2 = 5/24, delta = 1/8
ParamSet params_current_omega();   // the omega = 2.371339 set

struct ConstraintResult {
    std::string name;
    Rat lhs, rhs;  // constraint is lhs <= rhs
    bool ok() const { return lhs <= rhs; }
    Rat slack() const { return rhs - lhs; }
};

// Evaluates every constraint; rows are emitted for all of them.
std::vector<ConstraintResult> check_constraints(const ParamSet& p);
// Just the violated ones (empty means the set is feasible).
std::vector<ConstraintResult> violations(const ParamSet& p);

// Grid search maximizing eps with tie-break (max delta, then min eps2, then
// min eps1). Throws Infeasible when no grid point works.
ParamSet solve_params(const OmegaModel& model, const Rat& resolution,
                      bool require_positive = true);

// Integer thresholds concretized for a reference edge count.
struct Thresholds {
    std::uint64_t mhat = 0;
    std::uint64_t high = 0, medium = 0, tiny = 0;
    std::uint64_t chunk_size = 0, chunk_sparse = 0, phase_size = 0;
    std::uint64_t chunk_job_work_cap = 0, phase_job_work_cap = 0;
    std::uint64_t per_update_budget = 0;

    bool bands_feasible() const {
        return tiny >= 1 && tiny < medium && medium < high && chunk_sparse >= 1 &&
               chunk_sparse < chunk_size && chunk_size >= 2 && phase_size >= 4;
    }
    // Bands that are also well separated: every class keeps a non-empty
    // settled zone between its hysteresis bands.
    bool bands_separated() const {
        return bands_feasible() && 2 * tiny < medium && 2 * medium < high;
    }
};

// ceil(mhat^(num/den)) for a rational exponent.
std::uint64_t ceil_pow(std::uint64_t mhat, const Rat& exponent);

Thresholds thresholds_for(std::uint64_t mhat, const ParamSet& p,
                          std::uint64_t budget_multiplier = 2);

// Smallest mhat for which thresholds_for yields feasible bands.
std::uint64_t min_feasible_mhat(const ParamSet& p);

}  // namespace cyc4
