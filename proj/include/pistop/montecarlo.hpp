#pragma once

#include <cstdint>
#include <vector>

#include "pistop/hjb_solver.hpp"
#include "pistop/types.hpp"

namespace pistop {

/// Record-stopping strategies. All of them are functions of the information
/// available at an arrival instant: its log time, the running count, and
/// whether it is a record.
///   fixed_threshold(b): pass records before log time b, take the first one
///                       at or after b; b = -1 is the 1/e strategy.
///   boundary:           take a record at count k iff its log time is at or
///                       past the stopping frontier u*_k.
///   stop_never:         never stop (never wins).
///   stop_first_record:  the launch state is itself a fresh record and the
///                       strategy accepts it immediately; its win estimate
///                       is the simulation-side mirror of pi_record_is_best.
struct Strategy {
    enum class Kind { fixed_threshold, boundary, stop_never, stop_first_record };

    Kind kind;
    double threshold_b = -1.0;            // fixed_threshold only
    std::vector<double> boundary;         // boundary only: [k-1] -> u*_k (NaN = never stop there)

    static Strategy one_over_e() { return fixed_threshold(-1.0); }
    static Strategy fixed_threshold(double b);
    static Strategy from_boundary(const StoppingBoundary& b);
    static Strategy never() { return Strategy{Kind::stop_never, 0.0, {}}; }
    static Strategy first_record() { return Strategy{Kind::stop_first_record, 0.0, {}}; }
};

/// Bernoulli-mean estimate: stderr = sqrt(mean(1-mean)/trials). Deterministic
/// under (seed, trials, strategy, state) -- trial k always uses RNG stream k.
struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

/// The two simulation estimators of pi_tilde_n(u): the win indicator (no
/// future record) and its Rao-Blackwellization n/N_1, which must agree and
/// has provably smaller variance.
struct PiEstimate {
    MonteCarloEstimate indicator;
    MonteCarloEstimate ratio;  // stderr from the sample variance, not Bernoulli
};

/// P[the strategy's stop is the overall best | launch state], estimated over
/// independent trials. A path with no stop is a loss. Wins use path-local
/// truth: the stopped arrival is a record with no later record on the path.
MonteCarloEstimate estimate_win(const Strategy& strategy, const ProcessState& state,
                                std::int64_t trials, std::uint64_t seed);

/// Both estimators of pi_tilde at `state`, whose n-th arrival is a record.
PiEstimate estimate_pi(const ProcessState& state, std::int64_t trials, std::uint64_t seed);

}  // namespace pistop
