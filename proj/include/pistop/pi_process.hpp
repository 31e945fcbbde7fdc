#pragma once

#include <cstdint>
#include <vector>

#include "pistop/rng.hpp"
#include "pistop/types.hpp"

namespace pistop {

/// One observed arrival: its clock time, overall 1-based order, and its rank
/// among the arrivals seen up to and including it. is_record <=> relative_rank == 1.
struct Arrival {
    double time;
    std::int64_t index;
    std::int64_t relative_rank;
    bool is_record;
};

/// One realization of the arrival process on (exp(origin.u), 1], launched
/// from an explicit state. The law before the first arrival is never
/// modeled; everything is conditional on the origin.
struct SimulatedPath {
    std::vector<Arrival> arrivals;
    ProcessState origin;
};

/// Conditional on n arrivals by clock time t = exp(state.u), the next arrival
/// time T satisfies P[T > s] = (t/s)^n. Inverse transform: T = t * U^(-1/n).
/// The caller treats T > 1 as "no further arrival before the horizon".
/// Rejects n < 1 and draws outside (0, 1).
double next_arrival_time(const ProcessState& state, double uniform_draw);

inline constexpr std::int64_t kDefaultPathCap = 10'000'000;

/// Simulates further arrivals from `state` until the horizon, assigning each
/// new arrival at overall index k a relative rank uniform on {1,...,k}.
/// Deterministic for a fixed (seed, stream) pair. Aborts with NumericalError
/// if a path exceeds `path_cap` arrivals.
SimulatedPath simulate_path(const ProcessState& state, std::uint64_t rng_seed,
                            std::uint64_t rng_stream = 0,
                            std::int64_t path_cap = kDefaultPathCap);

/// Same, reusing the caller's generator and arrival buffer (hot loops).
void simulate_path_into(const ProcessState& state, Pcg32& rng,
                        std::vector<Arrival>& out,
                        std::int64_t path_cap = kDefaultPathCap);

/// PGF of the total count at the horizon: E[z^{N_1} | state] =
/// { z e^u / (1 - z (1 - e^u)) }^n for z in [0, 1].
double total_count_pgf(const ProcessState& state, double z);

/// P[Y = y] for Y further arrivals after the threshold: q^y p^n C(n+y-1, y),
/// with q = 1 - p. Evaluated in log space so large n + y cannot overflow.
double further_arrivals_pmf(const NegBinomialLaw& law, std::int64_t y);

/// log P[Y = y]; -inf where the mass is zero.
double further_arrivals_log_pmf(const NegBinomialLaw& law, std::int64_t y);

}  // namespace pistop
