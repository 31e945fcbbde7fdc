#include "pistop/pi_process.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pistop {

namespace {

// Inverse-transform step shared by the public op and the path loop:
// survival P[T > s | N_t = n] = (t/s)^n gives T = t * U^(-1/n).
inline double next_time_from(double t, std::int64_t n, double uniform_draw) {
    return t * std::exp(-std::log(uniform_draw) / static_cast<double>(n));
}

}  // namespace

double next_arrival_time(const ProcessState& state, double uniform_draw) {
    if (state.n < 1)
        throw std::invalid_argument("next_arrival_time: law undefined before the first arrival (n >= 1)");
    if (!(uniform_draw > 0.0) || !(uniform_draw < 1.0))
        throw std::invalid_argument("next_arrival_time: uniform_draw must lie in (0, 1)");
    return next_time_from(std::exp(state.u), state.n, uniform_draw);
}

void simulate_path_into(const ProcessState& state, Pcg32& rng,
                        std::vector<Arrival>& out, std::int64_t path_cap) {
    out.clear();
    double t = std::exp(state.u);
    std::int64_t n = state.n;
    for (;;) {
        const double next = next_time_from(t, n, uniform01(rng));
        if (next > 1.0) break;
        t = next;
        ++n;
        Arrival a;
        a.time = t;
        a.index = n;
        a.relative_rank = uniform_int_1_to_k(rng, n);  // uniform over {1,...,index}
        a.is_record = (a.relative_rank == 1);
        out.push_back(a);
        if (static_cast<std::int64_t>(out.size()) > path_cap)
            throw NumericalError("simulate_path: runaway path, more than " +
                                 std::to_string(path_cap) + " arrivals from u=" +
                                 std::to_string(state.u));
    }
}

SimulatedPath simulate_path(const ProcessState& state, std::uint64_t rng_seed,
                            std::uint64_t rng_stream, std::int64_t path_cap) {
    Pcg32 rng(rng_seed, rng_stream);
    SimulatedPath path{{}, state};
    simulate_path_into(state, rng, path.arrivals, path_cap);
    return path;
}

double total_count_pgf(const ProcessState& state, double z) {
    if (!(z >= 0.0) || !(z <= 1.0))
        throw std::invalid_argument("total_count_pgf: z must lie in [0, 1]");
    const double t = std::exp(state.u);
    // Denominator >= e^u > 0 on z in [0, 1].
    const double ratio = z * t / (1.0 - z * (1.0 - t));
    return std::pow(ratio, static_cast<double>(state.n));
}

double further_arrivals_log_pmf(const NegBinomialLaw& law, std::int64_t y) {
    if (y < 0)
        throw std::invalid_argument("further_arrivals_pmf: y must be >= 0");
    const double n = static_cast<double>(law.n);
    const double q = law.q();
    if (y == 0) return n * std::log(law.p);
    if (q <= 0.0) return -std::numeric_limits<double>::infinity();
    const double yd = static_cast<double>(y);
    return n * std::log(law.p) + yd * std::log(q) + std::lgamma(n + yd) -
           std::lgamma(yd + 1.0) - std::lgamma(n);
}

double further_arrivals_pmf(const NegBinomialLaw& law, std::int64_t y) {
    return std::exp(further_arrivals_log_pmf(law, y));
}

}  // namespace pistop
