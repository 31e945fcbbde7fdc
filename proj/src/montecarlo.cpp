#include "pistop/montecarlo.hpp"

#include <cmath>
#include <limits>

#include "pistop/pi_process.hpp"
#include "pistop/rng.hpp"

namespace pistop {

Strategy Strategy::fixed_threshold(double b) {
    if (!(b <= 0.0)) throw std::invalid_argument("Strategy: threshold must be <= 0");
    return Strategy{Kind::fixed_threshold, b, {}};
}

Strategy Strategy::from_boundary(const StoppingBoundary& b) {
    return Strategy{Kind::boundary, 0.0, b.thresholds};
}

namespace {

// Stop decision at an arrival (log time u, overall count k, record flag).
bool accepts(const Strategy& s, double u, std::int64_t k, bool is_record) {
    if (!is_record) return false;
    switch (s.kind) {
        case Strategy::Kind::fixed_threshold:
            return u >= s.threshold_b;
        case Strategy::Kind::boundary: {
            // beyond the tabulated range the frontier has flattened onto -1
            const double u_star = (k <= static_cast<std::int64_t>(s.boundary.size()))
                                      ? s.boundary[static_cast<std::size_t>(k - 1)]
                                      : -1.0;
            if (std::isnan(u_star)) return false;
            return u >= u_star;
        }
        case Strategy::Kind::stop_never:
            return false;
        case Strategy::Kind::stop_first_record:
            return true;
    }
    return false;
}

}  // namespace

MonteCarloEstimate estimate_win(const Strategy& strategy, const ProcessState& state,
                                std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("estimate_win: trials must be >= 1");

    std::int64_t wins = 0;
    std::vector<Arrival> path;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        Pcg32 rng(seed, static_cast<std::uint64_t>(trial));
        simulate_path_into(state, rng, path);

        if (strategy.kind == Strategy::Kind::stop_first_record) {
            // stops on the launch record itself; wins iff it stays the best
            bool future_record = false;
            for (const Arrival& a : path)
                if (a.is_record) { future_record = true; break; }
            if (!future_record) ++wins;
            continue;
        }

        std::size_t stop_at = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
            const Arrival& a = path[i];
            if (accepts(strategy, std::log(a.time), a.index, a.is_record)) {
                stop_at = i;
                break;
            }
        }
        if (stop_at == path.size()) continue;  // never stopped: a loss
        bool later_record = false;
        for (std::size_t i = stop_at + 1; i < path.size(); ++i)
            if (path[i].is_record) { later_record = true; break; }
        if (!later_record) ++wins;
    }

    MonteCarloEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.mean = static_cast<double>(wins) / static_cast<double>(trials);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(trials));
    return est;
}

PiEstimate estimate_pi(const ProcessState& state, std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("estimate_pi: trials must be >= 1");

    std::int64_t wins = 0;
    double ratio_sum = 0.0, ratio_sq_sum = 0.0;
    const double nd = static_cast<double>(state.n);
    std::vector<Arrival> path;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        Pcg32 rng(seed, static_cast<std::uint64_t>(trial));
        simulate_path_into(state, rng, path);

        bool future_record = false;
        for (const Arrival& a : path)
            if (a.is_record) { future_record = true; break; }
        if (!future_record) ++wins;

        const double r = nd / (nd + static_cast<double>(path.size()));
        ratio_sum += r;
        ratio_sq_sum += r * r;
    }

    PiEstimate out;
    out.indicator.trials = out.ratio.trials = trials;
    out.indicator.seed = out.ratio.seed = seed;
    out.indicator.mean = static_cast<double>(wins) / static_cast<double>(trials);
    out.indicator.stderr_ =
        std::sqrt(out.indicator.mean * (1.0 - out.indicator.mean) / static_cast<double>(trials));
    const double td = static_cast<double>(trials);
    out.ratio.mean = ratio_sum / td;
    const double var = std::max(0.0, ratio_sq_sum / td - out.ratio.mean * out.ratio.mean);
    out.ratio.stderr_ = std::sqrt(var / td);
    return out;
}

}  // namespace pistop
