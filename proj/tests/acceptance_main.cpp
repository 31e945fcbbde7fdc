// Acceptance suite: one line per criterion, exit code = number of failures.
// Everything is pinned here -- tolerances, grids, trial counts, seeds.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pistop/exact_values.hpp"
#include "pistop/hjb_solver.hpp"
#include "pistop/montecarlo.hpp"
#include "pistop/pi_process.hpp"
#include "support/stats.hpp"

using namespace pistop;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

// 1. pi_tilde_1(-1) - V*_1(-1) = e^-1 / (2(1 - e^-1)) and the 2:1 ratio, both to 1e-12.
void criterion1() {
    const Tolerance tight(1e-14);
    const double pi1 = pi_record_is_best(ProcessState(-1.0, 1), tight);
    const double v1 = threshold_rule_value(ProcessState(-1.0, 1), tight);
    const double e_inv = std::exp(-1.0);
    const double expected = e_inv / (2.0 * (1.0 - e_inv));
    const double err_gap = std::fabs((pi1 - v1) - expected);
    const double err_ratio = std::fabs(pi1 - 2.0 * v1);
    report(1, "gap identity at u = -1", err_gap <= 1e-12 && err_ratio <= 1e-12,
           "|gap - p/2q| = " + fmt(err_gap) + ", |pi - 2 v*| = " + fmt(err_ratio));
}

// 2. gap_n(-1) > 0 and strictly decreasing for n = 1..100.
void criterion2() {
    bool positive = true, decreasing = true;
    double prev = 2.0, min_gap = 2.0;
    for (std::int64_t n = 1; n <= 100; ++n) {
        const ProcessState st(-1.0, n);
        const double gap = pi_record_is_best(st) - threshold_rule_value(st);
        if (gap <= 0.0) positive = false;
        if (gap >= prev) decreasing = false;
        prev = gap;
        min_gap = std::min(min_gap, gap);
    }
    report(2, "figure-1 gaps positive and strictly decreasing, n = 1..100",
           positive && decreasing, "min gap = " + fmt(min_gap));
}

// 3. series/quadrature vs the n = 1 closed forms, 1e-10 on the u grid.
void criterion3() {
    double worst_pi = 0.0, worst_v = 0.0;
    bool ok = true;
    try {
        for (double u : {-2.0, -1.0, -0.5, -0.1}) {
            worst_pi = std::max(worst_pi, std::fabs(pi_record_is_best(ProcessState(u, 1)) -
                                                    pi_tilde_closed_form_n1(u)));
            worst_v = std::max(worst_v, std::fabs(threshold_rule_value(ProcessState(u, 1)) -
                                                  v_star_closed_form_n1(u)));
        }
    } catch (const NumericalError&) {
        ok = false;
    }
    report(3, "closed-form cross-checks at n = 1", ok && worst_pi <= 1e-10 && worst_v <= 1e-10,
           "worst pi err = " + fmt(worst_pi) + ", worst v* err = " + fmt(worst_v));
}

// 4. N_1 from (u=-1, n=1) over 1e5 paths is 1 + geometric(e^-1) by chi-square at 0.001.
void criterion4() {
    const double p = std::exp(-1.0);
    const std::int64_t paths = 100'000;
    const std::size_t cats = 48;
    std::vector<std::int64_t> observed(cats, 0);
    for (std::int64_t s = 0; s < paths; ++s) {
        const SimulatedPath path =
            simulate_path(ProcessState(-1.0, 1), 8675309, static_cast<std::uint64_t>(s));
        ++observed[std::min(path.arrivals.size(), cats - 1)];
    }
    std::vector<double> probs(cats, 0.0);
    double head = 0.0;
    for (std::size_t y = 0; y + 1 < cats; ++y) {
        probs[y] = p * std::pow(1.0 - p, static_cast<double>(y));
        head += probs[y];
    }
    probs[cats - 1] = 1.0 - head;
    const auto res = teststats::chi2_gof(observed, probs);
    report(4, "simulated horizon count is 1 + geometric(1/e)", res.p_value >= 0.001,
           "chi2 = " + fmt(res.stat) + ", dof = " + std::to_string(res.dof) +
               ", p = " + fmt(res.p_value));
}

// 5. 1e6-trial estimates of pi_tilde_n and V*_n at (u=-1, n=1..10) within 3 stderr.
void criterion5() {
    bool ok = true;
    double worst_z = 0.0;
    for (std::int64_t n = 1; n <= 10; ++n) {
        const ProcessState state(-1.0, n);
        const PiEstimate pi_est = estimate_pi(state, 1'000'000, 1300 + static_cast<std::uint64_t>(n));
        const double pi_exact = pi_record_is_best(state);
        const double z_pi = std::fabs(pi_est.indicator.mean - pi_exact) / pi_est.indicator.stderr_;

        const MonteCarloEstimate v_est = estimate_win(Strategy::one_over_e(), state, 1'000'000,
                                                      1350 + static_cast<std::uint64_t>(n));
        const double v_exact = threshold_rule_value(state);
        const double z_v = std::fabs(v_est.mean - v_exact) / v_est.stderr_;

        worst_z = std::max(worst_z, std::max(z_pi, z_v));
        if (z_pi > 3.0 || z_v > 3.0) ok = false;
    }
    report(5, "Monte Carlo matches exact values at (u=-1, n=1..10)", ok,
           "worst |z| = " + fmt(worst_z) + " over 20 estimates of 1e6 trials");
}

// 6. HJB consistency on the default grid.
void criterion6() {
    SolverConfig cfg;  // u_min=-4, step=1e-4, n_max=400, classical closure
    bool ok = true;
    std::string detail;

    const ValueTable optimal = solve_optimal(cfg);

    {  // solve_policy(-1) vs the series at u = -1, n <= 50
        const ValueTable policy = solve_policy(-1.0, cfg);
        const std::size_t at = policy.index_of(-1.0);
        double worst = 0.0;
        for (std::int64_t n = 1; n <= 50; ++n)
            worst = std::max(worst,
                             std::fabs(policy.value(n, at) - threshold_rule_value(ProcessState(-1.0, n))));
        detail += "policy-vs-series " + fmt(worst);
        if (worst > 1e-6) ok = false;
    }

    {  // pointwise dominance over every tested threshold
        double worst = 0.0;
        for (double b : {-2.0, -1.5, -1.0, -0.5}) {
            const ValueTable policy = solve_policy(b, cfg);
            for (std::size_t i = 0; i < optimal.slices(); ++i)
                for (std::int64_t n = 1; n <= cfg.n_max; ++n)
                    worst = std::max(worst, policy.value(n, i) - optimal.value(n, i));
        }
        detail += ", max policy excess " + fmt(worst);
        if (worst > 1e-6) ok = false;
    }

    {  // step halving at u = -1, n <= 10
        SolverConfig half = cfg;
        half.step = 0.5e-4;
        const ValueTable fine = solve_optimal(half);
        const std::size_t at_c = optimal.index_of(-1.0);
        const std::size_t at_f = fine.index_of(-1.0);
        double worst = 0.0;
        for (std::int64_t n = 1; n <= 10; ++n)
            worst = std::max(worst, std::fabs(optimal.value(n, at_c) - fine.value(n, at_f)));
        detail += ", halving shift " + fmt(worst);
        if (worst > 1e-8) ok = false;
    }

    report(6, "HJB: policy identity, dominance, step stability", ok, detail);
}

// 7. Non-optimality witness: the solver shows (n, u) with u < -1 where stopping
//    wins, and the simulated boundary strategy beats the simulated 1/e rule at
//    (u=-1.05, n=1) by more than 3 combined standard errors.
void criterion7() {
    SolverConfig cfg;
    cfg.u_min = -2.0;
    cfg.step = 1e-4;
    cfg.n_max = 400;
    const ValueTable table = solve_optimal(cfg);
    const StoppingBoundary boundary = extract_boundary(table);

    bool witness = false;
    double witness_u = 0.0;
    std::int64_t witness_n = 0;
    for (std::int64_t n = 1; n <= cfg.n_max && !witness; ++n) {
        const double u_star = boundary.threshold(n);
        if (std::isnan(u_star) || u_star >= -1.0 - cfg.step) continue;
        const double u_mid = 0.5 * (u_star - 1.0);
        const std::size_t i =
            static_cast<std::size_t>(std::llround((u_mid - table.grid().front()) / cfg.step));
        const double u_grid = table.grid()[i];
        if (u_grid >= -1.0) continue;
        const double pi = pi_tilde_levels(u_grid, n)[static_cast<std::size_t>(n - 1)];
        if (pi > table.value(n, i)) {
            witness = true;
            witness_u = u_grid;
            witness_n = n;
        }
    }

    const ProcessState before(-1.05, 1);
    const MonteCarloEstimate fb =
        estimate_win(Strategy::from_boundary(boundary), before, 1'000'000, 777001);
    const MonteCarloEstimate oe = estimate_win(Strategy::one_over_e(), before, 1'000'000, 777002);
    const double combined = std::sqrt(fb.stderr_ * fb.stderr_ + oe.stderr_ * oe.stderr_);
    const bool beats = (fb.mean - oe.mean) > 3.0 * combined;

    report(7, "the 1/e rule is not optimal", witness && beats,
           std::string("witness ") +
               (witness ? ("(n=" + std::to_string(witness_n) + ", u=" + fmt(witness_u) + ")")
                        : "absent") +
               "; boundary " + fmt(fb.mean) + " vs 1/e " + fmt(oe.mean) + " (3 se = " +
               fmt(3.0 * combined) + ")");
}

// 8. Monotonicity: strictly increasing in t, nonincreasing in n, on
//    n = 1..200 x t = 0.1..0.9.
void criterion8() {
    bool increasing = true, nonincreasing = true;
    std::vector<double> prev_row;
    for (std::int64_t n = 1; n <= 200; ++n) {
        std::vector<double> row;
        double prev = -1.0;
        for (int i = 1; i <= 9; ++i) {
            const double v = pi_record_is_best(ProcessState(std::log(0.1 * i), n));
            if (v <= prev) increasing = false;
            prev = v;
            row.push_back(v);
        }
        if (n > 1)
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i] > prev_row[i] + 1e-12) nonincreasing = false;
        prev_row = std::move(row);
    }
    report(8, "monotone in t (strict) and in n (nonincreasing)", increasing && nonincreasing,
           std::string("increasing: ") + (increasing ? "yes" : "NO") +
               ", nonincreasing: " + (nonincreasing ? "yes" : "NO"));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
