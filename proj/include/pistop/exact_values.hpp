#pragma once

#include <cstdint>
#include <vector>

#include "pistop/types.hpp"

namespace pistop {

/// Value of a truncated series together with the proven tail envelope it was
/// cut at and the number of terms consumed.
struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::int64_t terms = 0;
};

/// f_j(t) = sum_{k >= j} t^k / k for 0 < t < 1, j >= 1. Series evaluation with
/// tail envelope t^(K+1) / ((K+1)(1-t)); f_1(t) = -log(1-t).
double f_j(std::int64_t j, double t, const Tolerance& tol = {});

/// Probability that a record arriving as the n-th observation at log time u
/// is the best overall. Evaluated two independent ways -- negative binomial
/// series and adaptive quadrature of the stretched integral -- which must
/// agree within 1e-10; disagreement raises NumericalError. Returns the
/// series value.
double pi_record_is_best(const ProcessState& state, const Tolerance& tol = {});

/// Series route alone: sum_{y>=0} [n/(n+y)] * NBpmf(n, e^u, y), mode-started
/// so huge n|u| cannot underflow, truncated by a geometric tail envelope.
SeriesResult pi_tilde_series(std::int64_t n, double u, const Tolerance& tol = {});

/// Quadrature route alone: the integral form with the z = v^(1/n) stretch,
/// so node counts stay bounded for small t and large n.
double pi_tilde_quadrature(std::int64_t n, double u, double abs_tol = 1e-12);

/// Win probability of the fixed-threshold rule: given n arrivals by log time
/// b = state.u, do nothing until b, then take the first record. Outer sum
/// starts at y = 1: no further arrival means no stop, which is a loss.
double threshold_rule_value(const ProcessState& state_at_threshold, const Tolerance& tol = {});
SeriesResult threshold_rule_value_detailed(const ProcessState& state_at_threshold,
                                           const Tolerance& tol = {});

/// Closed forms for n = 1 (p = e^u, q = 1 - p):
///   pi_tilde_1(u)  = -(p/q) log(1-q)
///   v_star_1(u)    = (p/2q) (log(1-q))^2
double pi_tilde_closed_form_n1(double u);
double v_star_closed_form_n1(double u);

/// pi_tilde_1(u) - v_star_1(u) = (p/2q) [ -2 log(1-q) - (log(1-q))^2 ],
/// the analytic advantage of stopping on a first-arrival record at u over
/// the fixed-threshold-u rule. Requires u < 0.
double gap_n1(double u);

/// pi_tilde_n(u) for every n = 1..n_max at once (result[n-1] holds level n).
/// Uses the exact recursion of J_n = int_0^1 w^(n-1)/(p+qw) dw, run in its
/// stable direction (upward from J_1 for t <= 1/2, downward Miller-style
/// otherwise, validated against the closed-form J_1). Near-machine-precision
/// and O(n_max) per call; the reference routes above stay the oracle.
std::vector<double> pi_tilde_levels(double u, std::int64_t n_max);

}  // namespace pistop
