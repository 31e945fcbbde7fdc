#include "pistop/exact_values.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pistop/pi_process.hpp"
#include "pistop/quadrature.hpp"

namespace pistop {

namespace {

// Largest ratio NB(y+1)/NB(y) over y >= Y; decreasing in Y for n >= 1.
inline double nb_step_ratio(double n, double q, std::int64_t y) {
    return q * (n + static_cast<double>(y)) / (static_cast<double>(y) + 1.0);
}

// H(y) = sum_{j=1}^{y} 1/(n+j-1), the inner harmonic block of the win sum.
double harmonic_block(std::int64_t n, std::int64_t y) {
    double h = 0.0;
    for (std::int64_t j = y; j >= 1; --j) h += 1.0 / static_cast<double>(n + j - 1);
    return h;
}

struct NbSweepSetup {
    std::int64_t mode;
    double log_pmf_mode;
};

// Start the two-sided sweep at the NB mode so p^n underflow for large n|u|
// never zeroes the incremental terms.
NbSweepSetup nb_sweep_setup(std::int64_t n, double p) {
    const double q = 1.0 - p;
    std::int64_t mode = 0;
    if (n > 1 && q > 0.0)
        mode = static_cast<std::int64_t>(std::floor(q * static_cast<double>(n - 1) / p));
    NegBinomialLaw law(n, p);
    return {mode, further_arrivals_log_pmf(law, mode)};
}

}  // namespace

double f_j(std::int64_t j, double t, const Tolerance& tol) {
    if (j < 1) throw std::invalid_argument("f_j: j must be >= 1");
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument("f_j: series diverges unless 0 < t < 1");
    double term = std::pow(t, static_cast<double>(j)) / static_cast<double>(j);
    double sum = term;
    for (std::int64_t k = j; ; ++k) {
        // tail after k is bounded by t^(k+1) / ((k+1)(1-t))
        const double tail = term * t * static_cast<double>(k) /
                            (static_cast<double>(k + 1) * (1.0 - t));
        if (tail < tol.abs_tol) break;
        if (k - j + 1 >= tol.max_terms)
            throw NumericalError("f_j: max_terms exceeded, tail bound " + std::to_string(tail));
        term *= t * static_cast<double>(k) / static_cast<double>(k + 1);
        sum += term;
    }
    return sum;
}

SeriesResult pi_tilde_series(std::int64_t n, double u, const Tolerance& tol) {
    if (n < 1) throw std::invalid_argument("pi_tilde_series: n must be >= 1");
    if (!(u <= 0.0)) throw std::invalid_argument("pi_tilde_series: u must be <= 0");
    const double p = std::exp(u);
    const double q = -std::expm1(u);  // 1 - p without cancellation near u = 0
    if (q <= 0.0) return {1.0, 0.0, 1};

    const double nd = static_cast<double>(n);
    const auto setup = nb_sweep_setup(n, p);
    const double pmf_mode = std::exp(setup.log_pmf_mode);

    SeriesResult res;
    res.terms = 1;
    res.value = pmf_mode * nd / (nd + static_cast<double>(setup.mode));

    // upward sweep with geometric tail envelope
    double term = pmf_mode;
    std::int64_t y = setup.mode;
    for (;;) {
        term *= nb_step_ratio(nd, q, y);
        ++y;
        ++res.terms;
        res.value += term * nd / (nd + static_cast<double>(y));
        const double r = nb_step_ratio(nd, q, y);
        if (r < 1.0) {
            const double env = term * (nd / (nd + static_cast<double>(y))) * r / (1.0 - r);
            if (env < 0.5 * tol.abs_tol) {
                res.tail_bound += env;
                break;
            }
        }
        if (res.terms > tol.max_terms)
            throw NumericalError("pi_tilde_series: max_terms exceeded at n=" + std::to_string(n));
    }

    // downward sweep; ratios NB(y-1)/NB(y) shrink as y falls, so once below
    // the early-stop envelope the remainder is geometric.
    term = pmf_mode;
    y = setup.mode;
    while (y > 0) {
        const double rho = static_cast<double>(y) / (q * (nd + static_cast<double>(y) - 1.0));
        if (rho < 1.0) {
            const double env = term * rho / (1.0 - rho);  // weights n/(n+y) <= 1
            if (env < 0.5 * tol.abs_tol) {
                res.tail_bound += env;
                break;
            }
        }
        term *= rho;
        --y;
        ++res.terms;
        res.value += term * nd / (nd + static_cast<double>(y));
        if (res.terms > tol.max_terms)
            throw NumericalError("pi_tilde_series: max_terms exceeded at n=" + std::to_string(n));
    }
    return res;
}

double pi_tilde_quadrature(std::int64_t n, double u, double abs_tol) {
    if (n < 1) throw std::invalid_argument("pi_tilde_quadrature: n must be >= 1");
    if (!(u <= 0.0)) throw std::invalid_argument("pi_tilde_quadrature: u must be <= 0");
    const double q = -std::expm1(u);
    if (q <= 0.0) return 1.0;
    const double nd = static_cast<double>(n);
    // n * int_0^1 dz/z {zt/(1-z(1-t))}^n, stretched by v = z^n:
    // int_0^1 {t / (1 - q v^(1/n))}^n dv, flat in n near v = 1.
    auto integrand = [nd, q, u](double v) {
        const double root = std::exp(std::log(v) / nd);
        return std::exp(nd * (u - std::log1p(-q * root)));
    };
    return integrate_adaptive(integrand, 0.0, 1.0, abs_tol);
}

double pi_record_is_best(const ProcessState& state, const Tolerance& tol) {
    const double route_tol = std::min(tol.abs_tol, 1e-12);
    const SeriesResult series = pi_tilde_series(state.n, state.u, Tolerance(route_tol, tol.max_terms));
    const double quad = pi_tilde_quadrature(state.n, state.u, route_tol);
    if (std::fabs(series.value - quad) > 1e-10)
        throw NumericalError("pi_record_is_best: series/quadrature disagree at n=" +
                             std::to_string(state.n) + ", u=" + std::to_string(state.u) +
                             ": " + std::to_string(series.value) + " vs " + std::to_string(quad));
    return series.value;
}

SeriesResult threshold_rule_value_detailed(const ProcessState& state, const Tolerance& tol) {
    const std::int64_t n = state.n;
    const double p = std::exp(state.u);
    const double q = -std::expm1(state.u);
    if (q <= 0.0) return {0.0, 0.0, 0};  // no arrivals remain: the sum is empty

    const double nd = static_cast<double>(n);
    const auto setup = nb_sweep_setup(n, p);
    const std::int64_t y0 = std::max<std::int64_t>(setup.mode, 1);
    NegBinomialLaw law(n, p);
    const double pmf_y0 =
        (y0 == setup.mode) ? std::exp(setup.log_pmf_mode) : further_arrivals_pmf(law, y0);

    double h = harmonic_block(n, y0);

    SeriesResult res;
    res.terms = 1;
    res.value = pmf_y0 * h * nd / (nd + static_cast<double>(y0));

    // upward: term and harmonic block updated incrementally; the tail is
    // dominated by a geometric-times-(H + linear growth) envelope.
    double term = pmf_y0;
    double h_up = h;
    std::int64_t y = y0;
    for (;;) {
        term *= nb_step_ratio(nd, q, y);
        h_up += 1.0 / (nd + static_cast<double>(y));
        ++y;
        ++res.terms;
        res.value += term * h_up * nd / (nd + static_cast<double>(y));
        const double r = nb_step_ratio(nd, q, y);
        if (r < 1.0) {
            const double w = nd / (nd + static_cast<double>(y));
            const double env = term * w * (h_up * r / (1.0 - r) +
                                           (1.0 / (nd + static_cast<double>(y))) * r /
                                               ((1.0 - r) * (1.0 - r)));
            if (env < 0.5 * tol.abs_tol) {
                res.tail_bound += env;
                break;
            }
        }
        if (res.terms > tol.max_terms)
            throw NumericalError("threshold_rule_value: max_terms exceeded, tail bound " +
                                 std::to_string(res.tail_bound));
    }

    // downward to y = 1, early-stopped by the geometric envelope
    term = pmf_y0;
    double h_down = h;
    y = y0;
    while (y > 1) {
        const double rho = static_cast<double>(y) / (q * (nd + static_cast<double>(y) - 1.0));
        if (rho < 1.0) {
            const double env = term * h_down * rho / (1.0 - rho);
            if (env < 0.5 * tol.abs_tol) {
                res.tail_bound += env;
                break;
            }
        }
        term *= rho;
        h_down -= 1.0 / (nd + static_cast<double>(y) - 1.0);
        --y;
        ++res.terms;
        res.value += term * h_down * nd / (nd + static_cast<double>(y));
        if (res.terms > tol.max_terms)
            throw NumericalError("threshold_rule_value: max_terms exceeded, tail bound " +
                                 std::to_string(res.tail_bound));
    }
    return res;
}

double threshold_rule_value(const ProcessState& state, const Tolerance& tol) {
    return threshold_rule_value_detailed(state, tol).value;
}

double pi_tilde_closed_form_n1(double u) {
    if (!(u <= 0.0)) throw std::invalid_argument("pi_tilde_closed_form_n1: u must be <= 0");
    if (u == 0.0) return 1.0;
    const double p = std::exp(u);
    return -(p / -std::expm1(u)) * u;  // log(1-q) = u
}

double v_star_closed_form_n1(double u) {
    if (!(u <= 0.0)) throw std::invalid_argument("v_star_closed_form_n1: u must be <= 0");
    if (u == 0.0) return 0.0;
    const double p = std::exp(u);
    return 0.5 * (p / -std::expm1(u)) * u * u;
}

double gap_n1(double u) {
    if (!(u < 0.0)) throw std::invalid_argument("gap_n1: u must be < 0");
    const double p = std::exp(u);
    return 0.5 * (p / -std::expm1(u)) * (-2.0 * u - u * u);
}

std::vector<double> pi_tilde_levels(double u, std::int64_t n_max) {
    if (!(u <= 0.0)) throw std::invalid_argument("pi_tilde_levels: u must be <= 0");
    if (n_max < 1) throw std::invalid_argument("pi_tilde_levels: n_max must be >= 1");
    const double p = std::exp(u);
    const double q = -std::expm1(u);
    std::vector<double> out(static_cast<std::size_t>(n_max));
    if (q <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }

    const double j1_exact = -u / q;
    const double log_ratio = u - std::log(q);  // ln(p/q)

    // Recursion q J_{n+1} + p J_n = 1/n. Upward amplifies errors by p/q per
    // step, so it is used only while the total blow-up stays ~10x.
    if (log_ratio * static_cast<double>(n_max) <= 2.3) {
        double j = j1_exact;
        out[0] = p * j;
        for (std::int64_t n = 1; n < n_max; ++n) {
            j = (1.0 / static_cast<double>(n) - p * j) / q;
            out[static_cast<std::size_t>(n)] = static_cast<double>(n + 1) * p * j;
        }
        return out;
    }

    // Downward Miller sweep: seed far above n_max with the 1/N asymptote,
    // contract the seed error by q/p per step, and validate against the
    // exact J_1. Buffer doubles on failure.
    std::int64_t buffer = static_cast<std::int64_t>(44.0 / log_ratio) + 32;
    for (int attempt = 0; attempt < 6; ++attempt) {
        const std::int64_t start = n_max + buffer;
        double j = 1.0 / static_cast<double>(start);
        for (std::int64_t m = start - 1; m >= 1; --m) {
            j = (1.0 / static_cast<double>(m) - q * j) / p;
            if (m <= n_max) out[static_cast<std::size_t>(m - 1)] = static_cast<double>(m) * p * j;
        }
        if (std::fabs(j - j1_exact) <= 1e-13 * std::max(1.0, std::fabs(j1_exact))) return out;
        buffer *= 2;
    }
    throw NumericalError("pi_tilde_levels: downward recursion failed to validate at u=" +
                         std::to_string(u));
}

}  // namespace pistop
