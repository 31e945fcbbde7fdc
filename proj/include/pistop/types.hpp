#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pistop {

/// Thrown when a numerical routine cannot meet its accuracy contract
/// (series truncation budget exhausted, cross-route disagreement,
/// solver divergence, runaway simulation).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Clock time t in (0, 1]. Arrivals live on this interval; t = 1 is the horizon.
struct ClockTime {
    double t;

    explicit ClockTime(double t_) : t(t_) {
        if (!(t > 0.0) || !(t <= 1.0))
            throw std::invalid_argument("ClockTime: t must lie in (0, 1], got " + std::to_string(t_));
    }

    double log_time() const { return std::log(t); }
};

/// Log time u = log t, so u <= 0 with u = 0 the horizon.
struct LogTime {
    double u;

    explicit LogTime(double u_) : u(u_) {
        if (!(u <= 0.0))
            throw std::invalid_argument("LogTime: u must be <= 0, got " + std::to_string(u_));
    }

    double clock_time() const { return std::exp(u); }
};

/// The pair (log time, arrivals observed so far) every conditional law is
/// built on. Nothing is prescribed before the first arrival, hence n >= 1.
struct ProcessState {
    double u;        // log time, <= 0
    std::int64_t n;  // arrivals observed so far, >= 1

    ProcessState(LogTime u_, std::int64_t n_) : ProcessState(u_.u, n_) {}

    ProcessState(double u_, std::int64_t n_) : u(u_), n(n_) {
        if (!(u <= 0.0))
            throw std::invalid_argument("ProcessState: u must be <= 0, got " + std::to_string(u_));
        if (n < 1)
            throw std::invalid_argument("ProcessState: n must be >= 1, got " + std::to_string(n_));
    }

    double clock_time() const { return std::exp(u); }
};

/// Law of the number of further arrivals after a threshold b, given n
/// arrivals by the threshold: success parameter p = exp(b).
struct NegBinomialLaw {
    std::int64_t n;  // >= 1
    double p;        // in (0, 1]

    NegBinomialLaw(std::int64_t n_, double p_) : n(n_), p(p_) {
        if (n < 1)
            throw std::invalid_argument("NegBinomialLaw: n must be >= 1");
        if (!(p > 0.0) || !(p > 0.0 && p <= 1.0))
            throw std::invalid_argument("NegBinomialLaw: p must lie in (0, 1], got " + std::to_string(p_));
    }

    double q() const { return 1.0 - p; }
    double mean() const { return static_cast<double>(n) * (1.0 - p) / p; }
};

/// Accuracy contract for series and quadrature evaluation. Every infinite
/// sum is cut by a proven tail envelope below abs_tol, never by a fixed
/// term count; max_terms is the hard budget before giving up loudly.
struct Tolerance {
    double abs_tol = 1e-12;
    std::int64_t max_terms = 10'000'000;

    Tolerance() = default;
    Tolerance(double abs_tol_, std::int64_t max_terms_ = 10'000'000)
        : abs_tol(abs_tol_), max_terms(max_terms_) {
        if (!(abs_tol > 0.0))
            throw std::invalid_argument("Tolerance: abs_tol must be > 0");
        if (max_terms < 1)
            throw std::invalid_argument("Tolerance: max_terms must be >= 1");
    }
};

}  // namespace pistop
