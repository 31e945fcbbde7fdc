#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pistop/types.hpp"

namespace pistop {

/// How the infinite system is cut at n_max. classical_limit substitutes the
/// large-population stop-on-next-record value -t log t for level n_max + 1;
/// frozen reuses level n_max. Both wash out for n well below n_max, which is
/// asserted by tests, not assumed.
enum class Closure { classical_limit, frozen };

struct SolverConfig {
    double u_min = -4.0;
    double step = 1e-4;
    std::int64_t n_max = 400;
    Closure closure = Closure::classical_limit;

    void validate() const;
    /// Number of steps K, with u_min snapped to -K * step.
    std::int64_t steps() const;
};

/// Finite-difference residual of the integrated table against the ODE right
/// hand side, sampled away from the stop-term kinks.
struct ResidualReport {
    double max_residual = 0.0;
    double tolerance = 0.0;
    double worst_u = 0.0;
    std::int64_t worst_n = 0;
    bool ok = true;
};

/// Grid of value functions V_n(u) on u in [u_min, 0], n = 1..n_max.
/// V_n(0) = 0 is set exactly; interior slices come from the backward sweep.
class ValueTable {
public:
    ValueTable(SolverConfig config, std::vector<double> grid, std::vector<double> values);

    const SolverConfig& config() const { return config_; }
    const std::vector<double>& grid() const { return grid_; }
    std::size_t slices() const { return grid_.size(); }
    std::int64_t n_max() const { return config_.n_max; }

    /// V_n at grid slice i (grid ascends from u_min to 0).
    double value(std::int64_t n, std::size_t i) const {
        return values_[i * static_cast<std::size_t>(config_.n_max) +
                       static_cast<std::size_t>(n - 1)];
    }
    /// V_n at arbitrary u in [u_min, 0], linear between grid nodes.
    double value_at(std::int64_t n, double u) const;

    /// Grid index with grid[i] == u up to rounding; throws if off-grid.
    std::size_t index_of(double u) const;

    const ResidualReport& residual() const { return residual_; }
    void set_residual(const ResidualReport& r) { residual_ = r; }

private:
    SolverConfig config_;
    std::vector<double> grid_;
    std::vector<double> values_;  // slice-major: [slice][n-1]
    ResidualReport residual_;
};

/// Optimal stopping frontier: for each n the infimum u*_n of log times at
/// which stopping on a fresh record beats continuing.
struct StoppingBoundary {
    std::vector<double> thresholds;      // [n-1] -> u*_n; NaN when absent
    std::vector<std::int64_t> no_crossing;  // n's with no sign change in [u_min, 0)
    double resolution = 1e-6;

    double threshold(std::int64_t n) const { return thresholds[static_cast<std::size_t>(n - 1)]; }
};

/// Integrates the coupled backward system
///   dV_n/du = -[ n (V_{n+1} - V_n) + (n/(n+1)) (pi_{n+1}(u) - V_{n+1})^+ ]
/// from V_n(0) = 0 down to u_min with fixed-step classical RK4. pi values at
/// the RK stage points are exact (recursion on the half-step lattice), so no
/// interpolation error enters the sweep. Raises NumericalError on non-finite
/// values; the residual report flags convergence failure.
ValueTable solve_optimal(const SolverConfig& config);

/// Value of the fixed-threshold-b policy by the same sweep: the stop term is
/// active, without the positive part, exactly on steps inside [b, 0], and the
/// classical closure is likewise gated (never-stop territory closes at 0).
/// b must lie on a grid node.
ValueTable solve_policy(double threshold_b, const SolverConfig& config);

/// Locates, per n, the sign change of pi_n(u) - V_n(u) by grid scan plus
/// bisection on the linear interpolants, refined to `resolution`.
StoppingBoundary extract_boundary(const ValueTable& table, double resolution = 1e-6);

}  // namespace pistop
