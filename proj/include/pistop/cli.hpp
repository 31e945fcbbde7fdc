#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pistop/hjb_solver.hpp"
#include "pistop/types.hpp"

namespace pistop {
namespace cli {

/// Flags shared by every subcommand. Output files are written atomically and
/// identical invocations produce byte-identical CSV.
struct RunConfig {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double tol = 1e-12;
};

/// Seed default: PI_STOP_SEED from the environment when set, else 20201107.
std::uint64_t default_seed();

/// Parses "1,4,10-20" / "10..20" style count lists.
std::vector<std::int64_t> parse_n_list(const std::string& spec);

enum class ValuesMode { pi, vstar, both };

/// figure1.csv (n, pi_tilde, v_star, gap) and figure1.svg for n = 1..n_max at
/// u = -1. Exits nonzero if any gap is <= 0; whether the gap sequence is
/// strictly decreasing is checked and reported, not an exit criterion.
int cmd_figure1(std::int64_t n_max, const RunConfig& rc);

/// values.csv tabulating pi_tilde / v_star with their truncation bounds at
/// log time u (< 0) for the requested counts.
int cmd_values(double u, const std::vector<std::int64_t>& n_list, ValuesMode mode,
               const RunConfig& rc);

/// Solves the system, writes values.csv (decimated by csv_stride; 0 picks a
/// stride near 0.01 in u) and boundary.csv, and prints a non-optimality
/// witness (n, u) with u < -1 and pi_tilde_n(u) > V_n(u) when one exists.
int cmd_hjb(const SolverConfig& config, std::int64_t csv_stride, const RunConfig& rc);

struct SimulateSpec {
    std::string strategy;      // one-over-e | threshold | never | first-record | boundary
    double threshold_b = -1.0; // strategy == threshold
    std::string boundary_csv;  // strategy == boundary
    double u = -1.0;
    std::int64_t n = 1;
    std::int64_t trials = 1'000'000;
};

/// estimate.csv (strategy, u, n, trials, seed, mean, stderr); prints the
/// z-score against the exact value when one exists.
int cmd_simulate(const SimulateSpec& spec, const RunConfig& rc);

/// Runs the analytic invariant suite, prints one line per check, writes
/// verify.json, and exits 0 iff everything passes.
int cmd_verify(const RunConfig& rc);

}  // namespace cli
}  // namespace pistop
