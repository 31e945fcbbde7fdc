#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pistop/cli.hpp"

using pistop::SolverConfig;
namespace cli = pistop::cli;

int main(int argc, char** argv) {
    CLI::App app{"record-stopping on proportional-increment arrival processes: "
                 "exact values, HJB solver, Monte Carlo validation"};
    app.require_subcommand(1);

    cli::RunConfig rc;
    rc.seed = cli::default_seed();
    app.add_option("--out", rc.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", rc.seed, "RNG seed (PI_STOP_SEED overrides the default)")
        ->capture_default_str();
    app.add_option("--tol", rc.tol, "absolute series tolerance")->capture_default_str();

    // figure1
    auto* fig = app.add_subcommand("figure1",
                                   "gap between stopping on a record now and the 1/e rule at u = -1");
    fig->fallthrough();
    std::int64_t fig_n_max = 100;
    fig->add_option("--n-max", fig_n_max, "largest count")->capture_default_str();

    // values
    auto* val = app.add_subcommand("values", "tabulate exact win probabilities");
    val->fallthrough();
    double val_u = -1.0;
    std::string val_n_list = "1..10";
    std::string val_mode = "both";
    val->add_option("--u", val_u, "log time (< 0)")->capture_default_str();
    val->add_option("--n-list", val_n_list, "counts, e.g. 1,2,5 or 1..100")->capture_default_str();
    val->add_option("--mode", val_mode, "pi | vstar | both")->capture_default_str();

    // hjb
    auto* hjb = app.add_subcommand("hjb", "solve the optimal-value ODE system and extract the boundary");
    hjb->fallthrough();
    SolverConfig cfg;
    std::string closure = "classical";
    std::int64_t stride = 0;
    hjb->add_option("--u-min", cfg.u_min, "left end of the log-time grid")->capture_default_str();
    hjb->add_option("--step", cfg.step, "grid step")->capture_default_str();
    hjb->add_option("--n-max", cfg.n_max, "system truncation level")->capture_default_str();
    hjb->add_option("--closure", closure, "classical | frozen")->capture_default_str();
    hjb->add_option("--csv-stride", stride, "write every k-th slice (0 = about 0.01 in u)")
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of a strategy's win probability");
    sim->fallthrough();
    cli::SimulateSpec spec;
    sim->add_option("--strategy", spec.strategy,
                    "one-over-e | threshold | never | first-record | boundary")
        ->required();
    sim->add_option("--b", spec.threshold_b, "threshold for --strategy threshold")
        ->capture_default_str();
    sim->add_option("--boundary-csv", spec.boundary_csv, "boundary.csv from a prior hjb run");
    sim->add_option("--u", spec.u, "launch log time")->capture_default_str();
    sim->add_option("--n", spec.n, "launch count")->capture_default_str();
    sim->add_option("--trials", spec.trials, "number of trials")->capture_default_str();

    // verify
    app.add_subcommand("verify", "run the analytic invariant suite and write verify.json")->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fig->parsed()) return cli::cmd_figure1(fig_n_max, rc);
        if (val->parsed()) {
            cli::ValuesMode mode;
            if (val_mode == "pi") mode = cli::ValuesMode::pi;
            else if (val_mode == "vstar") mode = cli::ValuesMode::vstar;
            else if (val_mode == "both") mode = cli::ValuesMode::both;
            else throw std::invalid_argument("values: --mode must be pi, vstar, or both");
            return cli::cmd_values(val_u, cli::parse_n_list(val_n_list), mode, rc);
        }
        if (hjb->parsed()) {
            if (closure == "classical") cfg.closure = pistop::Closure::classical_limit;
            else if (closure == "frozen") cfg.closure = pistop::Closure::frozen;
            else throw std::invalid_argument("hjb: --closure must be classical or frozen");
            return cli::cmd_hjb(cfg, stride, rc);
        }
        if (sim->parsed()) return cli::cmd_simulate(spec, rc);
        return cli::cmd_verify(rc);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
