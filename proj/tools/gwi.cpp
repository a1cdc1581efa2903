#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "gwi/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Galton-Watson processes with immigration: limit laws and convergence diagnostics"};
    gwi::RunConfig cfg;

    const std::map<std::string, gwi::Command> commands{{"classify", gwi::Command::classify},
                                                       {"propagate", gwi::Command::propagate},
                                                       {"simulate", gwi::Command::simulate},
                                                       {"report", gwi::Command::report},
                                                       {"limits", gwi::Command::limits}};
    const std::map<std::string, gwi::Format> formats{{"csv", gwi::Format::csv}, {"json", gwi::Format::json}};

    std::size_t n = 0, K = 0, reps = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    app.add_option("--scenario", cfg.scenario, "scenario file")->required();
    app.add_option("--command", cfg.command, "classify|propagate|simulate|report|limits")
        ->required()
        ->transform(CLI::CheckedTransformer(commands, CLI::ignore_case).description(""))
        ->type_name("NAME");
    auto* n_opt = app.add_option("--n", n, "generation");
    app.add_option("--n-grid", cfg.n_grid, "comma-separated generations")->delimiter(',');
    auto* k_opt = app.add_option("--K", K, "truncation length")->check(CLI::PositiveNumber);
    auto* reps_opt = app.add_option("--reps", reps, "Monte Carlo trajectories")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_option("--x-grid", cfg.x_grid, "comma-separated points in [0, 1]")->delimiter(',');
    auto* tol_opt = app.add_option("--tol", tol, "tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--format", cfg.format, "csv|json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case).description(""))
        ->type_name("FORMAT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : gwi::exit_code::parse;
    }
    if (*n_opt)
        cfg.n = n;
    if (*k_opt)
        cfg.K = K;
    if (*reps_opt)
        cfg.reps = reps;
    if (*seed_opt)
        cfg.seed = seed;
    if (*tol_opt)
        cfg.tol = tol;
    return gwi::run(cfg, std::cout, std::cerr);
}
