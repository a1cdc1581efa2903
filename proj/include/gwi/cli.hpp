#pragma once

// Scenario-driven runner behind the gwi executable.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gwi {

enum class Command { classify, propagate, simulate, report, limits };
enum class Format { csv, json };

// Unset fields fall back to the scenario's run defaults.
struct RunConfig {
    std::string scenario;
    Command command = Command::classify;
    std::optional<std::size_t> n;
    std::vector<std::size_t> n_grid;
    std::optional<std::size_t> K;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::vector<double> x_grid;
    std::optional<double> tol;
    std::string out; // empty: write to the output stream
    Format format = Format::csv;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int parse = 2;
inline constexpr int validation = 3;
inline constexpr int numeric = 4;
inline constexpr int wrong_regime = 5;
} // namespace exit_code

// Runs one command. Tables go to config.out (or out); warnings and error
// diagnostics go to err. Returns one of the exit codes above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::ostream& err);

} // namespace gwi
