#pragma once

// Scenario files: flat "dotted.key = value" lines, '#' comments.
//
//   name = thm1_poisson
//   offspring.family = bernoulli            # bernoulli|quadratic|linear_fractional|custom
//   offspring.rho.c = 1                     # rho_n = 1 - c (n + n0)^-gamma
//   offspring.rho.gamma = 1
//   offspring.rho.n0 = 1
//   offspring.nu = 0
//   offspring.table = 0.5,0.5;0.4,0.6       # custom: one PMF per generation
//   immigration.family = bernoulli          # bernoulli|poisson|custom
//   immigration.m1.rule = proportional      # constant|proportional|power_sum
//   immigration.m1.a = 2
//   immigration.m1.terms = 1:-2,1:-3        # power_sum: coef:exponent pairs
//   immigration.weight.rule = proportional  # custom: weight w_n of H_n = 1 - w_n + w_n H
//   immigration.base = 0,0,1                # custom: PMF of H
//   limits.lambda = 2
//   limits.nu = 0
//   limits.divergent = true
//   limits.lambda_l.rule = list             # none|list|log2|negative_binomial|geometric
//   limits.lambda_l.values = 2,1,0
//   limits.lambda_l.lambda / .nu / .c
//   run.n, run.K (0: automatic), run.reps, run.seed, run.n_grid, run.x_grid, run.tol

#include <filesystem>
#include <string>
#include <string_view>

#include "gwi/models.hpp"

namespace gwi {

// Parses and validates. ParseError carries "source:line: key: problem";
// ValidationError lists every violated invariant.
ScenarioSpec parse_scenario(std::string_view text, std::string_view source = "<scenario>");
ScenarioSpec load_scenario(const std::filesystem::path& path);

// Inverse of parse_scenario: parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

} // namespace gwi
