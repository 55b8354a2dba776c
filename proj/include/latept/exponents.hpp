#pragma once

#include <optional>
#include <vector>

namespace latept {

// Parameters of the tuple-count exponent formulas: tuple order j, lateness
// level alpha, cluster scale beta.
struct ExponentParams {
    int j = 1;
    double alpha = 0.5;
    double beta = 0.5;
};

enum class Branch { first, second };

struct ExponentValue {
    double value = 0.0;
    Branch branch = Branch::first;
};

// Expectation exponent rho_hat_j(alpha, beta):
//   first branch  2 + 2(j-1)beta - 2 j alpha / ((1-beta)(j-1) + 1)
//     when beta <= 1 + (1 - sqrt(j alpha)) / (j-1),
//   second branch 2 (j + 1 - 2 sqrt(j alpha)) otherwise.
// For j = 1 the crossover is undefined and the first branch (= 2 - 2 alpha)
// always applies.
ExponentValue rho_hat(const ExponentParams& p);

// In-probability exponent rho_j(alpha, beta): same first branch, crossover at
// j (1 - sqrt(alpha)) / (j-1), second branch
// 4 j (1 - sqrt(alpha)) - 2 j (1 - sqrt(alpha))^2 / beta. For j = 1 the
// crossover is undefined and the first branch always applies.
ExponentValue rho(const ExponentParams& p);

// Evaluates the named branch formula at p regardless of which side of the
// crossover p.beta falls on; lets tests probe continuity at the crossover
// itself. The second branch requires j >= 2.
double rho_hat_branch_value(const ExponentParams& p, Branch b);
double rho_branch_value(const ExponentParams& p, Branch b);

// Crossover cluster scale for rho_hat: 1 + (1 - sqrt(j alpha)) / (j-1).
// May exceed 1, in which case the second branch is unreachable on (0,1).
// Empty for j = 1.
std::optional<double> crossover_beta(int j, double alpha);

// Crossover cluster scale for rho: j (1 - sqrt(alpha)) / (j-1). Empty for
// j = 1.
std::optional<double> rho_crossover_beta(int j, double alpha);

struct MonotonicityEntry {
    int j;
    double alpha;
    double beta;
    double diff; // rho_hat_j - rho_hat_{j-1}
};

// Grid of successive differences rho_hat_j - rho_hat_{j-1} for j in
// {2,...,j_max}; all entries are expected to be >= -1e-12.
std::vector<MonotonicityEntry> monotonicity_table(const std::vector<double>& alpha_grid,
                                                  const std::vector<double>& beta_grid, int j_max);

} // namespace latept
