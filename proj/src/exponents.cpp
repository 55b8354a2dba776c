#include "latept/exponents.hpp"

#include <cmath>

#include "latept/errors.hpp"

namespace latept {

namespace {

void validate(const ExponentParams& p) {
    if (p.j < 1) throw domain_error("exponent: j must be positive");
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw domain_error("exponent: alpha must lie in (0,1)");
    if (!(p.beta > 0.0 && p.beta < 1.0)) throw domain_error("exponent: beta must lie in (0,1)");
}

// Shared first branch of both exponents.
double first_branch(int j, double alpha, double beta) {
    double jm1 = static_cast<double>(j - 1);
    return 2.0 + 2.0 * jm1 * beta - 2.0 * j * alpha / ((1.0 - beta) * jm1 + 1.0);
}

} // namespace

ExponentValue rho_hat(const ExponentParams& p) {
    validate(p);
    if (p.j == 1) return {2.0 - 2.0 * p.alpha, Branch::first};
    double bstar = *crossover_beta(p.j, p.alpha);
    if (p.beta <= bstar) return {first_branch(p.j, p.alpha, p.beta), Branch::first};
    return {2.0 * (p.j + 1.0 - 2.0 * std::sqrt(p.j * p.alpha)), Branch::second};
}

ExponentValue rho(const ExponentParams& p) {
    validate(p);
    if (p.j == 1) return {2.0 - 2.0 * p.alpha, Branch::first};
    double cross = *rho_crossover_beta(p.j, p.alpha);
    if (p.beta <= cross) return {first_branch(p.j, p.alpha, p.beta), Branch::first};
    double u = 1.0 - std::sqrt(p.alpha);
    return {4.0 * p.j * u - 2.0 * p.j * u * u / p.beta, Branch::second};
}

// Crossovers may sit at or above beta = 1, so only beta > 0 is required here
// (the usual open-interval check would reject the crossover point itself).
namespace {
void validate_branch_point(const ExponentParams& p) {
    if (p.j < 1) throw domain_error("exponent: j must be positive");
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw domain_error("exponent: alpha must lie in (0,1)");
    if (!(p.beta > 0.0)) throw domain_error("exponent: beta must be positive");
}
} // namespace

double rho_hat_branch_value(const ExponentParams& p, Branch b) {
    validate_branch_point(p);
    if (b == Branch::first) return first_branch(p.j, p.alpha, p.beta);
    if (p.j < 2) throw domain_error("rho_hat_branch_value: second branch needs j >= 2");
    return 2.0 * (p.j + 1.0 - 2.0 * std::sqrt(p.j * p.alpha));
}

double rho_branch_value(const ExponentParams& p, Branch b) {
    validate_branch_point(p);
    if (b == Branch::first) return first_branch(p.j, p.alpha, p.beta);
    if (p.j < 2) throw domain_error("rho_branch_value: second branch needs j >= 2");
    double u = 1.0 - std::sqrt(p.alpha);
    return 4.0 * p.j * u - 2.0 * p.j * u * u / p.beta;
}

std::optional<double> crossover_beta(int j, double alpha) {
    if (j < 1) throw domain_error("crossover_beta: j must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("crossover_beta: alpha must lie in (0,1)");
    if (j == 1) return std::nullopt;
    return 1.0 + (1.0 - std::sqrt(j * alpha)) / static_cast<double>(j - 1);
}

std::optional<double> rho_crossover_beta(int j, double alpha) {
    if (j < 1) throw domain_error("rho_crossover_beta: j must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw domain_error("rho_crossover_beta: alpha must lie in (0,1)");
    if (j == 1) return std::nullopt;
    return j * (1.0 - std::sqrt(alpha)) / static_cast<double>(j - 1);
}

std::vector<MonotonicityEntry> monotonicity_table(const std::vector<double>& alpha_grid,
                                                  const std::vector<double>& beta_grid, int j_max) {
    if (j_max < 2) throw domain_error("monotonicity_table: j_max must be at least 2");
    std::vector<MonotonicityEntry> out;
    out.reserve(alpha_grid.size() * beta_grid.size() * (j_max - 1));
    for (double a : alpha_grid)
        for (double b : beta_grid)
            for (int j = 2; j <= j_max; ++j) {
                double hi = rho_hat({j, a, b}).value;
                double lo = rho_hat({j - 1, a, b}).value;
                out.push_back({j, a, b, hi - lo});
            }
    return out;
}

} // namespace latept
