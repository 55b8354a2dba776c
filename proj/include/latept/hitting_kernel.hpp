#pragma once

#include <Eigen/Dense>
#include <vector>

#include "latept/lattice_walk.hpp"

namespace latept {

// Finite walk domain for the j-point kernel: either the n x n torus (needs a
// nonempty kill region for absorption) or the disk D(0,n) with killed
// boundary (kill region may be empty there).
struct KernelDomain {
    enum class Kind { torus, disk };
    Kind kind = Kind::torus;
    int n = 0;
};

// j distinct marked points X, a witness y outside X, and a kill region D~
// disjoint from X and y.
struct PointConfig {
    std::vector<Site> points;
    Site witness;
    std::vector<Site> kill;
};

// All hitting events below use the first-return convention T = inf{m >= 1}:
// the start site is not absorbing at time 0.

// Green kernel Q: q_{i,l} = expected visits to x_l from x_i strictly before
// entering D~ or hitting y. Entries are exact linear-solve values; q_{i,i}>=1.
Eigen::MatrixXd build_q(const PointConfig& cfg, const KernelDomain& dom);

// Substochastic first-return matrix u_{i,l} = P^{x_i}(T_{x_l} = T_X < tau~ ^ T_y),
// one exact absorption solve per target.
Eigen::MatrixXd build_u(const PointConfig& cfg, const KernelDomain& dom);

// Max-norm error of the identity Q^{-1} = E - U.
double verify_inverse_identity(const Eigen::MatrixXd& q, const Eigen::MatrixXd& u);

// Free witness probabilities f_u = P^{x_u}(T_y = tau~ ^ T_y), ignoring X.
Eigen::VectorXd free_hit_probabilities(const PointConfig& cfg, const KernelDomain& dom);

// P^{x_u}(T_y = T_X ^ tau~ ^ T_y) through the kernel: the cofactor-weighted
// sum  sum_i cof(q_{u,i}) f_i / det(Q). (The common-factor form
// f_u * sum_i cof(q_{u,i}) / det(Q) is only asymptotically valid; see
// cofactor_hit_probability_factored.) Throws a conditioning error when Q is
// numerically singular.
double cofactor_hit_probability(const PointConfig& cfg, const KernelDomain& dom, int u);

// The common-factor variant; exact only when all f_i coincide (symmetric
// configurations), asymptotically valid otherwise. Exposed for comparison.
double cofactor_hit_probability_factored(const PointConfig& cfg, const KernelDomain& dom, int u);

// Ground-truth oracle: first-step absorption system over the full domain with
// absorbing set X u D~ u {y}; no kernel algebra involved.
double direct_hit_oracle(const PointConfig& cfg, const KernelDomain& dom, int u);

// Max residual of the last-exit decomposition
// f_i = sum_l q_{i,l} * P^{x_l}(T_y = T_X ^ tau~ ^ T_y), with both sides from
// independent solves.
double last_exit_decomposition_check(const PointConfig& cfg, const KernelDomain& dom);

// Everything the comparison tests need from one pair of factorizations:
// kernel matrices, both formula variants, the direct oracle, and the residuals
// of the two identities.
struct HitReport {
    Eigen::MatrixXd q;
    Eigen::MatrixXd u;
    Eigen::VectorXd f;        // free witness probabilities
    Eigen::VectorXd formula;  // cofactor-weighted values per start index
    Eigen::VectorXd factored; // common-factor variant per start index
    Eigen::VectorXd direct;   // absorption oracle per start index
    double inverse_error = 0.0;
    double simeq_residual = 0.0;
    double chi_q = 0.0; // sum of all entries of Q^{-1}
};

HitReport hit_probability_report(const PointConfig& cfg, const KernelDomain& dom);

// Discrete circle: sites at Euclidean distance in [radius, radius+1) from
// the center (torus metric on torus domains). The CLI's default kill region.
std::vector<Site> circle_sites(const KernelDomain& dom, Site center, double radius);

} // namespace latept
