#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>
#include <vector>

namespace latept {

// Equality tolerance for the class conditions (a)-(d). Condition (d) involves
// exact equalities that float noise would break, so comparisons go through
// this rather than operator==.
inline constexpr double tol_member = 1e-12;

// Default tolerance for linear-solve identities in tests and invariants.
inline constexpr double tol_solve = 1e-9;

// Symmetric j x j matrix with unit diagonal, off-diagonal entries in
// [0, 1-eta], and the ultrametric triangle condition
//   a_{i,l} >= min(a_{l,p}, a_{i,p})   for all distinct i,l,p.
// Construction does not validate the class conditions; is_member does.
struct UltraMatrix {
    int dim = 0;
    double eta = 0.0;
    Eigen::MatrixXd a;

    UltraMatrix() = default;
    UltraMatrix(int j, double eta_, Eigen::MatrixXd entries)
        : dim(j), eta(eta_), a(std::move(entries)) {}
};

// Recursive record of the maximal block decomposition. A leaf holds one
// index; a branch holds the separation level s (the minimal off-diagonal
// entry of its submatrix) and at least two children whose internal entries
// all exceed s.
struct DecompositionTree {
    int leaf = -1;                          // >= 0 iff this node is a leaf
    double separation = 0.0;                // meaningful on branches only
    std::vector<DecompositionTree> children;

    bool is_leaf() const { return leaf >= 0; }
    // Indices covered by this subtree, in traversal order.
    std::vector<int> indices() const;
};

// Solution of A y = 1 together with chi(A) = sum y_i.
struct ChiSolve {
    Eigen::VectorXd y;
    double chi = 0.0;
};

// Class conditions (a),(b),(c) within tol. Throws dimension_error on a
// non-square input; any other failure returns false.
bool is_member(const Eigen::MatrixXd& m, double eta, double tol = tol_member);

// Equidistant matrix A_r^{(j)}: unit diagonal, constant off-diagonal r.
// For j = 1 the parameter r is irrelevant and unvalidated.
UltraMatrix equidistant(int j, double r, double eta);

// Maximal decomposition: children are the classes of k ~ k' iff
// a_{k,k'} > s + tol where s is the minimal off-diagonal entry, recursively.
DecompositionTree maximal_decompose(const UltraMatrix& A);

// Composite of blocks under placements sigma_k (block-local index ->
// global index), all cross-block entries equal to s. Placements must
// partition {0,...,j-1}; s must not exceed any block's internal entries.
// A single block is accepted and returned unchanged.
UltraMatrix boxplus(const std::vector<UltraMatrix>& blocks,
                    const std::vector<std::vector<int>>& placements, double s);

// Two-block convenience: identity placements, first block on the leading
// indices.
UltraMatrix boxplus(const UltraMatrix& A1, const UltraMatrix& A2, double s);

// Tree functional Xi(A) = sum_k Xi(A_k) + (m-1)(1-s) over the maximal
// decomposition; 0 for j = 1. Permutation invariant.
double xi(const UltraMatrix& A);

// Solves A y = 1 and validates positivity (all y_i > 0) and the
// normalization condition 1 - s*sum(y) > 0 (weakened to >= 0 for j = 1),
// where s is the minimal entry of A.
ChiSolve chi(const UltraMatrix& A);

// Merge value g(s,b,c) = (b + c - 2sbc) / (1 - s^2 bc); equals
// chi(A_1 [+]_s A_2) when b, c are the block chi values. Requires a
// positive denominator.
double chi_merge(double s, double b, double c);

// Minimizer of chi over the Xi-level set {Xi = r}: value j/(j-r) attained
// by the equidistant matrix A^{(j)} with off-diagonal 1 - r/(j-1).
// Requires j >= 2 and (j-1)*eta <= r <= j-1 so the minimizer stays in class.
std::pair<double, UltraMatrix> chi_min(int j, double r, double eta);

// Max |chi(A) - chi(A~)| over `trials` random symmetric entrywise
// perturbations bounded by delta. Singular perturbations are counted and
// skipped, not fatal; *singular_out (optional) receives the count.
double perturb_stability_check(const UltraMatrix& A, double delta, int trials,
                               std::uint64_t seed, int* singular_out = nullptr);

// Random member of the level set Xi^{-1}({r}): random tree shape, levels
// rescaled to meet the constraint, rejection on class violations, falling
// back to the equidistant matrix when rejection stalls. Leaf labels are
// randomly permuted so the sampler covers every ordering.
UltraMatrix sample_xi_level(int j, double r, double eta, std::mt19937_64& rng);

} // namespace latept
