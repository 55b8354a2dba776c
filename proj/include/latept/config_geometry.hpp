#pragma once

#include <cstdint>
#include <vector>

#include <latept/lattice_walk.hpp>
#include <latept/ultrametric.hpp>

namespace latept {

// Point-configuration class: a j-tuple belongs when every pairwise distance
// d(x_i, x_l) lies in [lower(i,l), upper(i,l)]. Diagonals are ignored.
struct ConfigClass {
    int j = 0;
    double n = 0.0;  // scale the bounds were derived at
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
};

// Distance-window class derived from an ultrametric matrix at scale n:
// lower = 2^{-j} n^{1-a_il}, upper = 2^{j} n^{1-a_il+delta}.
struct EHatClass {
    UltraMatrix A;
    double delta = 0.0;
    double n = 0.0;
    ConfigClass bounds() const;
};

// Pairwise distances of a tuple; torus metric on Z_m^2 when torus_n = m > 0,
// plane metric when torus_n = 0.
Eigen::MatrixXd pair_distances(const std::vector<Site>& xs, int torus_n = 0);

bool in_class(const std::vector<Site>& xs, const ConfigClass& cls, int torus_n = 0);
bool in_class(const std::vector<Site>& xs, const EHatClass& cls, int torus_n = 0);

// Constructive assignment: returns a valid ultrametric member A with
// off-diagonals in [eta, 1-eta] such that the tuple lies in the delta-window
// class of A at scale n. Recurses on the closest pair, halving delta per
// level; the fresh entry for the closest pair at distance d is
// min(1 - log d / log n + delta, 1 - eta).
// Preconditions: pairwise distances within [n^eta, n^beta] (domain error) and
// 2^{j-1} <= n^{delta/2} (scale error).
UltraMatrix assign_matrix(const std::vector<Site>& xs, double n, double delta,
                          double beta, double eta, int torus_n = 0);
UltraMatrix assign_from_distances(const Eigen::MatrixXd& dist, double n, double delta,
                                  double beta, double eta);

// Upper approximation of the infimum of chi over matrices whose window class
// contains the tuple: chi of the constructed matrix, then improved by
// coordinate ascent on entries (raising an off-diagonal never breaks
// membership when capped by the window and by equal-entry pinning, and chi is
// entrywise decreasing). `value` <= `unrefined` always.
struct CostBound {
    double value = 1.0;
    double unrefined = 1.0;
    UltraMatrix matrix;  // refined member realizing `value`
};

double h_delta(const std::vector<Site>& xs, double n, double delta,
               double beta, double eta, int torus_n = 0);
CostBound h_delta_detail(const std::vector<Site>& xs, double n, double delta,
                         double beta, double eta, int torus_n = 0);
CostBound h_delta_from_distances(const Eigen::MatrixXd& dist, double n, double delta,
                                 double beta, double eta);

// Exact number of ordered j-tuples on the n x n torus lying in the class.
// Fixes x1 at the origin and multiplies by n^2. Throws a resource error
// naming the partial count if the node budget is exhausted.
std::uint64_t enumerate_class_count(const ConfigClass& cls, int n,
                                    std::uint64_t budget = 200000000ULL);
std::uint64_t enumerate_class_count(const EHatClass& cls, int n,
                                    std::uint64_t budget = 200000000ULL);

// Exact evaluation of sum over tuples with pairwise distances in
// [n^eta, n^beta] of n^{-2 alpha h_delta(tuple)}, reported as a log_n
// exponent next to the first-moment exponent rho_hat_j(alpha, beta).
struct WeightedSumCheck {
    double lhs_exponent = 0.0;
    double rho_hat_value = 0.0;
    double sum = 0.0;
    std::uint64_t tuples = 0;  // ordered tuples with x1 fixed at the origin
};

WeightedSumCheck weighted_sum_bound_check(int n, double alpha, double beta, double eta,
                                          double delta, int j,
                                          std::uint64_t budget = 200000000ULL);

}  // namespace latept
