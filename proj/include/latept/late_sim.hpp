#pragma once

#include <cstdint>
#include <vector>

#include <latept/lattice_walk.hpp>

namespace latept {

// Sites whose first-hitting time is at least (4 alpha / pi) (n ln n)^2.
struct LateSet {
    int n = 0;
    double alpha = 0.0;
    std::vector<Site> sites;
};

LateSet late_set(const WalkTrace& trace, double alpha);

// Ordered j-tuples with every pairwise torus distance at most n^beta.
// `count` allows repeated points (d(x,x)=0 passes); `count_distinct` does not.
struct TupleCountResult {
    int j = 0;
    double beta = 0.0;
    std::uint64_t count = 0;
    std::uint64_t count_distinct = 0;
    bool bucketed = false;  // grid path taken (false: vacuous-constraint shortcut or tiny grid)
};

TupleCountResult count_tuples(const LateSet& ls, int j, double beta);

// Reference oracle: direct scan over all j-tuples, for cross-checking the
// bucketed path on small sets.
TupleCountResult count_tuples_naive(const LateSet& ls, int j, double beta,
                                    std::uint64_t budget = 400000000ULL);

struct ReplicaRow {
    int n = 0;
    int replica = 0;
    std::uint64_t late_count = 0;
    std::uint64_t tuple_count = 0;
    std::uint64_t tuple_count_distinct = 0;
    std::uint64_t seed = 0;  // per-replica stream seed actually used
};

struct SlopeSpec {
    double alpha = 0.0;
    double beta = 0.0;
    int j = 1;
};

// One cover run per (n, replica); every spec's late set and tuple counts are
// read off the same trace. Output: one row vector per spec, rows ordered by
// n-grid position then replica, byte-identical for a given master seed
// regardless of thread count.
std::vector<std::vector<ReplicaRow>> run_trace_batch(const std::vector<int>& n_grid,
                                                     int replicas,
                                                     std::uint64_t master_seed,
                                                     const std::vector<SlopeSpec>& specs,
                                                     int threads = 1);

struct ExponentFit {
    double slope = 0.0;
    double slope_se = 0.0;
    std::vector<ReplicaRow> table;
    std::vector<int> censored_n;  // grid points whose replica-mean count was zero
};

// Least-squares slope of log(mean tuple count) against log n from an
// existing replica table (rows ordered by n-grid position then replica, as
// run_trace_batch emits them).
ExponentFit fit_exponent_table(std::vector<ReplicaRow> table,
                               const std::vector<int>& n_grid, int replicas);

// Convenience: run a fresh batch for one spec and fit it.
ExponentFit estimate_exponent(double alpha, double beta, int j,
                              const std::vector<int>& n_grid, int replicas,
                              std::uint64_t seed, int threads = 1);

}  // namespace latept
