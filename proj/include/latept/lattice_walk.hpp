#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace latept {

// Lattice site; torus contexts keep coordinates reduced to [0, n).
struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(const Site& a, const Site& b) { return a.x == b.x && a.y == b.y; }
};

// Squared Euclidean distance in the plane.
inline std::int64_t plane_dist2(Site a, Site b) {
    std::int64_t dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Squared Euclidean distance on the n-torus (per-axis shortest representative).
inline std::int64_t torus_dist2(Site a, Site b, int n) {
    std::int64_t dx = std::abs(a.x - b.x) % n;
    std::int64_t dy = std::abs(a.y - b.y) % n;
    dx = std::min(dx, n - dx);
    dy = std::min(dy, n - dy);
    return dx * dx + dy * dy;
}

// One covering run of the simple random walk on the n x n torus from (0,0):
// first-hitting time and visit count per site, flat-indexed as y*n + x.
struct WalkTrace {
    int n = 0;
    std::uint64_t steps = 0;
    std::vector<std::int64_t> first_hit;
    std::vector<std::uint32_t> visit_count;
    std::int64_t cover_time = 0;
};

// Runs a 4-neighbor simple random walk from (0,0) until every site has been
// visited. first_hit[start] = 0 and visit counts include time 0. A step cap
// of 10^3 (n ln n)^2 aborts with a resource error (never reached in practice).
WalkTrace simulate_cover(int n, std::uint64_t stream_seed);

// Expected visits to y started at x before exiting the disk D(0,n) = {|z|<n}
// on the plane. Arguments in the killed boundary ring (outside D, adjacent to
// it) give 0; anything farther out is a domain error.
double green_exact(int n, Site x, Site y);

// Full Green matrix G_n(x_i, x_l) over a point set in D(0,n); one
// factorization, one solve per column.
std::vector<std::vector<double>> green_matrix(int n, const std::vector<Site>& points);

// Escape probability P(tau_n < T_0) = 1 / G_n(0,0), computed via green_exact.
double escape_probability(int n);

// Independent oracle for the same probability: absorption solve on the disk
// with {0} and the exterior absorbing, one-step decomposition at the origin.
// Shares no factorization with green_exact.
double escape_probability_oracle(int n);

struct HitSolve {
    double exact = 0.0;      // absorption solve value
    double asymptotic = 0.0; // leading-order comparison value
};

// P^x(T_0 < tau_R): probability of reaching the origin before exiting
// D(0,R), with the comparison value log(R/|x|)/log(R). Requires 0 < |x| < R.
HitSolve hit_before_exit(Site x, int R);

// P^x(tau_r < tau_R): probability of entering {|z| <= r} before exiting
// {|z| < R}, with the comparison value log(R/|x|)/log(R/r). Requires
// r < |x| < R.
HitSolve annulus_hit(Site x, int r, int R);

} // namespace latept
