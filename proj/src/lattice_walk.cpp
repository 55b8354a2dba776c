#include "latept/lattice_walk.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <string>

#include "latept/errors.hpp"
#include "latept/rng.hpp"

namespace latept {

WalkTrace simulate_cover(int n, std::uint64_t stream_seed) {
    if (n < 2) throw domain_error("simulate_cover: n must be at least 2");
    WalkTrace t;
    t.n = n;
    t.first_hit.assign(static_cast<std::size_t>(n) * n, -1);
    t.visit_count.assign(static_cast<std::size_t>(n) * n, 0);

    std::mt19937_64 rng(stream_seed);
    double lnn = std::log(static_cast<double>(n));
    std::uint64_t cap = static_cast<std::uint64_t>(1e3 * (n * lnn) * (n * lnn)) + 1000;

    int x = 0, y = 0;
    std::int64_t remaining = static_cast<std::int64_t>(n) * n;
    t.first_hit[0] = 0;
    t.visit_count[0] = 1;
    --remaining;

    std::uint64_t step = 0;
    while (remaining > 0) {
        if (step >= cap)
            throw resource_error("simulate_cover: step cap hit at n=" + std::to_string(n) +
                                 " after " + std::to_string(step) + " steps");
        // Top two bits select the direction; mt19937_64's high bits are its
        // best-distributed ones.
        switch (rng() >> 62) {
            case 0: x = (x + 1 == n) ? 0 : x + 1; break;
            case 1: x = (x == 0) ? n - 1 : x - 1; break;
            case 2: y = (y + 1 == n) ? 0 : y + 1; break;
            default: y = (y == 0) ? n - 1 : y - 1; break;
        }
        ++step;
        std::size_t idx = static_cast<std::size_t>(y) * n + x;
        ++t.visit_count[idx];
        if (t.first_hit[idx] < 0) {
            t.first_hit[idx] = static_cast<std::int64_t>(step);
            --remaining;
        }
    }
    t.steps = step;
    t.cover_time = static_cast<std::int64_t>(step);
    return t;
}

namespace {

// Killed-walk linear system over an explicit transient site set inside a
// bounding box. Index map is a flat grid over [-extent, extent]^2.
struct KilledSystem {
    int extent = 0;
    std::vector<int> index;   // flat grid -> transient index, -1 if absorbing
    std::vector<Site> sites;  // transient index -> site
    Eigen::SparseMatrix<double> mat; // I - P restricted to transient sites
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

    int grid_at(int gx, int gy) const {
        if (gx < -extent || gx > extent || gy < -extent || gy > extent) return -1;
        return index[static_cast<std::size_t>(gy + extent) * (2 * extent + 1) + (gx + extent)];
    }
};

// Builds and factorizes I - P over the sites selected by `transient`. Fills
// a caller-owned struct because the factorization object is not movable.
template <typename Pred>
void build_system(KilledSystem& s, int extent, Pred transient) {
    s.extent = extent;
    int w = 2 * extent + 1;
    s.index.assign(static_cast<std::size_t>(w) * w, -1);
    for (int gy = -extent; gy <= extent; ++gy)
        for (int gx = -extent; gx <= extent; ++gx)
            if (transient(gx, gy)) {
                s.index[static_cast<std::size_t>(gy + extent) * w + (gx + extent)] =
                    static_cast<int>(s.sites.size());
                s.sites.push_back({gx, gy});
            }

    const int N = static_cast<int>(s.sites.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 5);
    for (int i = 0; i < N; ++i) {
        trip.emplace_back(i, i, 1.0);
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int nb = s.grid_at(s.sites[i].x + dx[d], s.sites[i].y + dy[d]);
            if (nb >= 0) trip.emplace_back(i, nb, -0.25);
        }
    }
    s.mat.resize(N, N);
    s.mat.setFromTriplets(trip.begin(), trip.end());
    s.lu.compute(s.mat);
    if (s.lu.info() != Eigen::Success)
        throw conditioning_error("killed-walk system: sparse factorization failed");
}

// Solve with one iterative-refinement pass; keeps the forward error near
// machine level, which the 1e-10 identity checks rely on.
Eigen::VectorXd solve_refined(const KilledSystem& s, const Eigen::VectorXd& b) {
    Eigen::VectorXd x = s.lu.solve(b);
    Eigen::VectorXd r = b - s.mat * x;
    x += s.lu.solve(r);
    return x;
}

bool in_disk(int n, Site p) {
    return static_cast<std::int64_t>(p.x) * p.x + static_cast<std::int64_t>(p.y) * p.y <
           static_cast<std::int64_t>(n) * n;
}

bool adjacent_to_disk(int n, Site p) {
    return in_disk(n, {p.x + 1, p.y}) || in_disk(n, {p.x - 1, p.y}) ||
           in_disk(n, {p.x, p.y + 1}) || in_disk(n, {p.x, p.y - 1});
}

} // namespace

std::vector<std::vector<double>> green_matrix(int n, const std::vector<Site>& points) {
    if (n < 2) throw domain_error("green_matrix: n must be at least 2");
    for (const Site& p : points)
        if (!in_disk(n, p))
            throw domain_error("green_matrix: point (" + std::to_string(p.x) + "," +
                               std::to_string(p.y) + ") outside D(0," + std::to_string(n) + ")");
    KilledSystem s;
    build_system(s, n, [n](int gx, int gy) { return in_disk(n, {gx, gy}); });

    const int j = static_cast<int>(points.size());
    std::vector<std::vector<double>> g(j, std::vector<double>(j, 0.0));
    for (int l = 0; l < j; ++l) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(s.sites.size());
        b[s.grid_at(points[l].x, points[l].y)] = 1.0;
        Eigen::VectorXd col = solve_refined(s, b);
        for (int i = 0; i < j; ++i) g[i][l] = col[s.grid_at(points[i].x, points[i].y)];
    }
    return g;
}

double green_exact(int n, Site x, Site y) {
    if (n < 2) throw domain_error("green_exact: n must be at least 2");
    bool x_in = in_disk(n, x), y_in = in_disk(n, y);
    if (!x_in && !adjacent_to_disk(n, x))
        throw domain_error("green_exact: x beyond the killed boundary of D(0," +
                           std::to_string(n) + ")");
    if (!y_in && !adjacent_to_disk(n, y))
        throw domain_error("green_exact: y beyond the killed boundary of D(0," +
                           std::to_string(n) + ")");
    if (!x_in || !y_in) return 0.0; // killed boundary ring
    if (x == y) return green_matrix(n, {x})[0][0];
    return green_matrix(n, {x, y})[0][1];
}

double escape_probability(int n) { return 1.0 / green_exact(n, {0, 0}, {0, 0}); }

double escape_probability_oracle(int n) {
    if (n < 2) throw domain_error("escape_probability_oracle: n must be at least 2");
    // Transient set: the disk minus the origin. h(z) = P^z(exit before
    // hitting 0); the escape probability is the one-step average from 0.
    KilledSystem s;
    build_system(
        s,
        n, [n](int gx, int gy) { return in_disk(n, {gx, gy}) && !(gx == 0 && gy == 0); });

    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.sites.size());
    for (int i = 0; i < static_cast<int>(s.sites.size()); ++i) {
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            Site nb{s.sites[i].x + dx[d], s.sites[i].y + dy[d]};
            if (!in_disk(n, nb)) b[i] += 0.25; // one step out of the disk
        }
    }
    Eigen::VectorXd h = solve_refined(s, b);

    double p = 0.0;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
        int idx = s.grid_at(dx[d], dy[d]);
        if (idx >= 0)
            p += 0.25 * h[idx];
        else if (!in_disk(n, {dx[d], dy[d]}))
            p += 0.25;
    }
    return p;
}

HitSolve hit_before_exit(Site x, int R) {
    if (R < 2) throw domain_error("hit_before_exit: R must be at least 2");
    double ax = std::hypot(static_cast<double>(x.x), static_cast<double>(x.y));
    if (!(ax > 0.0) || !in_disk(R, x))
        throw domain_error("hit_before_exit: need 0 < |x| < R");

    KilledSystem s;
    build_system(
        s,
        R, [R](int gx, int gy) { return in_disk(R, {gx, gy}) && !(gx == 0 && gy == 0); });
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.sites.size());
    for (int i = 0; i < static_cast<int>(s.sites.size()); ++i) {
        Site p = s.sites[i];
        if (std::abs(p.x) + std::abs(p.y) == 1) b[i] = 0.25; // neighbors of the origin
    }
    Eigen::VectorXd h = solve_refined(s, b);

    HitSolve out;
    out.exact = h[s.grid_at(x.x, x.y)];
    out.asymptotic = std::log(R / ax) / std::log(static_cast<double>(R));
    return out;
}

HitSolve annulus_hit(Site x, int r, int R) {
    if (r < 1 || R <= r) throw domain_error("annulus_hit: need 1 <= r < R");
    double ax = std::hypot(static_cast<double>(x.x), static_cast<double>(x.y));
    if (!(ax > static_cast<double>(r)) || !in_disk(R, x))
        throw domain_error("annulus_hit: need r < |x| < R");

    auto inside_inner = [r](int gx, int gy) {
        return static_cast<std::int64_t>(gx) * gx + static_cast<std::int64_t>(gy) * gy <=
               static_cast<std::int64_t>(r) * r;
    };
    KilledSystem s;
    build_system(s, R, [&](int gx, int gy) {
        return in_disk(R, {gx, gy}) && !inside_inner(gx, gy);
    });
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.sites.size());
    for (int i = 0; i < static_cast<int>(s.sites.size()); ++i) {
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d)
            if (inside_inner(s.sites[i].x + dx[d], s.sites[i].y + dy[d])) b[i] += 0.25;
    }
    Eigen::VectorXd h = solve_refined(s, b);

    HitSolve out;
    out.exact = h[s.grid_at(x.x, x.y)];
    out.asymptotic = std::log(R / ax) / std::log(static_cast<double>(R) / r);
    return out;
}

} // namespace latept
