#include <latept/late_sim.hpp>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <latept/errors.hpp>
#include <latept/rng.hpp>

namespace latept {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_complete(const WalkTrace& trace) {
    const std::size_t cells = static_cast<std::size_t>(trace.n) * trace.n;
    if (trace.n < 2 || trace.first_hit.size() != cells)
        throw domain_error("late_set: trace is not a completed cover run");
    for (const std::int64_t fh : trace.first_hit)
        if (fh < 0) throw domain_error("late_set: trace has unvisited sites");
}

// Multiplication saturating at UINT64_MAX, for the vacuous-constraint
// shortcut where |sites|^j can exceed 64 bits.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

// Ordered-tuple DFS from a fixed first point over a candidate list that is
// guaranteed to contain every site within the cutoff of the anchor.
struct TupleDfs {
    const std::vector<Site>* cand = nullptr;
    int n = 0;
    int j = 1;
    double cut2 = 0.0;
    std::uint64_t count = 0;
    std::uint64_t distinct = 0;
    std::uint64_t nodes = 0;
    std::uint64_t budget = std::numeric_limits<std::uint64_t>::max();
    std::vector<Site> pts;

    void run(Site anchor) {
        pts.assign(static_cast<std::size_t>(j), anchor);
        walk(1, false);
    }

    void walk(int k, bool dup) {
        if (k == j) {
            ++count;
            if (!dup) ++distinct;
            return;
        }
        for (const Site& c : *cand) {
            if (++nodes > budget)
                throw resource_error("tuple scan budget exhausted");
            bool ok = true;
            bool dup_here = dup;
            for (int i = 0; i < k && ok; ++i) {
                if (static_cast<double>(torus_dist2(pts[i], c, n)) > cut2)
                    ok = false;
                else if (pts[i] == c)
                    dup_here = true;
            }
            if (!ok) continue;
            pts[k] = c;
            walk(k + 1, dup_here);
        }
    }
};

TupleCountResult count_core(const LateSet& ls, int j, double beta, bool bucket,
                            std::uint64_t budget) {
    if (j < 1) throw domain_error("count_tuples: j must be at least 1");
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw domain_error("count_tuples: beta must lie in (0, 1]");
    if (ls.n < 2) throw domain_error("count_tuples: set lacks a valid torus side");

    TupleCountResult out;
    out.j = j;
    out.beta = beta;
    const std::uint64_t m = ls.sites.size();
    if (j == 1) {
        out.count = out.count_distinct = m;
        return out;
    }
    if (m == 0) return out;

    const double w = std::pow(static_cast<double>(ls.n), beta);
    const double cut2 = w * w * (1.0 + 1e-12) + 1e-9;

    // Cutoff at or past the torus diameter makes the constraint vacuous.
    const double diam2 = 0.5 * static_cast<double>(ls.n) * static_cast<double>(ls.n);
    if (cut2 >= diam2) {
        std::uint64_t total = 1, dtotal = 1;
        for (int t = 0; t < j; ++t) {
            total = sat_mul(total, m);
            dtotal = sat_mul(dtotal, m > static_cast<std::uint64_t>(t)
                                         ? m - static_cast<std::uint64_t>(t)
                                         : 0);
        }
        out.count = total;
        out.count_distinct = dtotal;
        return out;
    }

    TupleDfs dfs;
    dfs.n = ls.n;
    dfs.j = j;
    dfs.cut2 = cut2;
    dfs.budget = budget;

    const int c = bucket ? static_cast<int>(static_cast<double>(ls.n) / w) : 0;
    if (!bucket || c < 3) {
        dfs.cand = &ls.sites;
        for (const Site& a : ls.sites) dfs.run(a);
    } else {
        out.bucketed = true;
        // Cell side n/c >= w, so the 3x3 neighborhood of the anchor's cell
        // contains every site within w (all later points must be within w of
        // the anchor itself).
        std::vector<std::vector<Site>> cells(static_cast<std::size_t>(c) * c);
        auto cell_of = [&](Site s) {
            const int cx = static_cast<int>(static_cast<std::int64_t>(s.x) * c / ls.n);
            const int cy = static_cast<int>(static_cast<std::int64_t>(s.y) * c / ls.n);
            return std::pair<int, int>{cx, cy};
        };
        for (const Site& s : ls.sites) {
            const auto [cx, cy] = cell_of(s);
            cells[static_cast<std::size_t>(cy) * c + cx].push_back(s);
        }
        std::vector<Site> nearby;
        dfs.cand = &nearby;
        for (const Site& a : ls.sites) {
            const auto [cx, cy] = cell_of(a);
            nearby.clear();
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int gx = (cx + dx + c) % c;
                    const int gy = (cy + dy + c) % c;
                    const auto& bin = cells[static_cast<std::size_t>(gy) * c + gx];
                    nearby.insert(nearby.end(), bin.begin(), bin.end());
                }
            dfs.run(a);
        }
    }
    out.count = dfs.count;
    out.count_distinct = dfs.distinct;
    return out;
}

}  // namespace

LateSet late_set(const WalkTrace& trace, double alpha) {
    require_complete(trace);
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw domain_error("late_set: alpha must be a nonnegative real");
    LateSet out;
    out.n = trace.n;
    out.alpha = alpha;
    const double lnn = std::log(static_cast<double>(trace.n));
    const double threshold =
        (4.0 * alpha / kPi) * (trace.n * lnn) * (trace.n * lnn);
    const std::size_t cells = trace.first_hit.size();
    for (std::size_t i = 0; i < cells; ++i)
        if (static_cast<double>(trace.first_hit[i]) >= threshold)
            out.sites.push_back(Site{static_cast<int>(i % trace.n),
                                     static_cast<int>(i / trace.n)});
    return out;
}

TupleCountResult count_tuples(const LateSet& ls, int j, double beta) {
    return count_core(ls, j, beta, true, std::numeric_limits<std::uint64_t>::max());
}

TupleCountResult count_tuples_naive(const LateSet& ls, int j, double beta,
                                    std::uint64_t budget) {
    return count_core(ls, j, beta, false, budget);
}

std::vector<std::vector<ReplicaRow>> run_trace_batch(const std::vector<int>& n_grid,
                                                     int replicas,
                                                     std::uint64_t master_seed,
                                                     const std::vector<SlopeSpec>& specs,
                                                     int threads) {
    if (n_grid.empty()) throw domain_error("run_trace_batch: empty n grid");
    for (const int n : n_grid)
        if (n < 2) throw domain_error("run_trace_batch: torus sides must be at least 2");
    if (replicas < 1) throw domain_error("run_trace_batch: need at least one replica");
    if (specs.empty()) throw domain_error("run_trace_batch: no specs given");
    for (const SlopeSpec& s : specs) {
        if (s.j < 1) throw domain_error("run_trace_batch: j must be at least 1");
        if (!(s.alpha >= 0.0)) throw domain_error("run_trace_batch: alpha must be nonnegative");
        if (!(s.beta > 0.0) || !(s.beta <= 1.0))
            throw domain_error("run_trace_batch: beta must lie in (0, 1]");
    }

    const std::size_t jobs = n_grid.size() * static_cast<std::size_t>(replicas);
    std::vector<std::vector<ReplicaRow>> out(specs.size(),
                                             std::vector<ReplicaRow>(jobs));

    std::atomic<std::size_t> cursor{0};
    std::mutex fail_mutex;
    std::exception_ptr failure;

    auto worker = [&]() {
        try {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= jobs) break;
                {
                    std::lock_guard<std::mutex> lock(fail_mutex);
                    if (failure) break;
                }
                const std::size_t ni = i / static_cast<std::size_t>(replicas);
                const int r = static_cast<int>(i % static_cast<std::size_t>(replicas));
                const int n = n_grid[ni];
                const std::uint64_t seed =
                    derive_seed(master_seed, static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(r));
                const WalkTrace trace = simulate_cover(n, seed);
                for (std::size_t s = 0; s < specs.size(); ++s) {
                    const LateSet ls = late_set(trace, specs[s].alpha);
                    const TupleCountResult tc = count_tuples(ls, specs[s].j, specs[s].beta);
                    ReplicaRow& row = out[s][i];
                    row.n = n;
                    row.replica = r;
                    row.late_count = ls.sites.size();
                    row.tuple_count = tc.count;
                    row.tuple_count_distinct = tc.count_distinct;
                    row.seed = seed;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(fail_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    const int nthreads =
        std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

ExponentFit fit_exponent_table(std::vector<ReplicaRow> table,
                               const std::vector<int>& n_grid, int replicas) {
    if (n_grid.size() < 3) throw domain_error("exponent fit: need at least 3 grid points");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw domain_error("exponent fit: n grid must be strictly ascending");
    if (replicas < 1 || table.size() != n_grid.size() * static_cast<std::size_t>(replicas))
        throw dimension_error("exponent fit: table size does not match grid and replicas");

    ExponentFit fit;
    fit.table = std::move(table);

    std::vector<double> lx, ly;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        double mean = 0.0;
        for (int r = 0; r < replicas; ++r)
            mean += static_cast<double>(
                fit.table[ni * static_cast<std::size_t>(replicas) + r].tuple_count);
        mean /= static_cast<double>(replicas);
        if (mean > 0.0) {
            lx.push_back(std::log(static_cast<double>(n_grid[ni])));
            ly.push_back(std::log(mean));
        } else {
            fit.censored_n.push_back(n_grid[ni]);
        }
    }

    const std::size_t k = lx.size();
    if (k < 2) {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.slope_se = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double resid = ly[i] - my - fit.slope * (lx[i] - mx);
        ssr += resid * resid;
    }
    fit.slope_se = k > 2 ? std::sqrt(ssr / static_cast<double>(k - 2) / sxx) : 0.0;
    return fit;
}

ExponentFit estimate_exponent(double alpha, double beta, int j,
                              const std::vector<int>& n_grid, int replicas,
                              std::uint64_t seed, int threads) {
    return fit_exponent_table(
        run_trace_batch(n_grid, replicas, seed, {{alpha, beta, j}}, threads)[0], n_grid,
        replicas);
}

}  // namespace latept
