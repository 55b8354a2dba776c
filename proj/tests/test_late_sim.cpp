#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <latept/errors.hpp>
#include <latept/late_sim.hpp>
#include <latept/serialize.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace latept;

namespace {

WalkTrace hand_trace() {
    WalkTrace t;
    t.n = 4;
    t.first_hit.resize(16);
    for (int i = 0; i < 16; ++i) t.first_hit[i] = i;
    t.visit_count.assign(16, 1);
    t.steps = 15;
    t.cover_time = 15;
    return t;
}

std::set<std::pair<int, int>> as_set(const std::vector<Site>& v) {
    std::set<std::pair<int, int>> s;
    for (const Site& p : v) s.insert({p.x, p.y});
    return s;
}

} // namespace

TEST_CASE("late sites are those hit after the alpha fraction of the cover scale") {
    const WalkTrace t = hand_trace();

    SUBCASE("threshold arithmetic on a handmade trace") {
        // (4 * 0.1 / pi) * (4 ln 4)^2 = 3.915...: times 4..15 qualify.
        const LateSet ls = late_set(t, 0.1);
        CHECK(ls.n == 4);
        CHECK(ls.alpha == 0.1);
        REQUIRE(ls.sites.size() == 12);
        CHECK(ls.sites[0] == Site{0, 1}); // flat index 4, row-major ascending
        CHECK(ls.sites[11] == Site{3, 3});
    }
    SUBCASE("alpha zero keeps every site") {
        CHECK(late_set(t, 0.0).sites.size() == 16);
    }
    SUBCASE("bad traces and parameters are rejected") {
        WalkTrace broken = t;
        broken.first_hit[3] = -1;
        CHECK_THROWS_AS(late_set(broken, 0.1), domain_error);
        broken = t;
        broken.first_hit.pop_back();
        CHECK_THROWS_AS(late_set(broken, 0.1), domain_error);
        CHECK_THROWS_AS(late_set(t, -0.5), domain_error);
    }
    SUBCASE("raising alpha shrinks the set monotonically") {
        const WalkTrace real = simulate_cover(32, 99);
        const LateSet outer = late_set(real, 0.2);
        const LateSet inner = late_set(real, 0.4);
        CHECK(inner.sites.size() <= outer.sites.size());
        const auto outer_set = as_set(outer.sites);
        for (const Site& s : inner.sites)
            CHECK(outer_set.count({s.x, s.y}) == 1);
    }
}

TEST_CASE("tuple counting on small handmade sets") {
    LateSet ls;
    ls.n = 64;
    ls.alpha = 0.0;

    SUBCASE("empty set counts nothing") {
        const TupleCountResult r = count_tuples(ls, 2, 0.5);
        CHECK(r.count == 0);
        CHECK(r.count_distinct == 0);
    }
    SUBCASE("singleton: only the repeated tuple") {
        ls.sites = {{10, 10}};
        const TupleCountResult r = count_tuples(ls, 2, 0.5);
        CHECK(r.count == 1);
        CHECK(r.count_distinct == 0);
        CHECK(count_tuples(ls, 3, 0.5).count == 1);
    }
    SUBCASE("order one counts the sites") {
        ls.sites = {{0, 0}, {5, 5}, {40, 40}};
        const TupleCountResult r = count_tuples(ls, 1, 0.5);
        CHECK(r.count == 3);
        CHECK(r.count_distinct == 3);
    }
    SUBCASE("cutoff at the torus scale makes the constraint vacuous") {
        ls.sites = {{0, 0}, {5, 5}, {40, 40}, {63, 0}};
        const TupleCountResult r = count_tuples(ls, 2, 1.0);
        CHECK_FALSE(r.bucketed);
        CHECK(r.count == 16);
        CHECK(r.count_distinct == 12);
    }
    SUBCASE("a spread pair is only counted under a wide cutoff") {
        ls.sites = {{0, 0}, {0, 8}};
        // 64^0.4 = 5.28 < 8: pairs of distinct sites fall out.
        const TupleCountResult narrow = count_tuples(ls, 2, 0.4);
        CHECK(narrow.count == 2); // the two repeated tuples
        CHECK(narrow.count_distinct == 0);
        const TupleCountResult wide = count_tuples(ls, 2, 0.6);
        CHECK(wide.count == 4);
        CHECK(wide.count_distinct == 2);
    }
    SUBCASE("wraparound pairs count as close") {
        ls.sites = {{0, 0}, {63, 0}};
        const TupleCountResult r = count_tuples(ls, 2, 0.4);
        CHECK(r.count_distinct == 2);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(count_tuples(ls, 0, 0.5), domain_error);
        CHECK_THROWS_AS(count_tuples(ls, 2, 0.0), domain_error);
        CHECK_THROWS_AS(count_tuples(ls, 2, 1.5), domain_error);
        LateSet bad;
        bad.n = 0;
        CHECK_THROWS_AS(count_tuples(bad, 2, 0.5), domain_error);
    }
}

TEST_CASE("bucketed counting agrees exactly with the direct scan") {
    const WalkTrace t = simulate_cover(48, 2026);
    for (double alpha : {0.25, 0.4}) {
        const LateSet ls = late_set(t, alpha);
        for (int j : {2, 3}) {
            for (double beta : {0.35, 0.55, 0.75}) {
                const TupleCountResult fast = count_tuples(ls, j, beta);
                const TupleCountResult slow = count_tuples_naive(ls, j, beta);
                CHECK(fast.count == slow.count);
                CHECK(fast.count_distinct == slow.count_distinct);
            }
        }
    }
    SUBCASE("counts grow with the cutoff scale and with the order") {
        const LateSet ls = late_set(t, 0.25);
        CHECK(count_tuples(ls, 2, 0.35).count <= count_tuples(ls, 2, 0.55).count);
        // Every pair extends to a triple by repeating its first point.
        CHECK(count_tuples(ls, 3, 0.55).count >= count_tuples(ls, 2, 0.55).count);
    }
    SUBCASE("naive scan budget is enforced") {
        LateSet big;
        big.n = 64;
        for (int x = 0; x < 30; ++x)
            for (int y = 0; y < 30; ++y) big.sites.push_back({x, y});
        CHECK_THROWS_AS(count_tuples_naive(big, 3, 0.9, 100), resource_error);
    }
}

TEST_CASE("replica batches are deterministic and thread-invariant") {
    const std::vector<int> grid = {16, 24};
    const std::vector<SlopeSpec> specs = {{0.3, 0.5, 1}, {0.2, 0.5, 2}};
    const auto serial = run_trace_batch(grid, 4, 777, specs, 1);
    const auto threaded = run_trace_batch(grid, 4, 777, specs, 3);
    REQUIRE(serial.size() == 2);
    REQUIRE(serial[0].size() == 8);

    for (std::size_t s = 0; s < specs.size(); ++s)
        CHECK(replica_rows_csv(serial[s]) == replica_rows_csv(threaded[s]));

    SUBCASE("rows are ordered by grid position, then replica") {
        for (int r = 0; r < 4; ++r) {
            CHECK(serial[0][r].n == 16);
            CHECK(serial[0][r].replica == r);
            CHECK(serial[0][4 + r].n == 24);
        }
    }
    SUBCASE("late counts never exceed the torus size") {
        for (const ReplicaRow& row : serial[0]) {
            CHECK(row.late_count <= static_cast<std::uint64_t>(row.n) * row.n);
            CHECK(row.tuple_count >= row.tuple_count_distinct);
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(run_trace_batch({}, 4, 1, specs, 1), domain_error);
        CHECK_THROWS_AS(run_trace_batch(grid, 0, 1, specs, 1), domain_error);
        CHECK_THROWS_AS(run_trace_batch(grid, 2, 1, {}, 1), domain_error);
        CHECK_THROWS_AS(run_trace_batch(grid, 2, 1, {{-0.1, 0.5, 1}}, 1), domain_error);
    }
}

TEST_CASE("slope fits recover planted power laws") {
    const std::vector<int> grid = {16, 32, 64};

    SUBCASE("exact power law gives the exact slope") {
        std::vector<ReplicaRow> table;
        for (int n : grid)
            for (int rep = 0; rep < 2; ++rep) {
                ReplicaRow row;
                row.n = n;
                row.replica = rep;
                row.tuple_count = static_cast<std::uint64_t>(
                    std::llround(std::pow(static_cast<double>(n), 2.5)));
                table.push_back(row);
            }
        const ExponentFit fit = fit_exponent_table(table, grid, 2);
        CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-3));
        CHECK(fit.slope_se < 1e-3);
        CHECK(fit.censored_n.empty());
    }
    SUBCASE("zero-count grid points are censored, not fatal") {
        std::vector<ReplicaRow> table;
        for (int n : grid)
            for (int rep = 0; rep < 2; ++rep) {
                ReplicaRow row;
                row.n = n;
                row.replica = rep;
                row.tuple_count = n == 32 ? 0 : 100;
                table.push_back(row);
            }
        const ExponentFit fit = fit_exponent_table(table, grid, 2);
        REQUIRE(fit.censored_n.size() == 1);
        CHECK(fit.censored_n[0] == 32);
        CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(fit.slope_se == 0.0); // two points, no residual freedom

        // All-zero tables cannot be fit at all.
        for (ReplicaRow& row : table) row.tuple_count = 0;
        CHECK(std::isnan(fit_exponent_table(table, grid, 2).slope));
    }
    SUBCASE("grid validation") {
        std::vector<ReplicaRow> table(4);
        CHECK_THROWS_AS(fit_exponent_table(table, {16, 32}, 2), domain_error);
        CHECK_THROWS_AS(fit_exponent_table(table, {16, 32, 8}, 2), domain_error);
        CHECK_THROWS_AS(fit_exponent_table(table, grid, 2), dimension_error);
    }
}

TEST_CASE("end-to-end exponent estimate on a small grid") {
    const ExponentFit fit = estimate_exponent(0.2, 0.5, 1, {12, 16, 20}, 3, 31415, 1);
    REQUIRE(fit.table.size() == 9);
    CHECK(std::isfinite(fit.slope));
    for (const ReplicaRow& row : fit.table) {
        CHECK(row.late_count > 0); // alpha 0.2 keeps a decent fraction at these sizes
        CHECK(row.tuple_count == row.late_count); // order one
    }
}
