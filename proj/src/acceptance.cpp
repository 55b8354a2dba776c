#include <latept/acceptance.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <latept/config_geometry.hpp>
#include <latept/errors.hpp>
#include <latept/exponents.hpp>
#include <latept/hitting_kernel.hpp>
#include <latept/late_sim.hpp>
#include <latept/lattice_walk.hpp>
#include <latept/rng.hpp>
#include <latept/serialize.hpp>
#include <latept/ultrametric.hpp>

namespace latept {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

// Random class member with dimension in [1, max_dim], drawn from a random
// level set.
UltraMatrix random_block(std::mt19937_64& rng, int max_dim, double eta) {
    std::uniform_int_distribution<int> dimd(1, max_dim);
    const int d = dimd(rng);
    if (d == 1) return equidistant(1, 0.0, eta);
    std::uniform_real_distribution<double> rd(0.15 * (d - 1), 0.85 * (d - 1));
    return sample_xi_level(d, rd(rng), eta, rng);
}

// Largest s a composite built on A may use: A's smallest internal entry
// (1 - eta when A has no off-diagonal entries).
double max_valid_s(const UltraMatrix& A) {
    double m = 1.0 - A.eta;
    for (int i = 0; i < A.dim; ++i)
        for (int l = i + 1; l < A.dim; ++l) m = std::min(m, A.a(i, l));
    return m;
}

// --- criterion bodies -----------------------------------------------------

CriterionResult c1_equidistant_chi() {
    CriterionResult r{1, "equidistant chi closed form", false, "", 0.0};
    const auto t0 = Clock::now();
    const double eta = 0.05;
    double worst = 0.0;
    for (int j = 2; j <= 10; ++j)
        for (int k = 0; k < 20; ++k) {
            const double v = 0.95 * static_cast<double>(k) / 19.0;
            const double expect = j / (1.0 + (j - 1) * v);
            worst = std::max(worst, std::abs(chi(equidistant(j, v, eta)).chi - expect));
        }
    r.seconds = elapsed_s(t0);
    r.pass = worst < 1e-10 && r.seconds < 1.0;
    r.detail = "max |chi - j/(1+(j-1)r)| = " + fmt(worst, 3) + " over j in 2..10, 20-point grid";
    return r;
}

CriterionResult c2_merge_recursion(bool quick, std::uint64_t master) {
    CriterionResult r{2, "merge recursion", false, "", 0.0};
    const auto t0 = Clock::now();
    const int trials = quick ? 200 : 1000;
    auto rng = seeded_stream(master, 2, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const UltraMatrix A1 = random_block(rng, 4, 0.1);
        const UltraMatrix A2 = random_block(rng, 4, 0.1);
        const double s = unit(rng) * std::min(max_valid_s(A1), max_valid_s(A2));
        const double direct = chi(boxplus(A1, A2, s)).chi;
        const double merged = chi_merge(s, chi(A1).chi, chi(A2).chi);
        worst = std::max(worst, std::abs(direct - merged));
    }
    r.seconds = elapsed_s(t0);
    r.pass = worst < 1e-9 && r.seconds < 5.0;
    r.detail = "max |chi(composite) - g(s,chi1,chi2)| = " + fmt(worst, 3) + " over " +
               std::to_string(trials) + " pairs" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c3_level_set_minimum(bool quick, std::uint64_t master) {
    CriterionResult r{3, "level-set minimum optimality", false, "", 0.0};
    const auto t0 = Clock::now();
    const int samples = quick ? 1000 : 10000;
    const double eta = 0.1;
    const double fracs[5] = {0.15, 0.35, 0.5, 0.65, 0.85};
    double min_excess = 1e300;
    double worst_xi = 0.0;
    double worst_minimizer = 0.0;
    int at_j = 0;
    double at_r = 0.0;
    for (int j = 2; j <= 6; ++j)
        for (int fi = 0; fi < 5; ++fi) {
            const double level = fracs[fi] * (j - 1);
            const double bound = j / (j - level);
            auto rng = seeded_stream(master, 3, static_cast<std::uint64_t>(j) * 16 + fi);
            for (int t = 0; t < samples; ++t) {
                const UltraMatrix A = sample_xi_level(j, level, eta, rng);
                worst_xi = std::max(worst_xi, std::abs(xi(A) - level));
                const double excess = chi(A).chi - bound;
                if (excess < min_excess) {
                    min_excess = excess;
                    at_j = j;
                    at_r = level;
                }
            }
            const auto [value, minimizer] = chi_min(j, level, eta);
            worst_minimizer =
                std::max({worst_minimizer, std::abs(value - bound),
                          std::abs(chi(minimizer).chi - bound)});
        }
    r.seconds = elapsed_s(t0);
    r.pass = min_excess >= -1e-9 && worst_xi < 1e-9 && worst_minimizer < 1e-9 &&
             r.seconds < 60.0;
    r.detail = "min (chi - j/(j-r)) = " + fmt(min_excess, 3) + " at j=" +
               std::to_string(at_j) + ", r=" + fmt(at_r, 3) +
               "; level residual " + fmt(worst_xi, 3) + "; minimizer gap " +
               fmt(worst_minimizer, 3) + "; " + std::to_string(samples) +
               " samples per cell" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c4_property_scans(bool quick, std::uint64_t master) {
    CriterionResult r{4, "merge monotonicity and level scan", false, "", 0.0};
    const auto t0 = Clock::now();
    const int trials = quick ? 200 : 1000;

    int mono_viol = 0;
    {
        auto rng = seeded_stream(master, 4, 0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < trials; ++t) {
            UltraMatrix hi1 = random_block(rng, 4, 0.1);
            UltraMatrix lo1 = random_block(rng, 4, 0.1);
            UltraMatrix hi2 = random_block(rng, 4, 0.1);
            UltraMatrix lo2 = random_block(rng, 4, 0.1);
            if (chi(hi1).chi < chi(lo1).chi) std::swap(hi1, lo1);
            if (chi(hi2).chi < chi(lo2).chi) std::swap(hi2, lo2);
            const double s =
                unit(rng) * std::min(std::min(max_valid_s(hi1), max_valid_s(lo1)),
                                     std::min(max_valid_s(hi2), max_valid_s(lo2)));
            const double big = chi(boxplus(hi1, hi2, s)).chi;
            const double small = chi(boxplus(lo1, lo2, s)).chi;
            if (big < small - 1e-12) ++mono_viol;
        }
    }

    int scan_viol = 0;
    {
        auto rng = seeded_stream(master, 4, 1);
        std::uniform_int_distribution<int> dimd(1, 5);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < trials; ++t) {
            const int gdim = dimd(rng);
            const int hdim = dimd(rng);
            const double g1 = 0.98 * unit(rng);
            const double g2 = g1 + (0.98 - g1) * unit(rng);
            const UltraMatrix A = equidistant(gdim, g2, 0.01);
            const UltraMatrix B = equidistant(hdim, g1, 0.01);
            double prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 100; ++k) {
                const double gamma = g1 * static_cast<double>(k) / 99.0;
                const double f = chi(boxplus(A, B, gamma)).chi;
                if (f > prev + 1e-12) ++scan_viol;
                prev = f;
            }
        }
    }

    r.seconds = elapsed_s(t0);
    r.pass = mono_viol == 0 && scan_viol == 0;
    r.detail = std::to_string(mono_viol) + " merge-monotonicity violations, " +
               std::to_string(scan_viol) + " level-scan violations over " +
               std::to_string(trials) + " instances each (100-point grid)" +
               (quick ? " (quick)" : "");
    return r;
}

CriterionResult c5_kernel_identities(bool quick, std::uint64_t master) {
    CriterionResult r{5, "kernel inverse identity and hit formula", false, "", 0.0};
    const auto t0 = Clock::now();
    const int configs = quick ? 10 : 50;
    const int sides[3] = {12, 16, 24};
    auto rng = seeded_stream(master, 5, 0);
    double worst_inv = 0.0, worst_formula = 0.0, worst_lastexit = 0.0;
    for (int c = 0; c < configs; ++c) {
        const int n = sides[c % 3];
        const int j = 1 + (c / 3) % 3;
        KernelDomain dom;
        dom.kind = KernelDomain::Kind::torus;
        dom.n = n;
        std::uniform_int_distribution<int> coord(0, n - 1);
        const Site center{coord(rng), coord(rng)};
        PointConfig cfg;
        cfg.kill = circle_sites(dom, center, n / 4.0);
        auto blocked = [&](Site s) {
            for (const Site& k : cfg.kill)
                if (k == s) return true;
            for (const Site& p : cfg.points)
                if (p == s) return true;
            return false;
        };
        while (static_cast<int>(cfg.points.size()) < j) {
            const Site s{coord(rng), coord(rng)};
            if (!blocked(s)) cfg.points.push_back(s);
        }
        for (;;) {
            const Site s{coord(rng), coord(rng)};
            if (!blocked(s)) {
                cfg.witness = s;
                break;
            }
        }
        const HitReport rep = hit_probability_report(cfg, dom);
        worst_inv = std::max(worst_inv, rep.inverse_error);
        worst_formula =
            std::max(worst_formula, (rep.formula - rep.direct).cwiseAbs().maxCoeff());
        worst_lastexit = std::max(worst_lastexit, rep.simeq_residual);
    }
    r.seconds = elapsed_s(t0);
    r.pass = worst_inv < 1e-9 && worst_formula < 1e-9 && r.seconds < 120.0;
    r.detail = "max |Q^-1-(E-U)| = " + fmt(worst_inv, 3) + ", max |formula - oracle| = " +
               fmt(worst_formula, 3) + ", last-exit residual " + fmt(worst_lastexit, 3) +
               " over " + std::to_string(configs) + " configs" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c6_green_asymptotics(bool quick) {
    CriterionResult r{6, "green asymptotics and escape identity", false, "", 0.0};
    const auto t0 = Clock::now();
    std::vector<int> ns{32, 64, 128, 256};
    if (quick) ns.pop_back();
    bool ok = true;
    double worst_gap = 0.0;
    std::string offsets;
    for (const int n : ns) {
        const double g = green_exact(n, Site{0, 0}, Site{0, 0});
        const double offset = g - (2.0 / kPi) * std::log(static_cast<double>(n));
        if (!(offset > 0.8 && offset < 1.2)) ok = false;
        const double gap = std::abs(escape_probability(n) - escape_probability_oracle(n));
        worst_gap = std::max(worst_gap, gap);
        if (!offsets.empty()) offsets += ", ";
        offsets += std::to_string(n) + ": " + fmt(offset, 5);
    }
    r.seconds = elapsed_s(t0);
    r.pass = ok && worst_gap < 1e-10;
    r.detail = "offsets { " + offsets + " } in (0.8, 1.2); max escape identity gap " +
               fmt(worst_gap, 3) + (quick ? " (quick: n <= 128)" : "");
    return r;
}

CriterionResult c7_assignment_membership(bool quick, std::uint64_t master) {
    CriterionResult r{7, "constructive assignment membership", false, "", 0.0};
    const auto t0 = Clock::now();
    const int per = quick ? 100 : 1000;
    const double eta = 0.1, beta = 0.9;
    const struct {
        double n;
        double delta;
    } scales[2] = {{1024.0, 0.7}, {16384.0, 0.5}};
    auto rng = seeded_stream(master, 7, 0);
    int failures = 0, configs = 0;
    for (const auto& sc : scales) {
        const int box = static_cast<int>(std::floor(std::pow(sc.n, beta) / std::sqrt(2.0)));
        const double min_d2 = std::pow(sc.n, 2.0 * eta);
        std::uniform_int_distribution<int> coord(0, box - 1);
        for (int j = 1; j <= 4; ++j)
            for (int t = 0; t < per; ++t) {
                std::vector<Site> pts;
                for (int attempt = 0; attempt < 1000 && static_cast<int>(pts.size()) < j;
                     ++attempt) {
                    const Site s{coord(rng), coord(rng)};
                    bool far = true;
                    for (const Site& p : pts)
                        if (static_cast<double>(plane_dist2(p, s)) < min_d2) far = false;
                    if (far) pts.push_back(s);
                }
                if (static_cast<int>(pts.size()) < j) {
                    ++failures;
                    continue;
                }
                ++configs;
                const UltraMatrix A = assign_matrix(pts, sc.n, sc.delta, beta, eta);
                const EHatClass cls{A, sc.delta, sc.n};
                if (!is_member(A.a, eta) || !in_class(pts, cls)) ++failures;
            }
    }
    r.seconds = elapsed_s(t0);
    r.pass = failures == 0;
    r.detail = std::to_string(failures) + " failures over " + std::to_string(configs) +
               " configs (j <= 4, scales 2^10 and 2^14)" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c8_count_growth() {
    CriterionResult r{8, "class count growth bound", false, "", 0.0};
    const auto t0 = Clock::now();
    const double delta = 0.05;
    std::vector<UltraMatrix> mats;
    mats.push_back(equidistant(1, 0.0, 0.05));
    mats.push_back(equidistant(2, 0.2, 0.05));
    mats.push_back(boxplus(equidistant(2, 0.1, 0.05), equidistant(1, 0.0, 0.05), 0.05));
    bool ok = true;
    double worst_margin = -1e300;
    for (const int n : {16, 32, 64})
        for (const UltraMatrix& A : mats) {
            const EHatClass cls{A, delta, static_cast<double>(n)};
            const std::uint64_t count = enumerate_class_count(cls, n);
            const double lhs =
                std::log(static_cast<double>(count)) / std::log(static_cast<double>(n));
            const double bound = 2.0 * xi(A) + 2.0 + 0.5;
            worst_margin = std::max(worst_margin, lhs - bound);
            if (lhs > bound + 1e-12) ok = false;
        }
    r.seconds = elapsed_s(t0);
    r.pass = ok;
    r.detail = "max (log_n count - (2 Xi + 2.5)) = " + fmt(worst_margin, 4) +
               " over j in {1,2,3}, n in {16,32,64}";
    return r;
}

CriterionResult c9_exponent_properties() {
    CriterionResult r{9, "exponent branch properties", false, "", 0.0};
    const auto t0 = Clock::now();

    double worst_cont = 0.0;
    for (int j = 2; j <= 6; ++j)
        for (int ai = 1; ai <= 20; ++ai) {
            const double alpha = 0.95 * ai / (20.0 * j);
            const double bstar = *crossover_beta(j, alpha);
            const ExponentParams ph{j, alpha, bstar};
            worst_cont = std::max(worst_cont,
                                  std::abs(rho_hat_branch_value(ph, Branch::first) -
                                           rho_hat_branch_value(ph, Branch::second)));
            const double rstar = *rho_crossover_beta(j, alpha);
            const ExponentParams pr{j, alpha, rstar};
            worst_cont = std::max(worst_cont, std::abs(rho_branch_value(pr, Branch::first) -
                                                       rho_branch_value(pr, Branch::second)));
        }

    std::vector<double> alphas(50), betas(50);
    for (int i = 0; i < 50; ++i) {
        alphas[i] = 0.002 + 0.160 * i / 49.0;
        betas[i] = 0.02 + 0.97 * i / 49.0;
    }
    double min_diff = 1e300;
    for (const MonotonicityEntry& e : monotonicity_table(alphas, betas, 6))
        min_diff = std::min(min_diff, e.diff);

    bool exact_first = true;
    for (const double a : {0.1, 0.25, 0.3, 0.5, 0.77})
        if (rho_hat({1, a, 0.5}).value != 2.0 - 2.0 * a) exact_first = false;

    r.seconds = elapsed_s(t0);
    r.pass = worst_cont < 1e-12 && min_diff >= -1e-12 && exact_first;
    r.detail = "crossover mismatch " + fmt(worst_cont, 3) + "; min successive difference " +
               fmt(min_diff, 3) + " on 50x50 grid, j <= 6; first-order value exact: " +
               (exact_first ? "yes" : "no");
    return r;
}

CriterionResult c10_slope_windows(bool quick, int threads, std::uint64_t master) {
    CriterionResult r{10, "tuple-count slope windows", false, "", 0.0};
    const auto t0 = Clock::now();
    const std::vector<int> grid{64, 128, 256};
    const int reps = quick ? 20 : 200;
    const std::vector<SlopeSpec> specs{{0.2, 0.5, 1}, {0.3, 0.5, 1}, {0.5, 0.5, 1},
                                       {0.3, 0.3, 2}, {0.3, 0.5, 2}, {0.3, 0.7, 2}};
    const auto tables = run_trace_batch(grid, reps, master, specs, threads);
    std::vector<double> slope(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i)
        slope[i] = fit_exponent_table(tables[i], grid, reps).slope;

    const bool a_ok = std::abs(slope[1] - 1.4) <= 0.4;
    const bool b_ok = std::abs(slope[4] - 2.2) <= 0.6;
    const bool alpha_dir = slope[2] < slope[0];
    const bool beta_dir = slope[5] > slope[3];
    r.seconds = elapsed_s(t0);
    r.pass = a_ok && b_ok && alpha_dir && beta_dir && r.seconds < 1800.0;
    r.detail = "j1 slopes (a=.2,.3,.5): " + fmt(slope[0], 4) + ", " + fmt(slope[1], 4) +
               ", " + fmt(slope[2], 4) + "; j2 slopes (b=.3,.5,.7): " + fmt(slope[3], 4) +
               ", " + fmt(slope[4], 4) + ", " + fmt(slope[5], 4) + "; " +
               std::to_string(reps) + " replicas" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c11_cover_normalization(bool quick, std::uint64_t master) {
    CriterionResult r{11, "cover time normalization", false, "", 0.0};
    const auto t0 = Clock::now();
    const int reps = quick ? 20 : 100;
    auto median_for = [&](int n) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(reps));
        const double lnn = std::log(static_cast<double>(n));
        for (int rep = 0; rep < reps; ++rep) {
            const std::uint64_t seed =
                derive_seed(master, static_cast<std::uint64_t>(n),
                            10000ULL + static_cast<std::uint64_t>(rep));
            const WalkTrace tr = simulate_cover(n, seed);
            vals.push_back(static_cast<double>(tr.cover_time) / ((n * lnn) * (n * lnn)));
        }
        std::nth_element(vals.begin(), vals.begin() + reps / 2, vals.end());
        return vals[static_cast<std::size_t>(reps) / 2];
    };
    const double m32 = median_for(32);
    const double m128 = median_for(128);
    const double target = 4.0 / kPi;
    r.seconds = elapsed_s(t0);
    r.pass = m128 > m32 && m128 >= 0.5 * target && m128 <= 2.0 * target;
    r.detail = "median normalized cover time: n=32: " + fmt(m32, 4) + ", n=128: " +
               fmt(m128, 4) + " (target 4/pi = " + fmt(target, 4) + ", factor-2 window); " +
               std::to_string(reps) + " replicas" + (quick ? " (quick)" : "");
    return r;
}

CriterionResult c12_determinism(std::uint64_t master) {
    CriterionResult r{12, "seeded determinism", false, "", 0.0};
    const auto t0 = Clock::now();
    const std::vector<int> grid{32, 64};
    const std::vector<SlopeSpec> spec{{0.3, 0.5, 2}};
    const std::string a = replica_rows_csv(run_trace_batch(grid, 5, master, spec, 1)[0]);
    const std::string b = replica_rows_csv(run_trace_batch(grid, 5, master, spec, 1)[0]);
    const std::string c = replica_rows_csv(run_trace_batch(grid, 5, master, spec, 4)[0]);
    r.seconds = elapsed_s(t0);
    r.pass = a == b && a == c;
    r.detail = std::string("same seed, repeat run: ") + (a == b ? "identical" : "differs") +
               "; same seed, 4 threads: " + (a == c ? "identical" : "differs");
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool quick, int threads,
                                            std::uint64_t master_seed) {
    std::vector<std::function<CriterionResult()>> bodies{
        [&] { return c1_equidistant_chi(); },
        [&] { return c2_merge_recursion(quick, master_seed); },
        [&] { return c3_level_set_minimum(quick, master_seed); },
        [&] { return c4_property_scans(quick, master_seed); },
        [&] { return c5_kernel_identities(quick, master_seed); },
        [&] { return c6_green_asymptotics(quick); },
        [&] { return c7_assignment_membership(quick, master_seed); },
        [&] { return c8_count_growth(); },
        [&] { return c9_exponent_properties(); },
        [&] { return c10_slope_windows(quick, threads, master_seed); },
        [&] { return c11_cover_normalization(quick, master_seed); },
        [&] { return c12_determinism(master_seed); },
    };
    std::vector<CriterionResult> out;
    out.reserve(bodies.size());
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        const auto t0 = Clock::now();
        try {
            out.push_back(bodies[i]());
        } catch (const std::exception& e) {
            CriterionResult r;
            r.id = static_cast<int>(i) + 1;
            r.name = "criterion " + std::to_string(r.id);
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
            r.seconds = elapsed_s(t0);
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace latept
