#include <latept/config_geometry.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <latept/errors.hpp>
#include <latept/exponents.hpp>

namespace latept {

namespace {

void validate_window_params(double n, double delta, double beta, double eta) {
    if (!(n > 1.0)) throw domain_error("scale n must exceed 1");
    if (!(delta > 0.0)) throw domain_error("delta must be positive");
    if (!(eta > 0.0) || !(eta <= beta) || !(beta <= 1.0))
        throw domain_error("need 0 < eta <= beta <= 1");
}

// Recursive construction over the index prefix ord[0..k): peel off one point
// of the closest pair, build the rest with half the slack, then extend by
// copying the surviving partner's row and giving the pair the fresh entry
// min(1 - log d / log n + dl, 1 - eta).
Eigen::MatrixXd build_prefix(const Eigen::MatrixXd& dist, std::vector<int>& ord,
                             int k, double dl, double n, double eta) {
    if (k == 1) return Eigen::MatrixXd::Ones(1, 1);
    int pi = 0, pl = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int l = i + 1; l < k; ++l) {
            const double d = dist(ord[i], ord[l]);
            if (d < best) {
                best = d;
                pi = i;
                pl = l;
            }
        }
    const int kept = ord[pi];  // recursion below permutes ord[0..k-1)
    std::swap(ord[pl], ord[k - 1]);
    const Eigen::MatrixXd sub = build_prefix(dist, ord, k - 1, dl / 2.0, n, eta);
    const int kpos = static_cast<int>(
        std::find(ord.begin(), ord.begin() + (k - 1), kept) - ord.begin());
    Eigen::MatrixXd out = Eigen::MatrixXd::Ones(k, k);
    out.topLeftCorner(k - 1, k - 1) = sub;
    const double fresh = std::min(1.0 - std::log(best) / std::log(n) + dl, 1.0 - eta);
    for (int l = 0; l + 1 < k; ++l) {
        const double v = (l == kpos) ? fresh : sub(kpos, l);
        out(k - 1, l) = v;
        out(l, k - 1) = v;
    }
    return out;
}

struct SquaredWindow {
    Eigen::MatrixXd lo2;
    Eigen::MatrixXd up2;
    bool pass(int i, int l, std::int64_t d2) const {
        const double v = static_cast<double>(d2);
        return v >= lo2(i, l) && v <= up2(i, l);
    }
};

SquaredWindow squared_window(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper) {
    SquaredWindow w;
    w.lo2 = (lower.array().max(0.0).square() * (1.0 - 1e-12) - 1e-9).matrix();
    w.up2 = (upper.array().square() * (1.0 + 1e-12) + 1e-9).matrix();
    return w;
}

}  // namespace

ConfigClass EHatClass::bounds() const {
    if (!is_member(A.a, A.eta)) throw class_error("window base matrix is not a class member");
    if (!(delta > 0.0)) throw domain_error("delta must be positive");
    if (!(n > 1.0)) throw domain_error("scale n must exceed 1");
    const int j = A.dim;
    ConfigClass c;
    c.j = j;
    c.n = n;
    c.lower = Eigen::MatrixXd::Zero(j, j);
    c.upper = Eigen::MatrixXd::Zero(j, j);
    const double down = std::pow(2.0, -j);
    const double up = std::pow(2.0, j);
    for (int i = 0; i < j; ++i)
        for (int l = 0; l < j; ++l) {
            if (i == l) continue;
            c.lower(i, l) = down * std::pow(n, 1.0 - A.a(i, l));
            c.upper(i, l) = up * std::pow(n, 1.0 - A.a(i, l) + delta);
        }
    return c;
}

Eigen::MatrixXd pair_distances(const std::vector<Site>& xs, int torus_n) {
    const int j = static_cast<int>(xs.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(j, j);
    for (int i = 0; i < j; ++i)
        for (int l = i + 1; l < j; ++l) {
            const std::int64_t d2 = torus_n > 0 ? torus_dist2(xs[i], xs[l], torus_n)
                                                : plane_dist2(xs[i], xs[l]);
            d(i, l) = d(l, i) = std::sqrt(static_cast<double>(d2));
        }
    return d;
}

bool in_class(const std::vector<Site>& xs, const ConfigClass& cls, int torus_n) {
    if (static_cast<int>(xs.size()) != cls.j)
        throw dimension_error("tuple arity does not match class");
    if (cls.lower.rows() != cls.j || cls.upper.rows() != cls.j ||
        cls.lower.cols() != cls.j || cls.upper.cols() != cls.j)
        throw dimension_error("class bound matrices must be j x j");
    const Eigen::MatrixXd d = pair_distances(xs, torus_n);
    for (int i = 0; i < cls.j; ++i)
        for (int l = i + 1; l < cls.j; ++l) {
            const double lo = cls.lower(i, l) - 1e-9 * std::max(1.0, cls.lower(i, l));
            const double hi = cls.upper(i, l) + 1e-9 * std::max(1.0, cls.upper(i, l));
            if (d(i, l) < lo || d(i, l) > hi) return false;
        }
    return true;
}

bool in_class(const std::vector<Site>& xs, const EHatClass& cls, int torus_n) {
    return in_class(xs, cls.bounds(), torus_n);
}

UltraMatrix assign_from_distances(const Eigen::MatrixXd& dist, double n, double delta,
                                  double beta, double eta) {
    validate_window_params(n, delta, beta, eta);
    const int j = static_cast<int>(dist.rows());
    if (j < 1 || dist.cols() != j) throw dimension_error("distance matrix must be square");
    const double lo = std::pow(n, eta) * (1.0 - 1e-12);
    const double hi = std::pow(n, beta) * (1.0 + 1e-12);
    for (int i = 0; i < j; ++i)
        for (int l = i + 1; l < j; ++l)
            if (!(dist(i, l) >= lo && dist(i, l) <= hi))
                throw domain_error("pairwise distance outside [n^eta, n^beta]");
    if (std::pow(2.0, j - 1) > std::pow(n, delta / 2.0) * (1.0 + 1e-12))
        throw scale_error("scale too small: need 2^{j-1} <= n^{delta/2}");

    std::vector<int> ord(j);
    for (int i = 0; i < j; ++i) ord[i] = i;
    const Eigen::MatrixXd built = build_prefix(dist, ord, j, delta, n, eta);

    UltraMatrix A;
    A.dim = j;
    A.eta = eta;
    A.a = Eigen::MatrixXd::Identity(j, j);
    for (int i = 0; i < j; ++i)
        for (int l = 0; l < j; ++l) A.a(ord[i], ord[l]) = built(i, l);
    return A;
}

UltraMatrix assign_matrix(const std::vector<Site>& xs, double n, double delta,
                          double beta, double eta, int torus_n) {
    return assign_from_distances(pair_distances(xs, torus_n), n, delta, beta, eta);
}

CostBound h_delta_from_distances(const Eigen::MatrixXd& dist, double n, double delta,
                                 double beta, double eta) {
    CostBound out;
    out.matrix = assign_from_distances(dist, n, delta, beta, eta);
    out.unrefined = chi(out.matrix).chi;
    const int j = out.matrix.dim;
    if (j == 1) {
        out.value = out.unrefined;
        return out;
    }
    // Raise entries toward the window cap 1 - log_n d + delta + j log_n 2;
    // an entry whose third-point rows disagree is pinned at their minimum.
    // Raising can only lower chi, so the result stays an upper bound on the
    // infimum while never exceeding the unrefined value.
    const double logn = std::log(n);
    const double lift = j * std::log(2.0) / logn;
    Eigen::MatrixXd& a = out.matrix.a;
    bool changed = true;
    for (int round = 0; changed && round < 100; ++round) {
        changed = false;
        for (int i = 0; i < j; ++i)
            for (int l = i + 1; l < j; ++l) {
                double cap = std::min(1.0 - eta,
                                      1.0 - std::log(dist(i, l)) / logn + delta + lift);
                for (int p = 0; p < j; ++p) {
                    if (p == i || p == l) continue;
                    if (std::abs(a(p, i) - a(p, l)) > tol_member)
                        cap = std::min(cap, std::min(a(p, i), a(p, l)));
                }
                if (cap > a(i, l) + 1e-12) {
                    a(i, l) = a(l, i) = cap;
                    changed = true;
                }
            }
    }
    out.value = chi(out.matrix).chi;
    return out;
}

CostBound h_delta_detail(const std::vector<Site>& xs, double n, double delta,
                         double beta, double eta, int torus_n) {
    return h_delta_from_distances(pair_distances(xs, torus_n), n, delta, beta, eta);
}

double h_delta(const std::vector<Site>& xs, double n, double delta,
               double beta, double eta, int torus_n) {
    return h_delta_detail(xs, n, delta, beta, eta, torus_n).value;
}

std::uint64_t enumerate_class_count(const ConfigClass& cls, int n, std::uint64_t budget) {
    if (cls.j < 1) throw domain_error("class arity must be at least 1");
    if (n < 1) throw domain_error("torus side must be at least 1");
    const std::uint64_t torus = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
    if (cls.j == 1) return torus;
    if (cls.lower.rows() != cls.j || cls.upper.rows() != cls.j)
        throw dimension_error("class bound matrices must be j x j");

    const SquaredWindow w = squared_window(cls.lower, cls.upper);
    std::vector<Site> pts(cls.j, Site{0, 0});
    std::uint64_t nodes = 0;
    std::uint64_t accepted = 0;

    std::function<std::uint64_t(int)> rec = [&](int k) -> std::uint64_t {
        std::uint64_t total = 0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                if (++nodes > budget)
                    throw resource_error("enumeration budget exhausted; partial count " +
                                         std::to_string(accepted * torus));
                const Site cand{x, y};
                bool ok = true;
                for (int i = 0; i < k && ok; ++i)
                    ok = w.pass(i, k, torus_dist2(pts[i], cand, n));
                if (!ok) continue;
                if (k == cls.j - 1) {
                    ++total;
                    ++accepted;
                } else {
                    pts[k] = cand;
                    total += rec(k + 1);
                }
            }
        return total;
    };
    return rec(1) * torus;
}

std::uint64_t enumerate_class_count(const EHatClass& cls, int n, std::uint64_t budget) {
    return enumerate_class_count(cls.bounds(), n, budget);
}

WeightedSumCheck weighted_sum_bound_check(int n, double alpha, double beta, double eta,
                                          double delta, int j, std::uint64_t budget) {
    validate_window_params(static_cast<double>(n), delta, beta, eta);
    if (j < 1) throw domain_error("tuple arity must be at least 1");
    if (!(alpha > 0.0)) throw domain_error("alpha must be positive");

    WeightedSumCheck out;
    out.rho_hat_value = rho_hat({j, alpha, beta}).value;
    const double nd = static_cast<double>(n);
    if (j == 1) {
        out.tuples = 1;
        out.sum = std::pow(nd, 2.0 - 2.0 * alpha);
        out.lhs_exponent = 2.0 - 2.0 * alpha;
        return out;
    }

    const double lo = std::pow(nd, eta);
    const double hi = std::pow(nd, beta);
    const double lo2 = lo * lo * (1.0 - 1e-12) - 1e-9;
    const double up2 = hi * hi * (1.0 + 1e-12) + 1e-9;

    std::vector<Site> pts(j, Site{0, 0});
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(j, j);
    std::uint64_t nodes = 0;
    double sum = 0.0;

    std::function<void(int)> rec = [&](int k) {
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                if (++nodes > budget)
                    throw resource_error("weighted-sum budget exhausted after " +
                                         std::to_string(out.tuples) + " tuples");
                const Site cand{x, y};
                bool ok = true;
                for (int i = 0; i < k && ok; ++i) {
                    const double d2 =
                        static_cast<double>(torus_dist2(pts[i], cand, n));
                    ok = d2 >= lo2 && d2 <= up2;
                    if (ok) dist(i, k) = dist(k, i) = std::sqrt(d2);
                }
                if (!ok) continue;
                pts[k] = cand;
                if (k == j - 1) {
                    ++out.tuples;
                    const double h = h_delta_from_distances(dist, nd, delta, beta, eta).value;
                    sum += std::pow(nd, -2.0 * alpha * h);
                } else {
                    rec(k + 1);
                }
            }
    };
    rec(1);
    out.sum = sum * nd * nd;
    out.lhs_exponent = out.sum > 0.0 ? std::log(out.sum) / std::log(nd)
                                     : -std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace latept
