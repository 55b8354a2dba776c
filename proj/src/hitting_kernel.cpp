#include "latept/hitting_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latept/errors.hpp"

namespace latept {

namespace {

constexpr int max_domain_sites = 4096; // dense-solve guard

// Enumerated domain with neighbor structure. Torus sites are the full n x n
// grid with wraparound; disk sites are {|z| < n} with killed exterior
// (neighbors outside the disk are absorbing "nowhere").
struct FlatDomain {
    KernelDomain dom;
    std::vector<Site> sites;
    std::vector<int> index; // flat lookup, -1 outside

    int at(Site p) const {
        if (dom.kind == KernelDomain::Kind::torus) {
            int x = ((p.x % dom.n) + dom.n) % dom.n;
            int y = ((p.y % dom.n) + dom.n) % dom.n;
            return index[static_cast<std::size_t>(y) * dom.n + x];
        }
        int w = 2 * dom.n + 1;
        if (p.x < -dom.n || p.x > dom.n || p.y < -dom.n || p.y > dom.n) return -1;
        return index[static_cast<std::size_t>(p.y + dom.n) * w + (p.x + dom.n)];
    }
};

FlatDomain enumerate_domain(const KernelDomain& dom) {
    if (dom.n < 2) throw domain_error("kernel domain: n must be at least 2");
    FlatDomain f;
    f.dom = dom;
    if (dom.kind == KernelDomain::Kind::torus) {
        f.index.assign(static_cast<std::size_t>(dom.n) * dom.n, -1);
        for (int y = 0; y < dom.n; ++y)
            for (int x = 0; x < dom.n; ++x) {
                f.index[static_cast<std::size_t>(y) * dom.n + x] =
                    static_cast<int>(f.sites.size());
                f.sites.push_back({x, y});
            }
    } else {
        int w = 2 * dom.n + 1;
        f.index.assign(static_cast<std::size_t>(w) * w, -1);
        for (int y = -dom.n; y <= dom.n; ++y)
            for (int x = -dom.n; x <= dom.n; ++x)
                if (static_cast<std::int64_t>(x) * x + static_cast<std::int64_t>(y) * y <
                    static_cast<std::int64_t>(dom.n) * dom.n) {
                    f.index[static_cast<std::size_t>(y + dom.n) * w + (x + dom.n)] =
                        static_cast<int>(f.sites.size());
                    f.sites.push_back({x, y});
                }
    }
    if (static_cast<int>(f.sites.size()) > max_domain_sites)
        throw resource_error("kernel domain: " + std::to_string(f.sites.size()) +
                             " sites exceeds the dense-solve budget of " +
                             std::to_string(max_domain_sites));
    return f;
}

void validate_config(const PointConfig& cfg, const FlatDomain& f) {
    if (cfg.points.empty()) throw config_error("point config: no marked points");
    auto check_in = [&](Site p, const char* what) {
        if (f.at(p) < 0)
            throw config_error(std::string("point config: ") + what + " (" + std::to_string(p.x) +
                               "," + std::to_string(p.y) + ") outside the domain");
    };
    for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        check_in(cfg.points[i], "marked point");
        for (std::size_t l = i + 1; l < cfg.points.size(); ++l)
            if (f.at(cfg.points[i]) == f.at(cfg.points[l]))
                throw config_error("point config: marked points coincide");
    }
    check_in(cfg.witness, "witness");
    for (const Site& p : cfg.points)
        if (f.at(p) == f.at(cfg.witness))
            throw config_error("point config: witness coincides with a marked point");
    for (const Site& d : cfg.kill) {
        check_in(d, "kill site");
        if (f.at(d) == f.at(cfg.witness))
            throw config_error("point config: kill region contains the witness");
        for (const Site& p : cfg.points)
            if (f.at(d) == f.at(p))
                throw config_error("point config: kill region intersects the marked points");
    }
    if (f.dom.kind == KernelDomain::Kind::torus && cfg.kill.empty())
        throw config_error("point config: torus domain needs a nonempty kill region");
}

const int DX[4] = {1, -1, 0, 0};
const int DY[4] = {0, 0, 1, -1};

// Dense absorbing-chain solver: transient sites keep I - P, steps into
// absorbing or killed sites drop out of the system.
struct AbsorbingSolve {
    std::vector<int> tindex; // domain site index -> transient row, -1 if absorbing
    std::vector<int> tsites; // transient row -> domain site index
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    const FlatDomain* f = nullptr;

    template <typename Pred>
    AbsorbingSolve(const FlatDomain& fd, Pred absorbing) : f(&fd) {
        const int N = static_cast<int>(fd.sites.size());
        tindex.assign(N, -1);
        for (int i = 0; i < N; ++i)
            if (!absorbing(i)) {
                tindex[i] = static_cast<int>(tsites.size());
                tsites.push_back(i);
            }
        const int T = static_cast<int>(tsites.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(T, T);
        for (int t = 0; t < T; ++t) {
            m(t, t) = 1.0;
            Site p = fd.sites[tsites[t]];
            for (int d = 0; d < 4; ++d) {
                int nb = fd.at({p.x + DX[d], p.y + DY[d]});
                if (nb >= 0 && tindex[nb] >= 0) m(t, tindex[nb]) -= 0.25;
            }
        }
        lu.compute(m);
    }

    // Expected visits to `target` (a transient domain-site index) from each
    // transient site: the column of the killed Green's function.
    Eigen::VectorXd green_column(int target) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(tsites.size());
        b[tindex[target]] = 1.0;
        return lu.solve(b);
    }

    // Absorption probabilities at `target` (an absorbing domain-site index).
    Eigen::VectorXd absorbed_at(int target) const {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(tsites.size());
        for (int t = 0; t < static_cast<int>(tsites.size()); ++t) {
            Site p = f->sites[tsites[t]];
            for (int d = 0; d < 4; ++d)
                if (f->at({p.x + DX[d], p.y + DY[d]}) == target) b[t] += 0.25;
        }
        return lu.solve(b);
    }

    // One step from `from`, then absorption at `target`: the first-return
    // convention for a start site that is itself absorbing in this system.
    double one_step_absorbed(int from, int target, const Eigen::VectorXd& h) const {
        double v = 0.0;
        Site p = f->sites[from];
        for (int d = 0; d < 4; ++d) {
            int nb = f->at({p.x + DX[d], p.y + DY[d]});
            if (nb < 0) continue;
            if (nb == target)
                v += 0.25;
            else if (tindex[nb] >= 0)
                v += 0.25 * h[tindex[nb]];
        }
        return v;
    }
};

struct Prepared {
    FlatDomain f;
    std::vector<int> xs; // domain indices of the marked points
    int y = -1;
    std::vector<char> in_kill;   // per domain index
    std::vector<char> is_marked; // per domain index
};

Prepared prepare(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p{enumerate_domain(dom), {}, -1, {}, {}};
    validate_config(cfg, p.f);
    p.in_kill.assign(p.f.sites.size(), 0);
    p.is_marked.assign(p.f.sites.size(), 0);
    for (const Site& s : cfg.points) {
        p.xs.push_back(p.f.at(s));
        p.is_marked[p.f.at(s)] = 1;
    }
    p.y = p.f.at(cfg.witness);
    for (const Site& s : cfg.kill) p.in_kill[p.f.at(s)] = 1;
    return p;
}

// System 1: absorbing at D~ u {y} (X transient). Carries Q and f.
AbsorbingSolve system_free(const Prepared& p) {
    return AbsorbingSolve(p.f, [&](int i) { return p.in_kill[i] || i == p.y; });
}

// System 2: absorbing at X u D~ u {y}.
AbsorbingSolve system_marked(const Prepared& p) {
    return AbsorbingSolve(p.f, [&](int i) { return p.in_kill[i] || i == p.y || p.is_marked[i]; });
}

} // namespace

Eigen::MatrixXd build_q(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p = prepare(cfg, dom);
    AbsorbingSolve sys = system_free(p);
    const int j = static_cast<int>(p.xs.size());
    Eigen::MatrixXd q(j, j);
    for (int l = 0; l < j; ++l) {
        Eigen::VectorXd col = sys.green_column(p.xs[l]);
        for (int i = 0; i < j; ++i) q(i, l) = col[sys.tindex[p.xs[i]]];
    }
    return q;
}

Eigen::MatrixXd build_u(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p = prepare(cfg, dom);
    AbsorbingSolve sys = system_marked(p);
    const int j = static_cast<int>(p.xs.size());
    Eigen::MatrixXd u(j, j);
    for (int l = 0; l < j; ++l) {
        Eigen::VectorXd h = sys.absorbed_at(p.xs[l]);
        for (int i = 0; i < j; ++i) u(i, l) = sys.one_step_absorbed(p.xs[i], p.xs[l], h);
    }
    return u;
}

double verify_inverse_identity(const Eigen::MatrixXd& q, const Eigen::MatrixXd& u) {
    if (q.rows() != q.cols() || u.rows() != u.cols() || q.rows() != u.rows())
        throw dimension_error("verify_inverse_identity: shape mismatch");
    Eigen::MatrixXd qinv = q.partialPivLu().inverse();
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(q.rows(), q.cols());
    return (qinv - (e - u)).cwiseAbs().maxCoeff();
}

Eigen::VectorXd free_hit_probabilities(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p = prepare(cfg, dom);
    AbsorbingSolve sys = system_free(p);
    Eigen::VectorXd h = sys.absorbed_at(p.y);
    const int j = static_cast<int>(p.xs.size());
    Eigen::VectorXd f(j);
    for (int u = 0; u < j; ++u) f[u] = h[sys.tindex[p.xs[u]]];
    return f;
}

namespace {

// Shared core: cofactor row of Q applied to the free probabilities.
struct KernelParts {
    Eigen::MatrixXd q;
    Eigen::MatrixXd qinv;
    Eigen::VectorXd f;
};

KernelParts kernel_parts(const PointConfig& cfg, const KernelDomain& dom) {
    KernelParts k;
    k.q = build_q(cfg, dom);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(k.q);
    double det = lu.determinant();
    double scale = k.q.cwiseAbs().maxCoeff();
    double dim = static_cast<double>(k.q.rows());
    if (std::abs(det) < 1e-12 * std::pow(scale, dim))
        throw conditioning_error("cofactor_hit_probability: Q is numerically singular");
    k.qinv = lu.inverse();
    k.f = free_hit_probabilities(cfg, dom);
    return k;
}

} // namespace

double cofactor_hit_probability(const PointConfig& cfg, const KernelDomain& dom, int u) {
    KernelParts k = kernel_parts(cfg, dom);
    if (u < 0 || u >= k.q.rows()) throw domain_error("cofactor_hit_probability: index out of range");
    // cof(q_{u,i})/det = (Q^{-1})_{i,u}, so the weighted sum is column u of
    // Q^{-1} dotted with f (equal to row u: Q is symmetric).
    return k.qinv.col(u).dot(k.f);
}

double cofactor_hit_probability_factored(const PointConfig& cfg, const KernelDomain& dom, int u) {
    KernelParts k = kernel_parts(cfg, dom);
    if (u < 0 || u >= k.q.rows())
        throw domain_error("cofactor_hit_probability_factored: index out of range");
    return k.f[u] * k.qinv.col(u).sum();
}

double direct_hit_oracle(const PointConfig& cfg, const KernelDomain& dom, int u) {
    Prepared p = prepare(cfg, dom);
    if (u < 0 || u >= static_cast<int>(p.xs.size()))
        throw domain_error("direct_hit_oracle: index out of range");
    AbsorbingSolve sys = system_marked(p);
    Eigen::VectorXd h = sys.absorbed_at(p.y);
    return sys.one_step_absorbed(p.xs[u], p.y, h);
}

double last_exit_decomposition_check(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p = prepare(cfg, dom);
    const int j = static_cast<int>(p.xs.size());

    Eigen::MatrixXd q = build_q(cfg, dom);
    Eigen::VectorXd f = free_hit_probabilities(cfg, dom);
    Eigen::VectorXd d(j);
    for (int u = 0; u < j; ++u) d[u] = direct_hit_oracle(cfg, dom, u);
    return (f - q * d).cwiseAbs().maxCoeff();
}

HitReport hit_probability_report(const PointConfig& cfg, const KernelDomain& dom) {
    Prepared p = prepare(cfg, dom);
    const int j = static_cast<int>(p.xs.size());
    HitReport r;

    AbsorbingSolve sysf = system_free(p);
    r.q.resize(j, j);
    for (int l = 0; l < j; ++l) {
        Eigen::VectorXd col = sysf.green_column(p.xs[l]);
        for (int i = 0; i < j; ++i) r.q(i, l) = col[sysf.tindex[p.xs[i]]];
    }
    Eigen::VectorXd hy = sysf.absorbed_at(p.y);
    r.f.resize(j);
    for (int i = 0; i < j; ++i) r.f[i] = hy[sysf.tindex[p.xs[i]]];

    AbsorbingSolve sysm = system_marked(p);
    r.u.resize(j, j);
    for (int l = 0; l < j; ++l) {
        Eigen::VectorXd h = sysm.absorbed_at(p.xs[l]);
        for (int i = 0; i < j; ++i) r.u(i, l) = sysm.one_step_absorbed(p.xs[i], p.xs[l], h);
    }
    Eigen::VectorXd hym = sysm.absorbed_at(p.y);
    r.direct.resize(j);
    for (int i = 0; i < j; ++i) r.direct[i] = sysm.one_step_absorbed(p.xs[i], p.y, hym);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(r.q);
    double det = lu.determinant();
    double scale = r.q.cwiseAbs().maxCoeff();
    if (std::abs(det) < 1e-12 * std::pow(scale, static_cast<double>(j)))
        throw conditioning_error("hit_probability_report: Q is numerically singular");
    Eigen::MatrixXd qinv = lu.inverse();
    r.formula = qinv.transpose() * r.f; // entry u: column u of Q^{-1} dotted with f
    r.factored.resize(j);
    for (int u = 0; u < j; ++u) r.factored[u] = r.f[u] * qinv.col(u).sum();
    r.chi_q = qinv.sum();

    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(j, j);
    r.inverse_error = (qinv - (e - r.u)).cwiseAbs().maxCoeff();
    r.simeq_residual = (r.f - r.q * r.direct).cwiseAbs().maxCoeff();
    return r;
}

std::vector<Site> circle_sites(const KernelDomain& dom, Site center, double radius) {
    if (radius <= 0.0) throw domain_error("circle_sites: radius must be positive");
    FlatDomain f = enumerate_domain(dom);
    std::vector<Site> out;
    for (const Site& s : f.sites) {
        double dx, dy;
        if (dom.kind == KernelDomain::Kind::torus) {
            int ax = std::abs(s.x - center.x), ay = std::abs(s.y - center.y);
            dx = std::min(ax, dom.n - ax);
            dy = std::min(ay, dom.n - ay);
        } else {
            dx = s.x - center.x;
            dy = s.y - center.y;
        }
        double dist = std::hypot(dx, dy);
        if (dist >= radius && dist < radius + 1.0) out.push_back(s);
    }
    return out;
}

} // namespace latept
