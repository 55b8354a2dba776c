#include "latept/ultrametric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "latept/errors.hpp"

namespace latept {

std::vector<int> DecompositionTree::indices() const {
    if (is_leaf()) return {leaf};
    std::vector<int> out;
    for (const auto& c : children) {
        auto sub = c.indices();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

bool is_member(const Eigen::MatrixXd& m, double eta, double tol) {
    if (m.rows() != m.cols())
        throw dimension_error("is_member: matrix is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()));
    if (eta <= 0.0 || eta >= 1.0) throw domain_error("is_member: eta must lie in (0,1)");
    const int j = static_cast<int>(m.rows());
    for (int i = 0; i < j; ++i) {
        if (std::abs(m(i, i) - 1.0) > tol) return false;
        for (int l = i + 1; l < j; ++l) {
            if (std::abs(m(i, l) - m(l, i)) > tol) return false;
            if (m(i, l) < -tol || m(i, l) > 1.0 - eta + tol) return false;
        }
    }
    for (int i = 0; i < j; ++i)
        for (int l = 0; l < j; ++l) {
            if (l == i) continue;
            for (int p = 0; p < j; ++p) {
                if (p == i || p == l) continue;
                if (m(i, l) < std::min(m(l, p), m(i, p)) - tol) return false;
            }
        }
    return true;
}

UltraMatrix equidistant(int j, double r, double eta) {
    if (j < 1) throw domain_error("equidistant: j must be positive");
    if (eta <= 0.0 || eta >= 1.0) throw domain_error("equidistant: eta must lie in (0,1)");
    if (j > 1 && (r < -tol_member || r > 1.0 - eta + tol_member))
        throw domain_error("equidistant: r must lie in [0, 1-eta]");
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(j, j, j > 1 ? r : 0.0);
    a.diagonal().setOnes();
    return UltraMatrix(j, eta, std::move(a));
}

namespace {

// Union-find over {0,...,j-1}.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int j) : parent(j) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int x, int y) { parent[find(x)] = find(y); }
};

DecompositionTree decompose_indices(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    if (k == 1) {
        DecompositionTree leafnode;
        leafnode.leaf = idx[0];
        return leafnode;
    }
    double s = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int l = i + 1; l < k; ++l) s = std::min(s, a(idx[i], idx[l]));

    UnionFind uf(k);
    for (int i = 0; i < k; ++i)
        for (int l = i + 1; l < k; ++l)
            if (a(idx[i], idx[l]) > s + tol_member) uf.unite(i, l);

    std::vector<std::vector<int>> classes(k);
    for (int i = 0; i < k; ++i) classes[uf.find(i)].push_back(idx[i]);

    DecompositionTree node;
    node.separation = s;
    for (auto& cls : classes)
        if (!cls.empty()) node.children.push_back(decompose_indices(a, cls));
    return node;
}

double xi_of_tree(const DecompositionTree& t) {
    if (t.is_leaf()) return 0.0;
    double v = (static_cast<double>(t.children.size()) - 1.0) * (1.0 - t.separation);
    for (const auto& c : t.children) v += xi_of_tree(c);
    return v;
}

} // namespace

DecompositionTree maximal_decompose(const UltraMatrix& A) {
    if (!is_member(A.a, A.eta)) throw class_error("maximal_decompose: input is not a class member");
    std::vector<int> idx(A.dim);
    std::iota(idx.begin(), idx.end(), 0);
    return decompose_indices(A.a, idx);
}

UltraMatrix boxplus(const std::vector<UltraMatrix>& blocks,
                    const std::vector<std::vector<int>>& placements, double s) {
    if (blocks.empty()) throw placement_error("boxplus: no blocks");
    if (blocks.size() != placements.size())
        throw placement_error("boxplus: blocks and placements differ in length");
    if (blocks.size() == 1) {
        if (static_cast<int>(placements[0].size()) != blocks[0].dim)
            throw placement_error("boxplus: placement arity mismatch");
        return blocks[0]; // single block: identity composition
    }

    int j = 0;
    double eta = 1.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (static_cast<int>(placements[k].size()) != blocks[k].dim)
            throw placement_error("boxplus: placement arity mismatch at block " + std::to_string(k));
        j += blocks[k].dim;
        eta = std::min(eta, blocks[k].eta);
        for (int i = 0; i < blocks[k].dim; ++i)
            for (int l = i + 1; l < blocks[k].dim; ++l)
                if (blocks[k].a(i, l) < s - tol_member)
                    throw domain_error("boxplus: s exceeds an internal entry of block " +
                                       std::to_string(k));
    }
    if (s < -tol_member || s > 1.0 - eta + tol_member)
        throw domain_error("boxplus: s must lie in [0, 1-eta]");

    std::vector<int> seen(j, 0);
    for (const auto& sigma : placements)
        for (int g : sigma) {
            if (g < 0 || g >= j) throw placement_error("boxplus: placement index out of range");
            if (seen[g]++) throw placement_error("boxplus: overlapping placements");
        }

    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(j, j, s);
    a.diagonal().setOnes();
    for (std::size_t k = 0; k < blocks.size(); ++k)
        for (int i = 0; i < blocks[k].dim; ++i)
            for (int l = 0; l < blocks[k].dim; ++l)
                a(placements[k][i], placements[k][l]) = blocks[k].a(i, l);
    return UltraMatrix(j, eta, std::move(a));
}

UltraMatrix boxplus(const UltraMatrix& A1, const UltraMatrix& A2, double s) {
    std::vector<int> p1(A1.dim), p2(A2.dim);
    std::iota(p1.begin(), p1.end(), 0);
    std::iota(p2.begin(), p2.end(), A1.dim);
    return boxplus({A1, A2}, {p1, p2}, s);
}

double xi(const UltraMatrix& A) { return xi_of_tree(maximal_decompose(A)); }

ChiSolve chi(const UltraMatrix& A) {
    if (!is_member(A.a, A.eta)) throw class_error("chi: input is not a class member");
    const int j = A.dim;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(j);
    Eigen::VectorXd y;
    Eigen::LLT<Eigen::MatrixXd> llt(A.a);
    if (llt.info() == Eigen::Success) {
        y = llt.solve(ones);
    } else {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A.a);
        y = lu.solve(ones);
    }
    double resid = (A.a * y - ones).cwiseAbs().maxCoeff();
    if (!y.allFinite() || resid > 1e-8)
        throw conditioning_error("chi: solve failed (residual " + std::to_string(resid) + ")");

    ChiSolve out;
    out.y = y;
    out.chi = y.sum();

    // Conditions (B) and (A): positivity and 1 - s*chi > 0, s the matrix
    // minimum (for j = 1 that minimum is the diagonal 1, so only >= 0 holds).
    for (int i = 0; i < j; ++i)
        if (y(i) <= -tol_solve)
            throw conditioning_error("chi: solution component " + std::to_string(i) +
                                     " is not positive");
    double s = A.a.minCoeff();
    double slack = 1.0 - s * out.chi;
    if ((j == 1 && slack < -tol_solve) || (j > 1 && slack <= -tol_solve))
        throw conditioning_error("chi: normalization condition violated");
    return out;
}

double chi_merge(double s, double b, double c) {
    double denom = 1.0 - s * s * b * c;
    if (denom <= 0.0) throw domain_error("chi_merge: nonpositive denominator");
    return (b + c - 2.0 * s * b * c) / denom;
}

std::pair<double, UltraMatrix> chi_min(int j, double r, double eta) {
    if (j < 2) throw domain_error("chi_min: j must be at least 2");
    if (r < 0.0 || r > static_cast<double>(j - 1))
        throw domain_error("chi_min: r must lie in [0, j-1]");
    double off = 1.0 - r / static_cast<double>(j - 1);
    if (off > 1.0 - eta + tol_member)
        throw domain_error("chi_min: minimizer entry 1-r/(j-1) exceeds 1-eta; infeasible for this eta");
    return {static_cast<double>(j) / (static_cast<double>(j) - r), equidistant(j, off, eta)};
}

double perturb_stability_check(const UltraMatrix& A, double delta, int trials,
                               std::uint64_t seed, int* singular_out) {
    if (delta < 0.0) throw domain_error("perturb_stability_check: delta must be nonnegative");
    if (trials < 1) throw domain_error("perturb_stability_check: trials must be positive");
    double chi0 = chi(A).chi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-delta, delta);

    const int j = A.dim;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(j);
    double worst = 0.0;
    int singular = 0;
    for (int t = 0; t < trials; ++t) {
        Eigen::MatrixXd m = A.a;
        for (int i = 0; i < j; ++i)
            for (int l = i; l < j; ++l) {
                double d = u(rng);
                m(i, l) += d;
                if (l != i) m(l, i) += d;
            }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        Eigen::VectorXd y = lu.solve(ones);
        if (!y.allFinite() || (m * y - ones).cwiseAbs().maxCoeff() > 1e-6) {
            ++singular; // a bad delta for this draw; reported, not fatal
            continue;
        }
        worst = std::max(worst, std::abs(y.sum() - chi0));
    }
    if (singular_out) *singular_out = singular;
    return worst;
}

namespace {

// Tree shape with explicit levels, used only by the sampler. Structure is
// carried by parent links into the flat node list.
struct ShapeNode {
    std::vector<int> leaves; // leaf labels under this node
    double w = 0.0;          // 1 - separation, internal nodes only
    int parent = -1;         // index into flat node list
};

void random_shape(std::vector<int> labels, std::mt19937_64& rng,
                  std::vector<ShapeNode>& flat, int parent) {
    ShapeNode node;
    node.leaves = labels;
    node.parent = parent;
    int self = static_cast<int>(flat.size());
    flat.push_back(node);
    const int k = static_cast<int>(labels.size());
    if (k == 1) return;

    std::uniform_int_distribution<int> mdist(2, k);
    int m = mdist(rng);
    // Random composition of k into m nonempty parts: choose m-1 cut points
    // among the k-1 gaps.
    std::vector<int> gaps(k - 1);
    std::iota(gaps.begin(), gaps.end(), 1);
    std::shuffle(gaps.begin(), gaps.end(), rng);
    std::vector<int> cuts(gaps.begin(), gaps.begin() + (m - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(k);
    int start = 0;
    for (int cut : cuts) {
        std::vector<int> part(labels.begin() + start, labels.begin() + cut);
        start = cut;
        random_shape(std::move(part), rng, flat, self);
    }
}

void fill_entries(const std::vector<ShapeNode>& flat, int node, Eigen::MatrixXd& a) {
    // Entries between different children of `node` equal its separation.
    std::vector<std::vector<int>> groups;
    for (std::size_t c = 0; c < flat.size(); ++c)
        if (flat[c].parent == node) groups.push_back(flat[c].leaves);
    double s = 1.0 - flat[node].w;
    for (std::size_t g1 = 0; g1 < groups.size(); ++g1)
        for (std::size_t g2 = g1 + 1; g2 < groups.size(); ++g2)
            for (int i : groups[g1])
                for (int l : groups[g2]) a(i, l) = a(l, i) = s;
    for (std::size_t c = 0; c < flat.size(); ++c)
        if (flat[c].parent == node && flat[c].leaves.size() > 1)
            fill_entries(flat, static_cast<int>(c), a);
}

} // namespace

UltraMatrix sample_xi_level(int j, double r, double eta, std::mt19937_64& rng) {
    if (j < 2) throw domain_error("sample_xi_level: j must be at least 2");
    if (eta <= 0.0 || eta >= 1.0) throw domain_error("sample_xi_level: eta must lie in (0,1)");
    if (r < (j - 1) * eta - tol_member || r > static_cast<double>(j - 1) + tol_member)
        throw domain_error("sample_xi_level: r outside [(j-1)eta, j-1]");

    std::uniform_real_distribution<double> unif(eta, 1.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<int> labels(j);
        std::iota(labels.begin(), labels.end(), 0);
        std::shuffle(labels.begin(), labels.end(), rng);

        std::vector<ShapeNode> flat;
        random_shape(labels, rng, flat, -1);

        // Draw levels, rescale so sum (m_k - 1) w_k = r, then check that every
        // level stays in [eta, 1] and decreases strictly down the tree.
        double weight = 0.0;
        std::vector<int> internal;
        for (std::size_t k = 0; k < flat.size(); ++k)
            if (flat[k].leaves.size() > 1) {
                flat[k].w = unif(rng);
                internal.push_back(static_cast<int>(k));
            }
        for (int k : internal) {
            int m = 0;
            for (const auto& n : flat)
                if (n.parent == k) ++m;
            weight += (m - 1) * flat[k].w;
        }
        double c = r / weight;
        bool ok = true;
        for (int k : internal) {
            flat[k].w *= c;
            if (flat[k].w < eta - tol_member || flat[k].w > 1.0 + tol_member) ok = false;
        }
        if (ok)
            for (int k : internal) {
                int p = flat[k].parent;
                while (p >= 0 && flat[p].leaves.size() <= 1) p = flat[p].parent;
                if (p >= 0 && flat[k].w >= flat[p].w - 1e-9) ok = false;
            }
        if (!ok) continue;

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(j, j);
        a.diagonal().setOnes();
        fill_entries(flat, 0, a);
        if (!is_member(a, eta)) continue;
        return UltraMatrix(j, eta, std::move(a));
    }
    // Rejection stalled (possible near the ends of the r range): fall back to
    // the equidistant representative, which always lies on the level set.
    return equidistant(j, 1.0 - r / static_cast<double>(j - 1), eta);
}

} // namespace latept
