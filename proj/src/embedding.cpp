#include "wald/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "wald/errors.hpp"
#include "wald/kernels.hpp"
#include "wald/order.hpp"

namespace wald {

namespace {

// shared product loop for phi and phi_bar
Eigen::MatrixXd embed_matrix(const WaldTopology& t, const std::vector<double>& lambda) {
    const int n = t.n_leaves();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            if (t.block_of(u) != t.block_of(v)) continue;  // entry stays 0
            double rho = 1.0;
            for (int k : t.edges_on_path(u, v)) rho *= 1.0 - lambda[k];
            m(u - 1, v - 1) = m(v - 1, u - 1) = rho;
        }
    }
    return m;
}

}  // namespace

SpdMatrix phi(const Wald& w) {
    return SpdMatrix(embed_matrix(w.topology(), w.lambda()));
}

SymMatrix phi_bar(const WaldTopology& t, const std::vector<double>& lambda) {
    if (lambda.size() != t.splits().size())
        throw std::invalid_argument("phi_bar: weight count does not match split count");
    return SymMatrix(embed_matrix(t, lambda));
}

SymMatrix d_phi(const WaldTopology& t, const std::vector<double>& lambda, const Split& e) {
    if (lambda.size() != t.splits().size())
        throw std::invalid_argument("d_phi: weight count does not match split count");
    const int idx = t.index_of(e);
    if (idx < 0) throw UnknownSplit("split " + to_string(e) + " is not in the topology");
    const int n = t.n_leaves();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            if (!e.separates(u, v)) continue;
            double prod = -1.0;
            for (int k : t.edges_on_path(u, v))
                if (k != idx) prod *= 1.0 - lambda[k];
            m(u - 1, v - 1) = m(v - 1, u - 1) = prod;
        }
    }
    return SymMatrix(m);
}

SymMatrix d2_phi(const WaldTopology& t, const std::vector<double>& lambda, const Split& e,
                 const Split& f) {
    if (lambda.size() != t.splits().size())
        throw std::invalid_argument("d2_phi: weight count does not match split count");
    const int ei = t.index_of(e);
    const int fi = t.index_of(f);
    if (ei < 0) throw UnknownSplit("split " + to_string(e) + " is not in the topology");
    if (fi < 0) throw UnknownSplit("split " + to_string(f) + " is not in the topology");
    const int n = t.n_leaves();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (ei == fi) return SymMatrix(m);  // affine in each coordinate
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            if (!e.separates(u, v) || !f.separates(u, v)) continue;
            double prod = 1.0;
            for (int k : t.edges_on_path(u, v))
                if (k != ei && k != fi) prod *= 1.0 - lambda[k];
            m(u - 1, v - 1) = m(v - 1, u - 1) = prod;
        }
    }
    return SymMatrix(m);
}

namespace {

constexpr double r1_tol = 1e-12;
constexpr double r2_tol = 1e-10;
constexpr double r3_tol = 1e-12;
constexpr double r4_tol = 1e-10;
constexpr double r5_tol = 1e-12;
constexpr double pd_tol = 1e-12;

// scalar argmin rescans, only taken on the failure path
std::array<int, 4> four_point_witness(const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(p.rows());
    double best = 1e300;
    std::array<int, 4> w = {-1, -1, -1, -1};
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            for (int s = v + 1; s < n; ++s)
                for (int t = s + 1; t < n; ++t) {
                    double p1 = p(u, v) * p(s, t);
                    double p2 = p(u, s) * p(v, t);
                    double p3 = p(u, t) * p(v, s);
                    double lo = std::min(p1, p2);
                    double hi = std::max(p1, p2);
                    double margin = std::min(lo, p3) - std::min(hi, std::max(lo, p3));
                    if (margin < best) {
                        best = margin;
                        w = {u, v, s, t};
                    }
                }
    return w;
}

std::array<int, 4> r4_witness(const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(p.rows());
    double best = 1e300;
    std::array<int, 4> w = {-1, -1, -1, -1};
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            for (int s = 0; s < n; ++s) {
                if (s == u || s == v) continue;
                double margin = p(u, v) - p(u, s) * p(s, v);
                if (margin < best) {
                    best = margin;
                    w = {u, v, s, -1};
                }
            }
    return w;
}

CheckReport check_core(const Eigen::MatrixXd& p) {
    const int n = static_cast<int>(p.rows());
    CheckReport rep;
    for (int u = 0; u < n; ++u)
        if (std::abs(p(u, u) - 1.0) > r1_tol)
            rep.violations.push_back({"R1", p(u, u) - 1.0, {u, -1, -1, -1}});
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            if (p(u, v) < -r3_tol)
                rep.violations.push_back({"R3", p(u, v), {u, v, -1, -1}});
            if (p(u, v) >= 1.0 - r5_tol)
                rep.violations.push_back({"R5", p(u, v) - 1.0, {u, v, -1, -1}});
        }
    std::vector<double> r(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[static_cast<std::size_t>(i) * n + j] = p(i, j);
    const auto& k = kernels::active_impl();
    rep.r2_margin = n >= 4 ? k.four_point_margin(r.data(), n) : 0.0;
    if (rep.r2_margin < -r2_tol)
        rep.violations.push_back({"R2", rep.r2_margin, four_point_witness(p)});
    rep.r4_margin = n >= 3 ? k.r4_margin(r.data(), n) : 0.0;
    if (rep.r4_margin < -r4_tol)
        rep.violations.push_back({"R4", rep.r4_margin, r4_witness(p)});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
    if (es.info() != Eigen::Success) throw EigenFailure("eigensolver did not converge");
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    if (!(rep.min_eigenvalue > pd_tol))
        rep.violations.push_back({"PD", rep.min_eigenvalue, {-1, -1, -1, -1}});
    return rep;
}

}  // namespace

CheckReport check_wald_matrix(const SymMatrix& p) { return check_core(p.mat()); }
CheckReport check_wald_matrix(const SpdMatrix& p) { return check_core(p.mat()); }

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// gathers the block-local rows/columns selected by `idx` into a dense
// row-major buffer
void gather(const Eigen::MatrixXd& m, const std::vector<int>& rows,
            const std::vector<int>& cols, std::vector<double>& out) {
    out.resize(rows.size() * cols.size());
    std::size_t k = 0;
    for (int i : rows)
        for (int j : cols) out[k++] = m(i, j);
}

}  // namespace

Wald recognize(const SpdMatrix& p, RecognizeDiagnostics* diagnostics) {
    RecognizeDiagnostics local;
    RecognizeDiagnostics& diag = diagnostics ? *diagnostics : local;
    diag = {};
    const int n = p.dim();
    if (n < 2 || n > max_leaves)
        throw std::invalid_argument("recognize: dimension must be between 2 and 64");
    CheckReport rep = check_wald_matrix(p);
    if (!rep.ok())
        throw NotAWaldMatrix("matrix violates condition " + rep.violations.front().condition);

    UnionFind uf(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (p(u, v) > 0.0) uf.unite(u, v);
    std::vector<std::vector<int>> blocks(n);
    for (int u = 0; u < n; ++u) blocks[uf.find(u)].push_back(u);

    std::vector<Split> splits;
    std::vector<double> weights;
    for (const auto& members : blocks) {
        const int m = static_cast<int>(members.size());
        if (m < 2) continue;
        if (m > 25)
            throw DomainError("block with " + std::to_string(m) +
                              " leaves is too large for exhaustive recognition");
        Eigen::MatrixXd rho(m, m), d(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double r = p(members[i], members[j]);
                if (!(r > 0.0))
                    throw NotAWaldMatrix("zero entry inside a connectivity block");
                rho(i, j) = r;
                d(i, j) = i == j ? 0.0 : -std::log(r);
            }
        const auto& k = kernels::active_impl();
        std::vector<double> dab, daa, dbb, rab, raa, rbb;
        std::vector<int> ia, ib;
        for (std::uint32_t sub = 1; sub < (1u << (m - 1)); ++sub) {
            ia.clear();
            ib.clear();
            ia.push_back(0);
            for (int i = 1; i < m; ++i)
                (sub & (1u << (i - 1)) ? ib : ia).push_back(i);
            gather(d, ia, ib, dab);
            gather(d, ia, ia, daa);
            gather(d, ib, ib, dbb);
            const int na = static_cast<int>(ia.size());
            const int nb = static_cast<int>(ib.size());
            double index = 0.5 * k.buneman_min(dab.data(), daa.data(), dbb.data(), na, nb);
            LeafMask mask_a = 0, mask_b = 0;
            for (int i : ia) mask_a |= leaf_bit(members[i] + 1);
            for (int i : ib) mask_b |= leaf_bit(members[i] + 1);
            if (index > 1e-9) {
                gather(rho, ia, ib, rab);
                gather(rho, ia, ia, raa);
                gather(rho, ib, ib, rbb);
                double ratio = k.weight_ratio_max(rab.data(), raa.data(), rbb.data(), na, nb);
                double lam = 1.0 - std::sqrt(ratio);
                if (!(lam > 0.0 && lam < 1.0))
                    throw NotAWaldMatrix("recovered weight falls outside (0,1)");
                splits.push_back(Split(mask_a, mask_b));
                weights.push_back(lam);
            } else if (index >= -1e-9) {
                diag.ambiguous.push_back({Split(mask_a, mask_b), index});
            }
        }
    }

    try {
        WaldTopology topo(n, splits);
        std::vector<double> ordered(weights.size());
        for (std::size_t i = 0; i < splits.size(); ++i)
            ordered[topo.index_of(splits[i])] = weights[i];
        Wald result(topo, ordered);
        diag.roundtrip_error = (phi(result).mat() - p.mat()).cwiseAbs().maxCoeff();
        if (diag.roundtrip_error > 1e-9)
            throw NotAWaldMatrix("reconstruction residual " +
                                 std::to_string(diag.roundtrip_error) + " exceeds 1e-9");
        return result;
    } catch (const NotAWaldMatrix&) {
        throw;
    } catch (const WaldError& e) {
        throw NotAWaldMatrix(std::string("recovered split system is invalid: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw NotAWaldMatrix(std::string("recovered split system is invalid: ") + e.what());
    }
}

Wald contract_toward_infinity(const Wald& w, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("contraction parameter must lie in [0,1]");
    if (x == 0.0) return w;
    const int n = w.n_leaves();
    if (x == 1.0) return Wald::forest_infinity(n);
    Eigen::MatrixXd m =
        x * Eigen::MatrixXd::Identity(n, n) + (1.0 - x) * phi(w).mat();
    return recognize(SpdMatrix(m));
}

WhitneyFactor whitney_factor(const Wald& sub, const WaldTopology& t,
                             const std::vector<double>& lambda_star, const Split& e_prime) {
    if (lambda_star.size() != t.splits().size())
        throw std::invalid_argument("whitney_factor: weight count does not match split count");
    Eigen::MatrixXd a = phi(sub).mat();
    Eigen::MatrixXd b = phi_bar(t, lambda_star).mat();
    if ((a - b).cwiseAbs().maxCoeff() > 1e-9)
        throw PreconditionViolated("corner coordinates do not embed to the sub-forest");
    auto witness = partial_order_compare(sub.topology(), t);
    if (!witness)
        throw PreconditionViolated("sub-forest topology is not below the given topology");
    const std::vector<Split>* rset = witness->r_set(e_prime);
    if (!rset)
        throw UnknownSplit("split " + to_string(e_prime) + " is not in the sub-topology");
    int chosen = -1;
    for (std::size_t i = 0; i < rset->size(); ++i)
        if (lambda_star[t.index_of((*rset)[i])] != 0.0) {
            chosen = static_cast<int>(i);
            break;
        }
    if (chosen < 0)
        throw PreconditionViolated("every weight in the restriction class is zero");
    double c = 1.0;
    for (std::size_t i = 0; i < rset->size(); ++i)
        if (static_cast<int>(i) != chosen)
            c *= 1.0 - lambda_star[t.index_of((*rset)[i])];
    return {(*rset)[chosen], c};
}

}  // namespace wald
