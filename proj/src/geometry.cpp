#include "wald/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

namespace {

constexpr double lambda_pin = 1e-9;        // floor for coordinates kept alive
constexpr double lambda_cap = 1.0 - 1e-9;  // ceiling at the 1-face
constexpr double fd_step = 1e-5;

// tr(M N) without forming the product
double trace_product(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n) {
    return m.cwiseProduct(n.transpose()).sum();
}

Eigen::MatrixXd invert_metric(const Eigen::MatrixXd& g) {
    if (g.rows() == 0) return g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.info() != Eigen::Success) throw EigenFailure("eigensolver did not converge");
    double lo = es.eigenvalues().minCoeff();
    if (!(lo > 1e-12))
        throw SingularMetric("pullback metric has eigenvalue " + std::to_string(lo));
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

// everything the tensor formulas need at one coordinate point; interiority is
// not required here because curvature differencing steps slightly past walls
struct ChartEval {
    SpdMatrix p;
    Eigen::MatrixXd pinv;
    std::vector<Eigen::MatrixXd> d;  // D_i
    std::vector<Eigen::MatrixXd> q;  // P^-1 D_i
    Eigen::MatrixXd g;

    ChartEval(const WaldTopology& t, const std::vector<double>& lambda)
        : p(phi_bar(t, lambda)) {
        pinv = p.inverse();
        const int m = static_cast<int>(t.splits().size());
        d.reserve(m);
        q.reserve(m);
        std::vector<Eigen::MatrixXd> mhat(m);
        for (int i = 0; i < m; ++i) {
            d.push_back(d_phi(t, lambda, t.splits()[i]).mat());
            q.push_back(pinv * d.back());
            mhat[i] = p.inv_sqrt() * d.back() * p.inv_sqrt();
        }
        g.resize(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                g(i, j) = g(j, i) = mhat[i].cwiseProduct(mhat[j]).sum();
    }
};

// analytic d g_ij / d lambda_k from d(P^-1) = -P^-1 (dP) P^-1
std::vector<Eigen::MatrixXd> metric_derivs(const WaldTopology& t,
                                           const std::vector<double>& lambda,
                                           const ChartEval& ce) {
    const int m = static_cast<int>(ce.q.size());
    std::vector<std::vector<Eigen::MatrixXd>> qq(m, std::vector<Eigen::MatrixXd>(m));
    std::vector<std::vector<Eigen::MatrixXd>> q2(m, std::vector<Eigen::MatrixXd>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            qq[i][j] = ce.q[i] * ce.q[j];
            if (j >= i) {
                q2[i][j] = ce.pinv *
                           d2_phi(t, lambda, t.splits()[i], t.splits()[j]).mat();
                if (j > i) q2[j][i] = q2[i][j];
            }
        }
    std::vector<Eigen::MatrixXd> dg(m, Eigen::MatrixXd(m, m));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                // filled for j >= i and mirrored so dg[k] is exactly symmetric
                dg[k](i, j) = -trace_product(qq[k][i], ce.q[j]) -
                              trace_product(qq[i][k], ce.q[j]) +
                              trace_product(q2[i][k], ce.q[j]) +
                              trace_product(q2[j][k], ce.q[i]);
                dg[k](j, i) = dg[k](i, j);
            }
    return dg;
}

std::vector<Eigen::MatrixXd> christoffel_from(const std::vector<Eigen::MatrixXd>& dg,
                                              const Eigen::MatrixXd& g_inv) {
    const int m = static_cast<int>(dg.size());
    std::vector<Eigen::MatrixXd> gamma(m, Eigen::MatrixXd::Zero(m, m));
    for (int mm = 0; mm < m; ++mm)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double sum = 0.0;
                for (int k = 0; k < m; ++k)
                    sum += (dg[i](j, k) + dg[j](k, i) - dg[k](i, j)) * g_inv(k, mm);
                gamma[mm](i, j) = 0.5 * sum;
                gamma[mm](j, i) = gamma[mm](i, j);
            }
    return gamma;
}

std::vector<Eigen::MatrixXd> christoffel_at(const WaldTopology& t,
                                            const std::vector<double>& lambda) {
    ChartEval ce(t, lambda);
    return christoffel_from(metric_derivs(t, lambda, ce), invert_metric(ce.g));
}

struct CurvatureData {
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> gamma;
    std::vector<std::vector<Eigen::MatrixXd>> dgamma;  // dgamma[k][m](i,j)
};

CurvatureData curvature_data(const GroveChart& c) {
    ChartEval ce(c.topology, c.lambda);
    CurvatureData out;
    out.g = ce.g;
    out.gamma = christoffel_from(metric_derivs(c.topology, c.lambda, ce),
                                 invert_metric(ce.g));
    const int m = c.dim();
    out.dgamma.resize(m);
    for (int k = 0; k < m; ++k) {
        std::vector<double> lp = c.lambda, lm = c.lambda;
        lp[k] += fd_step;
        lm[k] -= fd_step;
        auto gp = christoffel_at(c.topology, lp);
        auto gm = christoffel_at(c.topology, lm);
        out.dgamma[k].resize(m);
        for (int mm = 0; mm < m; ++mm)
            out.dgamma[k][mm] = (gp[mm] - gm[mm]) / (2.0 * fd_step);
    }
    return out;
}

// coefficient of d_l inside R(d_i, d_j) d_k
double riemann_coeff(const CurvatureData& cd, int l, int i, int j, int k) {
    const int m = static_cast<int>(cd.gamma.size());
    double sum = cd.dgamma[i][l](j, k) - cd.dgamma[j][l](i, k);
    for (int mm = 0; mm < m; ++mm)
        sum += cd.gamma[mm](j, k) * cd.gamma[l](i, mm) -
               cd.gamma[mm](i, k) * cd.gamma[l](j, mm);
    return sum;
}

// <R(x,y)y, x> at the chart point
double riemann_quad(const CurvatureData& cd, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
    const int m = static_cast<int>(cd.gamma.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    v(l) += x(i) * y(j) * y(k) * riemann_coeff(cd, l, i, j, k);
    return v.dot(cd.g * x);
}

}  // namespace

GroveChart::GroveChart(WaldTopology t, std::vector<double> l)
    : topology(std::move(t)), lambda(std::move(l)) {
    if (lambda.size() != topology.splits().size())
        throw std::invalid_argument("GroveChart: weight count does not match split count");
    for (double x : lambda)
        if (!(x > 0.0 && x < 1.0))
            throw std::invalid_argument("GroveChart: coordinates must lie strictly in (0,1)");
}

GroveChart GroveChart::of(const Wald& w) { return GroveChart(w.topology(), w.lambda()); }

MetricTensor metric_tensor(const GroveChart& c) {
    ChartEval ce(c.topology, c.lambda);
    return {ce.g, invert_metric(ce.g)};
}

std::vector<Eigen::MatrixXd> metric_derivatives(const GroveChart& c) {
    ChartEval ce(c.topology, c.lambda);
    return metric_derivs(c.topology, c.lambda, ce);
}

std::vector<Eigen::MatrixXd> christoffel(const GroveChart& c) {
    return christoffel_at(c.topology, c.lambda);
}

double sectional_curvature(const GroveChart& c, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
    if (x.size() != c.dim() || y.size() != c.dim())
        throw std::invalid_argument("sectional_curvature: tangent dimension mismatch");
    CurvatureData cd = curvature_data(c);
    const double xx = x.dot(cd.g * x);
    const double yy = y.dot(cd.g * y);
    const double xy = x.dot(cd.g * y);
    const double den = xx * yy - xy * xy;
    if (den < 1e-12) throw DegeneratePlane("tangent vectors do not span a plane");
    return riemann_quad(cd, x, y) / den;
}

double riemann_ijji(const GroveChart& c, int i, int j) {
    if (i < 0 || j < 0 || i >= c.dim() || j >= c.dim())
        throw std::invalid_argument("riemann_ijji: index out of range");
    CurvatureData cd = curvature_data(c);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(c.dim());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(c.dim());
    x(i) = 1.0;
    y(j) = 1.0;
    return riemann_quad(cd, x, y);
}

double closed_form_rijij(const GroveChart& c, int i, int j) {
    if (i < 0 || j < 0 || i >= c.dim() || j >= c.dim())
        throw std::invalid_argument("closed_form_rijij: index out of range");
    ChartEval ce(c.topology, c.lambda);
    Eigen::MatrixXd g_inv = invert_metric(ce.g);
    const int m = c.dim();
    Eigen::MatrixXd qij =
        ce.pinv * d2_phi(c.topology, c.lambda, c.topology.splits()[i],
                         c.topology.splits()[j])
                      .mat();
    Eigen::MatrixXd cross = ce.q[j] * ce.q[i] + ce.q[i] * ce.q[j];
    Eigen::MatrixXd a = 2.0 * qij - cross;
    Eigen::MatrixXd qi2 = ce.q[i] * ce.q[i];
    Eigen::MatrixXd qj2 = ce.q[j] * ce.q[j];
    Eigen::VectorXd v(m), w(m), z(m);
    for (int k = 0; k < m; ++k) {
        v(k) = trace_product(a, ce.q[k]);
        w(k) = trace_product(qi2, ce.q[k]);
        z(k) = trace_product(qj2, ce.q[k]);
    }
    return 0.25 * v.dot(g_inv * v) - w.dot(g_inv * z) -
           trace_product(Eigen::MatrixXd(qij - cross), qij);
}

SymMatrix tangent_project(const SpdMatrix& p, const SymMatrix& x, const GroveChart& c) {
    Eigen::MatrixXd embedded = phi_bar(c.topology, c.lambda).mat();
    if ((embedded - p.mat()).cwiseAbs().maxCoeff() > 1e-9)
        throw PreconditionViolated("base point does not embed the chart coordinates");
    // Gram-Schmidt on the d_phi basis under inner(p,.,.)
    std::vector<Eigen::MatrixXd> basis;
    for (const Split& e : c.topology.splits()) {
        Eigen::MatrixXd u = d_phi(c.topology, c.lambda, e).mat();
        double raw = norm(p, SymMatrix(u));
        for (const Eigen::MatrixXd& b : basis)
            u -= inner(p, SymMatrix(u), SymMatrix(b)) * b;
        double len = norm(p, SymMatrix(u));
        if (!(len > 1e-10 * std::max(1.0, raw)))
            throw SingularMetric("derivative basis is numerically dependent");
        basis.push_back(u / len);
    }
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(p.dim(), p.dim());
    for (const Eigen::MatrixXd& b : basis) proj += inner(p, x, SymMatrix(b)) * b;
    return SymMatrix(0.5 * (proj + proj.transpose()));
}

namespace {

double objective(const SpdMatrix& p, const WaldTopology& t, const std::vector<double>& lam) {
    try {
        SpdMatrix q{SymMatrix(phi_bar(t, lam))};
        double d = dist(p, q);
        return 0.5 * d * d;
    } catch (const WaldError&) {
        return std::numeric_limits<double>::infinity();
    }
}

// removes the splits listed in `drop` (indices); falls back to pinning when
// the reduced system is no longer a valid topology
void drop_or_pin(int n, WaldTopology& topo, std::vector<double>& lam,
                 const std::vector<int>& drop) {
    if (drop.empty()) return;
    std::vector<Split> kept;
    std::vector<double> kept_lam;
    std::size_t di = 0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (di < drop.size() && static_cast<int>(i) == drop[di]) {
            ++di;
            continue;
        }
        kept.push_back(topo.splits()[i]);
        kept_lam.push_back(lam[i]);
    }
    try {
        WaldTopology reduced(n, kept);
        topo = std::move(reduced);
        lam = std::move(kept_lam);
    } catch (const WaldError&) {
        for (int i : drop) lam[i] = lambda_pin;
    } catch (const std::invalid_argument&) {
        for (int i : drop) lam[i] = lambda_pin;
    }
}

}  // namespace

ProjectionResult project_to_wald(const SpdMatrix& p, const Wald& hint) {
    const int n = hint.n_leaves();
    if (p.dim() != n)
        throw std::invalid_argument("project_to_wald: dimension mismatch");
    WaldTopology topo = hint.topology();
    std::vector<double> lam = hint.lambda();
    for (double& x : lam) x = std::clamp(x, lambda_pin, lambda_cap);

    const int max_iters = 500;
    int iters = 0;
    double grad_norm = 0.0;
    bool converged = false;

    while (iters < max_iters) {
        const int m = static_cast<int>(topo.splits().size());
        if (m == 0) {
            converged = true;  // the empty grove is a single point
            break;
        }
        SpdMatrix pc{SymMatrix(phi_bar(topo, lam))};
        Eigen::MatrixXd lhat = pc.inv_sqrt() * log_map(pc, p).mat() * pc.inv_sqrt();
        std::vector<Eigen::MatrixXd> mhat(m);
        for (int e = 0; e < m; ++e)
            mhat[e] = pc.inv_sqrt() * d_phi(topo, lam, topo.splits()[e]).mat() *
                      pc.inv_sqrt();
        Eigen::VectorXd df(m);
        Eigen::MatrixXd g(m, m);
        for (int e = 0; e < m; ++e) {
            df(e) = -lhat.cwiseProduct(mhat[e]).sum();
            for (int f = e; f < m; ++f)
                g(e, f) = g(f, e) = mhat[e].cwiseProduct(mhat[f]).sum();
        }
        Eigen::MatrixXd ginv;
        try {
            ginv = invert_metric(g);
        } catch (const SingularMetric&) {
            break;  // stuck against a collapsing chart; report unconverged
        }
        grad_norm = std::sqrt(std::max(0.0, df.dot(ginv * df)));
        if (grad_norm <= 1e-8) {
            converged = true;
            break;
        }
        Eigen::VectorXd dir = -(ginv * df);
        double slope = df.dot(dir);
        if (!(slope < 0.0)) {
            dir = -df;
            slope = df.dot(dir);
            if (!(slope < 0.0)) break;
        }
        const double f0 = objective(p, topo, lam);
        std::vector<double> trial(m);
        double step = 1.0;
        bool stepped = false;
        while (step >= 1e-14) {
            for (int e = 0; e < m; ++e)
                trial[e] = std::clamp(lam[e] + step * dir(e), 0.0, lambda_cap);
            if (objective(p, topo, trial) <= f0 + 1e-4 * step * slope) {
                stepped = true;
                break;
            }
            step *= 0.5;
        }
        ++iters;
        if (!stepped) break;
        lam = trial;

        // zero-face crossings: drop when the fresh gradient keeps pushing out
        std::vector<int> at_zero;
        for (int e = 0; e < m; ++e)
            if (lam[e] == 0.0) at_zero.push_back(e);
        if (!at_zero.empty()) {
            std::vector<double> probe = lam;
            for (int e : at_zero) probe[e] = lambda_pin;
            SpdMatrix pb{SymMatrix(phi_bar(topo, probe))};
            Eigen::MatrixXd lb = pb.inv_sqrt() * log_map(pb, p).mat() * pb.inv_sqrt();
            std::vector<int> drop;
            for (int e : at_zero) {
                Eigen::MatrixXd me = pb.inv_sqrt() *
                                     d_phi(topo, probe, topo.splits()[e]).mat() *
                                     pb.inv_sqrt();
                double dfe = -lb.cwiseProduct(me).sum();
                if (dfe > 0.0)
                    drop.push_back(e);  // outward push
                else
                    lam[e] = lambda_pin;  // inward pull: stay in the grove
            }
            drop_or_pin(n, topo, lam, drop);
        }
    }

    // a zero coordinate must never leak into the returned wald
    std::vector<int> residual_zero;
    for (std::size_t e = 0; e < lam.size(); ++e)
        if (lam[e] == 0.0) residual_zero.push_back(static_cast<int>(e));
    drop_or_pin(n, topo, lam, residual_zero);

    Wald result(topo, lam);
    double d = dist(p, phi(result));
    return {std::move(result), converged, iters, grad_norm, d};
}

namespace {

// union-of-splits hint with weighted average coordinates; nullopt when the
// union is not a valid topology
std::optional<Wald> merged_hint(const std::vector<const Wald*>& ws,
                                const std::vector<double>& wt) {
    const int n = ws.front()->n_leaves();
    std::map<Split, double> acc;
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const auto& topo = ws[k]->topology();
        for (std::size_t i = 0; i < topo.splits().size(); ++i)
            acc[topo.splits()[i]] += wt[k] * ws[k]->lambda()[i];
    }
    try {
        std::vector<Split> splits;
        splits.reserve(acc.size());
        for (const auto& [e, v] : acc) {
            (void)v;
            splits.push_back(e);
        }
        WaldTopology topo(n, splits);
        std::vector<double> lam(splits.size());
        for (const auto& [e, v] : acc)
            lam[topo.index_of(e)] = std::clamp(v, lambda_pin, lambda_cap);
        return Wald(topo, lam);
    } catch (const WaldError&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// pendant-star hint on the blocks jointly spanned by the given wälder, with
// weights fitted to the ambient target by Steiner three-point formulas; this
// is the only hint able to cross block-merging stratum boundaries
std::optional<Wald> star_hint(const Eigen::MatrixXd& q, const std::vector<const Wald*>& ws) {
    const int n = ws.front()->n_leaves();
    std::vector<int> parent(n);
    for (int u = 0; u < n; ++u) parent[u] = u;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Wald* w : ws)
        for (LeafMask b : w->topology().blocks()) {
            std::vector<int> leaves = labels_from_mask(b);
            for (std::size_t i = 1; i < leaves.size(); ++i)
                parent[find(leaves[i] - 1)] = find(leaves[0] - 1);
        }
    std::vector<std::vector<int>> blocks(n);
    for (int u = 0; u < n; ++u) blocks[static_cast<std::size_t>(find(u))].push_back(u + 1);

    auto leaf_dist = [&](int u, int v) {
        double rho = std::clamp(q(u - 1, v - 1), 1e-12, 1.0);
        return -std::log(rho);
    };
    std::vector<std::pair<Split, double>> weighted;
    for (const auto& block : blocks) {
        if (block.size() < 2) continue;
        if (block.size() == 2) {
            double lam = 1.0 - std::exp(-leaf_dist(block[0], block[1]));
            weighted.emplace_back(make_split({block[0]}, {block[1]}),
                                  std::clamp(lam, lambda_pin, lambda_cap));
            continue;
        }
        for (int u : block) {
            std::vector<int> rest;
            for (int v : block)
                if (v != u) rest.push_back(v);
            double acc = 0.0;
            int cnt = 0;
            for (std::size_t i = 0; i < rest.size(); ++i)
                for (std::size_t j = i + 1; j < rest.size(); ++j) {
                    acc += 0.5 * (leaf_dist(u, rest[i]) + leaf_dist(u, rest[j]) -
                                  leaf_dist(rest[i], rest[j]));
                    ++cnt;
                }
            double lam = 1.0 - std::exp(-std::max(acc / cnt, 0.0));
            weighted.emplace_back(make_split({u}, rest),
                                  std::clamp(lam, lambda_pin, lambda_cap));
        }
    }
    if (weighted.empty()) return std::nullopt;
    try {
        std::vector<Split> splits;
        splits.reserve(weighted.size());
        for (const auto& [e, v] : weighted) {
            (void)v;
            splits.push_back(e);
        }
        WaldTopology topo(n, splits);
        std::vector<double> lam(splits.size());
        for (const auto& [e, v] : weighted) lam[topo.index_of(e)] = v;
        return Wald(topo, lam);
    } catch (const WaldError&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// hint on a's topology with coordinates pulled toward b
Wald restricted_mix(const Wald& a, const Wald& b, double wa, double wb) {
    const auto& topo = a.topology();
    std::vector<double> lam(a.lambda().size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const Split& e = topo.splits()[i];
        int k = b.topology().index_of(e);
        double vb = k >= 0 ? b.lambda()[k] : 0.0;
        lam[i] = std::clamp(wa * a.lambda()[i] + wb * vb, lambda_pin, lambda_cap);
    }
    return Wald(topo, lam);
}

ProjectionResult project_with_hints(const SpdMatrix& q, const std::vector<Wald>& hints) {
    std::optional<ProjectionResult> best;
    std::vector<std::string> seen;
    for (const Wald& h : hints) {
        std::string id = h.topology().id();
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
        seen.push_back(std::move(id));
        ProjectionResult r = project_to_wald(q, h);
        if (!best || r.distance < best->distance) best = std::move(r);
    }
    return std::move(*best);
}

std::vector<Wald> segment_hints(const SpdMatrix& q, const Wald& a, const Wald& b,
                                double t) {
    std::vector<Wald> hints;
    if (auto m = merged_hint({&a, &b}, {1.0 - t, t})) hints.push_back(std::move(*m));
    if (auto s = star_hint(q.mat(), {&a, &b})) hints.push_back(std::move(*s));
    hints.push_back(restricted_mix(a, b, 1.0 - t, t));
    hints.push_back(restricted_mix(b, a, t, 1.0 - t));
    return hints;
}

double energy_of(const std::vector<SpdMatrix>& emb) {
    double e = 0.0;
    for (std::size_t i = 1; i < emb.size(); ++i) {
        double d = dist(emb[i - 1], emb[i]);
        e += 0.5 * d * d;
    }
    return e;
}

}  // namespace

DiscretePath geodesic_path(const Wald& f1, const Wald& f2, const GeodesicParams& params) {
    if (params.n0 < 5 || params.n0 % 2 == 0)
        throw std::invalid_argument("geodesic_path: n0 must be an odd integer >= 5");
    if (params.i_ext < 0 || params.j_straight < 0)
        throw std::invalid_argument("geodesic_path: refinement counts must be nonnegative");
    if (f1.n_leaves() != f2.n_leaves())
        throw std::invalid_argument("geodesic_path: leaf counts differ");

    const int n0 = params.n0;
    const std::size_t final_count =
        (static_cast<std::size_t>(1) << params.i_ext) * (n0 - 1) + 1;

    DiscretePath out;
    if (f1 == f2) {
        out.points.assign(final_count, f1);
        return out;
    }

    std::vector<Wald> pts(static_cast<std::size_t>(n0), f1);
    std::vector<SpdMatrix> emb(static_cast<std::size_t>(n0), phi(f1));
    std::vector<char> ok(static_cast<std::size_t>(n0), 1);
    pts[n0 - 1] = f2;
    emb[n0 - 1] = phi(f2);

    auto assign = [&](std::vector<Wald>& ps, std::vector<SpdMatrix>& es,
                      std::vector<char>& oks, int idx, ProjectionResult r) {
        es[idx] = phi(r.w);
        ps[idx] = std::move(r.w);
        oks[idx] = r.converged ? 1 : 0;
    };
    auto project_segment = [](const SpdMatrix& pa, const SpdMatrix& pb, const Wald& wa,
                              const Wald& wb, double t) {
        SpdMatrix q = geodesic_point(pa, pb, t);
        return project_with_hints(q, segment_hints(q, wa, wb, t));
    };

    // successive-projection initial path (1-based indices of the definition)
    for (int i = 2; i <= (n0 - 1) / 2; ++i) {
        double t = 1.0 / (n0 - 2 * i + 3);
        assign(pts, emb, ok, i - 1,
               project_segment(emb[i - 2], emb[n0 - i + 1], pts[i - 2], pts[n0 - i + 1], t));
        assign(pts, emb, ok, n0 - i,
               project_segment(emb[n0 - i + 1], emb[i - 2], pts[n0 - i + 1], pts[i - 2], t));
    }
    {
        int mid = (n0 + 1) / 2;  // 1-based
        assign(pts, emb, ok, mid - 1,
               project_segment(emb[mid - 2], emb[mid], pts[mid - 2], pts[mid], 0.5));
    }

    for (int round = 1; round <= params.i_ext; ++round) {
        // Extend: project ambient midpoints and interleave
        const std::size_t len = pts.size();
        std::vector<Wald> npts;
        std::vector<SpdMatrix> nemb;
        std::vector<char> nok;
        npts.reserve(2 * len - 1);
        nemb.reserve(2 * len - 1);
        nok.reserve(2 * len - 1);
        for (std::size_t i = 0; i < len - 1; ++i) {
            npts.push_back(pts[i]);
            nemb.push_back(emb[i]);
            nok.push_back(ok[i]);
            ProjectionResult r = project_segment(emb[i], emb[i + 1], pts[i], pts[i + 1], 0.5);
            nemb.push_back(phi(r.w));
            npts.push_back(std::move(r.w));
            nok.push_back(r.converged ? 1 : 0);
        }
        npts.push_back(pts[len - 1]);
        nemb.push_back(emb[len - 1]);
        nok.push_back(ok[len - 1]);
        pts = std::move(npts);
        emb = std::move(nemb);
        ok = std::move(nok);

        // Straighten: sequential in-place midpoint pulls
        for (int jr = 1; jr <= params.j_straight; ++jr) {
            double before = energy_of(emb);
            for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
                Eigen::MatrixXd x = 0.5 * (log_map(emb[i], emb[i - 1]).mat() +
                                           log_map(emb[i], emb[i + 1]).mat());
                SpdMatrix target = exp_map(emb[i], SymMatrix(x));
                std::vector<Wald> hints;
                if (auto m = merged_hint({&pts[i - 1], &pts[i], &pts[i + 1]},
                                         {1.0 / 3, 1.0 / 3, 1.0 / 3}))
                    hints.push_back(std::move(*m));
                if (auto s = star_hint(target.mat(), {&pts[i - 1], &pts[i], &pts[i + 1]}))
                    hints.push_back(std::move(*s));
                hints.push_back(pts[i]);
                assign(pts, emb, ok, static_cast<int>(i),
                       project_with_hints(target, hints));
            }
            double after = energy_of(emb);
            if (after > before + 1e-9)
                out.warnings.push_back("straighten round " + std::to_string(jr) +
                                       " after extension " + std::to_string(round) +
                                       " increased energy by " +
                                       std::to_string(after - before));
        }
    }

    for (std::size_t i = 0; i < ok.size(); ++i)
        if (!ok[i]) out.flagged.push_back(static_cast<int>(i));
    out.energy = energy_of(emb);
    out.length = path_length(emb);
    out.points = std::move(pts);
    return out;
}

double path_energy(const DiscretePath& g) {
    if (g.points.size() < 2)
        throw std::invalid_argument("path_energy: need at least two points");
    double e = 0.0;
    for (std::size_t i = 1; i < g.points.size(); ++i) {
        double d = dist(phi(g.points[i - 1]), phi(g.points[i]));
        e += 0.5 * d * d;
    }
    return e;
}

DistanceResult wald_distance(const Wald& f1, const Wald& f2, const GeodesicParams& params) {
    double forward = geodesic_path(f1, f2, params).length;
    double backward = geodesic_path(f2, f1, params).length;
    return {0.5 * (forward + backward), forward, backward, std::abs(forward - backward)};
}

DiscretePath bhv_comparison_path(const Wald& f1, const Wald& f2, int k) {
    if (k < 1) throw std::invalid_argument("bhv_comparison_path: need k >= 1");
    if (!(f1.topology() == f2.topology()))
        throw TopologyMismatch("endpoints lie in different groves");
    const std::size_t m = f1.lambda().size();
    std::vector<double> l1(m), l2(m);
    for (std::size_t i = 0; i < m; ++i) {
        l1[i] = -std::log1p(-f1.lambda()[i]);
        l2[i] = -std::log1p(-f2.lambda()[i]);
    }
    DiscretePath out;
    out.points.reserve(k + 1);
    out.points.push_back(f1);
    for (int j = 1; j < k; ++j) {
        double s = static_cast<double>(j) / k;
        std::vector<double> lam(m);
        for (std::size_t i = 0; i < m; ++i)
            lam[i] = -std::expm1(-((1.0 - s) * l1[i] + s * l2[i]));
        out.points.push_back(Wald(f1.topology(), lam));
    }
    out.points.push_back(f2);
    std::vector<SpdMatrix> emb;
    emb.reserve(out.points.size());
    for (const Wald& w : out.points) emb.push_back(phi(w));
    out.energy = energy_of(emb);
    out.length = path_length(emb);
    return out;
}

}  // namespace wald
