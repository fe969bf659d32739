#include "wald/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wald/embedding.hpp"
#include "wald/errors.hpp"

namespace wald {

Sample::Sample(std::vector<Wald> forests) : forests_(std::move(forests)) {
    if (forests_.empty()) throw std::invalid_argument("Sample: empty");
    n_ = forests_.front().n_leaves();
    for (const Wald& w : forests_)
        if (w.n_leaves() != n_)
            throw std::invalid_argument("Sample: inconsistent leaf counts");
}

double frechet_function(const Wald& candidate, const Sample& s,
                        const GeodesicParams& params) {
    if (candidate.n_leaves() != s.n_leaves())
        throw std::invalid_argument("frechet_function: leaf count mismatch");
    double acc = 0.0;
    for (const Wald& x : s.forests()) {
        double d = wald_distance(candidate, x, params).distance;
        acc += d * d;
    }
    return acc / static_cast<double>(s.size());
}

Wald symmetric_family(int n, const Split& interior, double pen, double inter) {
    if (!(pen > 0.0 && pen < 1.0))
        throw std::invalid_argument("symmetric_family: pendant weight outside (0,1)");
    if (!(inter >= 0.0 && inter < 1.0))
        throw std::invalid_argument("symmetric_family: interior weight outside [0,1)");
    std::vector<Split> splits;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 1);
    for (int label = 1; label <= n; ++label) {
        std::vector<int> rest;
        for (int x : all)
            if (x != label) rest.push_back(x);
        splits.push_back(make_split({label}, rest));
    }
    if (inter > 0.0) splits.push_back(interior);
    WaldTopology topo(n, splits);
    std::vector<double> lam(splits.size(), pen);
    if (inter > 0.0) lam[topo.index_of(interior)] = inter;
    return Wald(topo, lam);
}

namespace {

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> out;
    out.reserve(steps);
    if (steps == 1) {
        out.push_back(lo);
        return out;
    }
    for (int k = 0; k < steps; ++k)
        out.push_back(lo + (hi - lo) * k / (steps - 1));
    return out;
}

struct GridCand {
    Wald w;
    double pen = 0.0;
    double inter = 0.0;
    bool family = false;
};

// grid ranking can skip the reverse orientation; the reported values never do
double grid_value(const Wald& cand, const Sample& s, const GeodesicParams& params,
                  bool single_orientation) {
    double acc = 0.0;
    for (const Wald& x : s.forests()) {
        double d = single_orientation ? geodesic_path(cand, x, params).length
                                      : wald_distance(cand, x, params).distance;
        acc += d * d;
    }
    return acc / static_cast<double>(s.size());
}

std::vector<double> evaluate_grid(const std::vector<GridCand>& cands, const Sample& s,
                                  const FrechetConfig& cfg) {
    std::vector<double> vals(cands.size(), 0.0);
    auto eval = [&](std::size_t i) {
        vals[i] = grid_value(cands[i].w, s, cfg.grid_params, cfg.grid_single_orientation);
    };
    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || cands.size() < 2) {
        for (std::size_t i = 0; i < cands.size(); ++i) eval(i);
        return vals;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cands.size()) return;
            try {
                eval(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return vals;
}

// deterministic Nelder-Mead over the grove cube with box clamping
std::pair<std::vector<double>, double> simplex_refine(
    const WaldTopology& topo, const std::vector<double>& start, const Sample& s,
    const GeodesicParams& params, int iters) {
    const int m = static_cast<int>(start.size());
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    auto clamp_point = [&](std::vector<double> x) {
        for (double& v : x) v = std::clamp(v, lo, hi);
        return x;
    };
    auto eval = [&](const std::vector<double>& x) {
        return frechet_function(Wald(topo, x), s, params);
    };

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(m + 1);
    {
        std::vector<double> x0 = clamp_point(start);
        simplex.push_back({x0, eval(x0)});
        for (int i = 0; i < m; ++i) {
            std::vector<double> xi = x0;
            xi[i] += xi[i] + 0.05 <= hi ? 0.05 : -0.05;
            xi = clamp_point(xi);
            simplex.push_back({xi, eval(xi)});
        }
    }
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    for (int it = 0; it < iters; ++it) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        std::vector<double> centroid(m, 0.0);
        for (int v = 0; v < m; ++v)
            for (int i = 0; i < m; ++i) centroid[i] += simplex[v].x[i] / m;
        const Vertex& worst = simplex[m];
        auto blend = [&](double c) {
            std::vector<double> x(m);
            for (int i = 0; i < m; ++i) x[i] = centroid[i] + c * (centroid[i] - worst.x[i]);
            return clamp_point(x);
        };
        std::vector<double> xr = blend(1.0);
        double fr = eval(xr);
        if (fr < simplex[0].f) {
            std::vector<double> xe = blend(2.0);
            double fe = eval(xe);
            if (fe < fr)
                simplex[m] = {xe, fe};
            else
                simplex[m] = {xr, fr};
        } else if (fr < simplex[m - 1].f) {
            simplex[m] = {xr, fr};
        } else {
            std::vector<double> xc = fr < worst.f ? blend(0.5) : blend(-0.5);
            double fc = eval(xc);
            if (fc < std::min(fr, worst.f)) {
                simplex[m] = {xc, fc};
            } else {
                for (int v = 1; v <= m; ++v) {
                    for (int i = 0; i < m; ++i)
                        simplex[v].x[i] =
                            simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    simplex[v].x = clamp_point(simplex[v].x);
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    return {simplex[0].x, simplex[0].f};
}

double average_pendant_weight(const Wald& w) {
    double acc = 0.0;
    int count = 0;
    const auto& topo = w.topology();
    for (std::size_t i = 0; i < topo.splits().size(); ++i) {
        const Split& e = topo.splits()[i];
        LeafMask a = e.a(), b = e.b();
        if (std::min(labels_from_mask(a).size(), labels_from_mask(b).size()) == 1) {
            acc += w.lambda()[i];
            ++count;
        }
    }
    return count ? acc / count : 0.0;
}

}  // namespace

FrechetResult frechet_mean(const Sample& s, const FrechetConfig& cfg) {
    if (cfg.pen_steps < 1 || cfg.inter_steps < 1)
        throw std::invalid_argument("frechet_mean: grid needs at least one step per axis");
    if (!(cfg.pen_lo > 0.0 && cfg.pen_hi < 1.0 && cfg.pen_lo <= cfg.pen_hi))
        throw std::invalid_argument("frechet_mean: pendant range outside (0,1)");
    if (!(cfg.inter_lo >= 0.0 && cfg.inter_hi < 1.0 && cfg.inter_lo <= cfg.inter_hi))
        throw std::invalid_argument("frechet_mean: interior range outside [0,1)");
    if (!cfg.interior)
        throw std::invalid_argument("frechet_mean: the family's interior split is unset");
    const Split interior = *cfg.interior;

    const int n = s.n_leaves();
    std::vector<GridCand> cands;
    for (double pen : linspace(cfg.pen_lo, cfg.pen_hi, cfg.pen_steps))
        for (double inter : linspace(cfg.inter_lo, cfg.inter_hi, cfg.inter_steps))
            cands.push_back({symmetric_family(n, interior, pen, inter), pen, inter, true});
    if (cfg.include_sample_points)
        for (const Wald& x : s.forests()) cands.push_back({x, 0.0, 0.0, false});

    std::vector<double> vals = evaluate_grid(cands, s, cfg);

    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i)
        if (vals[i] < vals[best]) best = i;

    std::vector<HeatmapCell> heatmap;
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i].family)
            heatmap.push_back({cands[i].pen, cands[i].inter, vals[i]});

    const WaldTopology topo = cands[best].w.topology();
    auto [refined, refined_value] = simplex_refine(topo, cands[best].w.lambda(), s,
                                                   cfg.refine_params, cfg.refine_iters);
    Wald mean(topo, refined);
    double value = refined_value;

    double resolution = cfg.inter_steps > 1
                            ? (cfg.inter_hi - cfg.inter_lo) / (cfg.inter_steps - 1)
                            : 0.0;
    int ii = topo.index_of(interior);
    double inter = ii >= 0 ? refined[ii] : 0.0;
    bool sticks = inter <= std::max(resolution, 1e-12);
    if (sticks && ii >= 0) {
        // snap to the boundary stratum: drop the interior split
        std::vector<Split> kept;
        std::vector<double> kept_lam;
        for (std::size_t i = 0; i < topo.splits().size(); ++i) {
            if (static_cast<int>(i) == ii) continue;
            kept.push_back(topo.splits()[i]);
            kept_lam.push_back(refined[i]);
        }
        mean = Wald(WaldTopology(n, kept), kept_lam);
        value = frechet_function(mean, s, cfg.refine_params);
        inter = 0.0;
    }

    double pen = average_pendant_weight(mean);
    return {std::move(mean), value, pen, inter, sticks, std::move(heatmap)};
}

namespace {

double corner_angle(const Wald& corner, const SpdMatrix& pc, const Wald& toward_a,
                    const Wald& toward_b) {
    SymMatrix xa = log_map(pc, phi(toward_a));
    SymMatrix xb = log_map(pc, phi(toward_b));
    const int n = corner.n_leaves();
    if (static_cast<int>(corner.topology().splits().size()) == 2 * n - 3) {
        GroveChart chart = GroveChart::of(corner);
        xa = tangent_project(pc, xa, chart);
        xb = tangent_project(pc, xb, chart);
    }
    double na = norm(pc, xa), nb = norm(pc, xb);
    if (!(na > 1e-12 && nb > 1e-12))
        throw DegenerateTriangle("side direction collapses at a corner");
    double c = std::clamp(inner(pc, xa, xb) / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace

double triangle_angle_sum(const Wald& f1, const Wald& f2, const Wald& f3,
                          const GeodesicParams& params, TriangleReport* report) {
    const Wald* corners[3] = {&f1, &f2, &f3};
    SpdMatrix p1 = phi(f1), p2 = phi(f2), p3 = phi(f3);
    const SpdMatrix* embedded[3] = {&p1, &p2, &p3};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (dist(*embedded[i], *embedded[j]) <= 1e-9)
                throw DegenerateTriangle("two corners coincide");

    DiscretePath sides[3] = {geodesic_path(f1, f2, params), geodesic_path(f2, f3, params),
                             geodesic_path(f3, f1, params)};
    // sides[i] runs from corner i to corner (i+1)%3
    auto angles_at = [&](std::size_t idx, std::array<double, 3>& out) {
        for (int i = 0; i < 3; ++i) {
            const DiscretePath& outgoing = sides[i];
            const DiscretePath& incoming = sides[(i + 2) % 3];
            out[i] = corner_angle(*corners[i], *embedded[i], outgoing.points[idx],
                                  incoming.points[incoming.points.size() - 1 - idx]) *
                     (180.0 / M_PI);
        }
    };
    std::array<double, 3> primary{}, secondary{};
    angles_at(1, primary);
    angles_at(2, secondary);
    double sum = primary[0] + primary[1] + primary[2];
    if (report) {
        report->angle_sum_degrees = sum;
        report->angles_degrees = primary;
        report->sensitivity =
            std::abs(sum - (secondary[0] + secondary[1] + secondary[2]));
    }
    return sum;
}

}  // namespace wald
