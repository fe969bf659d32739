#pragma once

#include <string>
#include <vector>

#include "wald/embedding.hpp"
#include "wald/spd.hpp"
#include "wald/wald.hpp"

namespace wald {

// Coordinates of one grove: a topology with strictly interior weights in a
// fixed (canonical) split order.
struct GroveChart {
    WaldTopology topology;
    std::vector<double> lambda;

    GroveChart(WaldTopology t, std::vector<double> l);
    static GroveChart of(const Wald& w);
    int dim() const { return static_cast<int>(lambda.size()); }
};

// Pullback metric g_ij = inner(phi(lambda), d_phi(i), d_phi(j)) and its
// inverse. Throws SingularMetric when g is numerically singular.
struct MetricTensor {
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
};

MetricTensor metric_tensor(const GroveChart& c);

// Christoffel symbols of the pullback metric: result[m](i,j) is Gamma^m_ij,
// computed from analytic metric derivatives.
std::vector<Eigen::MatrixXd> christoffel(const GroveChart& c);

// Analytic coordinate derivative of the metric: result[k](i,j) is
// d g_ij / d lambda_k. Exposed for the finite-difference oracles.
std::vector<Eigen::MatrixXd> metric_derivatives(const GroveChart& c);

// Sectional curvature of the plane spanned by coordinate tangent vectors x
// and y: K = R(x,y,y,x) / (|x|^2 |y|^2 - g(x,y)^2). The curvature tensor is
// assembled from Christoffel symbols, with their lambda-derivatives taken by
// central differences (step 1e-5). Throws DegeneratePlane when the
// denominator falls below 1e-12.
double sectional_curvature(const GroveChart& c, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y);

// R(d_i, d_j, d_j, d_i) from the assembled tensor, and the closed-form
// expression for the same component in terms of Q_i = P^-1 D_i. The two
// agree within 1e-4 on interior charts; tests assert it.
double riemann_ijji(const GroveChart& c, int i, int j);
double closed_form_rijij(const GroveChart& c, int i, int j);

// Orthogonal projection of x onto span{d_phi(e)} under inner(p, ., .), via
// Gram-Schmidt. p must embed the chart point within 1e-9.
SymMatrix tangent_project(const SpdMatrix& p, const SymMatrix& x, const GroveChart& c);

// Local minimizer of lambda -> dist(p, phi(lambda)) by projected gradient
// descent with Armijo backtracking. Coordinates hitting the zero face with
// an outward gradient drop their split (the topology descends in the partial
// order); coordinates are capped at 1 - 1e-9. Non-convergence within the
// iteration budget is reported in the result, never thrown.
struct ProjectionResult {
    Wald w;
    bool converged;
    int iterations;
    double grad_norm;
    double distance;
};

ProjectionResult project_to_wald(const SpdMatrix& p, const Wald& hint);

// Discrete approximation of a geodesic. `flagged` holds indices of points
// whose final projection did not converge; `warnings` records straightening
// rounds that increased energy.
struct DiscretePath {
    std::vector<Wald> points;
    double energy = 0.0;
    double length = 0.0;
    std::vector<std::string> warnings;
    std::vector<int> flagged;
};

struct GeodesicParams {
    int n0 = 5;
    int i_ext = 4;
    int j_straight = 10;
};

// Geodesic approximation: successive-projection initial path on n0 points,
// then i_ext rounds of midpoint extension, each followed by j_straight
// rounds of straightening. Returns 2^i_ext (n0-1) + 1 points.
DiscretePath geodesic_path(const Wald& f1, const Wald& f2, const GeodesicParams& params = {});

// 1/2 sum of squared consecutive embedded distances.
double path_energy(const DiscretePath& g);

// Length of the approximate geodesic, averaged over both orientations.
struct DistanceResult {
    double distance;
    double forward;
    double backward;
    double asymmetry;
};

DistanceResult wald_distance(const Wald& f1, const Wald& f2, const GeodesicParams& params = {});

// Straight line in the length parameterization l = -log(1-lambda), sampled
// at k+1 points. Both endpoints must share one topology.
DiscretePath bhv_comparison_path(const Wald& f1, const Wald& f2, int k);

}  // namespace wald
