#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wald/geometry.hpp"
#include "wald/wald.hpp"

namespace wald {

// Nonempty collection of forests over a common leaf set.
class Sample {
public:
    explicit Sample(std::vector<Wald> forests);

    const std::vector<Wald>& forests() const { return forests_; }
    int n_leaves() const { return n_; }
    std::size_t size() const { return forests_.size(); }

private:
    std::vector<Wald> forests_;
    int n_ = 0;
};

// Mean squared distance (1/n) sum_j wald_distance(candidate, X_j)^2.
double frechet_function(const Wald& candidate, const Sample& s,
                        const GeodesicParams& params = {});

// Symmetric candidate family: every pendant split carries weight pen and the
// designated interior split carries weight inter; inter == 0 yields the star.
Wald symmetric_family(int n, const Split& interior, double pen, double inter);

struct HeatmapCell {
    double pen = 0.0;
    double inter = 0.0;
    double value = 0.0;
};

struct FrechetConfig {
    std::optional<Split> interior;  // interior split of the candidate family (required)
    double pen_lo = 0.2, pen_hi = 0.8;
    int pen_steps = 25;
    double inter_lo = 0.0, inter_hi = 0.6;
    int inter_steps = 25;
    GeodesicParams grid_params{5, 1, 3};    // stage (a): coarse ranking
    GeodesicParams refine_params{5, 1, 5};  // stage (b) and reported values
    int refine_iters = 40;                  // simplex iterations
    int workers = 1;
    bool include_sample_points = true;  // add the sample itself as candidates
    bool grid_single_orientation = true;  // rank the grid by forward lengths only
};

struct FrechetResult {
    Wald mean;
    double value = 0.0;  // Fréchet value at the mean under refine_params
    double pen = 0.0;    // average pendant weight of the mean
    double inter = 0.0;  // weight of the watched interior split (0 if absent)
    bool sticks = false;  // minimizer pinned to the boundary stratum
    std::vector<HeatmapCell> heatmap;  // all family grid evaluations
};

// Two-stage search: coarse grid over the symmetric family (plus the sample
// points themselves), then derivative-free simplex refinement inside the
// winning grove with box clamping. A refined interior weight at or below the
// grid resolution snaps to the star and reports sticks = true.
FrechetResult frechet_mean(const Sample& s, const FrechetConfig& cfg);

struct TriangleReport {
    double angle_sum_degrees = 0.0;
    std::array<double, 3> angles_degrees{};  // at f1, f2, f3
    double sensitivity = 0.0;  // |sum - sum recomputed with the next path point|
};

// Sum of corner angles of the geodesic triangle (f1, f2, f3) in degrees.
// Directions at a corner come from the first interior point of each side;
// when the corner's grove is top-dimensional the logs are projected onto its
// tangent space first. Throws DegenerateTriangle when corners collapse.
double triangle_angle_sum(const Wald& f1, const Wald& f2, const Wald& f3,
                          const GeodesicParams& params = {},
                          TriangleReport* report = nullptr);

}  // namespace wald
