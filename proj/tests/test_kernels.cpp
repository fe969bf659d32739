#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "wald/gen.hpp"
#include "wald/kernels.hpp"

using namespace wald;
using kernels::Impl;

namespace {

// dense row-major buffers for one (A,B) side pair
struct SideData {
    int na = 0, nb = 0;
    std::vector<double> dab, daa, dbb;  // distances
    std::vector<double> rab, raa, rbb;  // correlations
};

SideData random_sides(int na, int nb, Rng& rng) {
    SideData s;
    s.na = na;
    s.nb = nb;
    s.dab.resize(na * nb);
    s.rab.resize(na * nb);
    for (double& v : s.dab) v = rng.uniform(0.05, 3.0);
    for (double& v : s.rab) v = rng.uniform(1e-3, 1.0);
    auto fill_within = [&](int n, std::vector<double>& d, std::vector<double>& r) {
        d.assign(n * n, 0.0);
        r.assign(n * n, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double dv = rng.uniform(0.05, 3.0);
                double rv = rng.uniform(1e-3, 1.0);
                d[i * n + j] = d[j * n + i] = dv;
                r[i * n + j] = r[j * n + i] = rv;
            }
    };
    fill_within(na, s.daa, s.raa);
    fill_within(nb, s.dbb, s.rbb);
    return s;
}

std::vector<double> random_corr(int n, Rng& rng) {
    std::vector<double> r(n * n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) r[i * n + j] = r[j * n + i] = rng.uniform(1e-3, 1.0);
    return r;
}

}  // namespace

TEST_CASE("scalar buneman and ratio scans match brute force on a tiny case") {
    // 2x2 sides small enough to enumerate by hand in the test itself
    SideData s;
    s.na = s.nb = 2;
    s.dab = {1.0, 2.0, 3.0, 4.0};
    s.daa = {0.0, 0.5, 0.5, 0.0};
    s.dbb = {0.0, 0.25, 0.25, 0.0};
    s.rab = {0.9, 0.8, 0.7, 0.6};
    s.raa = {1.0, 0.95, 0.95, 1.0};
    s.rbb = {1.0, 0.85, 0.85, 1.0};
    const Impl& sc = kernels::scalar_impl();

    double best_b = 1e300, best_r = -1e300;
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            for (int t0 = 0; t0 < 2; ++t0)
                for (int t1 = 0; t1 < 2; ++t1) {
                    double b = (s.dab[u * 2 + t1] - s.dbb[t0 * 2 + t1]) +
                               (s.dab[v * 2 + t0] - s.daa[u * 2 + v]);
                    if (b < best_b) best_b = b;
                    double r = (s.rab[u * 2 + t1] * s.rab[v * 2 + t0]) /
                               (s.raa[u * 2 + v] * s.rbb[t0 * 2 + t1]);
                    if (r > best_r) best_r = r;
                }
    CHECK(sc.buneman_min(s.dab.data(), s.daa.data(), s.dbb.data(), 2, 2) == best_b);
    CHECK(sc.weight_ratio_max(s.rab.data(), s.raa.data(), s.rbb.data(), 2, 2) == best_r);
}

TEST_CASE("scalar quadruple scans match brute force") {
    Rng rng(31);
    const Impl& sc = kernels::scalar_impl();
    for (int n : {4, 5, 7}) {
        std::vector<double> r = random_corr(n, rng);

        double fp = 1e300;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                for (int s2 = v + 1; s2 < n; ++s2)
                    for (int t = s2 + 1; t < n; ++t) {
                        double a = r[u * n + v] * r[s2 * n + t];
                        double b = r[u * n + s2] * r[v * n + t];
                        double c = r[u * n + t] * r[v * n + s2];
                        // median by selection so ties and roundoff behave
                        // identically to the scan under test
                        double three[3] = {a, b, c};
                        std::sort(three, three + 3);
                        if (three[0] - three[1] < fp) fp = three[0] - three[1];
                    }
        CHECK(sc.four_point_margin(r.data(), n) == fp);

        double r4 = 1e300;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                for (int s2 = 0; s2 < n; ++s2) {
                    if (s2 == u || s2 == v) continue;
                    double m = r[u * n + v] - r[u * n + s2] * r[s2 * n + v];
                    if (m < r4) r4 = m;
                }
        CHECK(sc.r4_margin(r.data(), n) == r4);
    }
}

TEST_CASE("vector implementations agree with scalar bit for bit") {
    const Impl& sc = kernels::scalar_impl();
    std::vector<const Impl*> variants;
    if (kernels::avx2_impl()) variants.push_back(kernels::avx2_impl());
    if (kernels::neon_impl()) variants.push_back(kernels::neon_impl());
    if (variants.empty()) {
        MESSAGE("no vector variant compiled in; scalar only");
        return;
    }

    Rng rng(32);
    for (int rep = 0; rep < 40; ++rep) {
        int na = rng.uniform_int(1, 9);
        int nb = rng.uniform_int(1, 9);
        SideData s = random_sides(na, nb, rng);
        double b0 = sc.buneman_min(s.dab.data(), s.daa.data(), s.dbb.data(), na, nb);
        double w0 = sc.weight_ratio_max(s.rab.data(), s.raa.data(), s.rbb.data(), na, nb);
        for (const Impl* v : variants) {
            CHECK(v->buneman_min(s.dab.data(), s.daa.data(), s.dbb.data(), na, nb) == b0);
            CHECK(v->weight_ratio_max(s.rab.data(), s.raa.data(), s.rbb.data(), na, nb) == w0);
        }
    }
    for (int rep = 0; rep < 40; ++rep) {
        int n = rng.uniform_int(4, 13);
        std::vector<double> r = random_corr(n, rng);
        double f0 = sc.four_point_margin(r.data(), n);
        double m0 = sc.r4_margin(r.data(), n);
        for (const Impl* v : variants) {
            CHECK(v->four_point_margin(r.data(), n) == f0);
            CHECK(v->r4_margin(r.data(), n) == m0);
        }
    }
}

TEST_CASE("active implementation is one of the registered ones") {
    const Impl& act = kernels::active_impl();
    std::string name = act.name;
    bool known = name == "scalar";
    if (kernels::avx2_impl() && name == kernels::avx2_impl()->name) known = true;
    if (kernels::neon_impl() && name == kernels::neon_impl()->name) known = true;
    CHECK(known);
    CHECK(act.buneman_min != nullptr);
    CHECK(act.weight_ratio_max != nullptr);
    CHECK(act.four_point_margin != nullptr);
    CHECK(act.r4_margin != nullptr);
#if SIMD_X86
    // this sandbox advertises AVX2, so the dispatcher should pick it up
    if (kernels::avx2_impl()) CHECK(name == std::string(kernels::avx2_impl()->name));
#endif
}
