#include "wald/kernels.hpp"

#include <algorithm>

namespace wald::kernels {

namespace {

double buneman_min_scalar(const double* dab, const double* daa, const double* dbb,
                          int na, int nb) {
    double best = 1e300;
    for (int u = 0; u < na; ++u) {
        const double* dab_u = dab + static_cast<long>(u) * nb;
        for (int v = 0; v < na; ++v) {
            const double* dab_v = dab + static_cast<long>(v) * nb;
            const double duv = daa[static_cast<long>(u) * na + v];
            for (int s = 0; s < nb; ++s) {
                const double* dbb_s = dbb + static_cast<long>(s) * nb;
                const double c = dab_v[s] - duv;
                for (int t = 0; t < nb; ++t) {
                    double val = (dab_u[t] - dbb_s[t]) + c;
                    best = std::min(best, val);
                }
            }
        }
    }
    return best;
}

double weight_ratio_max_scalar(const double* rab, const double* raa, const double* rbb,
                               int na, int nb) {
    double best = 0.0;
    for (int u = 0; u < na; ++u) {
        const double* rab_u = rab + static_cast<long>(u) * nb;
        for (int v = 0; v < na; ++v) {
            const double* rab_v = rab + static_cast<long>(v) * nb;
            const double ruv = raa[static_cast<long>(u) * na + v];
            for (int s = 0; s < nb; ++s) {
                const double* rbb_s = rbb + static_cast<long>(s) * nb;
                const double rvs = rab_v[s];
                for (int t = 0; t < nb; ++t) {
                    double val = (rab_u[t] * rvs) / (ruv * rbb_s[t]);
                    best = std::max(best, val);
                }
            }
        }
    }
    return best;
}

double four_point_margin_scalar(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            for (int s = v + 1; s < n; ++s) {
                const double* rs = r + static_cast<long>(s) * n;
                const double rus = ru[s];
                const double rvs = rv[s];
                for (int t = s + 1; t < n; ++t) {
                    double p1 = ruv * rs[t];
                    double p2 = rus * rv[t];
                    double p3 = ru[t] * rvs;
                    double lo = std::min(p1, p2);
                    double hi = std::max(p1, p2);
                    double pmin = std::min(lo, p3);
                    double pmid = std::min(hi, std::max(lo, p3));
                    best = std::min(best, pmin - pmid);
                }
            }
        }
    }
    return best;
}

double r4_margin_scalar(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            // s runs over [0,u), (u,v), (v,n)
            const int stops[4] = {0, u, v, n};
            for (int run = 0; run < 3; ++run) {
                int s0 = stops[run] + (run > 0 ? 1 : 0);
                int s1 = stops[run + 1];
                for (int s = s0; s < s1; ++s) {
                    double val = ruv - (ru[s] * rv[s]);
                    best = std::min(best, val);
                }
            }
        }
    }
    return best;
}

const Impl scalar_table = {
    "scalar",
    buneman_min_scalar,
    weight_ratio_max_scalar,
    four_point_margin_scalar,
    r4_margin_scalar,
};

}  // namespace

const Impl& scalar_impl() { return scalar_table; }

const Impl& active_impl() {
    static const Impl* chosen = [] {
#if SIMD_X86
        if (__builtin_cpu_supports("avx2")) {
            if (const Impl* impl = avx2_impl()) return impl;
        }
#endif
#if SIMD_NEON
        if (const Impl* impl = neon_impl()) return impl;
#endif
        return &scalar_table;
    }();
    return *chosen;
}

}  // namespace wald::kernels
