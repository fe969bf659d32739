#include "wald/kernels.hpp"

#if SIMD_NEON

#include <arm_neon.h>

#include <algorithm>

namespace wald::kernels {

namespace {

inline double hmin(float64x2_t v) { return std::min(vgetq_lane_f64(v, 0), vgetq_lane_f64(v, 1)); }
inline double hmax(float64x2_t v) { return std::max(vgetq_lane_f64(v, 0), vgetq_lane_f64(v, 1)); }

double buneman_min_neon(const double* dab, const double* daa, const double* dbb,
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
                const float64x2_t cv = vdupq_n_f64(c);
                float64x2_t acc = vdupq_n_f64(1e300);
                int t = 0;
                for (; t + 2 <= nb; t += 2) {
                    float64x2_t a = vld1q_f64(dab_u + t);
                    float64x2_t b = vld1q_f64(dbb_s + t);
                    acc = vminq_f64(acc, vaddq_f64(vsubq_f64(a, b), cv));
                }
                best = std::min(best, hmin(acc));
                for (; t < nb; ++t) {
                    double val = (dab_u[t] - dbb_s[t]) + c;
                    best = std::min(best, val);
                }
            }
        }
    }
    return best;
}

double weight_ratio_max_neon(const double* rab, const double* raa, const double* rbb,
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
                const float64x2_t rvs_v = vdupq_n_f64(rvs);
                const float64x2_t ruv_v = vdupq_n_f64(ruv);
                float64x2_t acc = vdupq_n_f64(0.0);
                int t = 0;
                for (; t + 2 <= nb; t += 2) {
                    float64x2_t num = vmulq_f64(vld1q_f64(rab_u + t), rvs_v);
                    float64x2_t den = vmulq_f64(ruv_v, vld1q_f64(rbb_s + t));
                    acc = vmaxq_f64(acc, vdivq_f64(num, den));
                }
                best = std::max(best, hmax(acc));
                for (; t < nb; ++t) {
                    double val = (rab_u[t] * rvs) / (ruv * rbb_s[t]);
                    best = std::max(best, val);
                }
            }
        }
    }
    return best;
}

double four_point_margin_neon(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            const float64x2_t ruv_v = vdupq_n_f64(ruv);
            for (int s = v + 1; s < n; ++s) {
                const double* rs = r + static_cast<long>(s) * n;
                const double rus = ru[s];
                const double rvs = rv[s];
                const float64x2_t rus_v = vdupq_n_f64(rus);
                const float64x2_t rvs_v = vdupq_n_f64(rvs);
                float64x2_t acc = vdupq_n_f64(1e300);
                int t = s + 1;
                for (; t + 2 <= n; t += 2) {
                    float64x2_t p1 = vmulq_f64(ruv_v, vld1q_f64(rs + t));
                    float64x2_t p2 = vmulq_f64(rus_v, vld1q_f64(rv + t));
                    float64x2_t p3 = vmulq_f64(vld1q_f64(ru + t), rvs_v);
                    float64x2_t lo = vminq_f64(p1, p2);
                    float64x2_t hi = vmaxq_f64(p1, p2);
                    float64x2_t pmin = vminq_f64(lo, p3);
                    float64x2_t pmid = vminq_f64(hi, vmaxq_f64(lo, p3));
                    acc = vminq_f64(acc, vsubq_f64(pmin, pmid));
                }
                best = std::min(best, hmin(acc));
                for (; t < n; ++t) {
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

double r4_margin_neon(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            const float64x2_t ruv_v = vdupq_n_f64(ruv);
            const int stops[4] = {0, u, v, n};
            for (int run = 0; run < 3; ++run) {
                int s0 = stops[run] + (run > 0 ? 1 : 0);
                int s1 = stops[run + 1];
                float64x2_t acc = vdupq_n_f64(1e300);
                int s = s0;
                for (; s + 2 <= s1; s += 2) {
                    float64x2_t prod = vmulq_f64(vld1q_f64(ru + s), vld1q_f64(rv + s));
                    acc = vminq_f64(acc, vsubq_f64(ruv_v, prod));
                }
                best = std::min(best, hmin(acc));
                for (; s < s1; ++s) {
                    double val = ruv - (ru[s] * rv[s]);
                    best = std::min(best, val);
                }
            }
        }
    }
    return best;
}

const Impl neon_table = {
    "neon",
    buneman_min_neon,
    weight_ratio_max_neon,
    four_point_margin_neon,
    r4_margin_neon,
};

}  // namespace

const Impl* neon_impl() { return &neon_table; }

}  // namespace wald::kernels

#else

namespace wald::kernels {
const Impl* neon_impl() { return nullptr; }
}  // namespace wald::kernels

#endif
