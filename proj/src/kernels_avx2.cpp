#include "wald/kernels.hpp"

#if SIMD_X86

#include <immintrin.h>

#include <algorithm>

namespace wald::kernels {

namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    __m128d s = _mm_unpackhi_pd(m, m);
    return _mm_cvtsd_f64(_mm_min_sd(m, s));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    __m128d s = _mm_unpackhi_pd(m, m);
    return _mm_cvtsd_f64(_mm_max_sd(m, s));
}

double buneman_min_avx2(const double* dab, const double* daa, const double* dbb,
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
                const __m256d cv = _mm256_set1_pd(c);
                __m256d acc = _mm256_set1_pd(1e300);
                int t = 0;
                for (; t + 4 <= nb; t += 4) {
                    __m256d a = _mm256_loadu_pd(dab_u + t);
                    __m256d b = _mm256_loadu_pd(dbb_s + t);
                    acc = _mm256_min_pd(acc, _mm256_add_pd(_mm256_sub_pd(a, b), cv));
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

double weight_ratio_max_avx2(const double* rab, const double* raa, const double* rbb,
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
                const __m256d rvs_v = _mm256_set1_pd(rvs);
                const __m256d ruv_v = _mm256_set1_pd(ruv);
                __m256d acc = _mm256_setzero_pd();
                int t = 0;
                for (; t + 4 <= nb; t += 4) {
                    __m256d num = _mm256_mul_pd(_mm256_loadu_pd(rab_u + t), rvs_v);
                    __m256d den = _mm256_mul_pd(ruv_v, _mm256_loadu_pd(rbb_s + t));
                    acc = _mm256_max_pd(acc, _mm256_div_pd(num, den));
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

double four_point_margin_avx2(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            const __m256d ruv_v = _mm256_set1_pd(ruv);
            for (int s = v + 1; s < n; ++s) {
                const double* rs = r + static_cast<long>(s) * n;
                const double rus = ru[s];
                const double rvs = rv[s];
                const __m256d rus_v = _mm256_set1_pd(rus);
                const __m256d rvs_v = _mm256_set1_pd(rvs);
                __m256d acc = _mm256_set1_pd(1e300);
                int t = s + 1;
                for (; t + 4 <= n; t += 4) {
                    __m256d p1 = _mm256_mul_pd(ruv_v, _mm256_loadu_pd(rs + t));
                    __m256d p2 = _mm256_mul_pd(rus_v, _mm256_loadu_pd(rv + t));
                    __m256d p3 = _mm256_mul_pd(_mm256_loadu_pd(ru + t), rvs_v);
                    __m256d lo = _mm256_min_pd(p1, p2);
                    __m256d hi = _mm256_max_pd(p1, p2);
                    __m256d pmin = _mm256_min_pd(lo, p3);
                    __m256d pmid = _mm256_min_pd(hi, _mm256_max_pd(lo, p3));
                    acc = _mm256_min_pd(acc, _mm256_sub_pd(pmin, pmid));
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

double r4_margin_avx2(const double* r, int n) {
    double best = 1e300;
    for (int u = 0; u < n; ++u) {
        const double* ru = r + static_cast<long>(u) * n;
        for (int v = u + 1; v < n; ++v) {
            const double* rv = r + static_cast<long>(v) * n;
            const double ruv = ru[v];
            const __m256d ruv_v = _mm256_set1_pd(ruv);
            const int stops[4] = {0, u, v, n};
            for (int run = 0; run < 3; ++run) {
                int s0 = stops[run] + (run > 0 ? 1 : 0);
                int s1 = stops[run + 1];
                __m256d acc = _mm256_set1_pd(1e300);
                int s = s0;
                for (; s + 4 <= s1; s += 4) {
                    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(ru + s),
                                                 _mm256_loadu_pd(rv + s));
                    acc = _mm256_min_pd(acc, _mm256_sub_pd(ruv_v, prod));
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

const Impl avx2_table = {
    "avx2",
    buneman_min_avx2,
    weight_ratio_max_avx2,
    four_point_margin_avx2,
    r4_margin_avx2,
};

}  // namespace

const Impl* avx2_impl() { return &avx2_table; }

}  // namespace wald::kernels

#else

namespace wald::kernels {
const Impl* avx2_impl() { return nullptr; }
}  // namespace wald::kernels

#endif
