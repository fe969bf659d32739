#pragma once

// Hot scan kernels behind the split recognition and matrix checks, with a
// scalar reference implementation and optional AVX2 / NEON variants chosen at
// runtime. The vector variants reproduce the scalar results bit for bit: they
// keep the exact per-element expression grouping (no FMA) and only reorder
// min/max reductions, which are exact.

// ============================================================================
// Platform detection macros
// ============================================================================

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__) || defined(_M_IX86)
    #define SIMD_X86 1
#else
    #define SIMD_X86 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
    #define SIMD_ARM64 1
#else
    #define SIMD_ARM64 0
#endif

#if SIMD_ARM64 || defined(__ARM_NEON) || defined(__ARM_NEON__)
    #define SIMD_NEON 1
#else
    #define SIMD_NEON 0
#endif

namespace wald::kernels {

// All matrices are dense row-major. Sides A and B index a split; `dab` is
// na×nb cross-side distances, `daa`/`dbb` are the within-side matrices (daa
// has zero diagonal, the correlation matrices have unit diagonal).
//
//   buneman_min       min over (u,v,s,t) in A×A×B×B of
//                     (dab[u][t] - dbb[s][t]) + (dab[v][s] - daa[u][v])
//                     (the caller halves it to get the Buneman index)
//   weight_ratio_max  max over the same range of
//                     (rab[u][t] * rab[v][s]) / (raa[u][v] * rbb[s][t])
//   four_point_margin min over quadruples u<v<s<t of p_min - p_mid where
//                     p_* sorts {r_uv*r_st, r_us*r_vt, r_ut*r_vs};
//                     zero exactly when the two smallest products tie
//   r4_margin         min over u<v, s not in {u,v} of r_uv - (r_us * r_sv)
struct Impl {
    const char* name;
    double (*buneman_min)(const double* dab, const double* daa, const double* dbb,
                          int na, int nb);
    double (*weight_ratio_max)(const double* rab, const double* raa, const double* rbb,
                               int na, int nb);
    double (*four_point_margin)(const double* r, int n);
    double (*r4_margin)(const double* r, int n);
};

const Impl& scalar_impl();
const Impl* avx2_impl();  // null when not compiled in
const Impl* neon_impl();  // null when not compiled in

// Best implementation the running CPU supports; scalar is the fallback.
const Impl& active_impl();

}  // namespace wald::kernels
