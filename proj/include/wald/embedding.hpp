#pragma once

#include <array>
#include <string>
#include <vector>

#include "wald/spd.hpp"
#include "wald/wald.hpp"

namespace wald {

// The embedding rho_uv = prod over splits separating u,v of (1 - lambda_e),
// rho_uu = 1, rho_uv = 0 across blocks.
SpdMatrix phi(const Wald& w);

// Polynomial continuation of the same product formula: lambda may be any
// real vector (aligned with t.splits()), and the result is merely symmetric.
SymMatrix phi_bar(const WaldTopology& t, const std::vector<double>& lambda);

// Entrywise partial derivatives of phi_bar, valid for any real lambda.
// d_phi(u,v) = -[e separates u,v] * prod over other separating splits of
// (1 - lambda); d2_phi is the mixed second derivative (zero when e = f,
// since the product is affine in each coordinate).
SymMatrix d_phi(const WaldTopology& t, const std::vector<double>& lambda, const Split& e);
SymMatrix d2_phi(const WaldTopology& t, const std::vector<double>& lambda, const Split& e,
                 const Split& f);

// One violated characterization condition. Witness holds the leaf indices
// (0-based, -1 when unused) that exhibit the violation.
struct CheckViolation {
    std::string condition;  // "R1", "R2", "R3", "R4", "R5", "PD"
    double margin;
    std::array<int, 4> witness;
};

struct CheckReport {
    std::vector<CheckViolation> violations;
    double r2_margin = 0.0;   // min over quadruples of p_min - p_mid
    double r4_margin = 0.0;   // min over triples of rho_uv - rho_us*rho_sv
    double min_eigenvalue = 0.0;
    bool ok() const { return violations.empty(); }
};

// Tests the characterization of the embedded image: unit diagonal (R1), the
// four-point condition in min form (R2), nonnegativity (R3), the derived
// triangle bound (R4), off-diagonal entries below one (R5), and positive
// definiteness. Empty report means the matrix is the image of a wald.
CheckReport check_wald_matrix(const SymMatrix& p);
CheckReport check_wald_matrix(const SpdMatrix& p);

// Bipartitions whose Buneman index fell inside the ambiguity band around
// zero; they are excluded from the topology but reported here, together with
// the final reconstruction residual.
struct AmbiguousSplit {
    Split split;
    double buneman_index;
};

struct RecognizeDiagnostics {
    std::vector<AmbiguousSplit> ambiguous;
    double roundtrip_error = 0.0;
};

// Inverse of phi on its image: blocks from the zero pattern, splits by
// exhaustive bipartition screening with the Buneman index, weights via the
// quadruple ratio maximum. Throws NotAWaldMatrix when the input fails
// check_wald_matrix or the reconstruction does not reproduce the input
// within 1e-9; DomainError when a block is too large to enumerate.
Wald recognize(const SpdMatrix& p, RecognizeDiagnostics* diagnostics = nullptr);

// recognize(x*I + (1-x)*phi(w)): slides the embedded point along the straight
// segment toward the disconnected forest. x in [0,1], else DomainError.
Wald contract_toward_infinity(const Wald& w, double x);

// Derivative matching constant across a boundary: for e' in E' and the
// corner lambda* of E representing the same point, picks the first e in
// R_{e'} (canonical order) with lambda*_e nonzero and returns c such that
// d_phi of E at (lambda*, e) equals c times d_phi of E' at (lambda', e').
struct WhitneyFactor {
    Split e;
    double c;
};

WhitneyFactor whitney_factor(const Wald& sub, const WaldTopology& t,
                             const std::vector<double>& lambda_star, const Split& e_prime);

}  // namespace wald
