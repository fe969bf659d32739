#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "wald/spd.hpp"
#include "wald/wald.hpp"

namespace wald {

// Deterministic generator state shared by all fuzz corpora.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0,1) with full 53-bit mantissa
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [lo, hi]
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Options for random forests. With drop_prob = 0 and block_prob = 0 the
// result is a fully resolved tree on one block.
struct GenOptions {
    double block_prob = 0.25;  // chance that a leaf starts a new block
    double drop_prob = 0.25;   // chance to contract a droppable split
    double lambda_lo = 1e-8;
    double lambda_hi = 1.0 - 1e-8;
};

// Random wald: random leaf partition, a random binary tree per multi-leaf
// block grown by split insertion, separation-preserving contractions, and
// independent uniform weights.
Wald random_wald(int n, Rng& rng, const GenOptions& opts = {});

// Wald matrices perturbed to violate one characterization condition while
// keeping unit diagonal and symmetry. `condition` is "R2", "R3" or "R4";
// re-rolls until check_wald_matrix reports the requested condition first.
SymMatrix violating_matrix(int n, Rng& rng, const std::string& condition);

}  // namespace wald
