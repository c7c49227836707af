#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ulab/common.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/rational_poly.hpp"

namespace ulab {

enum class SearchMode : uint8_t { exhaustive, heuristic };

// Polynomial phase P(t) = sum_j alpha_j (t - t0)^j with coefficients taken
// mod 1; alpha_0 is fixed to 0 (it never affects |sum|).
struct PhasePoint {
    int k = 0;
    long long t0 = 0;
    std::vector<double> alphas;  // alpha_0..alpha_k, each in [0,1)
};

struct WeakGowersResult {
    double value = 0;       // max over evaluated phases of |sum f e(-P)| / (H+1)
    PhasePoint argmax;
    double guarantee = 0;   // certified additive gap to the true sup; +inf in heuristic mode
};

// Maximizes the normalized correlation of f over [x, x+H] (closed window,
// H+1 points) against degree-<=k polynomial phases.  Exhaustive mode sweeps
// the grid alpha_j in {0, sigma/H^j, ...} (the alpha_1 axis is evaluated for
// all frequencies at once by an FFT on a power-of-two refinement of the
// grid, which only tightens the mesh), applies one coordinate-descent
// golden-section refinement (3 sweeps) from the grid argmax, and certifies
// guarantee = 2 pi (k+1) sigma via the Lipschitz bound
// |d(sum)/d alpha_j| <= 2 pi sum |n-t0|^j.  Grid argmax ties go to the
// lexicographically smallest (alpha_k..alpha_1).  For real-valued f the
// alpha_k sweep is halved by conjugation symmetry (mirror tuples share the
// same modulus bit for bit).  Heuristic mode runs `restarts` seeded descent
// passes from random starts; guarantee is +inf.
WeakGowersResult weak_gowers(const FunctionTable& f, long long x, long long H, int k,
                             SearchMode mode, double sigma, int restarts = 8, uint64_t seed = 0,
                             double budget = 1e9);

struct RationalApprox {
    long long q = 0;
    std::vector<long long> numerators;  // a_0..a_k, nearest integers of q*alpha_j
    std::vector<double> residuals;      // ||q alpha_j||_{R/Z}
};

// Smallest q in 1..Q with ||q alpha_j|| <= c_j H^{-j} for every j >= 1;
// absent if none qualifies.  c is indexed like alphas (c[0] ignored).
std::optional<RationalApprox> weyl_rationalize(const PhasePoint& pt, long long H, long long Q,
                                               const std::vector<double>& c);

struct ArchimedeanFit {
    double T = 0;
    RationalPoly gamma;   // (1/q) * integer combination of C(t,j)
    double eps_sup = 0;   // sup_I |P - (T/2pi) log t - gamma|, from critical points + dense samples
    long long q = 1;
};

// Decomposes P on I as eps + (T/2pi) log t + gamma with gamma q-rational,
// by top-down derivative matching at x_I against the log model, trying every
// q <= q_max and keeping the fit with the smallest eps_sup (ties -> smaller q).
ArchimedeanFit archimedean_fit(const RationalPoly& P, const RatInterval& I, long long q_max);

}  // namespace ulab
