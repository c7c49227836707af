#pragma once

#include <functional>

#include "ulab/common.hpp"
#include "ulab/mult_sieve.hpp"

namespace ulab {

// Pretentious distance between two multiplicative functions given by their
// values at primes:
//   D(f,g;X) = ( sum_{p <= X} (1 - Re f(p) conj g(p)) / p )^{1/2}.
// Primes come from a sieve; the sum is compensated.  Requires X >= 2 and
// |f(p)|, |g(p)| <= 1 (callers' responsibility; the radicand is clamped at 0).
double pretentious_distance(const std::function<cplx(long long)>& f_on_primes,
                            const std::function<cplx(long long)>& g_on_primes,
                            long long X);

// Result of the pretentious-score minimization: the distance value at the
// reported argmin (value = D(f, chi(n) n^{it}; X) at that point exactly).
struct MScore {
    double value = 0.0;
    double argmin_t = 0.0;
    long long argmin_q = 1;
    long long argmin_index = 0;
};

// Minimizes D(f, n -> chi(n) n^{it}; X) over all Dirichlet characters chi
// mod q <= Q and t on the symmetric grid {0, +-t_res, ...} covering
// |t| <= t_max (default t_max = X), then runs one golden-section refinement
// in t around the grid argmin with the argmin character held fixed.  The
// grid spacing controls the score error: |d/dt D^2| <= sum_{p<=X} log p / p
// <= 2 log X, so spacing eps/(2 log X) bounds the D^2 error by eps.
//
// f must be 1-bounded completely multiplicative (liouville, moebius,
// character_twist, or custom_prime_map); von Mangoldt is rejected.  Ties are
// broken toward smaller q, then smaller character index, then smaller t; the
// result is identical for every thread count.  Throws runtime_error when
// (grid points) x pi(X) exceeds `budget`.
MScore m_score(const MultSpec& f, long long X, long long Q, double t_res,
               double t_max = -1.0, double budget = 1e9);

}  // namespace ulab
