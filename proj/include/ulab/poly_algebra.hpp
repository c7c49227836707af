#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ulab/rational_poly.hpp"

namespace ulab {

// Coefficients c_0..c_k of p in the scaled binomial basis:
//   p(t) = sum_j c_j * C((t - t0)/delta, j).
// Exact via the Newton forward-difference table of u -> p(t0 + delta*u).
std::vector<Rat> to_binomial_basis(const RationalPoly& p, const Rat& delta, const Rat& t0);
RationalPoly from_binomial_basis(const std::vector<Rat>& coeffs, const Rat& delta, const Rat& t0);

// True iff p maps delta*Z into Z (equivalently all binomial-basis
// coefficients at scale delta around 0 are integers).
bool is_integral(const RationalPoly& p, const Rat& delta);

// Splits a 1-integral gamma as gamma_a + gamma_b with gamma_a integral on
// (1/a)Z and gamma_b integral on (1/b)Z, for coprime positive a, b.  Peels
// the binomial expansion top-down; at each degree j the leading coefficient
// c is written c = q*a^j + r*b^j with |q| minimal (ties -> positive q), and
// q*C(a*t, j), r*C(b*t, j) are attributed to the two parts.  Degree-0
// constants go entirely to gamma_b.
std::pair<RationalPoly, RationalPoly> bezout_split(const RationalPoly& gamma, const Int& a,
                                                   const Int& b);

// Given 1-integral gamma_i and distinct primes p_i, produces gamma with
// gamma - gamma_i integral on (1/p_i)Z for every i (inductive accumulation
// of bezout_split corrections against the running prime product).
RationalPoly crt_align(const std::vector<std::pair<Int, RationalPoly>>& parts);

// Polynomial phase P restricted to the interval I.
struct LocalPhase {
    RatInterval I;
    RationalPoly P;
};

struct PhaseDecomposition {
    RationalPoly eps;    // smooth part, sup_{I1} |eps| <= C certified
    RationalPoly gamma;  // integral on delta*Z + t_c by construction
    double smooth_bound; // rigorous upper bound for sup |eps| (or sampled estimate)
};

// diam(I union J)/|I| <= C and diam(I union J)/|J| <= C, exactly.
bool interval_comparable(const RatInterval& I, const RatInterval& J, const Rat& C);

// Decides whether two local phases agree up to a (1/delta)-integral
// polynomial and a C-small smooth error on I1.  The candidate gamma comes
// from rounding the binomial coefficients of P1 - P2 at scale delta around
// the integer nearest the midpoint of I1; the sup of |eps| over I1 is
// certified by Sturm critical-point isolation with a dense-sampling
// fallback once the isolation budget is exhausted.
std::optional<PhaseDecomposition> compare_phases(const LocalPhase& p1, const LocalPhase& p2,
                                                 const Rat& delta, double C);

}  // namespace ulab
