#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ulab/mult_sieve.hpp"

namespace ulab {

// Distinct length-k windows (f(n+1), ..., f(n+k)) over 0 <= n < N.  Patterns
// are packed little-endian base-ell: digit j is the root-of-unity index of
// the window's j-th value (so +1 -> 0 and -1 -> ell/2).  first_occurrence
// maps each packed pattern to the smallest window start n.
struct PatternCount {
    int k = 0;
    long long N = 0;
    long long count = 0;
    std::map<uint64_t, long long> first_occurrence;
};

// Sign patterns of a +-1-valued table (alphabet {+1, -1}); k >= 1, N >= k,
// and the table must cover [1, N+k-1].
PatternCount sign_patterns(const FunctionTable& lam, int k, long long N);

// Value patterns over the alphabet of ell-th roots of unity; k = 0 counts
// the single empty pattern.  Values must be ell-th roots of unity (tolerance
// 1e-6), so zeros (e.g. moebius at non-squarefree n) are rejected.
PatternCount value_patterns(const FunctionTable& g, int k, long long N, long long ell);

// Integer-coefficient polynomial in variables m1..mr ("m" = m1 when r = 1);
// terms hold (coefficient, exponent per variable).
struct ZPoly {
    int r = 1;
    std::vector<std::pair<long long, std::vector<int>>> terms;
};

// Parses e.g. "3*m1^2*m2 - 2m + 7" (juxtaposed coefficient allowed, '^' for
// powers, no parentheses).  Throws invalid_argument with the bad position.
ZPoly parse_zpoly(const std::string& text, int r);
std::string format_zpoly(const ZPoly& p);
long long zpoly_eval(const ZPoly& p, const std::vector<long long>& m);
int zpoly_total_degree(const ZPoly& p);

enum class WeightKind : uint8_t { lambda, von_mangoldt };

// Nested-average outcome; boundary_loss is the fraction of factor lookups
// that fell outside the table and were taken as zero.
struct CorrelationResult {
    double value = 0.0;
    long long X = 0;
    double epsilon = 0.0;
    std::vector<long long> shifts;      // chowla form
    std::vector<std::string> polys;     // polynomial form, printed
    std::vector<WeightKind> weights;
    double boundary_loss = 0.0;
};

// E_{h <= floor(X^eps)} | E_{n <= X} prod_i lam(n + a_i h) | with the table
// extended by zero off its range.  Shifts must be distinct and nonnegative;
// floor(X^eps) >= 1.  log_average switches the inner mean to sum (1/n) f(n)
// normalized by sum 1/n.
CorrelationResult chowla_average(const FunctionTable& lam, const std::vector<long long>& shifts,
                                 long long X, double epsilon, bool log_average = false);

// E_{m in [floor(X^eps)]^r} | E_{n <= X} prod_i w_i(n + P_i(m)) | where w_i
// reads the lambda or von Mangoldt table (von Mangoldt unnormalized).
// Requires pairwise nonconstant P_i - P_j, eps < 1/deg, and tables covering
// [1, X] for every weight kind that appears.
CorrelationResult poly_average(const std::vector<ZPoly>& polys,
                               const std::vector<WeightKind>& weights,
                               const FunctionTable* lam, const FunctionTable* vm, long long X,
                               double epsilon, bool log_average = false);

// Pointwise von Mangoldt: log p when n = p^k, else 0 (trial division).
double von_mangoldt_at(long long n);

// W-tricked von Mangoldt weight phi(W)/W * Lambda(W d + b); 1 <= b <= W.
double w_trick_weight(long long W, long long b, long long d);

}  // namespace ulab
