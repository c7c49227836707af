#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ulab/common.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/rational_poly.hpp"

namespace ulab {

// Dense d x d matrix over T (double, or Rat for the exact variant).  Group
// elements are upper unitriangular, Lie elements strictly upper triangular;
// the operations validate the shape they need.
template <class T>
struct UTMat {
    int d = 0;
    std::vector<T> a;  // row-major, d*d entries

    UTMat() = default;
    explicit UTMat(int dim) : d(dim), a((size_t)dim * dim, T(0)) {}
    T& at(int i, int j) { return a[(size_t)i * d + j]; }
    const T& at(int i, int j) const { return a[(size_t)i * d + j]; }
    bool operator==(const UTMat& o) const { return d == o.d && a == o.a; }
};

using MatD = UTMat<double>;
using MatQ = UTMat<Rat>;

template <class T> UTMat<T> mat_identity(int d);
template <class T> UTMat<T> mat_mul(const UTMat<T>& x, const UTMat<T>& y);
// Inverse of a unitriangular matrix (finite Neumann series, exact over Rat).
template <class T> UTMat<T> mat_inverse(const UTMat<T>& g);

// Truncated exponential/logarithm series; both are finite (d terms) and
// exactly inverse to each other on nilpotent input.
template <class T> UTMat<T> nil_exp(const UTMat<T>& X);
template <class T> UTMat<T> nil_log(const UTMat<T>& g);

// log(exp X . exp Y): the Baker-Campbell-Hausdorff product on the Lie side.
template <class T> UTMat<T> bch_product(const UTMat<T>& X, const UTMat<T>& Y);

// g^t = exp(t log g); agrees with repeated multiplication at integer t.
template <class T> UTMat<T> real_power(const UTMat<T>& g, const T& t);

// Heisenberg coordinates (x, y, z) <-> [[1 x z], [0 1 y], [0 0 1]].
template <class T>
struct HeisCoords {
    T x{}, y{}, z{};
};
template <class T> UTMat<T> heis_mat(const HeisCoords<T>& c);
template <class T> HeisCoords<T> heis_coords(const UTMat<T>& g);

// Fundamental-domain representative: g = h * gamma with h's coordinates in
// [0,1)^3 (x reduced first, then y, then z so z absorbs the commutator
// correction) and gamma in the integer lattice.  Exact over Rat.
template <class T> std::pair<UTMat<T>, UTMat<T>> heisenberg_reduce(const UTMat<T>& g);

// Nested coordinate masks for G_0 = G_1 >= ... >= G_{degree+1} = {1}; bit
// i*d+j of masks[s] allows a nonzero (i,j) entry of log g for g in G_s.
struct Filtration {
    int degree = 0;
    std::vector<uint64_t> masks;  // size degree + 2
};

// Lower-central-series filtration of the Heisenberg group (degree 2).
Filtration heisenberg_filtration();

// Checks sizes, G_0 = G_1, nesting, trivial top group, and bracket closure
// [G_i, G_j] <= G_{i+j} on elementary-matrix basis brackets.
bool filtration_valid(const Filtration& fl, int d);

// Polynomial sequence given by Taylor coefficients g_0..g_k with g_j in G_j:
// g(t) = g_0 * g_1^C(t,1) * ... * g_k^C(t,k).
template <class T>
struct NilPolySeq {
    int d = 0;
    Filtration filt;
    std::vector<UTMat<T>> coeffs;  // size filt.degree + 1
};

template <class T> UTMat<T> eval_polyseq(const NilPolySeq<T>& seq, const T& t);

// Built-in functions on the Heisenberg quotient: horizontal(a, b) is
// e(a x + b y); vertical_smoothed(m) is e(m z) w(x) w(y) with the bump
// w(u) = (1 - cos 2 pi u)/2, all read off the reduced coordinates.
struct NilCharacter {
    enum class Kind : uint8_t { horizontal, vertical_smoothed };
    Kind kind = Kind::horizontal;
    long long a = 0, b = 0;  // horizontal frequencies
    long long m = 0;         // vertical frequency

    static NilCharacter horizontal(long long a, long long b) {
        NilCharacter f;
        f.kind = Kind::horizontal;
        f.a = a;
        f.b = b;
        return f;
    }
    static NilCharacter vertical_smoothed(long long m) {
        NilCharacter f;
        f.kind = Kind::vertical_smoothed;
        f.m = m;
        return f;
    }
};

double bump(double u);

// F evaluated at the reduced point of g(n) Gamma.
cplx eval_nilsequence(const NilCharacter& F, const NilPolySeq<double>& seq, long long n);

// (1/H) sum_{x <= n < x+H} f(n) conj F(g(n) Gamma); the window must lie in
// f's table.  Parallel over fixed chunks, combined in order.
cplx discorrelation(const FunctionTable& f, long long x, long long H, const NilCharacter& F,
                    const NilPolySeq<double>& seq);

// Mean of the built-in F over the quotient (horizontal: 1 iff a = b = 0;
// vertical: 1_{m=0} times the bump means, by periodic quadrature).
double nilchar_mean(const NilCharacter& F);

// |(1/N) sum_{1 <= n <= N} F(g(n) Gamma) - mean F|.
double equidistribution_defect(const NilPolySeq<double>& seq, const NilCharacter& F,
                               long long N);

}  // namespace ulab
