#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace ulab {

using Rat = mpq_class;
using Int = mpz_class;

// Degree-bounded polynomial with exact rational coefficients, monomial
// basis: c[0] + c[1]*t + ... + c[k]*t^k.  Trailing zeros are trimmed, so
// degree() is exact (-1 for the zero polynomial).
struct RationalPoly {
    std::vector<Rat> c;

    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }
    static RationalPoly constant(const Rat& v) { return RationalPoly({v}); }
    static RationalPoly monomial(const Rat& v, int j) {
        std::vector<Rat> co((size_t)j + 1, Rat(0));
        co[(size_t)j] = v;
        return RationalPoly(std::move(co));
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int degree() const { return (int)c.size() - 1; }
    bool is_zero() const { return c.empty(); }
    const Rat& coeff(int j) const {
        static const Rat zero(0);
        return (j < 0 || j >= (int)c.size()) ? zero : c[(size_t)j];
    }

    Rat eval(const Rat& t) const {
        Rat r(0);
        for (size_t j = c.size(); j-- > 0;) r = r * t + c[j];
        return r;
    }
    double eval_double(double t) const {
        double r = 0;
        for (size_t j = c.size(); j-- > 0;) r = r * t + c[j].get_d();
        return r;
    }

    RationalPoly derivative() const {
        if (c.size() <= 1) return RationalPoly();
        std::vector<Rat> d(c.size() - 1);
        for (size_t j = 1; j < c.size(); ++j) d[j - 1] = c[j] * (long)j;
        return RationalPoly(std::move(d));
    }

    // j-th derivative evaluated at t (exact).
    Rat derivative_at(int j, const Rat& t) const;

    // p(a*t + b)
    RationalPoly compose_affine(const Rat& a, const Rat& b) const;

    friend RationalPoly operator+(const RationalPoly& x, const RationalPoly& y);
    friend RationalPoly operator-(const RationalPoly& x, const RationalPoly& y);
    friend RationalPoly operator*(const RationalPoly& x, const RationalPoly& y);
    friend RationalPoly operator*(const Rat& s, const RationalPoly& x);
    friend bool operator==(const RationalPoly& x, const RationalPoly& y) { return x.c == y.c; }
};

// Textual format "c0 + c1*x + c2*x^2" with rationals as "p/q".
std::string format_poly(const RationalPoly& p);
RationalPoly parse_poly(const std::string& text);  // throws std::runtime_error

// Binomial coefficient polynomial C(t, j) = t(t-1)...(t-j+1)/j!.
RationalPoly binom_poly(int j);
// C(t, j) at a rational point.
Rat binom_at(const Rat& t, int j);

// Nearest integer with half-integer ties rounded toward zero.
Int round_half_toward_zero(const Rat& x);
Int floor_rat(const Rat& x);

// Interval given by midpoint and length (the (x_I, |I|) of a local phase).
struct RatInterval {
    Rat mid, len;
    Rat lo() const { return mid - len / 2; }
    Rat hi() const { return mid + len / 2; }
};

// Real-root machinery for exact sup computations: Sturm chain of p.
std::vector<RationalPoly> sturm_chain(const RationalPoly& p);
// Number of distinct real roots in (a, b] counted via sign variations.
int sturm_count_roots(const std::vector<RationalPoly>& chain, const Rat& a, const Rat& b);

// Decides sup_{[lo,hi]} |p| <= bound by exact endpoint/critical-point
// evaluation with Sturm root isolation; *sup_hint receives a rigorous upper
// bound for the sup (or the sampled estimate if isolation hit max_steps and
// the verdict fell back to dense 1000-point sampling).
bool sup_abs_leq(const RationalPoly& p, const Rat& lo, const Rat& hi, const Rat& bound,
                 int max_steps, double* sup_hint);

}  // namespace ulab
