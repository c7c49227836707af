#include "ulab/poly_algebra.hpp"

#include <stdexcept>

namespace ulab {

std::vector<Rat> to_binomial_basis(const RationalPoly& p, const Rat& delta, const Rat& t0) {
    if (delta <= 0) throw std::invalid_argument("to_binomial_basis: delta must be positive");
    int k = p.degree();
    if (k < 0) return {};
    // Newton forward differences of u -> p(t0 + delta*u) at u = 0..k.
    std::vector<Rat> v((size_t)k + 1);
    for (int u = 0; u <= k; ++u) v[(size_t)u] = p.eval(t0 + delta * u);
    std::vector<Rat> out((size_t)k + 1);
    for (int j = 0; j <= k; ++j) {
        out[(size_t)j] = v[0];
        for (int u = 0; u < k - j; ++u) v[(size_t)u] = v[(size_t)u + 1] - v[(size_t)u];
    }
    return out;
}

RationalPoly from_binomial_basis(const std::vector<Rat>& coeffs, const Rat& delta, const Rat& t0) {
    if (delta <= 0) throw std::invalid_argument("from_binomial_basis: delta must be positive");
    RationalPoly p;
    Rat a = Rat(1) / delta;
    Rat b = -t0 / delta;
    for (size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0) continue;
        p = p + coeffs[j] * binom_poly((int)j).compose_affine(a, b);
    }
    return p;
}

bool is_integral(const RationalPoly& p, const Rat& delta) {
    for (const Rat& c : to_binomial_basis(p, delta, Rat(0)))
        if (c.get_den() != 1) return false;
    return true;
}

std::pair<RationalPoly, RationalPoly> bezout_split(const RationalPoly& gamma, const Int& a,
                                                   const Int& b) {
    if (a < 1 || b < 1) throw std::invalid_argument("bezout_split: moduli must be positive");
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g != 1) throw std::invalid_argument("bezout_split: moduli must be coprime");
    if (!is_integral(gamma, Rat(1))) throw std::invalid_argument("bezout_split: gamma must be integral");

    RationalPoly ga, gb;
    RationalPoly rem = gamma;
    while (!rem.is_zero()) {
        int j = rem.degree();
        // Leading binomial coefficient: C(t,j) = t^j/j! + lower order.
        Rat fact(1);
        for (int i = 2; i <= j; ++i) fact *= i;
        Rat c_rat = rem.coeff(j) * fact;
        if (c_rat.get_den() != 1)
            throw std::logic_error("bezout_split: non-integral leading coefficient");
        Int c = c_rat.get_num();

        Int aj, bj;
        mpz_pow_ui(aj.get_mpz_t(), a.get_mpz_t(), (unsigned long)j);
        mpz_pow_ui(bj.get_mpz_t(), b.get_mpz_t(), (unsigned long)j);
        // c = q*aj + r*bj with minimal |q|: q runs over c*aj^{-1} mod bj.
        Int gg, u, v;
        mpz_gcdext(gg.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), aj.get_mpz_t(), bj.get_mpz_t());
        Int q;
        {
            Int cu = c * u;
            mpz_fdiv_r(q.get_mpz_t(), cu.get_mpz_t(), bj.get_mpz_t());  // q in [0, bj)
            if (2 * q > bj) q -= bj;                                    // tie 2q == bj stays positive
        }
        Int r = (c - q * aj) / bj;

        if (q != 0) ga = ga + Rat(q) * binom_poly(j).compose_affine(Rat(a), Rat(0));
        if (r != 0) gb = gb + Rat(r) * binom_poly(j).compose_affine(Rat(b), Rat(0));
        RationalPoly next = gamma - ga - gb;
        if (!next.is_zero() && next.degree() >= j)
            throw std::logic_error("bezout_split: degree did not drop");
        rem = next;
    }
    return {ga, gb};
}

RationalPoly crt_align(const std::vector<std::pair<Int, RationalPoly>>& parts) {
    if (parts.empty()) throw std::invalid_argument("crt_align: empty input");
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].first < 2) throw std::invalid_argument("crt_align: moduli must be >= 2");
        for (size_t j = i + 1; j < parts.size(); ++j)
            if (parts[i].first == parts[j].first)
                throw std::invalid_argument("crt_align: repeated prime");
        if (!is_integral(parts[i].second, Rat(1)))
            throw std::invalid_argument("crt_align: parts must be integral");
    }
    RationalPoly gamma = parts[0].second;
    Int prod = parts[0].first;
    for (size_t i = 1; i < parts.size(); ++i) {
        RationalPoly d = parts[i].second - gamma;
        auto [da, db] = bezout_split(d, prod, parts[i].first);
        gamma = gamma + da;
        prod *= parts[i].first;
    }
    return gamma;
}

bool interval_comparable(const RatInterval& I, const RatInterval& J, const Rat& C) {
    if (I.len <= 0 || J.len <= 0) return false;
    Rat lo = std::min(I.lo(), J.lo());
    Rat hi = std::max(I.hi(), J.hi());
    Rat diam = hi - lo;
    return diam <= C * I.len && diam <= C * J.len;
}

std::optional<PhaseDecomposition> compare_phases(const LocalPhase& p1, const LocalPhase& p2,
                                                 const Rat& delta, double C) {
    if (delta <= 0) throw std::invalid_argument("compare_phases: delta must be positive");
    Rat crat(C);
    if (!interval_comparable(p1.I, p2.I, crat)) return std::nullopt;

    Rat t_c(round_half_toward_zero(p1.I.mid));
    RationalPoly diff = p1.P - p2.P;
    std::vector<Rat> bins = to_binomial_basis(diff, delta, t_c);
    std::vector<Rat> rounded(bins.size());
    for (size_t j = 0; j < bins.size(); ++j) rounded[j] = Rat(round_half_toward_zero(bins[j]));
    RationalPoly gamma = from_binomial_basis(rounded, delta, t_c);
    RationalPoly eps = diff - gamma;

    double sup = 0;
    if (!sup_abs_leq(eps, p1.I.lo(), p1.I.hi(), crat, 4096, &sup)) return std::nullopt;
    return PhaseDecomposition{eps, gamma, sup};
}

}  // namespace ulab
