#include "ulab/rational_poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ulab {

RationalPoly operator+(const RationalPoly& x, const RationalPoly& y) {
    std::vector<Rat> c(std::max(x.c.size(), y.c.size()), Rat(0));
    for (size_t j = 0; j < x.c.size(); ++j) c[j] += x.c[j];
    for (size_t j = 0; j < y.c.size(); ++j) c[j] += y.c[j];
    return RationalPoly(std::move(c));
}

RationalPoly operator-(const RationalPoly& x, const RationalPoly& y) {
    std::vector<Rat> c(std::max(x.c.size(), y.c.size()), Rat(0));
    for (size_t j = 0; j < x.c.size(); ++j) c[j] += x.c[j];
    for (size_t j = 0; j < y.c.size(); ++j) c[j] -= y.c[j];
    return RationalPoly(std::move(c));
}

RationalPoly operator*(const RationalPoly& x, const RationalPoly& y) {
    if (x.is_zero() || y.is_zero()) return RationalPoly();
    std::vector<Rat> c(x.c.size() + y.c.size() - 1, Rat(0));
    for (size_t i = 0; i < x.c.size(); ++i)
        for (size_t j = 0; j < y.c.size(); ++j) c[i + j] += x.c[i] * y.c[j];
    return RationalPoly(std::move(c));
}

RationalPoly operator*(const Rat& s, const RationalPoly& x) {
    std::vector<Rat> c(x.c.size());
    for (size_t j = 0; j < x.c.size(); ++j) c[j] = s * x.c[j];
    return RationalPoly(std::move(c));
}

Rat RationalPoly::derivative_at(int j, const Rat& t) const {
    RationalPoly d = *this;
    for (int i = 0; i < j; ++i) d = d.derivative();
    return d.eval(t);
}

RationalPoly RationalPoly::compose_affine(const Rat& a, const Rat& b) const {
    RationalPoly res;
    RationalPoly lin({b, a});
    for (size_t j = c.size(); j-- > 0;) res = res * lin + RationalPoly::constant(c[j]);
    return res;
}

RationalPoly binom_poly(int j) {
    RationalPoly p = RationalPoly::constant(1);
    Rat fact(1);
    for (int i = 0; i < j; ++i) {
        p = p * RationalPoly({Rat(-i), Rat(1)});
        fact *= i + 1;
    }
    return Rat(1) / fact * p;
}

Rat binom_at(const Rat& t, int j) {
    Rat num(1), fact(1);
    for (int i = 0; i < j; ++i) {
        num *= t - i;
        fact *= i + 1;
    }
    return num / fact;
}

Int floor_rat(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

Int round_half_toward_zero(const Rat& x) {
    Int fl = floor_rat(x);
    Rat fr = x - Rat(fl);
    if (fr > Rat(1, 2)) return fl + 1;
    if (fr < Rat(1, 2)) return fl;
    // Tie: x = fl + 1/2; pick the neighbor closer to zero.
    return x > 0 ? fl : fl + 1;
}

std::string format_poly(const RationalPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int j = 0; j <= p.degree(); ++j) {
        const Rat& cj = p.coeff(j);
        if (cj == 0) continue;
        Rat a = cj;
        if (out.empty()) {
            if (a < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a < 0 ? " - " : " + ";
            if (a < 0) a = -a;
        }
        out += a.get_str();
        if (j == 1)
            out += "*x";
        else if (j > 1)
            out += "*x^" + std::to_string(j);
    }
    return out;
}

namespace {

struct PolyParser {
    const std::string& s;
    size_t i = 0;

    explicit PolyParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("polynomial parse error at position " + std::to_string(i) + ": " + what);
    }

    Int parse_int() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        size_t digits = i;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
        if (i == digits) fail("expected integer");
        return Int(s.substr(start, i - start));
    }

    Rat parse_rational() {
        Int num = parse_int();
        skip_ws();
        if (i < s.size() && s[i] == '/') {
            ++i;
            Int den = parse_int();
            if (den == 0) fail("zero denominator");
            Rat r(num, den);
            r.canonicalize();
            return r;
        }
        return Rat(num);
    }

    // term := rational ['*' x-part] | [sign] x-part.  Sign is consumed by caller.
    RationalPoly parse_term(bool negate) {
        skip_ws();
        Rat coeff(1);
        bool saw_coeff = false;
        if (i < s.size() && (std::isdigit((unsigned char)s[i]) || s[i] == '+' || s[i] == '-')) {
            coeff = parse_rational();
            saw_coeff = true;
        }
        skip_ws();
        int exp = 0;
        if (i < s.size() && (s[i] == '*' || s[i] == 'x' || s[i] == 't')) {
            if (s[i] == '*') {
                ++i;
                skip_ws();
                if (i >= s.size() || (s[i] != 'x' && s[i] != 't')) fail("expected variable after '*'");
            }
            if (i < s.size() && (s[i] == 'x' || s[i] == 't')) {
                ++i;
                exp = 1;
                skip_ws();
                if (i < s.size() && s[i] == '^') {
                    ++i;
                    Int e = parse_int();
                    if (e < 0 || e > 64) fail("exponent out of range");
                    exp = (int)e.get_si();
                }
            }
        } else if (!saw_coeff) {
            fail("expected term");
        }
        if (negate) coeff = -coeff;
        return RationalPoly::monomial(coeff, exp);
    }

    RationalPoly parse() {
        RationalPoly p;
        skip_ws();
        if (i >= s.size()) fail("empty input");
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') {
            neg = s[i] == '-';
            ++i;
        }
        p = p + parse_term(neg);
        skip_ws();
        while (i < s.size()) {
            if (s[i] != '+' && s[i] != '-') fail("expected '+' or '-'");
            neg = s[i] == '-';
            ++i;
            p = p + parse_term(neg);
            skip_ws();
        }
        return p;
    }
};

}  // namespace

RationalPoly parse_poly(const std::string& text) { return PolyParser(text).parse(); }

namespace {

int sign_of(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Remainder of polynomial division p / d (deg d >= 0).
RationalPoly poly_rem(RationalPoly p, const RationalPoly& d) {
    while (p.degree() >= d.degree() && !p.is_zero()) {
        Rat q = p.c.back() / d.c.back();
        int shift = p.degree() - d.degree();
        for (int j = 0; j <= d.degree(); ++j) p.c[(size_t)(j + shift)] -= q * d.coeff(j);
        p.trim();
    }
    return p;
}

int sign_variations(const std::vector<RationalPoly>& chain, const Rat& x) {
    int var = 0, prev = 0;
    for (const auto& p : chain) {
        int s = sign_of(p.eval(x));
        if (s != 0) {
            if (prev != 0 && s != prev) ++var;
            prev = s;
        }
    }
    return var;
}

}  // namespace

std::vector<RationalPoly> sturm_chain(const RationalPoly& p) {
    std::vector<RationalPoly> chain;
    if (p.is_zero()) return chain;
    chain.push_back(p);
    if (p.degree() >= 1) {
        chain.push_back(p.derivative());
        while (chain.back().degree() >= 1) {
            RationalPoly r = poly_rem(chain[chain.size() - 2], chain.back());
            if (r.is_zero()) break;
            chain.push_back(Rat(-1) * r);
        }
    }
    return chain;
}

int sturm_count_roots(const std::vector<RationalPoly>& chain, const Rat& a, const Rat& b) {
    if (chain.empty()) return 0;
    return sign_variations(chain, a) - sign_variations(chain, b);
}

bool sup_abs_leq(const RationalPoly& p, const Rat& lo, const Rat& hi, const Rat& bound,
                 int max_steps, double* sup_hint) {
    double best = 0;
    auto consider = [&](const Rat& x) -> bool {
        Rat v = p.eval(x);
        if (v < 0) v = -v;
        best = std::max(best, v.get_d());
        return v <= bound;
    };
    bool ok = consider(lo) && consider(hi);
    if (ok && p.degree() >= 2) {
        // Interior extrema sit at roots of p'; isolate them by Sturm bisection.
        RationalPoly dp = p.derivative();
        auto chain = sturm_chain(dp);
        int steps = 0;
        bool exceeded_budget = false;
        std::vector<std::pair<Rat, Rat>> work{{lo, hi}};
        while (!work.empty() && ok) {
            auto [a, b] = work.back();
            work.pop_back();
            int nroots = sturm_count_roots(chain, a, b);
            if (nroots == 0) continue;
            if (++steps > max_steps) {
                exceeded_budget = true;
                break;
            }
            Rat mid = (a + b) / 2;
            if (dp.eval(mid) == 0) {
                // Exact critical point; evaluate and recurse on both halves.
                ok = consider(mid);
                if (!ok) break;
            }
            // Once an isolating interval is narrow enough, bound |p| on it by
            // the endpoint value plus width * sup|p'|; p' is small near its own
            // root, so a crude coefficient bound on p'' does the job.
            if (nroots == 1) {
                Rat width = b - a;
                Rat m = std::max(abs(a), abs(b));
                Rat dpp_bound(0);
                RationalPoly dpp = dp.derivative();
                Rat mp(1);
                for (int j = 0; j <= dpp.degree(); ++j, mp *= m) dpp_bound += abs(dpp.coeff(j)) * mp;
                // |p'(x)| <= width * sup|p''| on the interval (p' vanishes inside).
                Rat slack = width * width * dpp_bound;
                Rat va = abs(p.eval(a)), vb = abs(p.eval(b));
                Rat cap = std::max(va, vb) + slack;
                if (cap <= bound) {
                    best = std::max(best, cap.get_d());
                    continue;
                }
                if (va > bound || vb > bound) {
                    best = std::max({best, va.get_d(), vb.get_d()});
                    ok = false;
                    break;
                }
            }
            work.push_back({a, mid});
            work.push_back({mid, b});
        }
        if (ok && exceeded_budget) {
            // Fallback: dense sampling (accept-side estimate only).
            for (int j = 0; j <= 1000 && ok; ++j) {
                Rat step(j, 1000);
                step.canonicalize();
                ok = consider(lo + (hi - lo) * step);
            }
        }
    }
    if (sup_hint) *sup_hint = best;
    return ok;
}

}  // namespace ulab
