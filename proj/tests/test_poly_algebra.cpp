#include "doctest.h"

#include "ulab/common.hpp"
#include "ulab/poly_algebra.hpp"
#include "ulab/rational_poly.hpp"

using namespace ulab;

namespace {

Rat rand_rat(Rng64& rng, long num_range, long max_den) {
    long num = (long)(rng.below(2 * (unsigned long)num_range + 1)) - num_range;
    long den = (long)rng.below((unsigned long)max_den) + 1;
    Rat r(num, den);
    r.canonicalize();
    return r;
}

RationalPoly rand_poly(Rng64& rng, int max_deg, long num_range, long max_den) {
    int deg = (int)rng.below((unsigned long)max_deg + 1);
    std::vector<Rat> c((size_t)deg + 1);
    for (auto& x : c) x = rand_rat(rng, num_range, max_den);
    return RationalPoly(std::move(c));
}

// Independent oracle: j-th forward difference of u -> p(t0 + delta*u) at 0,
// via the alternating binomial sum (not the in-place table the library uses).
Rat difference_oracle(const RationalPoly& p, const Rat& delta, const Rat& t0, int j) {
    Rat acc(0);
    Rat sign((j % 2 == 0) ? 1 : -1);
    Rat cji(1);  // C(j, i)
    for (int i = 0; i <= j; ++i) {
        acc += sign * cji * p.eval(t0 + delta * i);
        sign = -sign;
        cji = cji * (j - i) / (i + 1);
    }
    return acc;
}

// Random integer combination of C(m*t, j), j = 0..deg.
RationalPoly rand_integral_combo(Rng64& rng, int deg, long m, long coeff_range) {
    RationalPoly p;
    for (int j = 0; j <= deg; ++j) {
        long c = (long)rng.below(2 * (unsigned long)coeff_range + 1) - coeff_range;
        if (c != 0) p = p + Rat(c) * binom_poly(j).compose_affine(Rat(m), Rat(0));
    }
    return p;
}

}  // namespace

TEST_CASE("rational poly: arithmetic, eval, compose") {
    RationalPoly p = parse_poly("1/2 - x + 3*x^2");
    CHECK(p.degree() == 2);
    CHECK(p.eval(Rat(2)) == Rat(1, 2) - 2 + 12);
    CHECK(p.derivative() == parse_poly("-1 + 6*x"));
    RationalPoly q = p.compose_affine(Rat(2), Rat(-1));  // p(2t - 1)
    CHECK(q.eval(Rat(3)) == p.eval(Rat(5)));
    CHECK((p + q) - q == p);
    CHECK(p * parse_poly("0") == RationalPoly());
    CHECK(binom_poly(3) == parse_poly("1/3*x - 1/2*x^2 + 1/6*x^3"));
    CHECK(binom_at(Rat(7), 3) == 35);
    CHECK(binom_at(Rat(-1, 2), 2) == Rat(3, 8));
}

TEST_CASE("rational poly: format/parse round-trip and errors") {
    CHECK(format_poly(RationalPoly()) == "0");
    CHECK(format_poly(parse_poly("-3/2 + x^2 - 5*x^3")) == "-3/2 + 1*x^2 - 5*x^3");
    CHECK(parse_poly("x") == parse_poly("1*x"));
    CHECK(parse_poly("-x^2") == parse_poly("0 - 1*x^2"));
    CHECK(parse_poly("2/4") == RationalPoly::constant(Rat(1, 2)));

    Rng64 rng(2024, 1);
    for (int it = 0; it < 500; ++it) {
        RationalPoly p = rand_poly(rng, 6, 40, 12);
        CHECK(parse_poly(format_poly(p)) == p);
    }

    CHECK_THROWS_WITH_AS(parse_poly(""), doctest::Contains("position"), std::runtime_error);
    CHECK_THROWS_AS(parse_poly("3 + @"), std::runtime_error);
    CHECK_THROWS_AS(parse_poly("1/0"), std::runtime_error);
    CHECK_THROWS_AS(parse_poly("x^"), std::runtime_error);
}

TEST_CASE("rounding: half-toward-zero") {
    CHECK(round_half_toward_zero(Rat(5, 2)) == 2);
    CHECK(round_half_toward_zero(Rat(-5, 2)) == -2);
    CHECK(round_half_toward_zero(Rat(7, 3)) == 2);
    CHECK(round_half_toward_zero(Rat(-7, 3)) == -2);
    CHECK(round_half_toward_zero(Rat(0)) == 0);
    // Odd symmetry everywhere (needed for compare_phases symmetry).
    Rng64 rng(7, 7);
    for (int it = 0; it < 200; ++it) {
        Rat x = rand_rat(rng, 50, 8);
        CHECK(round_half_toward_zero(-x) == -round_half_toward_zero(x));
    }
}

TEST_CASE("binomial basis: specific values and difference oracle") {
    // t^3 = 0 + 1*C(t,1) + 6*C(t,2) + 6*C(t,3)
    auto c = to_binomial_basis(RationalPoly::monomial(Rat(1), 3), Rat(1), Rat(0));
    REQUIRE(c.size() == 4);
    CHECK(c[0] == 0);
    CHECK(c[1] == 1);
    CHECK(c[2] == 6);
    CHECK(c[3] == 6);

    Rng64 rng(99, 3);
    const Rat deltas[4] = {Rat(1), Rat(1, 2), Rat(1, 3), Rat(1, 30)};
    for (int it = 0; it < 400; ++it) {
        RationalPoly p = rand_poly(rng, 6, 30, 10);
        Rat delta = deltas[it % 4];
        Rat t0 = rand_rat(rng, 20, 6);
        auto coeffs = to_binomial_basis(p, delta, t0);
        for (size_t j = 0; j < coeffs.size(); ++j)
            CHECK(coeffs[j] == difference_oracle(p, delta, t0, (int)j));
        // Newton identity: p(t0 + delta*u) = sum_j c_j C(u, j) for many u.
        for (int u = 0; u <= p.degree() + 4; ++u) {
            Rat lhs = p.eval(t0 + delta * u);
            Rat rhs(0);
            for (size_t j = 0; j < coeffs.size(); ++j) rhs += coeffs[j] * binom_at(Rat(u), (int)j);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("binomial basis: exact round-trips") {
    Rng64 rng(5150, 0);
    const Rat deltas[4] = {Rat(1), Rat(1, 2), Rat(1, 3), Rat(1, 30)};
    for (int it = 0; it < 2000; ++it) {
        RationalPoly p = rand_poly(rng, 6, 60, 15);
        Rat delta = deltas[it % 4];
        Rat t0 = rand_rat(rng, 15, 5);
        CHECK(from_binomial_basis(to_binomial_basis(p, delta, t0), delta, t0) == p);
    }
}

TEST_CASE("is_integral") {
    CHECK(is_integral(binom_poly(2), Rat(1)));
    CHECK(is_integral(parse_poly("7 - 3*x"), Rat(1)));
    CHECK_FALSE(is_integral(parse_poly("1/2*x"), Rat(1)));
    // C(2t,2) = 2t^2 - t maps (1/2)Z to Z but not via integer coefficients alone.
    RationalPoly c2t2 = binom_poly(2).compose_affine(Rat(2), Rat(0));
    CHECK(is_integral(c2t2, Rat(1, 2)));
    CHECK(is_integral(c2t2, Rat(1)));
    CHECK_FALSE(is_integral(binom_poly(2).compose_affine(Rat(1, 2), Rat(0)), Rat(1)));
}

TEST_CASE("bezout_split: worked examples") {
    auto [z1, z2] = bezout_split(RationalPoly(), 5, 7);
    CHECK(z1.is_zero());
    CHECK(z2.is_zero());

    // gamma = t, (a,b) = (2,3): 1 = -1*2 + 1*3 -> (-2t, 3t).
    auto [ga, gb] = bezout_split(parse_poly("x"), 2, 3);
    CHECK(ga == parse_poly("-2*x"));
    CHECK(gb == parse_poly("3*x"));
    CHECK(is_integral(ga, Rat(1, 2)));
    CHECK(is_integral(gb, Rat(1, 3)));

    // gamma = C(t,2), (a,b) = (2,3): 1 = -2*4 + 1*9, then degree-1 remainder.
    auto [ha, hb] = bezout_split(binom_poly(2), 2, 3);
    RationalPoly expect_a =
        Rat(-2) * binom_poly(2).compose_affine(Rat(2), Rat(0)) + Rat(2) * parse_poly("x");
    RationalPoly expect_b =
        binom_poly(2).compose_affine(Rat(3), Rat(0)) - Rat(3) * parse_poly("x");
    CHECK(ha == expect_a);
    CHECK(hb == expect_b);
    CHECK(ha + hb == binom_poly(2));

    CHECK_THROWS_AS(bezout_split(parse_poly("x"), 4, 6), std::invalid_argument);
    CHECK_THROWS_AS(bezout_split(parse_poly("1/2*x"), 2, 3), std::invalid_argument);
}

TEST_CASE("bezout_split: randomized postconditions with grid brute force") {
    Rng64 rng(314159, 2);
    const std::pair<long, long> moduli[6] = {{2, 3}, {3, 4}, {5, 8}, {7, 9}, {1, 5}, {4, 9}};
    for (int it = 0; it < 300; ++it) {
        auto [a, b] = moduli[it % 6];
        int deg = 1 + (int)rng.below(5);
        RationalPoly gamma = rand_integral_combo(rng, deg, 1, 30);
        auto [ga, gb] = bezout_split(gamma, a, b);
        CHECK(ga + gb == gamma);  // exact sum
        CHECK(is_integral(ga, Rat(1, a)));
        CHECK(is_integral(gb, Rat(1, b)));
        // Brute-force grid: gamma_a on j/a for j = 0..(k+2)*b, and gamma_b on j/b.
        int k = std::max(0, gamma.degree());
        for (int j = 0; j <= (k + 2) * (int)b; ++j) {
            Rat ja(j, a), jb(j, b);
            ja.canonicalize();
            jb.canonicalize();
            CHECK(ga.eval(ja).get_den() == 1);
            CHECK(gb.eval(jb).get_den() == 1);
        }
    }
}

TEST_CASE("second Bezout clause: both scales imply product scale") {
    Rng64 rng(271828, 4);
    const std::pair<long, long> moduli[4] = {{2, 3}, {3, 5}, {4, 9}, {5, 8}};
    for (int it = 0; it < 1000; ++it) {
        auto [a, b] = moduli[it % 4];
        RationalPoly p = rand_integral_combo(rng, 1 + (int)rng.below(4), a * b, 25);
        REQUIRE(is_integral(p, Rat(1, a)));
        REQUIRE(is_integral(p, Rat(1, b)));
        CHECK(is_integral(p, Rat(1, a * b)));
    }
}

TEST_CASE("crt_align: postconditions and errors") {
    // Spec-style pair {(2, C(t,2)), (3, t)}.
    std::vector<std::pair<Int, RationalPoly>> parts = {{Int(2), binom_poly(2)},
                                                       {Int(3), parse_poly("x")}};
    RationalPoly g = crt_align(parts);
    CHECK(is_integral(g, Rat(1)));
    CHECK(is_integral(binom_poly(2) - g, Rat(1, 2)));
    CHECK(is_integral(parse_poly("x") - g, Rat(1, 3)));

    Rng64 rng(777, 5);
    const long primes[4] = {2, 3, 5, 7};
    for (int it = 0; it < 200; ++it) {
        int np = 2 + (int)rng.below(3);
        std::vector<std::pair<Int, RationalPoly>> ps;
        for (int i = 0; i < np; ++i)
            ps.push_back({Int(primes[i]), rand_integral_combo(rng, 1 + (int)rng.below(4), 1, 20)});
        RationalPoly gamma = crt_align(ps);
        CHECK(is_integral(gamma, Rat(1)));
        for (auto& [p, gp] : ps) CHECK(is_integral(gp - gamma, Rat(1, p)));
    }

    CHECK_THROWS_AS(crt_align({{Int(2), parse_poly("x")}, {Int(2), parse_poly("x^2")}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(crt_align({{Int(2), parse_poly("1/3*x")}}), std::invalid_argument);
    CHECK_THROWS_AS(crt_align({}), std::invalid_argument);
}

TEST_CASE("interval_comparable: worked examples") {
    RatInterval i0{Rat(5), Rat(10)};  // [0,10]
    CHECK(interval_comparable(i0, i0, Rat(1)));
    RatInterval a{Rat(1, 2), Rat(1)}, b{Rat(201, 2), Rat(1)};  // [0,1], [100,101]
    CHECK_FALSE(interval_comparable(a, b, Rat(2)));
    RatInterval c{Rat(25, 2), Rat(15)};  // [5,20]
    CHECK(interval_comparable(i0, c, Rat(2)));
    CHECK_FALSE(interval_comparable(i0, c, Rat(4, 3)));
}

TEST_CASE("sup_abs_leq: exact critical-point analysis") {
    double sup = 0;
    // C(t,2) on [0,10]: sup = 45 at t=10 (interior critical point at 1/2).
    CHECK(sup_abs_leq(binom_poly(2), Rat(0), Rat(10), Rat(45), 4096, &sup));
    CHECK(sup == doctest::Approx(45.0));
    CHECK_FALSE(sup_abs_leq(binom_poly(2), Rat(0), Rat(10), Rat(44999, 1000), 4096, &sup));

    // (t-1)(t-3) on [0,4]: endpoint sup 3, interior dip -1.
    RationalPoly p = parse_poly("3 - 4*x + x^2");
    CHECK(sup_abs_leq(p, Rat(0), Rat(4), Rat(3), 4096, &sup));
    CHECK_FALSE(sup_abs_leq(p, Rat(0), Rat(4), Rat(299, 100), 4096, &sup));

    // Interior max exactly at bisection midpoint: 5 - (t-2)^2 on [0,4].
    RationalPoly q = parse_poly("1 + 4*x - x^2");
    CHECK(sup_abs_leq(q, Rat(0), Rat(4), Rat(5), 4096, &sup));
    CHECK(sup == doctest::Approx(5.0));
    CHECK_FALSE(sup_abs_leq(q, Rat(0), Rat(4), Rat(4999, 1000), 4096, &sup));

    // Repeated roots of the derivative: (t-1)^3 + 2 on [0,3].
    RationalPoly r = parse_poly("1 + 3*x - 3*x^2 + x^3");
    CHECK(sup_abs_leq(r, Rat(0), Rat(3), Rat(10), 4096, &sup));
    CHECK(sup == doctest::Approx(10.0));
    CHECK_FALSE(sup_abs_leq(r, Rat(0), Rat(3), Rat(9), 4096, &sup));

    // Irrational critical points: t^4 - 5t^2 + 4 on [-3,3], sup 40 at ends,
    // interior extrema at +-sqrt(5/2) with value -9/4.
    RationalPoly s = parse_poly("4 - 5*x^2 + x^4");
    CHECK(sup_abs_leq(s, Rat(-3), Rat(3), Rat(40), 4096, &sup));
    CHECK_FALSE(sup_abs_leq(s, Rat(-3), Rat(3), Rat(39), 4096, &sup));
    CHECK(sup_abs_leq(s, Rat(-2), Rat(2), Rat(4), 4096, &sup));  // interior |min| = 9/4 < 4
    CHECK_FALSE(sup_abs_leq(s, Rat(-2), Rat(2), Rat(2), 4096, &sup));
}

TEST_CASE("compare_phases: worked examples") {
    RatInterval i10{Rat(5), Rat(10)}, i100{Rat(50), Rat(100)};
    RationalPoly base = parse_poly("1/3 + 2*x - 1/7*x^2");

    auto refl = compare_phases({i10, base}, {i10, base}, Rat(1), 1.0);
    REQUIRE(refl.has_value());
    CHECK(refl->eps.is_zero());
    CHECK(refl->gamma.is_zero());

    auto shift = compare_phases({i10, base + binom_poly(2)}, {i10, base}, Rat(1), 1.0);
    REQUIRE(shift.has_value());
    CHECK(shift->eps.is_zero());
    CHECK(shift->gamma == binom_poly(2));

    auto lin = compare_phases({i100, base + parse_poly("10*x")}, {i100, base}, Rat(1), 1.0);
    REQUIRE(lin.has_value());
    CHECK(lin->eps.is_zero());
    CHECK(lin->gamma == parse_poly("10*x"));

    // 0.4 t^2 cannot be absorbed: rejected at C=1 on [0,100].
    auto rej = compare_phases({i100, base + parse_poly("2/5*x^2")}, {i100, base}, Rat(1), 1.0);
    CHECK_FALSE(rej.has_value());

    // Far-apart intervals: rejected on comparability alone.
    RatInterval far{Rat(1000), Rat(10)};
    CHECK_FALSE(compare_phases({i10, base}, {far, base}, Rat(1), 1.0).has_value());
}

TEST_CASE("compare_phases: equivalence and dilation properties") {
    Rng64 rng(161803, 6);

    SUBCASE("symmetry on shared intervals") {
        for (int it = 0; it < 100; ++it) {
            Rat c = Rat((long)rng.below(21)) - 10;
            RatInterval I{c, Rat(8 + (long)rng.below(5))};
            RationalPoly p1 = rand_poly(rng, 4, 20, 9);
            RationalPoly p2 = rand_poly(rng, 4, 20, 9);
            auto r12 = compare_phases({I, p1}, {I, p2}, Rat(1), 3.0);
            auto r21 = compare_phases({I, p2}, {I, p1}, Rat(1), 3.0);
            CHECK(r12.has_value() == r21.has_value());
            if (r12 && r21) {
                CHECK(r12->eps + r21->eps == RationalPoly());
                CHECK(r12->gamma + r21->gamma == RationalPoly());
            }
        }
    }

    SUBCASE("transitivity with summed bounds on engineered triples") {
        for (int it = 0; it < 50; ++it) {
            Rat c = Rat((long)rng.below(13)) - 6;
            RatInterval I{c, Rat(10)};
            RationalPoly p1 = rand_poly(rng, 3, 10, 7);
            // Smooth parts with binomial coefficients below 1/8 so that the
            // rounding in all three comparisons acts identically.
            auto small = [&](int deg) {
                std::vector<Rat> sc((size_t)deg + 1);
                for (auto& x : sc) {
                    x = Rat((long)rng.below(17) - 8, 65);  // |x| <= 8/65
                    x.canonicalize();
                }
                return from_binomial_basis(sc, Rat(1), Rat(round_half_toward_zero(c)));
            };
            RationalPoly p2 = p1 - rand_integral_combo(rng, 2, 1, 5) - small(2);
            RationalPoly p3 = p2 - rand_integral_combo(rng, 2, 1, 5) - small(2);
            auto r12 = compare_phases({I, p1}, {I, p2}, Rat(1), 3.0);
            auto r23 = compare_phases({I, p2}, {I, p3}, Rat(1), 3.0);
            REQUIRE(r12.has_value());
            REQUIRE(r23.has_value());
            auto r13 = compare_phases({I, p1}, {I, p3}, Rat(1), 6.0);
            REQUIRE(r13.has_value());
            CHECK(r13->eps == r12->eps + r23->eps);
            CHECK(r13->gamma == r12->gamma + r23->gamma);
        }
    }

    SUBCASE("dilation invariance for lambda in {2, 1/2, 3}") {
        const Rat lambdas[3] = {Rat(2), Rat(1, 2), Rat(3)};
        for (int it = 0; it < 30; ++it) {
            Rat c = Rat(6 * ((long)rng.below(7) - 3));  // center in 6Z
            RatInterval I{c, Rat(12)};
            // P1 - P2 = integer combo of (6t)^j plus a small constant.
            RationalPoly diff = RationalPoly::constant(Rat((long)rng.below(9) - 4, 23));
            long sixj = 1;
            for (int j = 1; j <= 3; ++j) {
                sixj *= 6;
                long aj = (long)rng.below(7) - 3;
                if (aj != 0) diff = diff + RationalPoly::monomial(Rat(aj * sixj), j);
            }
            RationalPoly p2 = rand_poly(rng, 2, 8, 5);
            RationalPoly p1 = p2 + diff;
            auto base = compare_phases({I, p1}, {I, p2}, Rat(1), 1.0);
            REQUIRE(base.has_value());
            for (const Rat& lam : lambdas) {
                RatInterval Il{lam * I.mid, lam * I.len};
                LocalPhase q1{Il, p1.compose_affine(Rat(1) / lam, Rat(0))};
                LocalPhase q2{Il, p2.compose_affine(Rat(1) / lam, Rat(0))};
                auto dil = compare_phases(q1, q2, lam, 1.0);
                CHECK(dil.has_value());
            }
        }
    }
}
