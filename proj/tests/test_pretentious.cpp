#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ulab/characters.hpp"
#include "ulab/common.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/pretentious.hpp"

using namespace ulab;

namespace {

cplx minus_one(long long) { return {-1.0, 0.0}; }
cplx plus_one(long long) { return {1.0, 0.0}; }

// Family member g(p) = chi(p) p^{it} as a prime-value callback.
std::function<cplx(long long)> family_member(const DirichletCharacter& chi, double t) {
    return [chi, t](long long p) {
        double a = t * std::log((double)p);
        return chi(p) * cplx(std::cos(a), std::sin(a));
    };
}

// Random 1-bounded prime-value map on the primes up to X.
std::map<long long, cplx> random_prime_values(long long X, Rng64& rng, bool unimodular) {
    std::map<long long, cplx> m;
    for (long long p : primes_up_to(X)) {
        double r = unimodular ? 1.0 : rng.unit();
        m[p] = r * e2pi(rng.unit());
    }
    return m;
}

std::function<cplx(long long)> lookup(const std::map<long long, cplx>& m) {
    return [&m](long long p) { return m.at(p); };
}

}  // namespace

TEST_CASE("pretentious_distance: lambda vs 1, direct small sums") {
    // primes <= 10 are 2,3,5,7 and every term is (1-(-1))/p = 2/p
    double want10 = 2.0 * (1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7);
    double d10 = pretentious_distance(minus_one, plus_one, 10);
    CHECK(d10 * d10 == doctest::Approx(want10).epsilon(1e-12));

    double d2 = pretentious_distance(minus_one, plus_one, 2);
    CHECK(d2 * d2 == doctest::Approx(1.0).epsilon(1e-15));

    double d6 = pretentious_distance(minus_one, plus_one, 6);
    CHECK(d6 * d6 == doctest::Approx(2.0 * (1.0 / 2 + 1.0 / 3 + 1.0 / 5)).epsilon(1e-12));
}

TEST_CASE("pretentious_distance: f = g vanishes") {
    // exact +-1 values give exactly zero
    CHECK(pretentious_distance(minus_one, minus_one, 1000) == 0.0);

    // unimodular values: |f(p)|^2 = 1 only to rounding, so allow sqrt-of-eps
    Rng64 rng(7);
    auto m = random_prime_values(500, rng, true);
    CHECK(pretentious_distance(lookup(m), lookup(m), 500) < 1e-7);
}

TEST_CASE("pretentious_distance: lambda vs principal-mod-1 twist of lambda") {
    auto chi1 = characters_mod(1)[0];
    auto g = [&chi1](long long p) { return cplx(-1.0, 0.0) * chi1(p); };
    CHECK(pretentious_distance(minus_one, g, 997) == 0.0);
}

TEST_CASE("pretentious_distance: triangle inequality on random triples") {
    Rng64 rng(42);
    for (int it = 0; it < 100; ++it) {
        long long X = 50 + (long long)rng.below(250);
        auto mf = random_prime_values(X, rng, it % 2 == 0);
        auto mg = random_prime_values(X, rng, it % 3 == 0);
        auto mh = random_prime_values(X, rng, false);
        double dfh = pretentious_distance(lookup(mf), lookup(mh), X);
        double dfg = pretentious_distance(lookup(mf), lookup(mg), X);
        double dgh = pretentious_distance(lookup(mg), lookup(mh), X);
        CHECK(dfh <= dfg + dgh + 1e-9);
    }
}

TEST_CASE("pretentious_distance: nondecreasing in X") {
    double prev = -1.0;
    for (long long X : {2, 10, 100, 1000, 10000}) {
        double d = pretentious_distance(minus_one, plus_one, X);
        CHECK(d > prev);  // every decade adds primes, each contributing 2/p
        prev = d;
    }

    Rng64 rng(9);
    auto mf = random_prime_values(500, rng, false);
    auto mg = random_prime_values(500, rng, false);
    CHECK(pretentious_distance(lookup(mf), lookup(mg), 500) >=
          pretentious_distance(lookup(mf), lookup(mg), 50) - 1e-12);
}

TEST_CASE("pretentious_distance: X < 2 throws") {
    CHECK_THROWS_AS(pretentious_distance(minus_one, plus_one, 1), std::invalid_argument);
    CHECK_THROWS_AS(pretentious_distance(minus_one, plus_one, 0), std::invalid_argument);
    CHECK_THROWS_AS(pretentious_distance(minus_one, plus_one, -5), std::invalid_argument);
}

TEST_CASE("m_score: model in the search family is found with value ~0") {
    // f(n) = n^{1.5 i}; (q,index,t) = (1,0,1.5) is on the grid, distance 0
    auto ms = m_score(MultSpec::twist(1, 0, 1.5), 200, 3, 0.25, 5.0);
    CHECK(ms.value < 1e-7);
    CHECK(ms.argmin_q == 1);
    CHECK(ms.argmin_index == 0);
    CHECK(std::abs(ms.argmin_t - 1.5) < 1e-6);
}

TEST_CASE("m_score: nonprincipal twist is pinned at its model") {
    // f = chi_{3,1}(n) n^{0.5 i}.  At the model point every coprime prime
    // contributes 0 and p = 3 contributes (1 - 0)/3, so min D^2 = 1/3.
    auto ms = m_score(MultSpec::twist(3, 1, 0.5), 500, 5, 0.25, 3.0);
    CHECK(ms.value * ms.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(ms.argmin_q == 3);
    CHECK(ms.argmin_index == 1);
    CHECK(std::abs(ms.argmin_t - 0.5) < 1e-5);
}

TEST_CASE("m_score: lower-bounds every explicitly evaluated family member") {
    auto ms = m_score(MultSpec::liouville(), 1000, 4, 0.5, 8.0);
    for (long long q = 1; q <= 4; ++q) {
        auto cs = characters_mod(q);
        for (const auto& chi : cs)
            for (double t : {0.0, 0.5, -2.0, 7.5, -8.0}) {
                double d = pretentious_distance(minus_one, family_member(chi, t), 1000);
                CHECK(ms.value <= d + 1e-9);
            }
    }
    CHECK(ms.value > 0.0);
}

TEST_CASE("m_score: mu and lambda agree at primes; growth in X") {
    auto a = m_score(MultSpec::moebius(), 1000, 3, 0.5);
    auto b = m_score(MultSpec::liouville(), 1000, 3, 0.5);
    CHECK(a.value == b.value);  // identical prime values give identical scans
    CHECK(a.argmin_t == b.argmin_t);
    CHECK(std::abs(a.value - b.value) <= 0.5);

    // non-pretentious growth trend at fixed search window
    auto v3 = m_score(MultSpec::liouville(), 1000, 1, 0.25, 50.0);
    auto v5 = m_score(MultSpec::liouville(), 100000, 1, 0.25, 50.0);
    CHECK(v5.value > v3.value);
}

TEST_CASE("m_score: custom prime map matches its explicit counterpart") {
    // all-(-1) custom map is the liouville scan bit for bit
    auto all_minus = MultSpec::custom({}, cplx(-1.0, 0.0));
    auto a = m_score(all_minus, 300, 2, 0.5, 4.0);
    auto b = m_score(MultSpec::liouville(), 300, 2, 0.5, 4.0);
    CHECK(a.value == b.value);
    CHECK(a.argmin_t == b.argmin_t);
    CHECK(a.argmin_q == b.argmin_q);

    // flipping f(2) to +1 changes the score and stays a valid lower bound
    auto flipped = MultSpec::custom({{2, cplx(1.0, 0.0)}}, cplx(-1.0, 0.0));
    auto c = m_score(flipped, 300, 2, 0.5, 4.0);
    CHECK(c.value != a.value);
    auto fv = [](long long p) { return p == 2 ? cplx(1.0, 0.0) : cplx(-1.0, 0.0); };
    auto chi0 = characters_mod(1)[0];
    CHECK(c.value <= pretentious_distance(fv, family_member(chi0, 0.0), 300) + 1e-9);
}

TEST_CASE("m_score: deterministic rerun") {
    auto a = m_score(MultSpec::liouville(), 2000, 5, 0.5, 20.0);
    auto b = m_score(MultSpec::liouville(), 2000, 5, 0.5, 20.0);
    CHECK(a.value == b.value);
    CHECK(a.argmin_t == b.argmin_t);
    CHECK(a.argmin_q == b.argmin_q);
    CHECK(a.argmin_index == b.argmin_index);
}

TEST_CASE("m_score: argument and budget errors") {
    auto lam = MultSpec::liouville();
    CHECK_THROWS_AS(m_score(lam, 1, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(m_score(lam, 100, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(m_score(lam, 100, 3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m_score(lam, 100, 3, -0.5), std::invalid_argument);

    CHECK_THROWS_AS(m_score(MultSpec::von_mangoldt(), 100, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(m_score(MultSpec::twist(5, 7, 0.0), 100, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(m_score(MultSpec::custom({}, cplx(2.0, 0.0)), 100, 3, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(m_score(MultSpec::custom({{3, cplx(0.0, 1.5)}}, cplx(1.0, 0.0)), 100, 3, 0.5),
                    std::invalid_argument);

    // grid points x pi(X) past the budget
    CHECK_THROWS_AS(m_score(lam, 10000, 1, 1e-9), std::runtime_error);
    CHECK_THROWS_AS(m_score(lam, 10000, 1, 0.5, -1.0, 1e3), std::runtime_error);
}
