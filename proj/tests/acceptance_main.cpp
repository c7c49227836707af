// End-to-end acceptance checks: one PASS/FAIL line per criterion, nonzero
// exit if any fail.  Budgets are wall-clock seconds on one core.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ulab/common.hpp"
#include "ulab/experiments.hpp"
#include "ulab/gowers.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/patterns.hpp"
#include "ulab/phase_opt.hpp"

using namespace ulab;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, bool ok, const std::string& what, double secs) {
    std::printf("%s: [%d] %s (%.1fs)\n", ok ? "PASS" : "FAIL", idx, what.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

cplx rand_disc(Rng64& rng) {
    cplx z(2 * rng.unit() - 1, 2 * rng.unit() - 1);
    double a = std::abs(z);
    return a > 1 ? z / a : z;
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double dist_to_int(double x) { return std::abs(x - std::round(x)); }

// Smallest q <= Q with ||q alpha|| <= delta via continued-fraction
// convergents: denominators q_i are the two-sided best approximations, so
// the first convergent meeting the bound is the global minimizer.
std::optional<long long> cf_smallest_q(double alpha, double delta, long long Q) {
    long long q_prev = 0, q_cur = 1;
    double x = alpha - std::floor(alpha);
    for (int it = 0; it < 64; ++it) {
        if (q_cur > Q) return std::nullopt;
        if (dist_to_int((double)q_cur * alpha) <= delta) return q_cur;
        if (x < 1e-15) return std::nullopt;  // alpha is (numerically) rational from here on
        x = 1.0 / x;
        double ai = std::floor(x);
        x -= ai;
        if (ai > 4e18 / std::max<long long>(q_cur, 1)) return std::nullopt;
        long long q_next = (long long)ai * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = q_next;
    }
    return std::nullopt;
}

void criterion_1() {
    Timer t;
    const long long N = 1000000;
    FunctionTable lam = sieve_table(MultSpec::liouville(), 1, N + 4);
    bool ok = true;
    for (int k = 1; k <= 4; ++k) {
        PatternCount pc = sign_patterns(lam, k, N);
        ok = ok && pc.count == (1LL << k);
    }
    double s = t.secs();
    report(1, ok && s < 60, "Liouville sign patterns saturate 2^k for k = 1..4 at N = 10^6", s);
}

void criterion_2() {
    Timer t;
    SuiteOutcome o = run_suite("decay-u2", "");
    double s = t.secs();
    report(2, o.pass && s < 600,
           "stratified mean U^2 norm (H = ceil(X^0.4), 200 strata, seed 1) strictly decreases "
           "over X = 10^4, 10^5, 10^6",
           s);
}

void criterion_3() {
    Timer t;
    SuiteOutcome o = run_suite("decay-weak", "");
    double s = t.secs();
    report(3, o.pass && s < 1800,
           "stratified mean weak-U^3 correlation (H = 48, sigma = 0.02, 50 strata) strictly "
           "decreases over X = 10^4, 10^5, 10^6",
           s);
}

void criterion_4() {
    Timer t;
    Rng64 rng(2024, 40);
    bool ok = true;
    for (int rep = 0; rep < 200; ++rep) {
        const int k = 1 + (int)rng.below(2);
        const long long H = 4 + (long long)rng.below(29);  // support length H+1 <= 33
        std::vector<cplx> f(H + 1);
        for (auto& v : f) v = rand_disc(rng);
        const double direct = gowers_unnormalized(f, k);
        const double recur = gowers_recursive(f, k);
        ok = ok && rel_gap(direct, recur) <= 1e-9;
    }
    double s = t.secs();
    report(4, ok && s < 60,
           "direct and recursive Gowers norms agree to 1e-9 relative on 200 random 1-bounded "
           "inputs (H <= 32, k <= 2)",
           s);
}

void criterion_5() {
    Timer t;
    Rng64 rng(2024, 50);
    bool ok = true;
    for (int rep = 0; rep < 50; ++rep) {
        const int k = 1 + (int)rng.below(2);
        const long long H = 32;
        std::vector<cplx> f(H + 1), g(H + 1);
        std::vector<double> alpha(k + 1);
        for (auto& a : alpha) a = rng.unit();
        for (long long n = 0; n <= H; ++n) {
            f[n] = rand_disc(rng);
            double phase = 0, pw = 1;
            for (int j = 0; j <= k; ++j) {
                phase += alpha[j] * pw;
                pw *= (double)n;
            }
            g[n] = f[n] * e2pi(phase);
        }
        ok = ok && rel_gap(gowers_unnormalized(f, k), gowers_unnormalized(g, k)) <= 1e-9;
    }
    double s = t.secs();
    report(5, ok,
           "U^{k+1} norm is invariant to 1e-9 under modulation by degree-<=k polynomial phases "
           "(50 random cases, H = 32)",
           s);
}

void criteria_6_and_7() {
    Timer t;
    const std::vector<ResultRow> rows = algebra_verify(10000, 1000, 100, 1).rows;
    double s = t.secs();
    auto zero_failures = [&](size_t i) { return i < rows.size() && rows[i].cols[2].second == "0"; };
    const bool c6 = zero_failures(0) && zero_failures(1) && zero_failures(2) && zero_failures(3);
    const bool c7 = zero_failures(4) && zero_failures(5) && zero_failures(6);
    report(6, c6 && s < 120,
           "Bezout split, binomial round-trip, CRT alignment, and phase comparison pass 10^4 "
           "randomized exact-rational checks",
           s);
    report(7, c7,
           "exp(X * Y) = exp(X) exp(Y) holds exactly for 10^3 Heisenberg and 10^2 dim-4 BCH "
           "pairs; real cube powers match to 1e-12",
           s);
}

void criterion_8() {
    Timer t;
    SuiteOutcome o = run_suite("chowla-decay", "");
    double s = t.secs();
    report(8, o.pass && s < 300,
           "two-point Chowla short average (shifts 0,1, eps = 0.3) strictly decreases over "
           "X = 10^4, 10^5, 10^6",
           s);
}

void criterion_9() {
    Timer t;
    SuiteOutcome o = run_suite("pretentious-growth", "");
    double s = t.secs();
    report(9, o.pass,
           "twisted-character m-score (Q = 10, t_res = 2.0) is nondecreasing over X = 10^3, "
           "10^4, 10^5 and the four-prime distance identity holds to 1e-12",
           s);
}

void criterion_10() {
    Timer t;
    SuiteOutcome o = run_suite("nil-discorrelation", "");
    double s = t.secs();
    report(10, o.pass,
           "unimodular horizontal nilcharacter self-discorrelates to 1 within 1e-9 and the "
           "equidistribution defect shrinks from N = 10^3 to N = 10^5",
           s);
}

void criterion_11() {
    Timer t;
    bool ok = true;

    // re-verification + brute-force minimality on multi-coefficient points
    Rng64 rng(2024, 110);
    for (int rep = 0; rep < 100 && ok; ++rep) {
        const int k = 1 + (int)rng.below(3);
        const long long H = 8 + (long long)rng.below(193);
        const long long Q = 10 + (long long)rng.below(4991);
        PhasePoint pt{k, 0, std::vector<double>(k + 1)};
        for (int j = 1; j <= k; ++j) pt.alphas[j] = rng.unit();
        std::vector<double> c(k + 1);
        for (int j = 1; j <= k; ++j) c[j] = 0.5 + 2.5 * rng.unit();
        auto qualifies = [&](long long q) {
            for (int j = 1; j <= k; ++j)
                if (dist_to_int((double)q * pt.alphas[j]) > c[j] * std::pow((double)H, -j))
                    return false;
            return true;
        };
        auto res = weyl_rationalize(pt, H, Q, c);
        if (res) {
            ok = ok && res->q >= 1 && res->q <= Q && qualifies(res->q);
            for (long long q = 1; q < res->q; ++q) ok = ok && !qualifies(q);
            for (int j = 1; j <= k && ok; ++j) {
                ok = ok && res->numerators[j] == std::llround((double)res->q * pt.alphas[j]);
                ok = ok && std::abs(res->residuals[j] -
                                    dist_to_int((double)res->q * pt.alphas[j])) <= 1e-12;
            }
        } else {
            for (long long q = 1; q <= Q; ++q) ok = ok && !qualifies(q);
        }
    }

    // continued-fraction oracle on 100 random single frequencies
    Rng64 rng2(2024, 111);
    for (int rep = 0; rep < 100 && ok; ++rep) {
        const double alpha = rng2.unit();
        const long long H = 8 + (long long)rng2.below(993);
        const long long Q = 10 + (long long)rng2.below(19991);
        const double c1 = 0.5 + 3.5 * rng2.unit();
        PhasePoint pt{1, 0, {0.0, alpha}};
        auto res = weyl_rationalize(pt, H, Q, {0.0, c1});
        auto oracle = cf_smallest_q(alpha, c1 / (double)H, Q);
        ok = ok && res.has_value() == oracle.has_value() && (!res || res->q == *oracle);
    }

    double s = t.secs();
    report(11, ok,
           "weyl rationalization returns the smallest q <= Q with ||q alpha_j|| <= c_j H^-j "
           "(re-verified directly and against a continued-fraction oracle)",
           s);
}

}  // namespace

int main() {
    Timer total;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_and_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%d/11 criteria passed (%.1fs total)\n", 11 - failures, total.secs());
    return failures == 0 ? 0 : 1;
}
