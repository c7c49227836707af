#include "ulab/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ulab/characters.hpp"
#include "ulab/common.hpp"

namespace ulab {

namespace {

// floor(X^eps) with a nudge so exact powers don't round down
long long outer_bound(long long X, double eps) {
    return (long long)std::floor(std::pow((double)X, eps) + 1e-9);
}

// root-of-unity digit of v in mu_ell, or throw
int unity_digit(cplx v, long long ell) {
    if (std::abs(std::abs(v) - 1.0) > 1e-6)
        throw std::invalid_argument("value_patterns: table value is not a root of unity");
    double turns = std::arg(v) / kTwoPi;
    long long j = std::llround(turns * (double)ell) % ell;
    if (j < 0) j += ell;
    if (std::abs(v - e2pi((double)j / (double)ell)) > 1e-6)
        throw std::invalid_argument("value_patterns: table value is not an ell-th root");
    return (int)j;
}

double table_real(const FunctionTable& t, long long n) {
    return t.store == FunctionTable::Storage::c128 ? t.at(n).real() : t.real_at(n);
}

}  // namespace

PatternCount value_patterns(const FunctionTable& g, int k, long long N, long long ell) {
    if (k < 0) throw std::invalid_argument("value_patterns: k >= 0 required");
    if (ell < 2) throw std::invalid_argument("value_patterns: ell >= 2 required");
    if (N < std::max<long long>(k, 1))
        throw std::invalid_argument("value_patterns: N >= max(k, 1) required");
    PatternCount out;
    out.k = k;
    out.N = N;
    if (k == 0) {  // the empty pattern occurs at n = 0
        out.count = 1;
        out.first_occurrence[0] = 0;
        return out;
    }
    uint64_t span = 1;  // ell^k, overflow-checked
    for (int j = 0; j < k; ++j) {
        if (span > (uint64_t)1 << 62 || span * (uint64_t)ell / (uint64_t)ell != span)
            throw std::invalid_argument("value_patterns: ell^k exceeds the key range");
        span *= (uint64_t)ell;
    }
    if (!g.covers(1, N + k - 1))
        throw std::invalid_argument("value_patterns: table must cover [1, N+k-1]");

    const uint64_t top = span / (uint64_t)ell;  // ell^(k-1)
    uint64_t key = 0, pw = 1;
    for (int j = 0; j < k; ++j) {
        key += (uint64_t)unity_digit(g.at(1 + j), ell) * pw;
        pw *= (uint64_t)ell;
    }
    out.first_occurrence.emplace(key, 0);
    for (long long n = 1; n < N; ++n) {
        key = key / (uint64_t)ell + (uint64_t)unity_digit(g.at(n + k), ell) * top;
        out.first_occurrence.emplace(key, n);
    }
    out.count = (long long)out.first_occurrence.size();
    return out;
}

PatternCount sign_patterns(const FunctionTable& lam, int k, long long N) {
    if (k < 1) throw std::invalid_argument("sign_patterns: k >= 1 required");
    return value_patterns(lam, k, N, 2);
}

ZPoly parse_zpoly(const std::string& text, int r) {
    if (r < 1 || r > 9) throw std::invalid_argument("parse_zpoly: 1 <= r <= 9 required");
    std::map<std::vector<int>, long long> acc;
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace((unsigned char)text[i])) ++i;
    };
    auto fail = [&](const char* why) {
        throw std::invalid_argument("parse_zpoly: " + std::string(why) + " at position " +
                                    std::to_string(i));
    };
    auto read_int = [&]() -> long long {
        size_t j = i;
        long long v = 0;
        while (j < text.size() && std::isdigit((unsigned char)text[j])) {
            v = v * 10 + (text[j] - '0');
            if (v > (long long)1 << 60) fail("integer too large");
            ++j;
        }
        if (j == i) fail("expected an integer");
        i = j;
        return v;
    };
    skip_ws();
    bool first = true;
    while (i < text.size()) {
        long long sign = 1;
        skip_ws();
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
        } else if (!first) {
            fail("expected '+' or '-' between terms");
        }
        skip_ws();
        if (i >= text.size()) fail("dangling sign");
        long long coef = sign;
        std::vector<int> exps((size_t)r, 0);
        bool any = false;
        while (i < text.size()) {
            skip_ws();
            if (i < text.size() && std::isdigit((unsigned char)text[i])) {
                coef *= read_int();
                any = true;
            } else if (i < text.size() && text[i] == 'm') {
                ++i;
                int var = 1;
                if (i < text.size() && std::isdigit((unsigned char)text[i]))
                    var = (int)read_int();
                if (var < 1 || var > r) fail("variable index out of range");
                int e = 1;
                skip_ws();
                if (i < text.size() && text[i] == '^') {
                    ++i;
                    skip_ws();
                    e = (int)read_int();
                }
                exps[(size_t)var - 1] += e;
                any = true;
            } else {
                fail("expected a coefficient or variable");
            }
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                continue;
            }
            // juxtaposition continues a term only before a variable
            if (i < text.size() && text[i] == 'm') continue;
            break;
        }
        if (!any) fail("empty term");
        acc[exps] += coef;
        first = false;
        skip_ws();
    }
    if (first) throw std::invalid_argument("parse_zpoly: empty polynomial");
    ZPoly p;
    p.r = r;
    for (const auto& [e, c] : acc)
        if (c != 0) p.terms.emplace_back(c, e);
    // highest total degree first, then lexicographic exponents, for printing
    std::sort(p.terms.begin(), p.terms.end(), [](const auto& a, const auto& b) {
        int da = 0, db = 0;
        for (int e : a.second) da += e;
        for (int e : b.second) db += e;
        if (da != db) return da > db;
        return a.second > b.second;
    });
    return p;
}

std::string format_zpoly(const ZPoly& p) {
    if (p.terms.empty()) return "0";
    std::string out;
    for (size_t t = 0; t < p.terms.size(); ++t) {
        long long c = p.terms[t].first;
        const auto& e = p.terms[t].second;
        out += t == 0 ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
        long long ac = c < 0 ? -c : c;
        bool hasvar = std::any_of(e.begin(), e.end(), [](int x) { return x > 0; });
        bool sep = false;
        if (ac != 1 || !hasvar) {
            out += std::to_string(ac);
            sep = true;
        }
        for (int v = 0; v < p.r; ++v) {
            if (e[(size_t)v] == 0) continue;
            if (sep) out += "*";
            out += p.r == 1 ? "m" : "m" + std::to_string(v + 1);
            if (e[(size_t)v] > 1) out += "^" + std::to_string(e[(size_t)v]);
            sep = true;
        }
    }
    return out;
}

long long zpoly_eval(const ZPoly& p, const std::vector<long long>& m) {
    if ((int)m.size() != p.r) throw std::invalid_argument("zpoly_eval: wrong arity");
    __int128 total = 0;
    for (const auto& [c, e] : p.terms) {
        __int128 term = c;
        for (int v = 0; v < p.r; ++v)
            for (int j = 0; j < e[(size_t)v]; ++j) {
                term *= m[(size_t)v];
                if (term > ((__int128)1 << 100) || term < -((__int128)1 << 100))
                    throw std::overflow_error("zpoly_eval: term overflow");
            }
        total += term;
    }
    if (total > ((__int128)1 << 62) || total < -((__int128)1 << 62))
        throw std::overflow_error("zpoly_eval: value overflow");
    return (long long)total;
}

int zpoly_total_degree(const ZPoly& p) {
    int d = 0;
    for (const auto& [c, e] : p.terms) {
        (void)c;
        int t = 0;
        for (int x : e) t += x;
        d = std::max(d, t);
    }
    return d;
}

namespace {

// shared nested-average engine; chowla_average skips the eps-degree bound
CorrelationResult nested_average(const std::vector<ZPoly>& polys,
                                 const std::vector<WeightKind>& weights,
                                 const FunctionTable* lam, const FunctionTable* vm,
                                 long long X, double eps, bool log_average,
                                 bool enforce_eps_degree) {
    const size_t k = polys.size();
    if (k == 0) throw std::invalid_argument("correlation average: at least one polynomial");
    if (weights.size() != k)
        throw std::invalid_argument("correlation average: one weight per polynomial");
    if (X < 1) throw std::invalid_argument("correlation average: X >= 1 required");
    const int r = polys[0].r;
    for (const auto& p : polys)
        if (p.r != r) throw std::invalid_argument("correlation average: mixed arities");

    // degenerate family: some difference P_i - P_j constant
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) {
            std::map<std::vector<int>, long long> diff;
            for (const auto& [c, e] : polys[i].terms) diff[e] += c;
            for (const auto& [c, e] : polys[j].terms) diff[e] -= c;
            bool nonconst = false;
            for (const auto& [e, c] : diff)
                if (c != 0 && std::any_of(e.begin(), e.end(), [](int x) { return x > 0; }))
                    nonconst = true;
            if (!nonconst)
                throw std::invalid_argument("correlation average: P_i - P_j must be nonconstant");
        }

    int deg = 1;
    for (const auto& p : polys) deg = std::max(deg, zpoly_total_degree(p));
    if (enforce_eps_degree && !(eps < 1.0 / deg))
        throw std::invalid_argument("correlation average: eps < 1/deg required");

    // pure-von-Mangoldt families are allowed (Chebyshev-style sanity sums)
    // even though the bounded-decay regime pairs them with a lambda factor
    bool any_vm = false, any_lam = false;
    for (WeightKind w : weights) (w == WeightKind::von_mangoldt ? any_vm : any_lam) = true;
    if (any_lam && (!lam || !lam->covers(1, X)))
        throw std::invalid_argument("correlation average: lambda table must cover [1, X]");
    if (any_vm && (!vm || !vm->covers(1, X)))
        throw std::invalid_argument("correlation average: von Mangoldt table must cover [1, X]");

    const long long M = outer_bound(X, eps);
    if (M < 1) throw std::invalid_argument("correlation average: floor(X^eps) >= 1 required");
    double total_d = 1;
    for (int v = 0; v < r; ++v) total_d *= (double)M;
    if (total_d > 4e9) throw std::invalid_argument("correlation average: outer grid too large");
    const long long total = (long long)total_d;

    // per-outer |inner mean| and out-of-table lookup counts, combined in
    // index order afterwards so threading never changes the result
    std::vector<double> vals((size_t)total);
    std::vector<long long> miss((size_t)total, 0);
    double log_norm = 1.0;
    if (log_average) {
        Kahan h;
        for (long long n = 1; n <= X; ++n) h.add(1.0 / (double)n);
        log_norm = h.sum();
    }
#pragma omp parallel for schedule(dynamic)
    for (long long o = 0; o < total; ++o) {
        std::vector<long long> m((size_t)r);
        long long rest = o;
        for (int v = 0; v < r; ++v) {
            m[(size_t)v] = rest % M + 1;
            rest /= M;
        }
        std::vector<long long> shift(k);
        for (size_t i = 0; i < k; ++i) shift[i] = zpoly_eval(polys[i], m);
        Kahan inner;
        long long outside = 0;
        for (long long n = 1; n <= X; ++n) {
            double prod = 1.0;
            for (size_t i = 0; i < k; ++i) {
                const FunctionTable* t = weights[i] == WeightKind::lambda ? lam : vm;
                long long idx = n + shift[i];
                if (idx < t->start || idx > t->end) ++outside;
                prod *= table_real(*t, idx);
            }
            inner.add(log_average ? prod / (double)n : prod);
        }
        vals[(size_t)o] = std::abs(inner.sum() / (log_average ? log_norm : (double)X));
        miss[(size_t)o] = outside;
    }
    Kahan outer;
    long long outside_total = 0;
    for (long long o = 0; o < total; ++o) {
        outer.add(vals[(size_t)o]);
        outside_total += miss[(size_t)o];
    }

    CorrelationResult res;
    res.value = outer.sum() / (double)total;
    res.X = X;
    res.epsilon = eps;
    res.weights = weights;
    for (const auto& p : polys) res.polys.push_back(format_zpoly(p));
    res.boundary_loss = (double)outside_total / ((double)total * (double)X * (double)k);
    return res;
}

}  // namespace

CorrelationResult poly_average(const std::vector<ZPoly>& polys,
                               const std::vector<WeightKind>& weights,
                               const FunctionTable* lam, const FunctionTable* vm, long long X,
                               double epsilon, bool log_average) {
    return nested_average(polys, weights, lam, vm, X, epsilon, log_average, true);
}

CorrelationResult chowla_average(const FunctionTable& lam, const std::vector<long long>& shifts,
                                 long long X, double epsilon, bool log_average) {
    if (shifts.empty()) throw std::invalid_argument("chowla_average: shifts required");
    for (size_t i = 0; i < shifts.size(); ++i) {
        if (shifts[i] < 0)
            throw std::invalid_argument("chowla_average: shifts must be nonnegative");
        for (size_t j = i + 1; j < shifts.size(); ++j)
            if (shifts[i] == shifts[j])
                throw std::invalid_argument("chowla_average: shifts must be distinct");
    }
    std::vector<ZPoly> polys;
    for (long long a : shifts) {
        ZPoly p;
        p.r = 1;
        if (a != 0) p.terms.emplace_back(a, std::vector<int>{1});
        polys.push_back(std::move(p));
    }
    std::vector<WeightKind> w(shifts.size(), WeightKind::lambda);
    auto res = nested_average(polys, w, &lam, nullptr, X, epsilon, log_average, false);
    res.shifts = shifts;
    return res;
}

double von_mangoldt_at(long long n) {
    if (n < 2) return 0.0;
    long long m = n;
    for (long long p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            return m == 1 ? std::log((double)p) : 0.0;
        }
    return std::log((double)m);  // n is prime
}

double w_trick_weight(long long W, long long b, long long d) {
    if (W < 1 || b < 1 || b > W)
        throw std::invalid_argument("w_trick_weight: 1 <= b <= W required");
    long long n = W * d + b;
    if (n < 1) throw std::invalid_argument("w_trick_weight: W d + b >= 1 required");
    return (double)euler_phi(W) / (double)W * von_mangoldt_at(n);
}

}  // namespace ulab
