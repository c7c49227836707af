#include "ulab/gowers.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ulab {

namespace {

// Shared h-tuple walk: visits every (h_1..h_d) whose y-window is nonempty,
// ascending in each coordinate (fixed order for determinism).
template <typename Leaf>
void walk_h(long long n, int d, std::vector<long long>& h, int i, long long sneg, long long spos,
            Leaf&& leaf) {
    if (i == d) {
        leaf(-sneg, n - 1 - spos);  // inclusive y range
        return;
    }
    long long lim = n - 1 - (spos - sneg);
    for (long long v = -lim; v <= lim; ++v) {
        h[(size_t)i] = v;
        walk_h(n, d, h, i + 1, sneg + std::min(v, 0LL), spos + std::max(v, 0LL), leaf);
    }
}

void corner_offsets(const std::vector<long long>& h, int d, std::vector<long long>& off) {
    for (int m = 0; m < (1 << d); ++m) {
        long long s = 0;
        for (int i = 0; i < d; ++i)
            if (m >> i & 1) s += h[(size_t)i];
        off[(size_t)m] = s;
    }
}

void check_budget(long long n, int d, double budget) {
    if (n < 1) throw std::invalid_argument("gowers: empty support");
    if (std::pow((double)n, d + 1) > budget)
        throw std::runtime_error("gowers: compute budget exceeded");
}

// Validates that the alternating sum is essentially real-nonnegative and
// returns its clamped real part.  `scale` is the accumulated term mass, the
// natural yardstick for floating-point noise.
double checked_real(double re, double im, double scale, const char* who) {
    double tol = 1e-9 * std::max(1.0, scale);
    if (std::abs(im) > tol)
        throw std::runtime_error(std::string(who) + ": sum has non-negligible imaginary part");
    if (re < 0) {
        if (re < -tol) throw std::runtime_error(std::string(who) + ": sum negative beyond tolerance");
        re = 0;
    }
    return re;
}

bool sign_valued(const std::vector<cplx>& f) {
    for (const cplx& v : f)
        if (v.imag() != 0 || (v.real() != 0 && v.real() != 1 && v.real() != -1)) return false;
    return true;
}

long long sign_pow_sum(const std::vector<int8_t>& f, int k) {
    int d = k + 1;
    long long n = (long long)f.size();
    long long total = 0;
    if (d == 2) {
        // U^2 hot path: four corner pointers over a contiguous y-window.
        const int8_t* p = f.data();
        for (long long h1 = -(n - 1); h1 <= n - 1; ++h1) {
            long long lim = n - 1 - std::llabs(h1);
            for (long long h2 = -lim; h2 <= lim; ++h2) {
                long long ylo = -std::min(0LL, h1) - std::min(0LL, h2);
                long long yhi = n - 1 - std::max(0LL, h1) - std::max(0LL, h2);
                const int8_t* a = p + ylo;
                const int8_t* b = a + h1;
                const int8_t* c = a + h2;
                const int8_t* e = b + h2;
                long long sum = 0;
                for (long long y = ylo; y <= yhi; ++y) sum += (long long)(a[y - ylo] * b[y - ylo]) * (c[y - ylo] * e[y - ylo]);
                total += sum;
            }
        }
        return total;
    }
    std::vector<long long> h((size_t)d), off((size_t)1 << d);
    walk_h(n, d, h, 0, 0, 0, [&](long long ylo, long long yhi) {
        if (ylo > yhi) return;
        corner_offsets(h, d, off);
        long long sum = 0;
        for (long long y = ylo; y <= yhi; ++y) {
            int prod = f[(size_t)(y + off[0])];
            for (int m = 1; m < (1 << d) && prod; ++m) prod *= f[(size_t)(y + off[(size_t)m])];
            sum += prod;
        }
        total += sum;
    });
    return total;
}

double complex_pow_sum(const std::vector<cplx>& f, int k, const char* who) {
    int d = k + 1;
    long long n = (long long)f.size();
    std::vector<long long> h((size_t)d), off((size_t)1 << d);
    KahanCplx acc;
    Kahan mass;
    walk_h(n, d, h, 0, 0, 0, [&](long long ylo, long long yhi) {
        if (ylo > yhi) return;
        corner_offsets(h, d, off);
        for (long long y = ylo; y <= yhi; ++y) {
            cplx p = f[(size_t)(y + off[0])];
            double ab = std::abs(p);
            for (int m = 1; m < (1 << d); ++m) {
                cplx v = f[(size_t)(y + off[(size_t)m])];
                ab *= std::abs(v);
                p *= __builtin_popcount((unsigned)m) % 2 ? std::conj(v) : v;
            }
            acc.add(p);
            mass.add(ab);
        }
    });
    cplx s = acc.sum();
    return checked_real(s.real(), s.imag(), mass.sum(), who);
}

// Pow-sum for the all-ones window of length n (denominator of the interval
// ratio): every term is 1, so only window lengths are counted.
double ones_pow_sum(long long n, int d) {
    std::vector<long long> h((size_t)d);
    double total = 0;
    walk_h(n, d, h, 0, 0, 0, [&](long long ylo, long long yhi) {
        if (ylo <= yhi) total += (double)(yhi - ylo + 1);
    });
    return total;
}

double pow_sum_of_table_window(const FunctionTable& f, long long x, long long n, int k,
                               const char* who) {
    if (f.store == FunctionTable::Storage::i8) {
        std::vector<int8_t> w((size_t)n);
        for (long long i = 0; i < n; ++i) w[(size_t)i] = f.sign_at(x + i);
        long long s = sign_pow_sum(w, k);
        if (s < 0) throw std::logic_error(std::string(who) + ": exact sum negative");
        return (double)s;
    }
    std::vector<cplx> w((size_t)n);
    for (long long i = 0; i < n; ++i) w[(size_t)i] = f.at(x + i);
    return complex_pow_sum(w, k, who);
}

}  // namespace

double gowers_unnormalized(const std::vector<cplx>& f, int k, double budget) {
    int d = k + 1;
    check_budget((long long)f.size(), d, budget);
    double s;
    if (sign_valued(f)) {
        std::vector<int8_t> g(f.size());
        for (size_t i = 0; i < f.size(); ++i) g[i] = (int8_t)f[i].real();
        long long t = sign_pow_sum(g, k);
        if (t < 0) throw std::logic_error("gowers_unnormalized: exact sum negative");
        s = (double)t;
    } else {
        s = complex_pow_sum(f, k, "gowers_unnormalized");
    }
    return std::pow(s, 1.0 / (double)(1LL << d));
}

double gowers_unnormalized_sign(const std::vector<int8_t>& f, int k, double budget) {
    int d = k + 1;
    check_budget((long long)f.size(), d, budget);
    long long total = sign_pow_sum(f, k);
    if (total < 0) throw std::logic_error("gowers_unnormalized_sign: exact sum negative");
    return std::pow((double)total, 1.0 / (double)(1LL << d));
}

GowersResult gowers_interval(const FunctionTable& f, long long x, long long H, int k,
                             double budget) {
    if (H < 0) throw std::invalid_argument("gowers_interval: H must be >= 0");
    long long n = H + 1;  // closed window [x, x+H]
    int d = k + 1;
    check_budget(n, d, budget);
    double num = pow_sum_of_table_window(f, x, n, k, "gowers_interval");
    double den = ones_pow_sum(n, d);
    GowersResult res;
    res.value = std::pow(num / den, 1.0 / (double)(1LL << d));
    res.k = k;
    res.x = x;
    res.H = H;
    res.method = GowersResult::Method::direct;
    return res;
}

namespace {

double recursive_pow_sum(const std::vector<cplx>& f, int k) {
    long long n = (long long)f.size();
    if (k == 0) {
        KahanCplx acc;
        for (const cplx& v : f) acc.add(v);
        return std::norm(acc.sum());
    }
    Kahan total;
    for (long long hshift = -(n - 1); hshift <= n - 1; ++hshift) {
        long long lo = std::max(0LL, -hshift), hi = n - 1 - std::max(0LL, hshift);
        if (lo > hi) continue;
        std::vector<cplx> g((size_t)(hi - lo + 1));
        for (long long y = lo; y <= hi; ++y)
            g[(size_t)(y - lo)] = f[(size_t)(y + hshift)] * std::conj(f[(size_t)y]);
        total.add(recursive_pow_sum(g, k - 1));
    }
    return total.sum();
}

}  // namespace

double gowers_recursive(const std::vector<cplx>& f, int k, double budget) {
    int d = k + 1;
    check_budget((long long)f.size(), d, budget);
    double s = std::max(0.0, recursive_pow_sum(f, k));
    return std::pow(s, 1.0 / (double)(1LL << d));
}

double box_norm(const std::vector<cplx>& f, const std::vector<std::vector<long long>>& boxes,
                double budget) {
    long long N = (long long)f.size();
    if (N < 1) throw std::invalid_argument("box_norm: empty group");
    int d = (int)boxes.size();
    if (d < 1) throw std::invalid_argument("box_norm: need at least one box");
    for (const auto& C : boxes)
        if (C.empty()) throw std::invalid_argument("box_norm: empty box");

    // The last coordinate is folded into a squared modulus (the inductive
    // Cauchy-Schwarz structure): with A_h(y) the alternating product over the
    // first d-1 coordinates,
    //   sum = sum_{h_1..h_{d-1}} w(h) sum_u |sum_{c in C_d} A_h(u+c)|^2,
    // which is exactly nonnegative and lets mean-zero phases cancel inside
    // the modulus.  The first d-1 difference multisets become multiplicity
    // weights w(h).
    std::vector<std::vector<long long>> mult((size_t)(d - 1),
                                             std::vector<long long>((size_t)N, 0));
    double budget_terms = (double)N * (double)boxes.back().size();
    double weight_den = (double)boxes.back().size() * (double)boxes.back().size();
    for (int i = 0; i + 1 < d; ++i) {
        const auto& C = boxes[(size_t)i];
        for (long long c1 : C)
            for (long long c2 : C) mult[(size_t)i][(size_t)(((c1 - c2) % N + N) % N)] += 1;
        long long distinct = 0;
        for (long long m : mult[(size_t)i]) distinct += m != 0;
        budget_terms *= (double)distinct;
        weight_den *= (double)C.size() * (double)C.size();
    }
    if (budget_terms > budget) throw std::runtime_error("box_norm: compute budget exceeded");

    std::vector<long long> last_box;
    for (long long c : boxes.back()) last_box.push_back(((c % N) + N) % N);

    // Doubled table avoids mod in the inner loops.
    std::vector<cplx> f2((size_t)(2 * N));
    for (long long i = 0; i < N; ++i) f2[(size_t)i] = f2[(size_t)(i + N)] = f[(size_t)i];

    int dm = d - 1;
    std::vector<long long> h((size_t)std::max(dm, 1));
    std::vector<long long> off((size_t)1 << dm);
    std::vector<cplx> A((size_t)(2 * N));
    Kahan acc;
    auto leaf = [&](double weight) {
        for (int m = 0; m < (1 << dm); ++m) {
            long long s = 0;
            for (int b = 0; b < dm; ++b)
                if (m >> b & 1) s += h[(size_t)b];
            off[(size_t)m] = s % N;
        }
        for (long long y = 0; y < N; ++y) {
            cplx p = f2[(size_t)(y + off[0])];
            for (int m = 1; m < (1 << dm); ++m) {
                cplx v = f2[(size_t)(y + off[(size_t)m])];
                p *= __builtin_popcount((unsigned)m) % 2 ? std::conj(v) : v;
            }
            A[(size_t)y] = A[(size_t)(y + N)] = p;
        }
        for (long long u = 0; u < N; ++u) {
            KahanCplx inner;
            for (long long c : last_box) inner.add(A[(size_t)(u + c)]);
            acc.add(weight * std::norm(inner.sum()));
        }
    };
    auto rec = [&](auto&& self, int i, double weight) -> void {
        if (i == dm) {
            leaf(weight);
            return;
        }
        for (long long v = 0; v < N; ++v) {
            if (mult[(size_t)i][(size_t)v] == 0) continue;
            h[(size_t)i] = v;
            self(self, i + 1, weight * (double)mult[(size_t)i][(size_t)v]);
        }
    };
    rec(rec, 0, 1.0);

    double denom = (double)N * weight_den;
    return std::pow(acc.sum() / denom, 1.0 / (double)(1LL << d));
}

AveragedGowers averaged_gowers(const FunctionTable& table, long long X, long long H, int k,
                               int samples, uint64_t seed, double budget, bool parallel) {
    if (X < 1 || samples < 1)
        throw std::invalid_argument("averaged_gowers: X and samples must be >= 1");
    if (samples > X) throw std::invalid_argument("averaged_gowers: more strata than integers");
    if (std::pow((double)(H + 1), k + 2) * samples > budget)
        throw std::runtime_error("averaged_gowers: compute budget exceeded");
    if (!table.covers(X, 2 * X + H))
        throw std::invalid_argument("averaged_gowers: table does not cover [X, 2X+H]");

    AveragedGowers out;
    out.stratum_values.assign((size_t)samples, 0.0);
    double* vals = out.stratum_values.data();

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int s = 0; s < samples; ++s) {
        long long lo = X + (long long)(((__int128)X * s) / samples);
        long long hi = X + (long long)(((__int128)X * (s + 1)) / samples);
        Rng64 rng(seed, (uint64_t)s);
        long long x = lo + (long long)rng.below((uint64_t)(hi - lo));
        vals[s] = gowers_interval(table, x, H, k, budget).value;
    }

    Kahan mean_acc;
    for (int s = 0; s < samples; ++s) mean_acc.add(vals[s]);
    out.mean_norm = mean_acc.sum() / samples;
    if (samples > 1) {
        Kahan var_acc;
        for (int s = 0; s < samples; ++s) {
            double dvi = vals[s] - out.mean_norm;
            var_acc.add(dvi * dvi);
        }
        out.stderr_mean = std::sqrt(var_acc.sum() / ((double)samples * (samples - 1)));
    }
    return out;
}

}  // namespace ulab
