#include "ulab/mult_sieve.hpp"

#include <cmath>
#include <stdexcept>

#include "ulab/characters.hpp"

namespace ulab {

namespace {

constexpr long long kSegmentLen = 1ll << 20;  // cache-friendly segment size

void check_range(long long start, long long end) {
    if (start < 1) throw std::invalid_argument("sieve: start < 1");
    if (end < start) throw std::invalid_argument("sieve: end < start");
    if (end - start + 1 > kSieveMaxLen) throw std::runtime_error("sieve: range too large for memory budget");
}

// Factors every n in [lo, hi] against the base primes (<= sqrt of the table
// end) and reports each prime power p^e || n plus any leftover prime > the
// base bound.  Visitor: prime_power(i, p, e) and leftover(i, P), i = n - lo.
template <class V>
void factor_range(long long lo, long long hi, const std::vector<long long>& base_primes, V&& v) {
    const size_t len = (size_t)(hi - lo + 1);
    std::vector<long long> rem(len);
    for (size_t i = 0; i < len; ++i) rem[i] = lo + (long long)i;
    for (long long p : base_primes) {
        if (p > hi / p) break;
        long long first = ((lo + p - 1) / p) * p;
        for (long long m = first; m <= hi; m += p) {
            size_t i = (size_t)(m - lo);
            int e = 0;
            while (rem[i] % p == 0) rem[i] /= p, ++e;
            v.prime_power(i, p, e);
        }
    }
    for (size_t i = 0; i < len; ++i)
        if (rem[i] > 1) v.leftover(i, rem[i]);
}

struct LiouvilleVisitor {
    int8_t* out;  // parity of Omega(n), as +-1; initialized to +1
    void prime_power(size_t i, long long, int e) {
        if (e & 1) out[i] = (int8_t)-out[i];
    }
    void leftover(size_t i, long long) { out[i] = (int8_t)-out[i]; }
};

struct MoebiusVisitor {
    int8_t* out;  // initialized to +1; 2 -> marked non-squarefree via |v|>1 trick
    uint8_t* sq;
    void prime_power(size_t i, long long, int e) {
        if (e >= 2) sq[i] = 1;
        out[i] = (int8_t)-out[i];
    }
    void leftover(size_t i, long long) { out[i] = (int8_t)-out[i]; }
};

struct MangoldtVisitor {
    double* out;       // log p if n = p^m else 0
    long long* firstp;  // first prime factor seen; -1 means >1 distinct primes
    void prime_power(size_t i, long long p, int) {
        firstp[i] = firstp[i] == 0 ? p : -1;
    }
    void leftover(size_t i, long long P) {
        firstp[i] = firstp[i] == 0 ? P : -1;
        if (firstp[i] == P) out[i] = std::log((double)P);
    }
};

struct CustomVisitor {
    cplx* out;  // initialized to 1; completely multiplicative product
    const MultSpec* spec;
    cplx fp(long long p) const {
        auto it = spec->prime_map.find(p);
        return it == spec->prime_map.end() ? spec->prime_default : it->second;
    }
    void prime_power(size_t i, long long p, int e) {
        cplx f = fp(p), acc = 1.0;
        for (int j = 0; j < e; ++j) acc *= f;
        out[i] *= acc;
    }
    void leftover(size_t i, long long P) { out[i] *= fp(P); }
};

long long isqrt_ll(long long n) {
    long long r = (long long)std::sqrt((double)n);
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

template <class Fill>
void for_each_segment(long long start, long long end, Fill&& fill) {
    const long long nseg = (end - start) / kSegmentLen + 1;
    const std::vector<long long> base = primes_up_to(isqrt_ll(end));
#pragma omp parallel for schedule(dynamic)
    for (long long s = 0; s < nseg; ++s) {
        long long lo = start + s * kSegmentLen;
        long long hi = std::min(end, lo + kSegmentLen - 1);
        fill(lo, hi, base);
    }
}

}  // namespace

std::vector<long long> primes_up_to(long long n) {
    std::vector<long long> primes;
    if (n < 2) return primes;
    std::vector<uint8_t> comp((size_t)n + 1, 0);
    for (long long p = 2; p <= n; ++p) {
        if (comp[(size_t)p]) continue;
        primes.push_back(p);
        for (long long m = p * p; m <= n; m += p) comp[(size_t)m] = 1;
    }
    return primes;
}

FunctionTable sieve_liouville(long long start, long long end) {
    check_range(start, end);
    FunctionTable t;
    t.start = start;
    t.end = end;
    t.spec = MultSpec::liouville();
    t.store = FunctionTable::Storage::i8;
    t.vb.assign((size_t)t.size(), 1);
    for_each_segment(start, end, [&](long long lo, long long hi, const std::vector<long long>& base) {
        factor_range(lo, hi, base, LiouvilleVisitor{t.vb.data() + (lo - start)});
    });
    return t;
}

FunctionTable sieve_moebius(long long start, long long end) {
    check_range(start, end);
    FunctionTable t;
    t.start = start;
    t.end = end;
    t.spec = MultSpec::moebius();
    t.store = FunctionTable::Storage::i8;
    t.vb.assign((size_t)t.size(), 1);
    for_each_segment(start, end, [&](long long lo, long long hi, const std::vector<long long>& base) {
        std::vector<uint8_t> sq((size_t)(hi - lo + 1), 0);
        factor_range(lo, hi, base, MoebiusVisitor{t.vb.data() + (lo - start), sq.data()});
        for (long long n = lo; n <= hi; ++n)
            if (sq[(size_t)(n - lo)]) t.vb[(size_t)(n - start)] = 0;
    });
    // mu(1) = 1 (no prime factors; visitor leaves the initial +1 untouched)
    return t;
}

FunctionTable sieve_von_mangoldt(long long start, long long end) {
    check_range(start, end);
    FunctionTable t;
    t.start = start;
    t.end = end;
    t.spec = MultSpec::von_mangoldt();
    t.store = FunctionTable::Storage::f64;
    t.vd.assign((size_t)t.size(), 0.0);
    for_each_segment(start, end, [&](long long lo, long long hi, const std::vector<long long>& base) {
        const size_t len = (size_t)(hi - lo + 1);
        std::vector<long long> firstp(len, 0);
        MangoldtVisitor v{t.vd.data() + (lo - start), firstp.data()};
        factor_range(lo, hi, base, v);
        // n with exactly one distinct base prime and cofactor 1 is p^m.
        for (size_t i = 0; i < len; ++i) {
            long long n = lo + (long long)i;
            if (firstp[i] > 0 && t.vd[(size_t)(n - start)] == 0.0) {
                // verify n is a pure power of firstp[i]
                long long p = firstp[i], m = n;
                while (m % p == 0) m /= p;
                if (m == 1) t.vd[(size_t)(n - start)] = std::log((double)p);
            }
        }
    });
    return t;
}

FunctionTable sieve_table(const MultSpec& spec, long long start, long long end) {
    switch (spec.kind) {
        case MultKind::liouville: return sieve_liouville(start, end);
        case MultKind::moebius: return sieve_moebius(start, end);
        case MultKind::von_mangoldt: return sieve_von_mangoldt(start, end);
        case MultKind::character_twist: {
            check_range(start, end);
            if (spec.modulus < 1) throw std::invalid_argument("character_twist: modulus must be >= 1");
            auto chars = characters_mod(spec.modulus);
            if (spec.character_index < 0 || spec.character_index >= (long long)chars.size())
                throw std::invalid_argument("character_twist: invalid character index");
            const DirichletCharacter& chi = chars[(size_t)spec.character_index];
            FunctionTable t;
            t.start = start;
            t.end = end;
            t.spec = spec;
            t.store = FunctionTable::Storage::c128;
            t.vc.resize((size_t)t.size());
            const double tt = spec.t;
#pragma omp parallel for schedule(static)
            for (long long n = start; n <= end; ++n)
                t.vc[(size_t)(n - start)] = chi(n) * e2pi(tt * std::log((double)n) / kTwoPi);
            return t;
        }
        case MultKind::custom_prime_map: {
            check_range(start, end);
            for (auto& [p, v] : spec.prime_map)
                if (std::abs(v) > 1.0 + 1e-12)
                    throw std::invalid_argument("custom_prime_map: |f(p)| must be <= 1");
            if (std::abs(spec.prime_default) > 1.0 + 1e-12)
                throw std::invalid_argument("custom_prime_map: |f(p)| must be <= 1");
            FunctionTable t;
            t.start = start;
            t.end = end;
            t.spec = spec;
            t.store = FunctionTable::Storage::c128;
            t.vc.assign((size_t)t.size(), cplx(1.0, 0.0));
            for_each_segment(start, end, [&](long long lo, long long hi, const std::vector<long long>& base) {
                factor_range(lo, hi, base, CustomVisitor{t.vc.data() + (lo - start), &spec});
            });
            return t;
        }
    }
    throw std::invalid_argument("sieve_table: unknown kind");
}

cplx eval_character_twist(long long n, const MultSpec& spec) {
    if (spec.kind != MultKind::character_twist)
        throw std::invalid_argument("eval_character_twist: spec kind mismatch");
    auto chars = characters_mod(spec.modulus);
    if (spec.character_index < 0 || spec.character_index >= (long long)chars.size())
        throw std::invalid_argument("character_twist: invalid character index");
    return chars[(size_t)spec.character_index](n) * e2pi(spec.t * std::log((double)n) / kTwoPi);
}

}  // namespace ulab
