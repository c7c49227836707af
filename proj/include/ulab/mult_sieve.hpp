#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ulab/common.hpp"

namespace ulab {

enum class MultKind : uint8_t {
    liouville = 0,
    moebius = 1,
    von_mangoldt = 2,
    character_twist = 3,
    custom_prime_map = 4,
};

// Which completely multiplicative (or von Mangoldt) function a table holds.
struct MultSpec {
    MultKind kind = MultKind::liouville;

    // character_twist: n -> chi(n) * n^{it} with chi the character of the
    // given index mod `modulus` (index 0 is principal) and n^{it} = e(t ln n / 2pi).
    long long modulus = 1;
    long long character_index = 0;
    double t = 0.0;

    // custom_prime_map: completely multiplicative f with f(p) = prime_map[p]
    // (default `prime_default` for unlisted primes); |f(p)| <= 1 required.
    std::map<long long, cplx> prime_map;
    cplx prime_default = cplx(1.0, 0.0);

    static MultSpec liouville() { return {MultKind::liouville}; }
    static MultSpec moebius() { return {MultKind::moebius}; }
    static MultSpec von_mangoldt() { return {MultKind::von_mangoldt}; }
    static MultSpec twist(long long q, long long index, double t) {
        MultSpec s;
        s.kind = MultKind::character_twist;
        s.modulus = q;
        s.character_index = index;
        s.t = t;
        return s;
    }
    static MultSpec custom(std::map<long long, cplx> pm, cplx dflt) {
        MultSpec s;
        s.kind = MultKind::custom_prime_map;
        s.prime_map = std::move(pm);
        s.prime_default = dflt;
        return s;
    }
};

// Values of an arithmetic function on [start, end]; lookups outside the
// range return 0 (the functions are extended by zero off their support).
struct FunctionTable {
    enum class Storage : uint8_t { i8, f64, c128 };

    long long start = 1, end = 0;
    MultSpec spec;
    Storage store = Storage::i8;
    std::vector<int8_t> vb;    // +-1 valued (liouville) or {-1,0,1} (moebius)
    std::vector<double> vd;    // von Mangoldt
    std::vector<cplx> vc;      // twists / custom

    long long size() const { return end - start + 1; }
    bool covers(long long lo, long long hi) const { return start <= lo && hi <= end; }

    cplx at(long long n) const {
        if (n < start || n > end) return 0.0;
        size_t i = (size_t)(n - start);
        switch (store) {
            case Storage::i8: return (double)vb[i];
            case Storage::f64: return vd[i];
            case Storage::c128: return vc[i];
        }
        return 0.0;
    }

    // Real fast paths; only valid for the matching storage.
    int8_t sign_at(long long n) const {
        return (n < start || n > end) ? (int8_t)0 : vb[(size_t)(n - start)];
    }
    double real_at(long long n) const {
        if (n < start || n > end) return 0.0;
        size_t i = (size_t)(n - start);
        return store == Storage::i8 ? (double)vb[i] : vd[i];
    }
    bool is_real() const { return store != Storage::c128; }
};

// Maximum table length accepted by the sieves (memory budget guard).
inline constexpr long long kSieveMaxLen = 1ll << 28;

FunctionTable sieve_liouville(long long start, long long end);
FunctionTable sieve_moebius(long long start, long long end);
FunctionTable sieve_von_mangoldt(long long start, long long end);

// Builds a table for any MultSpec (dispatches to the sieves above or to the
// twisted/custom builders).
FunctionTable sieve_table(const MultSpec& spec, long long start, long long end);

// Point evaluation chi(n) * e(t ln n / 2pi) for a character_twist spec.
cplx eval_character_twist(long long n, const MultSpec& spec);

// Simple sieve of Eratosthenes (base primes for the segmented sieves,
// prime lists for the pretentious module).
std::vector<long long> primes_up_to(long long n);

}  // namespace ulab
