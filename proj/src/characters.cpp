#include "ulab/characters.hpp"

#include <numeric>
#include <stdexcept>

namespace ulab {

namespace {

long long powmod(long long b, long long e, long long m) {
    long long r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = (long long)((__int128)r * b % m);
        b = (long long)((__int128)b * b % m);
        e >>= 1;
    }
    return r;
}

std::vector<std::pair<long long, int>> factorize(long long n) {
    std::vector<std::pair<long long, int>> f;
    for (long long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) n /= p, ++e;
            f.push_back({p, e});
        }
    }
    if (n > 1) f.push_back({n, 1});
    return f;
}

long long primitive_root_mod_p(long long p) {
    if (p == 2) return 1;
    auto fac = factorize(p - 1);
    for (long long g = 2; g < p; ++g) {
        bool ok = true;
        for (auto& [f, e] : fac)
            if (powmod(g, (p - 1) / f, p) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw std::logic_error("no primitive root found");  // unreachable for prime p
}

// One cyclic component of (Z/q)^*: a generator's discrete-log table mod pe.
struct CyclicComponent {
    long long pe;          // prime power this component lives in
    long long ord;         // component order
    std::vector<long long> dlog;  // dlog[u mod pe], -1 for non-units / other factor
};

// Decompose (Z/pe)^* into cyclic components with explicit dlog tables.
void components_for_prime_power(long long p, int e, std::vector<CyclicComponent>& out) {
    long long pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
        if (e == 1) return;  // trivial group
        if (e == 2) {
            CyclicComponent c{pe, 2, std::vector<long long>(pe, -1)};
            c.dlog[1] = 0;
            c.dlog[3] = 1;
            out.push_back(std::move(c));
            return;
        }
        // (Z/2^e)^* = <-1> x <5>, orders 2 and 2^{e-2}.
        CyclicComponent cm{pe, 2, std::vector<long long>(pe, -1)};
        CyclicComponent c5{pe, pe / 4, std::vector<long long>(pe, -1)};
        long long u = 1;
        for (long long j = 0; j < c5.ord; ++j) {
            cm.dlog[u] = 0;
            c5.dlog[u] = j;
            cm.dlog[pe - u] = 1;  // -u = (-1) * 5^j
            c5.dlog[pe - u] = j;
            u = (long long)((__int128)u * 5 % pe);
        }
        out.push_back(std::move(cm));
        out.push_back(std::move(c5));
        return;
    }
    // Odd p^e is cyclic of order p^{e-1}(p-1); lift a primitive root mod p.
    long long g = primitive_root_mod_p(p);
    if (e > 1 && powmod(g, p - 1, p * p) == 1) g += p;
    long long ord = (pe / p) * (p - 1);
    CyclicComponent c{pe, ord, std::vector<long long>(pe, -1)};
    long long u = 1;
    for (long long j = 0; j < ord; ++j) {
        c.dlog[u] = j;
        u = (long long)((__int128)u * g % pe);
    }
    out.push_back(std::move(c));
}

}  // namespace

long long euler_phi(long long q) {
    long long phi = 1;
    for (auto& [p, e] : factorize(q)) {
        long long pe = 1;
        for (int i = 1; i < e; ++i) pe *= p;
        phi *= pe * (p - 1);
    }
    return phi;
}

std::vector<DirichletCharacter> characters_mod(long long q) {
    if (q < 1) throw std::invalid_argument("characters_mod: modulus must be >= 1");
    std::vector<CyclicComponent> comps;
    for (auto& [p, e] : factorize(q)) components_for_prime_power(p, e, comps);

    long long phi = 1;
    for (auto& c : comps) phi *= c.ord;

    std::vector<DirichletCharacter> chars;
    chars.reserve((size_t)phi);
    for (long long index = 0; index < phi; ++index) {
        // Mixed-radix digits of `index` select the exponent on each component;
        // index 0 is all-zero, i.e. the principal character.
        std::vector<long long> exps(comps.size());
        long long rest = index;
        for (size_t c = 0; c < comps.size(); ++c) {
            exps[c] = rest % comps[c].ord;
            rest /= comps[c].ord;
        }
        DirichletCharacter chi;
        chi.q = q;
        chi.index = index;
        chi.table.assign((size_t)q, cplx(0.0, 0.0));
        for (long long n = 0; n < q; ++n) {
            if (std::gcd(n == 0 ? q : n, q) != 1) continue;
            double phase = 0.0;
            bool unit = true;
            for (size_t c = 0; c < comps.size(); ++c) {
                long long d = comps[c].dlog[(size_t)(n % comps[c].pe)];
                if (d < 0) { unit = false; break; }
                phase += (double)exps[c] * (double)d / (double)comps[c].ord;
            }
            if (unit) chi.table[(size_t)n] = e2pi(phase - std::floor(phase));
        }
        if (q == 1) chi.table[0] = 1.0;  // everything is coprime to 1
        chars.push_back(std::move(chi));
    }
    return chars;
}

}  // namespace ulab
