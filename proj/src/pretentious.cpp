#include "ulab/pretentious.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ulab/characters.hpp"

namespace ulab {

namespace {

constexpr double kInvGolden = 0.61803398874989485;

// e^{i a} with a in radians (e2pi works in turns).
inline cplx eang(double a) { return {std::cos(a), std::sin(a)}; }

// f's values at primes for the 1-bounded completely multiplicative kinds.
std::function<cplx(long long)> prime_values(const MultSpec& f) {
    switch (f.kind) {
        case MultKind::liouville:
        case MultKind::moebius:
            return [](long long) { return cplx(-1.0, 0.0); };
        case MultKind::character_twist: {
            auto cs = characters_mod(f.modulus);
            if (f.character_index < 0 || f.character_index >= (long long)cs.size())
                throw std::invalid_argument("m_score: character index out of range");
            DirichletCharacter chi = cs[(size_t)f.character_index];
            const double t0 = f.t;
            return [chi = std::move(chi), t0](long long p) {
                return chi(p) * eang(t0 * std::log((double)p));
            };
        }
        case MultKind::custom_prime_map: {
            if (std::abs(f.prime_default) > 1.0 + 1e-12)
                throw std::invalid_argument("m_score: |f(p)| <= 1 required");
            for (const auto& kv : f.prime_map)
                if (std::abs(kv.second) > 1.0 + 1e-12)
                    throw std::invalid_argument("m_score: |f(p)| <= 1 required");
            return [pm = f.prime_map, dflt = f.prime_default](long long p) {
                auto it = pm.find(p);
                return it == pm.end() ? dflt : it->second;
            };
        }
        default:
            throw std::invalid_argument(
                "m_score: f must be 1-bounded completely multiplicative");
    }
}

// Search candidate; ties go to smaller q, then index, then t (tidx ascending).
struct Cand {
    double d2 = std::numeric_limits<double>::infinity();
    long long q = 0;
    long long index = 0;
    long long tidx = 0;
};

bool better(const Cand& a, const Cand& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.q != b.q) return a.q < b.q;
    if (a.index != b.index) return a.index < b.index;
    return a.tidx < b.tidx;
}

}  // namespace

double pretentious_distance(const std::function<cplx(long long)>& f_on_primes,
                            const std::function<cplx(long long)>& g_on_primes,
                            long long X) {
    if (X < 2) throw std::invalid_argument("pretentious_distance: X >= 2 required");
    Kahan s;
    for (long long p : primes_up_to(X))
        s.add((1.0 - (f_on_primes(p) * std::conj(g_on_primes(p))).real()) / (double)p);
    return std::sqrt(std::max(0.0, s.sum()));
}

MScore m_score(const MultSpec& f, long long X, long long Q, double t_res,
               double t_max, double budget) {
    if (X < 2) throw std::invalid_argument("m_score: X >= 2 required");
    if (Q < 1) throw std::invalid_argument("m_score: Q >= 1 required");
    if (!(t_res > 0.0)) throw std::invalid_argument("m_score: t_res > 0 required");
    if (t_max < 0.0) t_max = (double)X;

    auto fval = prime_values(f);
    auto primes = primes_up_to(X);
    const size_t np = primes.size();

    const double half_d = std::ceil(t_max / t_res);
    const double grid_d = 2.0 * half_d + 1.0;
    if (grid_d * (double)np > budget)
        throw std::runtime_error("m_score: budget exceeded: " + std::to_string(grid_d) +
                                 " grid points x " + std::to_string(np) + " primes");
    const long long half = (long long)half_d;
    const long long grid = 2 * half + 1;

    // One accumulator slot per residue per modulus; a character's distance is
    // a dot product over its coprime residues, so each grid t needs a single
    // pass over the primes shared by all characters.
    std::vector<long long> qbase(Q + 1, 0);
    long long acc_total = 0;
    for (long long q = 1; q <= Q; ++q) {
        qbase[q] = acc_total;
        acc_total += q;
    }
    struct CharEntry {
        long long q, index, base;
        std::vector<int> rs;   // residues with chi != 0
        std::vector<cplx> cv;  // conj chi at rs
    };
    std::vector<CharEntry> entries;
    for (long long q = 1; q <= Q; ++q) {
        std::vector<int> rs;
        if (q == 1) rs.push_back(0);
        else
            for (int r = 1; r < q; ++r)
                if (std::gcd((long long)r, q) == 1) rs.push_back(r);
        auto cs = characters_mod(q);
        for (size_t i = 0; i < cs.size(); ++i) {
            CharEntry e{q, (long long)i, qbase[q], rs, {}};
            e.cv.reserve(rs.size());
            for (int r : rs) e.cv.push_back(std::conj(cs[i].table[(size_t)r]));
            entries.push_back(std::move(e));
        }
    }

    // Per-prime tables: log p, f(p)/p, the per-step rotation, and the flat
    // accumulator slot for each modulus.
    std::vector<double> lnp(np);
    std::vector<cplx> fw(np), rot(np);
    Kahan p1sum;
    for (size_t i = 0; i < np; ++i) {
        const long long p = primes[i];
        lnp[i] = std::log((double)p);
        fw[i] = fval(p) / (double)p;
        rot[i] = eang(-t_res * lnp[i]);
        p1sum.add(1.0 / (double)p);
    }
    const double p1 = p1sum.sum();
    std::vector<uint32_t> slot(np * (size_t)Q);
    for (size_t i = 0; i < np; ++i)
        for (long long q = 1; q <= Q; ++q)
            slot[i * (size_t)Q + (size_t)(q - 1)] = (uint32_t)(qbase[q] + primes[i] % q);

    // Grid scan over t = tidx * t_res, tidx in [-half, half].  Phasors are
    // advanced by one rotation per step and re-seeded at fixed 64-step block
    // boundaries, so every (chi, t) value is independent of the thread count.
    const long long kBlock = 64;
    const long long nblocks = (grid + kBlock - 1) / kBlock;
    Cand best;
#pragma omp parallel
    {
        std::vector<cplx> z(np);
        std::vector<cplx> acc((size_t)acc_total);
        Cand local;
#pragma omp for schedule(dynamic)
        for (long long b = 0; b < nblocks; ++b) {
            const long long fi0 = b * kBlock;
            const long long fi1 = std::min(grid, fi0 + kBlock);
            const double tstart = (double)(fi0 - half) * t_res;
            for (size_t i = 0; i < np; ++i) z[i] = fw[i] * eang(-tstart * lnp[i]);
            for (long long fi = fi0; fi < fi1; ++fi) {
                std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
                const bool step = fi != fi0;
                for (size_t i = 0; i < np; ++i) {
                    if (step) z[i] *= rot[i];
                    const cplx zi = z[i];
                    const uint32_t* row = &slot[i * (size_t)Q];
                    for (long long j = 0; j < Q; ++j) acc[row[j]] += zi;
                }
                for (const auto& e : entries) {
                    cplx s = 0.0;
                    for (size_t j = 0; j < e.rs.size(); ++j)
                        s += e.cv[j] * acc[(size_t)(e.base + e.rs[j])];
                    Cand c{p1 - s.real(), e.q, e.index, fi - half};
                    if (better(c, local)) local = c;
                }
            }
        }
#pragma omp critical
        if (better(local, best)) best = local;
    }

    // Direct evaluation of D^2 at the winning character (compensated), used
    // for the golden-section refinement and the reported value so the value
    // equals the distance at the reported argmin.
    auto chi = characters_mod(best.q)[(size_t)best.index];
    std::vector<cplx> coef(np);
    for (size_t i = 0; i < np; ++i) coef[i] = fw[i] * std::conj(chi(primes[i]));
    auto d2_at = [&](double t) {
        KahanCplx s;
        for (size_t i = 0; i < np; ++i) s.add(coef[i] * eang(-t * lnp[i]));
        return p1 - s.sum().real();
    };

    double bt = (double)best.tidx * t_res;
    double bv = d2_at(bt);
    double a = bt - t_res, b = bt + t_res;
    double x1 = b - kInvGolden * (b - a), x2 = a + kInvGolden * (b - a);
    double f1 = d2_at(x1), f2 = d2_at(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 <= f2) {
            b = x2, x2 = x1, f2 = f1;
            x1 = b - kInvGolden * (b - a);
            f1 = d2_at(x1);
        } else {
            a = x1, x1 = x2, f1 = f2;
            x2 = a + kInvGolden * (b - a);
            f2 = d2_at(x2);
        }
        if (f1 < bv) bv = f1, bt = x1;
        if (f2 < bv) bv = f2, bt = x2;
    }

    MScore out;
    out.value = std::sqrt(std::max(0.0, bv));
    out.argmin_t = bt;
    out.argmin_q = best.q;
    out.argmin_index = best.index;
    return out;
}

}  // namespace ulab
