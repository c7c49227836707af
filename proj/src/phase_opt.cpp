#include "ulab/phase_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "ulab/fft.hpp"

namespace ulab {

namespace {

constexpr double kInvGolden = 0.61803398874989485;  // (sqrt(5)-1)/2

long long mulmod(long long a, long long b, long long m) {
    return (long long)((unsigned __int128)(unsigned long long)a * (unsigned long long)b %
                       (unsigned long long)m);
}

// |sum_n fv[n] e(-sum_{j>=1} alphas[j] n^j)| / (H+1) at arbitrary real
// coefficients; monomials by per-n incremental multiplication, no pow.
double direct_value(const std::vector<cplx>& fv, const std::vector<double>& alphas) {
    KahanCplx acc;
    for (size_t n = 0; n < fv.size(); ++n) {
        if (fv[n] == cplx()) continue;
        double theta = 0.0, mono = 1.0;
        for (size_t j = 1; j < alphas.size(); ++j) {
            mono *= (double)n;
            theta += std::fmod(alphas[j] * mono, 1.0);
        }
        acc.add(fv[n] * e2pi(-theta));
    }
    return std::abs(acc.sum()) / (double)fv.size();
}

// Golden-section maximization on [a,b]; returns (argmax, value).
template <typename F>
std::pair<double, double> golden_max(F&& phi, double a, double b, int iters) {
    double x1 = b - kInvGolden * (b - a);
    double x2 = a + kInvGolden * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvGolden * (b - a);
            f2 = phi(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvGolden * (b - a);
            f1 = phi(x1);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Coordinate descent, golden-section line search per coordinate, highest
// degree first.  alphas is updated in place; returns the best value seen.
double coordinate_descent(const std::vector<cplx>& fv, std::vector<double>& alphas,
                          const std::vector<double>& half_width, int sweeps) {
    double best = direct_value(fv, alphas);
    const int k = (int)alphas.size() - 1;
    for (int s = 0; s < sweeps; ++s) {
        for (int j = k; j >= 1; --j) {
            const double center = alphas[(size_t)j];
            auto phi = [&](double t) {
                alphas[(size_t)j] = t;
                return direct_value(fv, alphas);
            };
            auto [arg, val] =
                golden_max(phi, center - half_width[(size_t)j], center + half_width[(size_t)j], 40);
            if (val > best) {
                best = val;
                alphas[(size_t)j] = arg;
            } else {
                alphas[(size_t)j] = center;
            }
        }
    }
    return best;
}

}  // namespace

WeakGowersResult weak_gowers(const FunctionTable& f, long long x, long long H, int k,
                             SearchMode mode, double sigma, int restarts, uint64_t seed,
                             double budget) {
    if (H < 1) throw std::invalid_argument("weak_gowers: H must be >= 1");
    if (k < 0) throw std::invalid_argument("weak_gowers: k must be >= 0");
    if (!(sigma > 0)) throw std::invalid_argument("weak_gowers: sigma must be positive");
    if (!f.covers(x, x + H)) throw std::invalid_argument("weak_gowers: window not covered by table");

    const long long npts = H + 1;
    std::vector<cplx> fv((size_t)npts);
    for (long long n = 0; n < npts; ++n) fv[(size_t)n] = f.at(x + n);

    WeakGowersResult res;
    res.argmax.k = k;
    res.argmax.t0 = x;
    res.argmax.alphas.assign((size_t)k + 1, 0.0);

    if (k == 0) {  // no searchable coefficients: |mean| is exact
        KahanCplx acc;
        for (const cplx& v : fv) acc.add(v);
        res.value = std::abs(acc.sum()) / (double)npts;
        res.guarantee = mode == SearchMode::exhaustive ? kTwoPi * sigma : INFINITY;
        return res;
    }

    if (mode == SearchMode::heuristic) {
        if (restarts < 1)
            throw std::invalid_argument("weak_gowers: heuristic mode needs restarts >= 1");
        std::vector<double> hw((size_t)k + 1, 0.0);
        double hpow = 1.0;
        for (int j = 1; j <= k; ++j) {
            hpow *= (double)H;
            hw[(size_t)j] = 0.5 / hpow;
        }
        double best = -1.0;
        std::vector<double> best_alphas;
        for (int r = 0; r < restarts; ++r) {
            Rng64 rng(seed, (uint64_t)r);
            std::vector<double> alphas((size_t)k + 1, 0.0);
            for (int j = 1; j <= k; ++j) alphas[(size_t)j] = rng.unit();
            double v = coordinate_descent(fv, alphas, hw, 3);
            if (v > best) {
                best = v;
                best_alphas = alphas;
            }
        }
        for (int j = 1; j <= k; ++j) res.argmax.alphas[(size_t)j] = frac01(best_alphas[(size_t)j]);
        res.value = best;
        res.guarantee = INFINITY;
        return res;
    }

    // Exhaustive grid: alpha_j on m/N_j with N_j >= H^j/sigma, so the step is
    // at most sigma/H^j and the Lipschitz bound certifies the gap.  N_1 is
    // rounded up to a power of two (a finer mesh) so one FFT evaluates the
    // whole alpha_1 axis per outer tuple.
    std::vector<long long> N((size_t)k + 1, 1);
    {
        double prod = 1.0, hpow = 1.0;
        for (int j = 1; j <= k; ++j) {
            hpow *= (double)H;
            double nj = std::ceil(hpow / sigma);
            if (nj > budget) throw std::runtime_error("weak_gowers: exhaustive grid exceeds budget");
            if (j == 1) nj = (double)next_pow2((size_t)std::max(nj, (double)npts));
            prod *= nj;
            if (nj > budget || prod > budget)
                throw std::runtime_error("weak_gowers: exhaustive grid exceeds budget");
            N[(size_t)j] = (long long)nj;
        }
    }
    const long long N1 = N[1];
    FftPlan plan((size_t)N1);

    // Monomial residues r_j(n) = n^j mod N_j make the grid phases exact:
    // alpha_j n^j = (m_j r_j(n) mod N_j)/N_j mod 1.
    std::vector<std::vector<long long>> rmod((size_t)k + 1);
    for (int j = 2; j <= k; ++j) {
        auto& row = rmod[(size_t)j];
        row.resize((size_t)npts);
        for (long long n = 0; n < npts; ++n) {
            long long r = 1 % N[(size_t)j];
            for (int i = 0; i < j; ++i) r = mulmod(r, n % N[(size_t)j], N[(size_t)j]);
            row[(size_t)n] = r;
        }
    }

    // For real f the sum at mirrored tuples (-alpha mod 1) is the conjugate,
    // so the top coordinate only needs 0..N_k/2; the lexicographically
    // smallest argmax always lies in that half.
    const bool realf = f.is_real();
    const long long top_count =
        k >= 2 ? (realf ? N[(size_t)k] / 2 + 1 : N[(size_t)k]) : 1;
    long long outer_total = top_count;
    for (int j = 2; j < k; ++j) outer_total *= N[(size_t)j];

    struct Cand {
        double v2 = -1.0;
        std::vector<long long> m;  // grid indices, m[1..k]
    };
    auto lex_less = [k](const std::vector<long long>& a, const std::vector<long long>& b) {
        for (int j = k; j >= 1; --j)
            if (a[(size_t)j] != b[(size_t)j]) return a[(size_t)j] < b[(size_t)j];
        return false;
    };

    // Fixed 64-tuple blocks: the phase recurrence along the fastest outer
    // axis restarts at every block boundary (and at every odometer carry),
    // so results do not depend on how blocks land on threads.
    const long long kBlock = 64;
    const long long nblocks = (outer_total + kBlock - 1) / kBlock;

    Cand global;
#pragma omp parallel
    {
        std::vector<cplx> buf((size_t)N1);
        std::vector<cplx> phase((size_t)npts, cplx(1.0, 0.0));
        std::vector<cplx> rot;
        if (k >= 2) {
            rot.resize((size_t)npts);
            for (long long n = 0; n < npts; ++n)
                rot[(size_t)n] = e2pi(-(double)rmod[2][(size_t)n] / (double)N[2]);
        }
        std::vector<long long> dig((size_t)k + 1, 0);
        std::vector<long long> scratch((size_t)k + 1, 0);
        Cand local;

        auto init_phase = [&]() {
            for (long long n = 0; n < npts; ++n) {
                double th = 0.0;
                for (int j = 2; j <= k; ++j)
                    th += (double)mulmod(dig[(size_t)j], rmod[(size_t)j][(size_t)n],
                                         N[(size_t)j]) /
                          (double)N[(size_t)j];
                phase[(size_t)n] = e2pi(-th);
            }
        };

#pragma omp for schedule(dynamic)
        for (long long block = 0; block < nblocks; ++block) {
            const long long begin = block * kBlock;
            const long long end = std::min(begin + kBlock, outer_total);
            for (long long flat = begin; flat < end; ++flat) {
                if (flat == begin) {
                    long long rest = flat;
                    for (int j = 2; j < k; ++j) {
                        dig[(size_t)j] = rest % N[(size_t)j];
                        rest /= N[(size_t)j];
                    }
                    if (k >= 2) dig[(size_t)k] = rest;
                    init_phase();
                } else {
                    bool carry = false;
                    ++dig[2];
                    if (k > 2 && dig[2] == N[2]) {
                        dig[2] = 0;
                        carry = true;
                        for (int j = 3; j <= k; ++j) {
                            ++dig[(size_t)j];
                            if (j < k && dig[(size_t)j] == N[(size_t)j])
                                dig[(size_t)j] = 0;
                            else
                                break;
                        }
                    }
                    if (carry)
                        init_phase();
                    else
                        for (long long n = 0; n < npts; ++n) phase[(size_t)n] *= rot[(size_t)n];
                }

                for (long long n = 0; n < npts; ++n) buf[(size_t)n] = fv[(size_t)n] * phase[(size_t)n];
                std::fill(buf.begin() + (size_t)npts, buf.end(), cplx());
                plan.forward(buf.data());

                double bv2 = -1.0;
                long long bm1 = 0;
                for (long long m1 = 0; m1 < N1; ++m1) {
                    double v2 = std::norm(buf[(size_t)m1]);
                    if (v2 > bv2) {
                        bv2 = v2;
                        bm1 = m1;
                    }
                }
                scratch = dig;
                scratch[1] = bm1;
                if (bv2 > local.v2 || (bv2 == local.v2 && lex_less(scratch, local.m))) {
                    local.v2 = bv2;
                    local.m = scratch;
                }
            }
        }
#pragma omp critical
        {
            if (local.v2 > global.v2 ||
                (local.v2 == global.v2 && local.v2 >= 0.0 && lex_less(local.m, global.m))) {
                global.v2 = local.v2;
                global.m = local.m;
            }
        }
    }

    std::vector<double> grid_alphas((size_t)k + 1, 0.0);
    for (int j = 1; j <= k; ++j)
        grid_alphas[(size_t)j] = (double)global.m[(size_t)j] / (double)N[(size_t)j];
    const double grid_val = std::sqrt(std::max(0.0, global.v2)) / (double)npts;

    // One refinement pass from the grid argmax, one grid spacing on each side.
    std::vector<double> hw((size_t)k + 1, 0.0);
    for (int j = 1; j <= k; ++j) hw[(size_t)j] = 1.0 / (double)N[(size_t)j];
    std::vector<double> refined = grid_alphas;
    const double ref_val = coordinate_descent(fv, refined, hw, 3);

    if (ref_val >= grid_val) {
        res.value = ref_val;
        for (int j = 1; j <= k; ++j) res.argmax.alphas[(size_t)j] = frac01(refined[(size_t)j]);
    } else {
        res.value = grid_val;
        for (int j = 1; j <= k; ++j) res.argmax.alphas[(size_t)j] = grid_alphas[(size_t)j];
    }
    res.guarantee = kTwoPi * (double)(k + 1) * sigma;
    return res;
}

std::optional<RationalApprox> weyl_rationalize(const PhasePoint& pt, long long H, long long Q,
                                               const std::vector<double>& c) {
    if (H < 1) throw std::invalid_argument("weyl_rationalize: H must be >= 1");
    if (Q < 1) throw std::invalid_argument("weyl_rationalize: Q must be >= 1");
    const int k = pt.k;
    if ((int)pt.alphas.size() != k + 1 || (int)c.size() != k + 1)
        throw std::invalid_argument("weyl_rationalize: alphas and tolerances need k+1 entries");

    std::vector<double> tol((size_t)k + 1, 0.0);
    double hpow = 1.0;
    for (int j = 1; j <= k; ++j) {
        hpow *= (double)H;
        tol[(size_t)j] = c[(size_t)j] / hpow;
    }
    for (long long q = 1; q <= Q; ++q) {
        bool ok = true;
        for (int j = 1; j <= k && ok; ++j)
            ok = dist_to_int((double)q * pt.alphas[(size_t)j]) <= tol[(size_t)j];
        if (!ok) continue;
        RationalApprox out;
        out.q = q;
        out.numerators.resize((size_t)k + 1);
        out.residuals.resize((size_t)k + 1);
        for (int j = 0; j <= k; ++j) {
            const double qa = (double)q * pt.alphas[(size_t)j];
            out.numerators[(size_t)j] = std::llround(qa);
            out.residuals[(size_t)j] = dist_to_int(qa);
        }
        return out;
    }
    return std::nullopt;
}

namespace {

// sup_I |P(t) - (T/2pi) log t - gamma(t)|: endpoints, 10^3 uniform samples,
// and every interior critical point (sign changes of t*(P-gamma)'(t) - T/2pi,
// a polynomial, located by scan + bisection).
double eps_sup_numeric(const RationalPoly& P, double T, const RationalPoly& gamma,
                       const RatInterval& I) {
    const RationalPoly diff = P - gamma;
    const double lo = Rat(I.lo()).get_d();
    const double hi = Rat(I.hi()).get_d();
    auto eps = [&](double t) { return diff.eval_double(t) - (T / kTwoPi) * std::log(t); };

    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = lo + (hi - lo) * (double)i / 1000.0;
        sup = std::max(sup, std::abs(eps(t)));
    }

    const RationalPoly dp = diff.derivative();
    auto crit = [&](double t) { return t * dp.eval_double(t) - T / kTwoPi; };
    const int cells = 4096;
    double prev_t = lo, prev_v = crit(lo);
    for (int i = 1; i <= cells; ++i) {
        const double t = lo + (hi - lo) * (double)i / (double)cells;
        const double v = crit(t);
        if ((prev_v <= 0 && v >= 0) || (prev_v >= 0 && v <= 0)) {
            double a = prev_t, b = t, fa = prev_v;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = crit(mid);
                if ((fa <= 0 && fm <= 0) || (fa >= 0 && fm >= 0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            sup = std::max(sup, std::abs(eps(0.5 * (a + b))));
        }
        prev_t = t;
        prev_v = v;
    }
    return sup;
}

}  // namespace

ArchimedeanFit archimedean_fit(const RationalPoly& P, const RatInterval& I, long long q_max) {
    if (!(I.len > 0)) throw std::invalid_argument("archimedean_fit: empty interval");
    if (!(I.lo() > 0)) throw std::invalid_argument("archimedean_fit: interval must be positive");
    if (q_max < 1) throw std::invalid_argument("archimedean_fit: q_max must be >= 1");
    const int k = P.degree();
    if (k < 1) throw std::invalid_argument("archimedean_fit: degree must be >= 1");

    const Rat xI = I.mid;

    // lambda_j = d^j/dt^j log t at x_I = (-1)^{j-1} (j-1)! / x_I^j, exact.
    std::vector<Rat> lambda((size_t)k + 1);
    {
        Rat xp(1);
        Int fact(1);
        for (int j = 1; j <= k; ++j) {
            xp *= xI;
            if (j >= 2) fact *= (j - 1);
            lambda[(size_t)j] = (j % 2 == 1) ? Rat(fact) / xp : Rat(-fact) / xp;
        }
    }
    std::vector<RationalPoly> binc((size_t)k + 1);
    for (int j = 0; j <= k; ++j) binc[(size_t)j] = binom_poly(j);

    ArchimedeanFit best;
    bool have = false;
    for (long long q = 1; q <= q_max; ++q) {
        std::vector<Int> m((size_t)k + 1, Int(0));
        double T = 0.0;
        // Top-down: at level j only T and m_j are unknown; the running T
        // estimate picks m_j, the exact residual re-estimates T.  The final
        // (j=1) estimate is the most accurate since lambda_1 is largest.
        for (int j = k; j >= 1; --j) {
            Rat w = P.derivative_at(j, xI);
            for (int i = j + 1; i <= k; ++i) {
                Rat mi(m[(size_t)i], Int((long)q));
                mi.canonicalize();
                w -= mi * binc[(size_t)i].derivative_at(j, xI);
            }
            const double target = w.get_d() - (T / kTwoPi) * lambda[(size_t)j].get_d();
            m[(size_t)j] = Int((long)std::llround((double)q * target));
            Rat mj(m[(size_t)j], Int((long)q));
            mj.canonicalize();
            Rat ratio = (w - mj) / lambda[(size_t)j];
            T = kTwoPi * ratio.get_d();
        }
        {
            double c0 = P.eval(xI).get_d() - (T / kTwoPi) * std::log(xI.get_d());
            for (int i = 1; i <= k; ++i) {
                Rat mi(m[(size_t)i], Int((long)q));
                mi.canonicalize();
                c0 -= Rat(mi * binom_at(xI, i)).get_d();
            }
            m[0] = Int((long)std::llround((double)q * c0));
        }

        RationalPoly gamma;
        for (int j = 0; j <= k; ++j) {
            Rat mj(m[(size_t)j], Int((long)q));
            mj.canonicalize();
            gamma = gamma + mj * binc[(size_t)j];
        }
        const double sup = eps_sup_numeric(P, T, gamma, I);
        if (!have || sup < best.eps_sup) {
            best.T = T;
            best.gamma = gamma;
            best.eps_sup = sup;
            best.q = q;
            have = true;
        }
    }
    return best;
}

}  // namespace ulab
