#include "ulab/nil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace ulab {

namespace {

// exact zero/one tests used for shape validation
template <class T> bool entry_zero(const T& v) { return v == T(0); }
template <class T> bool entry_one(const T& v) { return v == T(1); }

// looser zero test for filtration-mask checks (double mode tolerates roundoff)
inline bool mask_zero(double v) { return std::abs(v) <= 1e-12; }
inline bool mask_zero(const Rat& v) { return v == 0; }

inline double floor_of(double v) { return std::floor(v); }
inline Rat floor_of(const Rat& v) { return Rat(floor_rat(v)); }

// C(t, j) over the scalar type
template <class T>
T binom_scalar(const T& t, int j) {
    if constexpr (std::is_same_v<T, Rat>) {
        return binom_at(t, j);
    } else {
        T acc(1);
        for (int i = 0; i < j; ++i) acc = acc * (t - T(i)) / T(i + 1);
        return acc;
    }
}

template <class T>
void require_shape(const UTMat<T>& m, const char* who) {
    if (m.d < 1 || m.a.size() != (size_t)m.d * m.d)
        throw std::invalid_argument(std::string(who) + ": malformed matrix");
}

template <class T>
void require_strictly_upper(const UTMat<T>& m, const char* who) {
    require_shape(m, who);
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j <= i; ++j)
            if (!entry_zero(m.at(i, j)))
                throw std::invalid_argument(std::string(who) +
                                            ": strictly upper triangular input required");
}

template <class T>
void require_unitriangular(const UTMat<T>& m, const char* who) {
    require_shape(m, who);
    for (int i = 0; i < m.d; ++i) {
        if (!entry_one(m.at(i, i)))
            throw std::invalid_argument(std::string(who) + ": unit diagonal required");
        for (int j = 0; j < i; ++j)
            if (!entry_zero(m.at(i, j)))
                throw std::invalid_argument(std::string(who) + ": lower entries must vanish");
    }
}

template <class T>
UTMat<T> scaled(UTMat<T> m, const T& c) {
    for (auto& v : m.a) v = v * c;
    return m;
}

template <class T>
UTMat<T> mat_add(const UTMat<T>& x, const UTMat<T>& y) {
    UTMat<T> r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] + y.a[i];
    return r;
}

}  // namespace

template <class T>
UTMat<T> mat_identity(int d) {
    if (d < 1) throw std::invalid_argument("mat_identity: d >= 1 required");
    UTMat<T> r(d);
    for (int i = 0; i < d; ++i) r.at(i, i) = T(1);
    return r;
}

template <class T>
UTMat<T> mat_mul(const UTMat<T>& x, const UTMat<T>& y) {
    require_shape(x, "mat_mul");
    require_shape(y, "mat_mul");
    if (x.d != y.d) throw std::invalid_argument("mat_mul: dimension mismatch");
    const int d = x.d;
    UTMat<T> r(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const T& v = x.at(i, k);
            if (entry_zero(v)) continue;
            for (int j = 0; j < d; ++j) r.at(i, j) = r.at(i, j) + v * y.at(k, j);
        }
    return r;
}

template <class T>
UTMat<T> mat_inverse(const UTMat<T>& g) {
    require_unitriangular(g, "mat_inverse");
    const int d = g.d;
    UTMat<T> n = g;
    for (int i = 0; i < d; ++i) n.at(i, i) = T(0);
    // (I + N)^{-1} = sum_m (-N)^m, a finite series for nilpotent N
    UTMat<T> out = mat_identity<T>(d), pw = mat_identity<T>(d);
    for (int m = 1; m < d; ++m) {
        pw = mat_mul(pw, n);
        out = mat_add(out, scaled(pw, T(m % 2 == 1 ? -1 : 1)));
    }
    return out;
}

template <class T>
UTMat<T> nil_exp(const UTMat<T>& X) {
    require_strictly_upper(X, "nil_exp");
    const int d = X.d;
    UTMat<T> out = mat_identity<T>(d), term = mat_identity<T>(d);
    for (int m = 1; m < d; ++m) {
        const T inv_m = T(T(1) / T(m));
        term = scaled(mat_mul(term, X), inv_m);  // X^m / m!
        out = mat_add(out, term);
    }
    return out;
}

template <class T>
UTMat<T> nil_log(const UTMat<T>& g) {
    require_unitriangular(g, "nil_log");
    const int d = g.d;
    UTMat<T> n = g;
    for (int i = 0; i < d; ++i) n.at(i, i) = T(0);
    UTMat<T> out(d), pw = mat_identity<T>(d);
    for (int m = 1; m < d; ++m) {
        pw = mat_mul(pw, n);
        const T coef = T(T(m % 2 == 1 ? 1 : -1) / T(m));
        out = mat_add(out, scaled(pw, coef));
    }
    return out;
}

template <class T>
UTMat<T> bch_product(const UTMat<T>& X, const UTMat<T>& Y) {
    if (X.d != Y.d) throw std::invalid_argument("bch_product: dimension mismatch");
    return nil_log(mat_mul(nil_exp(X), nil_exp(Y)));
}

template <class T>
UTMat<T> real_power(const UTMat<T>& g, const T& t) {
    return nil_exp(scaled(nil_log(g), t));
}

template <class T>
UTMat<T> heis_mat(const HeisCoords<T>& c) {
    UTMat<T> g = mat_identity<T>(3);
    g.at(0, 1) = c.x;
    g.at(1, 2) = c.y;
    g.at(0, 2) = c.z;
    return g;
}

template <class T>
HeisCoords<T> heis_coords(const UTMat<T>& g) {
    require_unitriangular(g, "heis_coords");
    if (g.d != 3) throw std::invalid_argument("heis_coords: 3x3 Heisenberg element required");
    return {g.at(0, 1), g.at(1, 2), g.at(0, 2)};
}

template <class T>
std::pair<UTMat<T>, UTMat<T>> heisenberg_reduce(const UTMat<T>& g) {
    HeisCoords<T> c = heis_coords(g);
    T ax = floor_of(c.x), ay = floor_of(c.y);
    T rx = c.x - ax, ry = c.y - ay;
    if (!(rx < T(1))) rx = rx - T(1), ax = ax + T(1);  // double frac can round to 1
    if (!(ry < T(1))) ry = ry - T(1), ay = ay + T(1);
    // (rx,ry,rz)*(ax,ay,az) = (rx+ax, ry+ay, rz+az+rx*ay) must recover g
    T w = c.z - rx * ay;
    T az = floor_of(w);
    T rz = w - az;
    if (!(rz < T(1))) rz = rz - T(1), az = az + T(1);
    return {heis_mat<T>({rx, ry, rz}), heis_mat<T>({ax, ay, az})};
}

Filtration heisenberg_filtration() {
    auto bit = [](int i, int j) { return (uint64_t)1 << (i * 3 + j); };
    Filtration fl;
    fl.degree = 2;
    uint64_t full = bit(0, 1) | bit(1, 2) | bit(0, 2);
    fl.masks = {full, full, bit(0, 2), 0};
    return fl;
}

bool filtration_valid(const Filtration& fl, int d) {
    if (d < 1 || d * d > 64) return false;
    if (fl.degree < 0 || fl.masks.size() != (size_t)fl.degree + 2) return false;
    uint64_t upper = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) upper |= (uint64_t)1 << (i * d + j);
    for (uint64_t m : fl.masks)
        if (m & ~upper) return false;  // only strictly-upper coordinates
    if (fl.masks[0] != fl.masks[1]) return false;
    for (size_t s = 0; s + 1 < fl.masks.size(); ++s)
        if (fl.masks[s + 1] & ~fl.masks[s]) return false;  // nesting
    if (fl.masks.back() != 0) return false;
    // bracket closure on basis brackets: [E_ab, E_cd] = d_{bc} E_ad - d_{da} E_cb
    const int top = fl.degree + 1;
    for (int s1 = 0; s1 <= top; ++s1)
        for (int s2 = 0; s2 <= top; ++s2) {
            uint64_t target = fl.masks[(size_t)std::min(s1 + s2, top)];
            for (int a = 0; a < d; ++a)
                for (int b = a + 1; b < d; ++b) {
                    if (!(fl.masks[(size_t)s1] >> (a * d + b) & 1)) continue;
                    for (int c = 0; c < d; ++c)
                        for (int e = c + 1; e < d; ++e) {
                            if (!(fl.masks[(size_t)s2] >> (c * d + e) & 1)) continue;
                            uint64_t br = 0;
                            if (b == c) br |= (uint64_t)1 << (a * d + e);
                            if (e == a) br |= (uint64_t)1 << (c * d + b);
                            if (br & ~target) return false;
                        }
                }
        }
    return true;
}

template <class T>
UTMat<T> eval_polyseq(const NilPolySeq<T>& seq, const T& t) {
    if (!filtration_valid(seq.filt, seq.d))
        throw std::invalid_argument("eval_polyseq: invalid filtration");
    if (seq.coeffs.size() != (size_t)seq.filt.degree + 1)
        throw std::invalid_argument("eval_polyseq: need degree + 1 coefficients");
    for (int j = 0; j <= seq.filt.degree; ++j) {
        const auto& gj = seq.coeffs[(size_t)j];
        require_unitriangular(gj, "eval_polyseq");
        if (gj.d != seq.d) throw std::invalid_argument("eval_polyseq: dimension mismatch");
        UTMat<T> lg = nil_log(gj);
        for (int i = 0; i < seq.d; ++i)
            for (int k = i + 1; k < seq.d; ++k)
                if (!mask_zero(lg.at(i, k)) &&
                    !(seq.filt.masks[(size_t)j] >> (i * seq.d + k) & 1))
                    throw std::invalid_argument(
                        "eval_polyseq: coefficient outside its filtration subgroup");
    }
    UTMat<T> out = seq.coeffs[0];
    for (int j = 1; j <= seq.filt.degree; ++j)
        out = mat_mul(out, real_power(seq.coeffs[(size_t)j], binom_scalar(t, j)));
    return out;
}

double bump(double u) { return (1.0 - std::cos(kTwoPi * u)) / 2.0; }

cplx eval_nilsequence(const NilCharacter& F, const NilPolySeq<double>& seq, long long n) {
    if (seq.d != 3)
        throw std::invalid_argument("eval_nilsequence: 3x3 Heisenberg sequences only");
    auto [h, gamma] = heisenberg_reduce(eval_polyseq(seq, (double)n));
    (void)gamma;
    HeisCoords<double> c = heis_coords(h);
    switch (F.kind) {
        case NilCharacter::Kind::horizontal:
            return e2pi((double)F.a * c.x + (double)F.b * c.y);
        case NilCharacter::Kind::vertical_smoothed:
            return e2pi((double)F.m * c.z) * (bump(c.x) * bump(c.y));
    }
    throw std::invalid_argument("eval_nilsequence: undefined builtin");
}

namespace {

// sum of term(n) for lo <= n < hi over fixed chunks, combined in order
template <class Term>
cplx chunked_sum(long long lo, long long hi, Term&& term) {
    const long long kChunk = 1024;
    const long long n = hi - lo;
    const long long nchunks = n <= 0 ? 0 : (n + kChunk - 1) / kChunk;
    std::vector<cplx> partial((size_t)nchunks);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < nchunks; ++c) {
        const long long a = lo + c * kChunk, b = std::min(hi, a + kChunk);
        KahanCplx s;
        for (long long i = a; i < b; ++i) s.add(term(i));
        partial[(size_t)c] = s.sum();
    }
    KahanCplx total;
    for (const cplx& p : partial) total.add(p);
    return total.sum();
}

}  // namespace

cplx discorrelation(const FunctionTable& f, long long x, long long H, const NilCharacter& F,
                    const NilPolySeq<double>& seq) {
    if (H < 1) throw std::invalid_argument("discorrelation: H >= 1 required");
    if (!f.covers(x, x + H))
        throw std::invalid_argument("discorrelation: window outside the table");
    cplx s = chunked_sum(x, x + H, [&](long long n) {
        return f.at(n) * std::conj(eval_nilsequence(F, seq, n));
    });
    return s / (double)H;
}

double nilchar_mean(const NilCharacter& F) {
    switch (F.kind) {
        case NilCharacter::Kind::horizontal:
            return F.a == 0 && F.b == 0 ? 1.0 : 0.0;
        case NilCharacter::Kind::vertical_smoothed: {
            if (F.m != 0) return 0.0;
            // periodic trapezoid quadrature, exact for the degree-1 trig bump
            const int kq = 64;
            Kahan q;
            for (int i = 0; i < kq; ++i) q.add(bump((double)i / kq));
            double m1 = q.sum() / kq;
            return m1 * m1;
        }
    }
    throw std::invalid_argument("nilchar_mean: undefined builtin");
}

double equidistribution_defect(const NilPolySeq<double>& seq, const NilCharacter& F,
                               long long N) {
    if (N < 1) throw std::invalid_argument("equidistribution_defect: N >= 1 required");
    cplx s = chunked_sum(1, N + 1, [&](long long n) { return eval_nilsequence(F, seq, n); });
    return std::abs(s / (double)N - nilchar_mean(F));
}

template UTMat<double> mat_identity<double>(int);
template UTMat<Rat> mat_identity<Rat>(int);
template UTMat<double> mat_mul<double>(const UTMat<double>&, const UTMat<double>&);
template UTMat<Rat> mat_mul<Rat>(const UTMat<Rat>&, const UTMat<Rat>&);
template UTMat<double> mat_inverse<double>(const UTMat<double>&);
template UTMat<Rat> mat_inverse<Rat>(const UTMat<Rat>&);
template UTMat<double> nil_exp<double>(const UTMat<double>&);
template UTMat<Rat> nil_exp<Rat>(const UTMat<Rat>&);
template UTMat<double> nil_log<double>(const UTMat<double>&);
template UTMat<Rat> nil_log<Rat>(const UTMat<Rat>&);
template UTMat<double> bch_product<double>(const UTMat<double>&, const UTMat<double>&);
template UTMat<Rat> bch_product<Rat>(const UTMat<Rat>&, const UTMat<Rat>&);
template UTMat<double> real_power<double>(const UTMat<double>&, const double&);
template UTMat<Rat> real_power<Rat>(const UTMat<Rat>&, const Rat&);
template UTMat<double> heis_mat<double>(const HeisCoords<double>&);
template UTMat<Rat> heis_mat<Rat>(const HeisCoords<Rat>&);
template HeisCoords<double> heis_coords<double>(const UTMat<double>&);
template HeisCoords<Rat> heis_coords<Rat>(const UTMat<Rat>&);
template std::pair<UTMat<double>, UTMat<double>> heisenberg_reduce<double>(
    const UTMat<double>&);
template std::pair<UTMat<Rat>, UTMat<Rat>> heisenberg_reduce<Rat>(const UTMat<Rat>&);
template UTMat<double> eval_polyseq<double>(const NilPolySeq<double>&, const double&);
template UTMat<Rat> eval_polyseq<Rat>(const NilPolySeq<Rat>&, const Rat&);

}  // namespace ulab
