#include "ulab/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ulab {

FftPlan::FftPlan(size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("FftPlan: size must be a power of two");
    rev_.resize(n);
    int lg = 0;
    while ((size_t)1 << lg < n) ++lg;
    for (size_t i = 0; i < n; ++i) {
        size_t r = 0;
        for (int b = 0; b < lg; ++b)
            if (i >> b & 1) r |= (size_t)1 << (lg - 1 - b);
        rev_[i] = r;
    }
    tw_.reserve(n > 1 ? n - 1 : 0);
    for (size_t len = 2; len <= n; len <<= 1)
        for (size_t j = 0; j < len / 2; ++j) {
            double ang = -kTwoPi * (double)j / (double)len;
            tw_.push_back(cplx(std::cos(ang), std::sin(ang)));
        }
}

void FftPlan::forward(cplx* a) const {
    for (size_t i = 0; i < n_; ++i)
        if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    size_t toff = 0;
    for (size_t len = 2; len <= n_; len <<= 1) {
        size_t half = len / 2;
        const cplx* w = tw_.data() + toff;
        for (size_t blk = 0; blk < n_; blk += len) {
            cplx* lo = a + blk;
            cplx* hi = lo + half;
            for (size_t j = 0; j < half; ++j) {
                cplx u = lo[j];
                cplx v = hi[j] * w[j];
                lo[j] = u + v;
                hi[j] = u - v;
            }
        }
        toff += half;
    }
}

}  // namespace ulab
