#pragma once

#include <cstddef>
#include <vector>

#include "ulab/common.hpp"

namespace ulab {

// Iterative radix-2 FFT with precomputed bit-reversal and twiddles; the plan
// is built once and reused across many transforms (hot loop of the phase
// grid search).  forward() computes A[m] = sum_n a[n] e(-2 pi i m n / N)
// in place.
class FftPlan {
  public:
    explicit FftPlan(size_t n);
    size_t size() const { return n_; }
    void forward(cplx* a) const;

  private:
    size_t n_ = 0;
    std::vector<size_t> rev_;
    std::vector<cplx> tw_;  // twiddles for stage len=2^s at offset 2^{s-1}-1
};

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace ulab
