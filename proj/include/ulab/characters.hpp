#pragma once

#include <vector>

#include "ulab/common.hpp"

namespace ulab {

// Dirichlet character mod q, stored as a value table on [0, q).
// index is the position in the dual-group enumeration (0 = principal).
struct DirichletCharacter {
    long long q = 1;
    long long index = 0;
    std::vector<cplx> table;  // table[n mod q]; 0 where gcd(n, q) > 1

    cplx operator()(long long n) const {
        long long r = n % q;
        if (r < 0) r += q;
        return table[(size_t)r];
    }
};

long long euler_phi(long long q);

// All phi(q) characters mod q, built via CRT on prime-power factors with
// primitive roots at odd prime powers and the {+-1} x <5> structure at
// powers of 2.  First element is principal.
std::vector<DirichletCharacter> characters_mod(long long q);

}  // namespace ulab
