#pragma once

#include <cstdint>
#include <vector>

#include "ulab/common.hpp"
#include "ulab/mult_sieve.hpp"

namespace ulab {

struct GowersResult {
    enum class Method : uint8_t { direct, recursive };
    double value = 0;
    int k = 0;
    long long x = 0;
    long long H = 0;
    Method method = Method::direct;
};

// Unnormalized Gowers U^{k+1}(Z) norm of a finitely supported f: the
// 2^{k+1}-th root of sum_{y,h_1..h_{k+1}} prod_omega C^{|omega|} f(y+omega.h).
// The sum is real by symmetry; an imaginary part (or a negative real part)
// larger than 1e-9 relative to the term mass is reported as a numerical
// failure, smaller negativity is clamped to 0.  budget caps multiply-adds.
double gowers_unnormalized(const std::vector<cplx>& f, int k, double budget = 1e9);
// Exact integer path for {-1,0,1}-valued tables.
double gowers_unnormalized_sign(const std::vector<int8_t>& f, int k, double budget = 1e9);

// Normalized interval norm ||f 1_[x,x+H]|| / ||1_[x,x+H]|| over the H+1
// lattice points of the closed window.
GowersResult gowers_interval(const FunctionTable& f, long long x, long long H, int k,
                             double budget = 1e9);

// Independent oracle via the inductive identity
// ||f||_{U^{k+1}}^{2^{k+1}} = sum_h ||Delta_h f||_{U^k}^{2^k},
// Delta_h f(y) = f(y+h) conj f(y); intended for small supports.
double gowers_recursive(const std::vector<cplx>& f, int k, double budget = 1e9);

// Gowers box norm on Z/NZ with difference multisets C_i - C_i (pairs counted
// with multiplicity): 2^d-th root of the average over x in Z/NZ and
// independent uniform (c,c') in C_i^2 of the alternating product.  U^d on
// Z/NZ is the special case of all boxes equal to the full group.
double box_norm(const std::vector<cplx>& f, const std::vector<std::vector<long long>>& boxes,
                double budget = 1e9);

struct AveragedGowers {
    double mean_norm = 0;
    double stderr_mean = 0;
    std::vector<double> stratum_values;
};

// Stratified estimate of (1/X) int_X^{2X} ||f||_{U^{k+1}[x,x+H]} dx: [X,2X)
// is split into `samples` equal strata, one deterministically seeded x per
// stratum (stream = stratum index), values averaged in fixed stratum order,
// so results are byte-identical for any thread count.  `parallel` selects
// the OpenMP kernel; false is the serial reference.
AveragedGowers averaged_gowers(const FunctionTable& table, long long X, long long H, int k,
                               int samples, uint64_t seed, double budget = 1e9,
                               bool parallel = true);

}  // namespace ulab
