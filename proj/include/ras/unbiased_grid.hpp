#pragma once

// Shifted-grid unbiased estimation: a lattice of n dependent uniforms built
// from a single shift, inverse-transform averaging against the conditional
// Gamma(M, 1) law, and the deterministic endpoint bound on the ratio between
// the unbiased and the plain (k-1)/M estimate.

#include <cstdint>
#include <vector>

#include "ras/special_functions.hpp"

namespace ras {

// points_i = (i + shift) / n, i = 0..n-1; each point marginally uniform,
// consecutive gap exactly 1/n.
struct GridSpec {
    std::uint64_t n = 1;
    double shift = 0.0;
    std::vector<double> points;
};

GridSpec make_grid(std::uint64_t n, double shift);

// (k - 1) * (1/n) * sum_i 1 / F^-1_{Gamma(M,1)}(U_i). Quantiles are evaluated
// in grid order with warm starts (the points are increasing); the average is
// compensated so the reduction order does not show at 1e-15.
double unbiased_estimate(std::uint64_t m_shape, std::uint64_t k,
                         const GridSpec& grid);

struct RatioBound {
    std::uint64_t m_shape = 1;
    std::uint64_t n = 1;
    double delta1 = 0.0;
    double x = 0.0; // |r - 1| <= x whenever the shift lands in its cell's
                    // central 1 - delta1 portion
};

// Endpoint bound over the unshifted grid: the integrand 1/F^-1 is monotone
// decreasing, so per-cell extremes sit at the cell ends offset by delta1/2.
RatioBound ratio_bound(std::uint64_t m_shape, std::uint64_t n, double delta1);

} // namespace ras
