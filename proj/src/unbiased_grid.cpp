#include "ras/unbiased_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ras {

namespace {

double positive_u(double u) {
    return u > 0.0 ? u : std::numeric_limits<double>::denorm_min();
}

// Kahan mean of 1 / gamma_quantile(u_i, shape, 1) over an increasing sequence
// of uniforms, warm-starting each quantile from the previous one.
double mean_inverse_quantile(const std::vector<double>& us, double shape) {
    const GammaParams params(shape, 1.0);
    double sum = 0.0;
    double comp = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const double u : us) {
        prev = gamma_quantile(positive_u(u), params, prev);
        const double y = 1.0 / prev - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(us.size());
}

} // namespace

GridSpec make_grid(std::uint64_t n, double shift) {
    if (n < 1)
        throw std::domain_error("make_grid requires n >= 1");
    if (!(shift >= 0.0 && shift < 1.0))
        throw std::domain_error("make_grid requires shift in [0, 1)");
    GridSpec grid;
    grid.n = n;
    grid.shift = shift;
    grid.points.resize(n);
    const double dn = static_cast<double>(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double u = (static_cast<double>(i) + shift) / dn;
        if (u >= 1.0)
            u = std::nextafter(1.0, 0.0);
        grid.points[i] = u;
    }
    return grid;
}

double unbiased_estimate(std::uint64_t m_shape, std::uint64_t k,
                         const GridSpec& grid) {
    if (m_shape < 1)
        throw std::domain_error("unbiased_estimate requires M >= 1");
    if (k < 2)
        throw std::domain_error("unbiased_estimate requires k >= 2");
    const double mean =
        mean_inverse_quantile(grid.points, static_cast<double>(m_shape));
    return (static_cast<double>(k) - 1.0) * mean;
}

RatioBound ratio_bound(std::uint64_t m_shape, std::uint64_t n, double delta1) {
    if (m_shape < 1)
        throw std::domain_error("ratio_bound requires M >= 1");
    if (n < 1)
        throw std::domain_error("ratio_bound requires n >= 1");
    if (!(delta1 > 0.0) || !(static_cast<double>(n) * delta1 < 1.0))
        throw std::domain_error("ratio_bound requires 0 < n * delta1 < 1");

    const double dn = static_cast<double>(n);
    const double shape = static_cast<double>(m_shape);
    std::vector<double> low(n);
    std::vector<double> high(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double base = static_cast<double>(i) / dn;
        low[i] = base + delta1 / 2.0;
        high[i] = base + 1.0 / dn - delta1 / 2.0;
    }
    const double mean_low = mean_inverse_quantile(low, shape);
    const double mean_high = mean_inverse_quantile(high, shape);
    RatioBound bound;
    bound.m_shape = m_shape;
    bound.n = n;
    bound.delta1 = delta1;
    bound.x = std::max(std::fabs(1.0 - shape * mean_low),
                       std::fabs(1.0 - shape * mean_high));
    return bound;
}

} // namespace ras
