#pragma once

// Small statistics helpers for the Monte Carlo tests: Kolmogorov-Smirnov
// statistics and a chi-square goodness-of-fit accumulator. Critical values
// are the standard asymptotic ones.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace teststats {

// sup |F_n(x) - F(x)| for a one-sample test.
inline double ks_one_sample(std::vector<double> xs,
                            const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

inline double ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / nx -
                                  static_cast<double>(j) / ny));
    }
    return d;
}

// c(alpha) for the asymptotic KS distribution at the 1% level.
constexpr double kKsCoeff1Percent = 1.628;

inline double ks_one_sample_crit_1pct(std::size_t n) {
    return kKsCoeff1Percent / std::sqrt(static_cast<double>(n));
}

inline double ks_two_sample_crit_1pct(std::size_t n, std::size_t m) {
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return kKsCoeff1Percent * std::sqrt((dn + dm) / (dn * dm));
}

// Chi-square quantile at 0.999 for 20 degrees of freedom (cells {1..20, >=21}).
constexpr double kChi2Df20At999 = 45.3147;

inline double chi_square_stat(const std::vector<double>& observed,
                              const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

} // namespace teststats
