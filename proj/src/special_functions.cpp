#include "ras/special_functions.hpp"

#include <cmath>
#include <limits>

namespace ras {
namespace detail {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kLn2Pi = 1.8378770664093454835606594728112;

// Parameters at or above this go through the Stirling-corrected prefactors.
constexpr double kStirlingMin = 30.0;

} // namespace

double log_gamma(double a) {
    // Lanczos, g = 7, 9 terms.
    static const double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,    12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
    if (!(a > 0.0))
        throw std::domain_error("log_gamma requires a > 0");
    if (a >= kStirlingMin) {
        return (a - 0.5) * std::log(a) - a + kLogSqrt2Pi + stirling_correction(a);
    }
    const double x = a - 1.0;
    double s = coef[0];
    for (int i = 1; i < 9; ++i)
        s += coef[i] / (x + i);
    const double t = x + 7.5;
    return kLogSqrt2Pi + (x + 0.5) * std::log(t) - t + std::log(s);
}

double stirling_correction(double a) {
    // Asymptotic series in 1/a; accurate to ~1e-17 for a >= 16.
    const double ia = 1.0 / a;
    const double ia2 = ia * ia;
    return ia * (1.0 / 12.0 +
                 ia2 * (-1.0 / 360.0 +
                        ia2 * (1.0 / 1260.0 +
                               ia2 * (-1.0 / 1680.0 +
                                      ia2 * (1.0 / 1188.0 -
                                             ia2 * (691.0 / 360360.0))))));
}

double log1p_minus_x(double d) {
    if (std::fabs(d) > 0.25)
        return std::log1p(d) - d;
    // -d^2/2 + d^3/3 - d^4/4 + ...
    double term = -d * d;
    double sum = term / 2.0;
    for (int m = 3; m < 64; ++m) {
        term *= -d;
        const double add = term / m;
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum))
            break;
    }
    return sum;
}

namespace {

// q log(q/p) - (q - p), stable near q = p.
double rel_entropy_piece(double q, double p) {
    if (q == 0.0)
        return p;
    const double t = (q - p) / p;
    if (std::fabs(t) <= 0.5) {
        // p * [(1+t) log(1+t) - t] via the series t^2/2 - t^3/6 + t^4/12 - ...
        double term = t * t;
        double sum = term / 2.0;
        for (int m = 3; m < 80; ++m) {
            term *= -t;
            const double add = term / (static_cast<double>(m) * (m - 1));
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum))
                break;
        }
        return p * sum;
    }
    return q * std::log(q / p) - (q - p);
}

} // namespace

double kl_bernoulli(double q, double qc, double p, double pc) {
    return rel_entropy_piece(q, p) + rel_entropy_piece(qc, pc);
}

double ln_gamma_prefactor(double a, double x) {
    if (x <= 0.0)
        return -std::numeric_limits<double>::infinity();
    if (a < kStirlingMin)
        return a * std::log(x) - x - log_gamma(a);
    const double d = (x - a) / a;
    return a * log1p_minus_x(d) + 0.5 * std::log(a) - 0.5 * kLn2Pi -
           stirling_correction(a);
}

double ln_beta_prefactor(double a, double b, double x, double xc) {
    if (x <= 0.0 || xc <= 0.0)
        return -std::numeric_limits<double>::infinity();
    if (a >= kStirlingMin && b >= kStirlingMin) {
        const double n = a + b;
        const double ln_half = 0.5 * (std::log(a) + std::log(b) - std::log(n) - kLn2Pi);
        return -n * kl_bernoulli(a / n, b / n, x, xc) + ln_half -
               stirling_correction(a) - stirling_correction(b) +
               stirling_correction(n);
    }
    if (b >= kStirlingMin) {
        // a small, b large: log Gamma(a+b) - log Gamma(b) without cancellation.
        const double ratio = (b - 0.5) * std::log1p(a / b) + a * std::log(a + b) - a +
                             stirling_correction(a + b) - stirling_correction(b);
        return a * std::log(x) + b * std::log(xc) - log_gamma(a) + ratio;
    }
    if (a >= kStirlingMin)
        return ln_beta_prefactor(b, a, xc, x);
    return a * std::log(x) + b * std::log(xc) -
           (log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double inv_normal_cdf(double u) {
    // Acklam's rational approximation (~1.1e-9 relative); seeds only.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("inv_normal_cdf requires u in (0, 1)");
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

namespace {

constexpr int kMaxSeriesIter = 200000;
constexpr int kMaxCfIter = 200000;
constexpr double kCfEps = 3e-16;
constexpr double kFpMin = 1e-300;

// Lower incomplete gamma by its series, for x < shape + 1. All terms are
// positive; Kahan compensation keeps long sums (shape ~ 1e7) at full accuracy.
double igamma_lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double comp = 0.0;
    double ap = a;
    for (int i = 0; i < kMaxSeriesIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < sum * 1e-17)
            return sum * std::exp(detail::ln_gamma_prefactor(a, x));
    }
    throw std::runtime_error("incomplete gamma series did not converge");
}

// Upper incomplete gamma by continued fraction (modified Lentz), for
// x >= shape + 1.
double igamma_upper_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxCfIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kCfEps)
            return h * std::exp(detail::ln_gamma_prefactor(a, x));
    }
    throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

// (P, want_lower) dispatch; returns the requested tail.
double igamma(double a, double x, bool lower) {
    if (!(a > 0.0))
        throw std::domain_error("incomplete gamma requires shape > 0");
    if (!(x >= 0.0))
        throw std::domain_error("incomplete gamma requires x >= 0");
    if (x == 0.0)
        return lower ? 0.0 : 1.0;
    if (x < a + 1.0) {
        const double p = igamma_lower_series(a, x);
        return lower ? std::min(p, 1.0) : std::max(1.0 - p, 0.0);
    }
    const double q = igamma_upper_cf(a, x);
    return lower ? std::max(1.0 - q, 0.0) : std::min(q, 1.0);
}

// Continued fraction for I_x(a, b) (modified Lentz); caller guarantees x is
// below the crossover so convergence is geometric.
double ibeta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin)
        d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxCfIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kCfEps)
            return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// I_x(a, b) with xc = 1 - x supplied exactly by the caller.
double ibeta_core(double x, double xc, double a, double b) {
    if (x <= 0.0)
        return 0.0;
    if (xc <= 0.0)
        return 1.0;
    if (x <= (a + 1.0) / (a + b + 2.0)) {
        const double pre = std::exp(detail::ln_beta_prefactor(a, b, x, xc));
        return std::min(pre * ibeta_cf(a, b, x) / a, 1.0);
    }
    const double pre = std::exp(detail::ln_beta_prefactor(b, a, xc, x));
    return std::max(1.0 - pre * ibeta_cf(b, a, xc) / b, 0.0);
}

void check_beta_args(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("incomplete beta requires a > 0 and b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("incomplete beta requires x in [0, 1]");
}

} // namespace

Probability reg_inc_gamma_lower(double shape, double x) {
    return Probability(igamma(shape, x, true));
}

double reg_inc_gamma_upper(double shape, double x) {
    return igamma(shape, x, false);
}

Probability reg_inc_beta(double x, double a, double b) {
    check_beta_args(x, a, b);
    return Probability(ibeta_core(x, 1.0 - x, a, b));
}

double reg_inc_beta_upper(double x, double a, double b) {
    check_beta_args(x, a, b);
    return ibeta_core(1.0 - x, x, b, a);
}

Probability gamma_cdf(double x, const GammaParams& params) {
    if (!(x >= 0.0))
        throw std::domain_error("gamma_cdf requires x >= 0");
    return reg_inc_gamma_lower(params.shape, params.rate * x);
}

double gamma_cdf_upper(double x, const GammaParams& params) {
    if (!(x >= 0.0))
        throw std::domain_error("gamma_cdf_upper requires x >= 0");
    return reg_inc_gamma_upper(params.shape, params.rate * x);
}

namespace {

// F(x) - u at unit rate, evaluated on whichever side keeps the small tail's
// relative accuracy.
double quantile_residual(double a, double x, double u) {
    if (u <= 0.5)
        return igamma(a, x, true) - u;
    return (1.0 - u) - igamma(a, x, false);
}

double gamma_quantile_unit_rate(double u, double a, double guess) {
    double x = guess;
    if (!(x > 0.0) || !std::isfinite(x)) {
        // Wilson-Hilferty start.
        const double z = detail::inv_normal_cdf(u);
        const double w = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
        x = a * w * w * w;
        if (!(x > 0.0))
            x = std::exp((std::log(u) + detail::log_gamma(a + 1.0)) / a);
        if (!(x > 0.0) || !std::isfinite(x))
            x = a;
    }

    // Bracket the root geometrically, then safeguarded Newton.
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double r = quantile_residual(a, x, u);
    if (r >= 0.0)
        hi = x;
    else
        lo = x;
    for (int i = 0; i < 2200 && (!(lo > 0.0) || !std::isfinite(hi)); ++i) {
        if (!std::isfinite(hi)) {
            double cand = lo * 2.0;
            if (quantile_residual(a, cand, u) >= 0.0)
                hi = cand;
            else
                lo = cand;
        } else {
            double cand = hi * 0.5;
            if (cand == 0.0)
                return 0.0;
            if (quantile_residual(a, cand, u) < 0.0)
                lo = cand;
            else
                hi = cand;
        }
    }
    if (!(lo > 0.0) || !std::isfinite(hi))
        throw std::runtime_error("gamma_quantile failed to bracket the root");

    x = std::min(std::max(x, lo), hi);
    for (int it = 0; it < 200; ++it) {
        r = quantile_residual(a, x, u);
        if (r == 0.0)
            break;
        if (r > 0.0)
            hi = x;
        else
            lo = x;
        const double pdf = std::exp(detail::ln_gamma_prefactor(a, x)) / x;
        double next;
        if (pdf > 0.0 && std::isfinite(pdf)) {
            next = x - r / pdf;
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        const double step = std::fabs(next - x);
        x = next;
        if (step <= 2.0 * std::fabs(x) * std::numeric_limits<double>::epsilon())
            break;
        if (hi - lo <= 4.0 * std::fabs(x) * std::numeric_limits<double>::epsilon())
            break;
    }
    return x;
}

} // namespace

double gamma_quantile(double u, const GammaParams& params) {
    return gamma_quantile(u, params, std::numeric_limits<double>::quiet_NaN());
}

double gamma_quantile(double u, const GammaParams& params, double initial_guess) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("gamma_quantile requires u in (0, 1)");
    const double guess_unit = initial_guess * params.rate;
    return gamma_quantile_unit_rate(u, params.shape, guess_unit) / params.rate;
}

Probability negbinom_trials_cdf(double t, const NegBinTrialsParams& params) {
    const double tf = std::floor(t);
    if (tf < static_cast<double>(params.k))
        return Probability(0.0);
    if (params.p == 1.0)
        return Probability(1.0);
    // P(T_k <= t) = P(Bin(floor(t), p) >= k) = I_p(k, floor(t) - k + 1)
    const double b = tf - static_cast<double>(params.k) + 1.0;
    return Probability(ibeta_core(params.p, 1.0 - params.p,
                                  static_cast<double>(params.k), b));
}

double negbinom_trials_cdf_upper(double t, const NegBinTrialsParams& params) {
    const double tf = std::floor(t);
    if (tf < static_cast<double>(params.k))
        return 1.0;
    if (params.p == 1.0)
        return 0.0;
    const double b = tf - static_cast<double>(params.k) + 1.0;
    return ibeta_core(1.0 - params.p, params.p, b, static_cast<double>(params.k));
}

} // namespace ras
