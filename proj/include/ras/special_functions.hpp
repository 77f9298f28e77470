#pragma once

// Regularized incomplete gamma/beta functions and the CDFs and quantiles
// built on them. Everything here is evaluated from scratch in double
// precision: series expansion for the incomplete gamma when x < shape + 1,
// Lentz continued fraction otherwise, and the analogous split for the
// incomplete beta at x = (a+1)/(a+b+2). Prefactors x^a e^-x / Gamma(a) and
// x^a (1-x)^b / B(a,b) are assembled in log space from Stirling-corrected
// pieces so that no large terms cancel; this keeps the tails accurate at
// shapes up to ~1e7.

#include <cstdint>
#include <stdexcept>

namespace ras {

// A probability in [0, 1]; the constructor rejects NaN and out-of-range.
class Probability {
  public:
    Probability() = default;
    explicit Probability(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("Probability outside [0, 1]");
    }
    double value() const { return value_; }
    operator double() const { return value_; }

  private:
    double value_ = 0.0;
};

struct GammaParams {
    double shape = 1.0;
    double rate = 1.0;

    GammaParams(double shape_, double rate_) : shape(shape_), rate(rate_) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::domain_error("GammaParams requires shape > 0 and rate > 0");
    }
};

// Negative binomial in the trials parameterization: T_k counts Bernoulli
// trials up to and including the k-th success, so the support is {k, k+1, ...}.
struct NegBinTrialsParams {
    std::int64_t k = 1;
    double p = 1.0;

    NegBinTrialsParams(std::int64_t k_, double p_) : k(k_), p(p_) {
        if (k < 1)
            throw std::domain_error("NegBinTrialsParams requires k >= 1");
        if (!(p > 0.0 && p <= 1.0))
            throw std::domain_error("NegBinTrialsParams requires 0 < p <= 1");
    }
};

// Regularized lower incomplete gamma P(shape, x) and its complement.
Probability reg_inc_gamma_lower(double shape, double x);
double reg_inc_gamma_upper(double shape, double x);

// Regularized incomplete beta I_x(a, b) and its complement 1 - I_x(a, b),
// each computed on its own side so small tails keep relative accuracy.
Probability reg_inc_beta(double x, double a, double b);
double reg_inc_beta_upper(double x, double a, double b);

// Gamma CDF/upper tail: P(shape, rate * x).
Probability gamma_cdf(double x, const GammaParams& params);
double gamma_cdf_upper(double x, const GammaParams& params);

// Inverse of gamma_cdf for u in (0, 1). Bracketing starts from the
// Wilson-Hilferty normal approximation and is refined by safeguarded Newton
// steps on the CDF until the step is at ulp level. The overload taking
// initial_guess warm-starts from a previous quantile with the same params
// (monotone scans in the shifted-grid module rely on this).
double gamma_quantile(double u, const GammaParams& params);
double gamma_quantile(double u, const GammaParams& params, double initial_guess);

// P(T_k(p) <= floor(t)) = I_p(k, floor(t) - k + 1); 0 below the support.
// Real thresholds are floored here, explicitly. p = 1 is the point mass at k.
Probability negbinom_trials_cdf(double t, const NegBinTrialsParams& params);
double negbinom_trials_cdf_upper(double t, const NegBinTrialsParams& params);

namespace detail {

// Lanczos log-gamma for a > 0 (used directly for small arguments; large
// arguments go through the Stirling form below).
double log_gamma(double a);

// S(a) = log Gamma(a) - [(a - 1/2) log a - a + log(2 pi)/2], for a >= 16.
double stirling_correction(double a);

// log(1 + d) - d without cancellation near d = 0.
double log1p_minus_x(double d);

// Bernoulli relative entropy q log(q/p) + (1-q) log((1-q)/(1-p)), computed
// stably; qc and pc are the exact complements of q and p.
double kl_bernoulli(double q, double qc, double p, double pc);

// log(x^a e^-x / Gamma(a)) and log(x^a (1-x)^b / B(a,b)).
double ln_gamma_prefactor(double a, double x);
double ln_beta_prefactor(double a, double b, double x, double xc);

// Rational approximation to the standard normal quantile (seed values only).
double inv_normal_cdf(double u);

} // namespace detail

} // namespace ras
