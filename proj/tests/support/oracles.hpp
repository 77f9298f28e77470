#pragma once

// Independent oracles for the numerical kernels. Everything here is
// deliberately brute force and kept free of the library's own evaluation
// paths: Poisson mass sums for the integer-shape incomplete gamma, direct
// negative binomial mass sums, and extended-precision closed forms. Long
// double on x86-64 carries a 64-bit mantissa (~1.1e-19), several digits
// beyond every tolerance asserted against these oracles.

#include <cmath>
#include <cstdint>

namespace oracle {

// P(shape, x) for integer shape via the Poisson identity
// P(a, x) = 1 - sum_{j=0}^{a-1} e^-x x^j / j!, summed in long double with
// Kahan compensation.
inline long double igamma_lower_integer_shape(std::int64_t shape, long double x) {
    long double term = std::exp(-x); // j = 0
    long double sum = 0.0L;
    long double comp = 0.0L;
    for (std::int64_t j = 0; j < shape; ++j) {
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        term *= x / static_cast<long double>(j + 1);
    }
    return 1.0L - sum;
}

// P(T_k(p) <= t) by summing the trials-parameterization mass
// f(j) = C(j-1, k-1) p^k (1-p)^(j-k) for j = k..floor(t).
inline long double negbin_trials_cdf_bruteforce(std::int64_t t, std::int64_t k,
                                                long double p) {
    const auto tf = static_cast<std::int64_t>(std::floor(static_cast<double>(t)));
    if (tf < k)
        return 0.0L;
    long double mass = std::pow(p, static_cast<long double>(k)); // j = k
    long double sum = mass;
    const long double q = 1.0L - p;
    for (std::int64_t j = k; j < tf; ++j) {
        // f(j+1) = f(j) * j / (j - k + 1) * (1 - p)
        mass *= static_cast<long double>(j) / static_cast<long double>(j - k + 1) * q;
        sum += mass;
    }
    return sum;
}

// The tilting constant evaluated in extended precision straight from its
// closed form.
inline long double tilt_value_ld(long double epsilon) {
    return 2.0L * epsilon /
           ((1.0L - epsilon * epsilon) *
            std::log(1.0L + 2.0L * epsilon / (1.0L - epsilon)));
}

// Reference values computed with mpmath at 40 significant digits; the
// generator script is tests/oracles/gen_reference.py.
namespace mpmath_ref {

// tilt_value
constexpr double tilt_0_01 = 1.000066672444975711482747;
constexpr double tilt_0_1 = 1.006724980719994522774207;
constexpr double tilt_0_5 = 1.213652302169116524818987;

// reg_inc_gamma_lower(shape, x)
constexpr double p_0_5__0_25 = 0.5204998778130465376827467;
constexpr double p_10__9_5 = 0.4781739777627925891141272;
constexpr double p_661__661 = 0.5051723954280856757517184;
constexpr double p_1e4__1e4 = 0.5013298083399552003827423;
constexpr double p_1e4__9900 = 0.1586511921935646569571043;
constexpr double p_1e5__100500 = 0.9428967300239712886043625;
constexpr double p_1e7__1e7 = 0.5000420522087236983337562;
constexpr double p_1e7__999e4 = 0.0007801532152520486977694024;
constexpr double p_239268__240000 = 0.9326250194612285782049827;
constexpr double p_3__1e_3 = 1.665417166527807638454355e-10;
constexpr double p_5__40 = 0.9999999999994979535681171;
constexpr double p_2__1 = 0.2642411176571153568089525;

// GBAS tails at k = 661, eps = 0.1, rate (k-1)/c_tilt:
// x_hi = 660/c/(0.9), x_lo = 660/c/(1.1)
constexpr double gbas661_x_hi = 728.4346245276087154153748;
constexpr double gbas661_x_lo = 595.9919655225889489762157;
constexpr double gbas661_upper_at_x_hi = 0.005362633185631568070716969;
constexpr double gbas661_lower_at_x_lo = 0.004614632894456992054589227;

// reg_inc_beta(x, a, b)
constexpr double i_0_3__2_5__3_5 = 0.2967529892956663783234936;
constexpr double i_0_0777__1901__22987 = 0.7838768916316409493325467;
constexpr double i_0_0805__191853__2170000 = 1.923361905448662e-05;
constexpr double i_0_0793__191853__2170000 = 3.90271963975683e-28;
constexpr double i_0_08123__191853__2170000 = 0.5005685804573203776266873;

// negbinom_trials_cdf(t, k, p)
constexpr double nb_900__413__0_47 = 0.758314356329057029072978;
constexpr double nb_5000__661__0_141 = 0.9655991631464285872151498;

// gamma_quantile(u, shape, rate 1)
constexpr double q_0_5000005__1e4 = 9999.666793971024665248073;
constexpr double q_5em9__1e4 = 9437.499299935999007149774;
constexpr double q_1m5em9__1e4 = 10583.72735058155414623504;
constexpr double q_0_3__7_7 = 6.041021336362764847736178;
constexpr double q_1em8__1 = 1.000000005000000033333334e-8;
constexpr double q_0_225__4 = 2.417772709257737153268847;

} // namespace mpmath_ref

} // namespace oracle
