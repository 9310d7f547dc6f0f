#include "attnspec/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace attnspec {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

double rational7(const double* num, const double* den, double r) {
    double p = num[7], q = den[7];
    for (int i = 6; i >= 0; --i) {
        p = p * r + num[i];
        q = q * r + den[i];
    }
    return p / q;
}

}  // namespace

// Wichura, Applied Statistics 37 (1988), algorithm AS 241, PPND16 constants.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0, 1)");

    static const double a[8] = {
        3.3871328727963666080e+0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
        1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
        3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static const double b[8] = {
        1.0,                      4.2313330701600911252e+1, 6.8718700749205790830e+2,
        5.3941960214247511077e+3, 2.1213794301586595867e+4, 3.9307895800092710610e+4,
        2.8729085735721942674e+4, 5.2264952788528545610e+3};
    static const double c[8] = {
        1.42343711074968357734e+0, 4.63033784615654529590e+0, 5.76949722146069140550e+0,
        3.64784832476320460504e+0, 1.27045825245236838258e+0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {
        1.0,                       2.05319162663775882187e+0, 1.67638483018380384940e+0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static const double e[8] = {
        6.65790464350110377720e+0, 5.46378491116411436990e+0, 1.78482653991729133580e+0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {
        1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * rational7(a, b, r);
    }
    double r = (q < 0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        value = rational7(c, d, r - 1.6);
    } else {
        value = rational7(e, f, r - 5.0);
    }
    return (q < 0) ? -value : value;
}

double gaussian_even_moment(int r) {
    if (r < 0) throw std::invalid_argument("gaussian_even_moment: r < 0");
    if (r > 150) throw std::overflow_error("gaussian_even_moment: double-factorial overflow");
    double m = 1.0;
    for (int j = 1; j <= r; ++j) m *= 2.0 * j - 1.0;
    return m;
}

double taylor_polynomial(double y, int n) {
    if (n < 1) throw std::invalid_argument("taylor_polynomial: n < 1");
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= y / k;
        sum += term;
    }
    return sum;
}

double expected_taylor_mean(double beta, int n) {
    if (n < 1) throw std::invalid_argument("expected_taylor_mean: n < 1");
    const double lambda = 0.5 * beta * beta;
    double term = 1.0, sum = 1.0;
    for (int r = 1; 2 * r <= n - 1; ++r) {
        term *= lambda / r;
        sum += term;
    }
    return sum;
}

}  // namespace attnspec
