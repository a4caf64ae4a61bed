#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "error.hpp"

namespace gapflood {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

/// Regularised incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw ContractViolation("incomplete beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-tailed p-value of Student's t with df degrees of freedom.
inline double student_t_two_tailed_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

enum class TTestDegeneracy { none, identical, zero_variance };

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t df = 0;
    TTestDegeneracy degeneracy = TTestDegeneracy::none;
};

/// Paired two-tailed t-test on a - b.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractViolation("paired t-test: samples differ in length");
    if (a.size() < 2) throw ContractViolation("paired t-test: need at least two pairs");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        all_zero = all_zero && d == 0.0;
        ss += (d - mean) * (d - mean);
    }
    TTestResult r;
    r.df = n - 1;
    if (all_zero) {
        r.degeneracy = TTestDegeneracy::identical;
        return r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Differences that agree to rounding noise count as zero variance.
    if (sd <= 1e-14 * std::abs(mean)) {
        r.degeneracy = TTestDegeneracy::zero_variance;
        r.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.p = 0.0;
        return r;
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_tailed_p(r.t, static_cast<double>(r.df));
    return r;
}

} // namespace gapflood
