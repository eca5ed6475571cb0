#include "bnprd/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "special_fn";

[[noreturn]] void domain_error(const char* what) {
    throw Error(ErrorCode::DomainError, kModule, what);
}

// B_{2k} / (2k (2k-1)) for k = 1..8
constexpr double kStirling[] = {
    1.0 / 12.0,           -1.0 / 360.0,  1.0 / 1260.0,          -1.0 / 1680.0,
    1.0 / 1188.0,         -691.0 / 360360.0, 1.0 / 156.0,       -3617.0 / 122400.0,
};

double stirling_log_gamma(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    double power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error(ErrorCode::NumericalBreakdown, kModule,
                "incomplete beta continued fraction did not converge");
}

// Tails of Beta(a, b) at x where y = 1 - x is supplied separately so that
// callers holding an exact complement do not lose it to cancellation.
BetaTails beta_tails_xy(double a, double b, double x, double y) {
    if (x <= 0.0) return {0.0, 1.0};
    if (y <= 0.0) return {1.0, 0.0};
    const double log_front = a * std::log(x) + b * std::log(y) + log_gamma(a + b) -
                             log_gamma(a) - log_gamma(b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double lower = std::clamp(front * beta_continued_fraction(a, b, x) / a, 0.0, 1.0);
        return {lower, 1.0 - lower};
    }
    const double upper = std::clamp(front * beta_continued_fraction(b, a, y) / b, 0.0, 1.0);
    return {1.0 - upper, upper};
}

void check_beta_args(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        domain_error("incomplete beta requires a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) domain_error("incomplete beta requires x in [0, 1]");
}

// Two-sample sup-distance between ECDFs of two sorted samples.
double ks_distance_sorted(std::span<const double> a, std::span<const double> b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_exact_p(std::span<const double> s1, std::span<const double> s2, double d_obs) {
    std::vector<double> pooled(s1.begin(), s1.end());
    pooled.insert(pooled.end(), s2.begin(), s2.end());
    std::sort(pooled.begin(), pooled.end());
    const auto n = static_cast<unsigned>(pooled.size());
    const auto m1 = static_cast<unsigned>(s1.size());
    const double inv1 = 1.0 / m1;
    const double inv2 = 1.0 / (n - m1);

    std::uint64_t total = 0;
    std::uint64_t extreme = 0;
    const std::uint64_t limit = std::uint64_t{1} << n;
    // Gosper's hack over all n-bit masks with m1 bits set.
    for (std::uint64_t mask = (std::uint64_t{1} << m1) - 1; mask < limit;) {
        double c1 = 0.0;
        double c2 = 0.0;
        double d = 0.0;
        for (unsigned k = 0; k < n; ++k) {
            if (mask >> k & 1U) c1 += inv1;
            else c2 += inv2;
            if (k + 1 == n || pooled[k + 1] != pooled[k]) d = std::max(d, std::fabs(c1 - c2));
        }
        ++total;
        if (d >= d_obs - 1e-12) ++extreme;
        const std::uint64_t low = mask & (~mask + 1);
        const std::uint64_t ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

double log_gamma(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) domain_error("log_gamma requires finite z > 0");
    if (z >= 10.0) return stirling_log_gamma(z);
    double product = 1.0;
    double x = z;
    while (x < 10.0) {
        product *= x;
        x += 1.0;
    }
    return stirling_log_gamma(x) - std::log(product);
}

BetaTails beta_tails(double a, double b, double x) {
    check_beta_args(a, b, x);
    return beta_tails_xy(a, b, x, 1.0 - x);
}

double reg_inc_beta(double a, double b, double x) { return beta_tails(a, b, x).lower; }

double t_p_two_sided(double t, double df) {
    if (!(df > 0.0) || std::isnan(t)) domain_error("t p-value requires df > 0 and a real t");
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    const double denom = df + t2;
    // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    const BetaTails tails = beta_tails_xy(0.5 * df, 0.5, df / denom, t2 / denom);
    return std::clamp(tails.lower, 0.0, 1.0);
}

double f_p_two_sided(double f, double d1, double d2) {
    if (!(f > 0.0) || !(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
        domain_error("F p-value requires f > 0, d1 > 0, d2 > 0");
    }
    if (std::isinf(f)) return 0.0;
    // p(f, d1, d2) == p(1/f, d2, d1); evaluate with the statistic >= 1.
    if (f < 1.0) {
        f = 1.0 / f;
        std::swap(d1, d2);
    }
    const double num = d1 * f;
    const double denom = num + d2;
    const BetaTails tails = beta_tails_xy(0.5 * d1, 0.5 * d2, num / denom, d2 / denom);
    return std::min(1.0, 2.0 * std::min(tails.lower, tails.upper));
}

double kolmogorov_q(double lambda) {
    if (std::isnan(lambda)) domain_error("kolmogorov_q requires a real argument");
    if (lambda <= 0.0) return 1.0;
    constexpr double kTerm = 1e-12;
    if (lambda < 1.18) {
        // Jacobi-theta form, rapidly convergent for small lambda:
        // Q = 1 - sqrt(2 pi)/lambda * sum exp(-(2j-1)^2 pi^2 / (8 lambda^2))
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int j = 1; j < 100; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * c);
            sum += term;
            if (term < kTerm * sum) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j < 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < kTerm) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> sample1, std::span<const double> sample2,
                       KsMethod method) {
    if (sample1.empty() || sample2.empty()) {
        throw Error(ErrorCode::EmptySample, kModule, "KS test requires two non-empty samples");
    }
    std::vector<double> a(sample1.begin(), sample1.end());
    std::vector<double> b(sample2.begin(), sample2.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    KsResult result;
    result.d = ks_distance_sorted(a, b);
    if (a.size() < 2 || b.size() < 2) return result;

    if (method == KsMethod::ExactPermutation && a.size() <= kExactKsMaxSide &&
        b.size() <= kExactKsMaxSide) {
        result.p = ks_exact_p(a, b, result.d);
        result.exact = true;
        return result;
    }
    const double m1 = static_cast<double>(a.size());
    const double m2 = static_cast<double>(b.size());
    const double root_ne = std::sqrt(m1 * m2 / (m1 + m2));
    result.p = kolmogorov_q((root_ne + 0.12 + 0.11 / root_ne) * result.d);
    return result;
}

double sample_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorCode::EmptySample, kModule, "quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) domain_error("quantile probability must lie in [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace bnprd
