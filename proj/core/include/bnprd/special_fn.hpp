#pragma once

#include <optional>
#include <span>

namespace bnprd {

/// log Gamma(z) for z > 0. Stirling series after upward recurrence to z >= 10.
double log_gamma(double z);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// Lower and upper tails of Beta(a, b) at x, each evaluated without
/// subtracting from one where the continued fraction allows it.
struct BetaTails {
    double lower;
    double upper;
};
BetaTails beta_tails(double a, double b, double x);

/// Two-sided Student-t p-value, P(|T_df| >= |t|).
double t_p_two_sided(double t, double df);

/// Two-sided F-test p-value 2 * min(P(F <= f), P(F >= f)), capped at 1.
double f_p_two_sided(double f, double d1, double d2);

/// Kolmogorov survival function Q_KS(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

enum class KsMethod { Asymptotic, ExactPermutation };

struct KsResult {
    double d = 0.0;
    std::optional<double> p;  // absent unless both samples have >= 2 values
    bool exact = false;       // p came from full label enumeration
};

/// Largest side for which ExactPermutation enumerates; larger inputs fall
/// back to the asymptotic p-value.
inline constexpr std::size_t kExactKsMaxSide = 10;

KsResult ks_two_sample(std::span<const double> sample1, std::span<const double> sample2,
                       KsMethod method = KsMethod::Asymptotic);

/// Linear interpolation between order statistics: h = (m-1)p, q = v[floor h] + frac * gap.
double sample_quantile(std::span<const double> sorted, double p);

}  // namespace bnprd
