#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bnprd {

/// Covariate basis B(x). Polynomial bases expand each coordinate into
/// powers 1..degree, so m = p * degree; linear is degree 1.
struct BasisSpec {
    enum class Kind { Linear, Polynomial };
    Kind kind = Kind::Linear;
    int degree = 1;

    static BasisSpec linear() { return {}; }
    static BasisSpec polynomial(int degree) { return {Kind::Polynomial, degree}; }

    std::size_t output_dim(std::size_t p) const;
    void expand(std::span<const double> x, std::span<double> out) const;
};

using CovariateRows = std::vector<std::vector<double>>;

/// Ridge coefficients laid out as (intercept, basis terms..., treatment).
struct ScoreFit {
    Eigen::VectorXd coefficients;
    double v = 0.0;

    double intercept() const { return coefficients[0]; }
    double treatment() const { return coefficients[coefficients.size() - 1]; }
};

/// Rows (1, B(x_i), 1(r_i >= r0)).
Eigen::MatrixXd build_design(const CovariateRows& covariates, std::span<const double> r, double r0,
                             const BasisSpec& basis);

/// Solves (I/v + B'B) beta = B'y with a Cholesky factorization.
ScoreFit ridge_fit(const Eigen::MatrixXd& design, std::span<const double> y, double v);

/// beta_0 + beta_x . B(x_i); the treatment term is left out.
std::vector<double> confounder_scores(const ScoreFit& fit, const CovariateRows& covariates,
                                      const BasisSpec& basis);

/// Column standardization applied before basis expansion. Constant columns
/// are dropped and their positions reported.
struct Standardized {
    CovariateRows rows;
    std::vector<std::size_t> kept;
    std::vector<std::size_t> dropped;
    std::vector<double> means;
    std::vector<double> sds;
};

Standardized standardize(const CovariateRows& covariates);

struct ScoreResult {
    std::vector<double> scores;
    ScoreFit fit;
    std::vector<std::size_t> dropped_columns;
};

/// standardize -> build_design -> ridge_fit -> confounder_scores.
ScoreResult score_covariates(const CovariateRows& covariates, std::span<const double> r, double r0,
                             std::span<const double> y, const BasisSpec& basis, double v);

}  // namespace bnprd
