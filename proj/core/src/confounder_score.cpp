#include "bnprd/confounder_score.hpp"

#include <cmath>
#include <string>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "confounder_score";

std::size_t common_dimension(const CovariateRows& covariates) {
    if (covariates.empty()) throw Error(ErrorCode::EmptyInput, kModule, "no covariate rows");
    const std::size_t p = covariates.front().size();
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        if (covariates[i].size() != p) {
            throw Error(ErrorCode::RaggedCovariates, kModule,
                        "row " + std::to_string(i) + " has " +
                            std::to_string(covariates[i].size()) + " covariates, expected " +
                            std::to_string(p));
        }
        for (double v : covariates[i]) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteValue, kModule,
                            "row " + std::to_string(i) + " has a missing or non-finite covariate");
            }
        }
    }
    return p;
}

}  // namespace

std::size_t BasisSpec::output_dim(std::size_t p) const {
    if (kind == Kind::Linear) return p;
    if (degree < 1) throw Error(ErrorCode::InvalidConfig, kModule, "polynomial degree must be >= 1");
    return p * static_cast<std::size_t>(degree);
}

void BasisSpec::expand(std::span<const double> x, std::span<double> out) const {
    if (kind == Kind::Linear) {
        std::copy(x.begin(), x.end(), out.begin());
        return;
    }
    std::size_t k = 0;
    for (double xi : x) {
        double power = 1.0;
        for (int d = 0; d < degree; ++d) {
            power *= xi;
            out[k++] = power;
        }
    }
}

Eigen::MatrixXd build_design(const CovariateRows& covariates, std::span<const double> r, double r0,
                             const BasisSpec& basis) {
    const std::size_t p = common_dimension(covariates);
    if (r.size() != covariates.size()) {
        throw Error(ErrorCode::RaggedCovariates, kModule, "assignment and covariate row counts differ");
    }
    const std::size_t m = basis.output_dim(p);
    const auto n = static_cast<Eigen::Index>(covariates.size());
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(m + 2));
    std::vector<double> expanded(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ri = r[static_cast<std::size_t>(i)];
        if (!std::isfinite(ri)) throw Error(ErrorCode::NonFiniteValue, kModule, "non-finite r");
        basis.expand(covariates[static_cast<std::size_t>(i)], expanded);
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) design(i, static_cast<Eigen::Index>(j + 1)) = expanded[j];
        design(i, static_cast<Eigen::Index>(m + 1)) = ri >= r0 ? 1.0 : 0.0;
    }
    return design;
}

ScoreFit ridge_fit(const Eigen::MatrixXd& design, std::span<const double> y, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::NonPositiveV, kModule, "ridge parameter v must be positive and finite");
    }
    if (static_cast<Eigen::Index>(y.size()) != design.rows()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "outcome length does not match design rows");
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    if (!yv.allFinite() || !design.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, kModule, "non-finite value in ridge inputs");
    }

    const Eigen::Index q = design.cols();
    Eigen::MatrixXd system = design.transpose() * design;
    system.diagonal().array() += 1.0 / v;
    const Eigen::VectorXd rhs = design.transpose() * yv;

    const Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::SolveFailure, kModule, "Cholesky factorization failed");
    }
    ScoreFit fit{llt.solve(rhs), v};

    const double residual = (system * fit.coefficients - rhs).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + (q > 0 ? rhs.lpNorm<Eigen::Infinity>() : 0.0);
    if (!fit.coefficients.allFinite() || residual > 1e-8 * scale) {
        throw Error(ErrorCode::SolveFailure, kModule,
                    "ridge residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return fit;
}

std::vector<double> confounder_scores(const ScoreFit& fit, const CovariateRows& covariates,
                                      const BasisSpec& basis) {
    const std::size_t p = common_dimension(covariates);
    const std::size_t m = basis.output_dim(p);
    if (static_cast<std::size_t>(fit.coefficients.size()) != m + 2) {
        throw Error(ErrorCode::BasisMismatch, kModule,
                    "fit has " + std::to_string(fit.coefficients.size()) +
                        " coefficients, basis implies " + std::to_string(m + 2));
    }
    std::vector<double> expanded(m);
    std::vector<double> scores;
    scores.reserve(covariates.size());
    for (const auto& row : covariates) {
        basis.expand(row, expanded);
        double s = fit.intercept();
        for (std::size_t j = 0; j < m; ++j) s += fit.coefficients[static_cast<Eigen::Index>(j + 1)] * expanded[j];
        scores.push_back(s);
    }
    return scores;
}

Standardized standardize(const CovariateRows& covariates) {
    const std::size_t p = common_dimension(covariates);
    const auto n = static_cast<double>(covariates.size());
    Standardized out;
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (const auto& row : covariates) mean += row[j];
        mean /= n;
        double ss = 0.0;
        for (const auto& row : covariates) ss += (row[j] - mean) * (row[j] - mean);
        const double sd = covariates.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        if (!(sd > 0.0)) {
            out.dropped.push_back(j);
            continue;
        }
        out.kept.push_back(j);
        out.means.push_back(mean);
        out.sds.push_back(sd);
    }
    out.rows.assign(covariates.size(), std::vector<double>(out.kept.size()));
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        for (std::size_t k = 0; k < out.kept.size(); ++k) {
            out.rows[i][k] = (covariates[i][out.kept[k]] - out.means[k]) / out.sds[k];
        }
    }
    return out;
}

ScoreResult score_covariates(const CovariateRows& covariates, std::span<const double> r, double r0,
                             std::span<const double> y, const BasisSpec& basis, double v) {
    Standardized st = standardize(covariates);
    const Eigen::MatrixXd design = build_design(st.rows, r, r0, basis);
    ScoreFit fit = ridge_fit(design, y, v);
    auto scores = confounder_scores(fit, st.rows, basis);
    return ScoreResult{std::move(scores), std::move(fit), std::move(st.dropped)};
}

}  // namespace bnprd
