#include "bnprd/partition_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <string>
#include <numbers>

#include "bnprd/error.hpp"
#include "bnprd/special_fn.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "partition_model";

double log_n(int n) { return std::log(static_cast<double>(n)); }

}  // namespace

void Hyperparameters::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, kModule, what); };
    if (!(alpha > 0.0) || !std::isfinite(alpha)) bad("alpha must be positive");
    if (!(a > 0.0) || !std::isfinite(a)) bad("a must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) bad("b must be positive");
    if (!beta0.allFinite() || !C.allFinite()) bad("beta0 and C must be finite");
    if (C(0, 1) != C(1, 0)) bad("C must be symmetric");
    if (!(C(0, 0) > 0.0) || !(C.determinant() > 0.0)) bad("C must be positive definite");
}

double log_prior(const OrderedPartition& partition, double alpha, PriorVariant variant) {
    const int n = partition.n();
    const int k = partition.k();
    double sum_log_sizes = 0.0;
    for (int s : partition.sizes()) sum_log_sizes += log_n(s);
    const double log_k_factorial = log_gamma(k + 1.0);

    if (variant == PriorVariant::AlphaTimesK) {
        return std::log(alpha * k) - log_k_factorial - sum_log_sizes;
    }
    // log alpha^[n] = lgamma(alpha + n) - lgamma(alpha)
    const double log_rising = log_gamma(alpha + n) - log_gamma(alpha);
    const double log_n_term = variant == PriorVariant::Normalized ? log_gamma(n + 1.0) : log_n(n);
    return k * std::log(alpha) - log_rising + log_n_term - log_k_factorial - sum_log_sizes;
}

double log_prior_k_term(int k, double alpha, PriorVariant variant) {
    if (variant == PriorVariant::AlphaTimesK) return std::log(alpha * k) - log_gamma(k + 1.0);
    return k * std::log(alpha) - log_gamma(k + 1.0);
}

double log_prior_split_delta(int left, int right, int k, double alpha, PriorVariant variant) {
    const double sizes = log_n(left + right) - log_n(left) - log_n(right);
    return log_prior_k_term(k + 1, alpha, variant) - log_prior_k_term(k, alpha, variant) + sizes;
}

BlockMarginal::BlockMarginal(const Hyperparameters& hyper)
    : hyper_(hyper),
      log_det_c_(std::log(hyper.C.determinant())),
      a_log_b_minus_lgamma_a_(hyper.a * std::log(hyper.b) - log_gamma(hyper.a)) {}

namespace {

struct BlockSolve {
    double log_det_a;
    double v2;
};

BlockSolve solve_block(std::span<const double> x, std::span<const double> r,
                       const Hyperparameters& hyper) {
    if (x.empty() || x.size() != r.size()) {
        throw Error(ErrorCode::NumericalBreakdown, kModule, "block must be non-empty and aligned");
    }
    const double b0 = hyper.beta0[0];
    const double b1 = hyper.beta0[1];
    double s_r = 0.0, s_rr = 0.0, u0 = 0.0, u1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - b0 - b1 * r[i];
        s_r += r[i];
        s_rr += r[i] * r[i];
        u0 += e;
        u1 += r[i] * e;
    }
    // A = C + R'R, factored as L L'.
    const double a00 = hyper.C(0, 0) + static_cast<double>(x.size());
    const double a01 = hyper.C(0, 1) + s_r;
    const double a11 = hyper.C(1, 1) + s_rr;
    if (!(a00 > 0.0)) throw Error(ErrorCode::NumericalBreakdown, kModule, "C + R'R not positive definite");
    const double l00 = std::sqrt(a00);
    const double l10 = a01 / l00;
    const double schur = a11 - l10 * l10;
    if (!(schur > 0.0) || !std::isfinite(schur)) {
        throw Error(ErrorCode::NumericalBreakdown, kModule, "C + R'R not positive definite");
    }
    const double l11 = std::sqrt(schur);
    // beta_hat = A^{-1} u
    const double z0 = u0 / l00;
    const double z1 = (u1 - l10 * z0) / l11;
    const double beta1 = z1 / l11;
    const double beta0 = (z0 - l10 * beta1) / l00;

    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double resid = x[i] - b0 - b1 * r[i] - beta0 - beta1 * r[i];
        rss += resid * resid;
    }
    const double penalty = hyper.C(0, 0) * beta0 * beta0 + 2.0 * hyper.C(0, 1) * beta0 * beta1 +
                           hyper.C(1, 1) * beta1 * beta1;
    const double v2 = rss + penalty;
    if (!std::isfinite(v2) || v2 < -1e-10) {
        throw Error(ErrorCode::NumericalBreakdown, kModule, "invalid residual quadratic form");
    }
    return {2.0 * (std::log(l00) + std::log(l11)), std::max(v2, 0.0)};
}

}  // namespace

double BlockMarginal::quadratic_form(std::span<const double> x, std::span<const double> r) const {
    return solve_block(x, r, hyper_).v2;
}

double BlockMarginal::operator()(std::span<const double> x, std::span<const double> r) const {
    const BlockSolve s = solve_block(x, r, hyper_);
    const double half_m = 0.5 * static_cast<double>(x.size());
    const double a_post = hyper_.a + half_m;
    return -half_m * std::log(2.0 * std::numbers::pi) + 0.5 * (log_det_c_ - s.log_det_a) +
           a_log_b_minus_lgamma_a_ + log_gamma(a_post) - a_post * std::log(hyper_.b + 0.5 * s.v2);
}

double block_quadratic_form(std::span<const double> x, std::span<const double> r,
                            const Hyperparameters& hyper) {
    return solve_block(x, r, hyper).v2;
}

double block_log_marginal(std::span<const double> x, std::span<const double> r,
                          const Hyperparameters& hyper) {
    return BlockMarginal(hyper)(x, r);
}

PosteriorKernel::PosteriorKernel(const RDDataset& data, const Hyperparameters& hyper)
    : PosteriorKernel(data, hyper, Options{}) {}

PosteriorKernel::PosteriorKernel(const RDDataset& data, const Hyperparameters& hyper, Options options)
    : data_(&data), hyper_(hyper), options_(options), marginal_((hyper.validate(), hyper)) {}

double PosteriorKernel::block_term(int start, int length) {
    if (!options_.include_likelihood) return 0.0;
    if (options_.use_cache) {
        if (const double* hit = cache_.find(start, length)) return *hit;
    }
    const auto s = static_cast<std::size_t>(start);
    const auto m = static_cast<std::size_t>(length);
    const double value = marginal_(data_->x().subspan(s, m), data_->r().subspan(s, m));
    if (options_.use_cache) cache_.insert(start, length, value);
    return value;
}

double PosteriorKernel::prior(const OrderedPartition& partition) const {
    return log_prior(partition, hyper_.alpha, options_.prior);
}

double PosteriorKernel::operator()(const OrderedPartition& partition) {
    if (partition.n() != static_cast<int>(data_->size())) {
        throw Error(ErrorCode::InvalidConfig, kModule, "partition size does not match dataset");
    }
    double total = prior(partition);
    int start = 0;
    for (int len : partition.sizes()) {
        total += block_term(start, len);
        start += len;
    }
    return total;
}

double log_posterior_kernel(const OrderedPartition& partition, const RDDataset& data,
                            const Hyperparameters& hyper, BlockCache* cache) {
    if (partition.n() != static_cast<int>(data.size())) {
        throw Error(ErrorCode::InvalidConfig, kModule, "partition size does not match dataset");
    }
    hyper.validate();
    const BlockMarginal marginal(hyper);
    double total = log_prior(partition, hyper.alpha);
    int start = 0;
    for (int len : partition.sizes()) {
        const double* hit = cache ? cache->find(start, len) : nullptr;
        double value;
        if (hit) {
            value = *hit;
        } else {
            const auto s = static_cast<std::size_t>(start);
            const auto m = static_cast<std::size_t>(len);
            value = marginal(data.x().subspan(s, m), data.r().subspan(s, m));
            if (cache) cache->insert(start, len, value);
        }
        total += value;
        start += len;
    }
    return total;
}

}  // namespace bnprd
