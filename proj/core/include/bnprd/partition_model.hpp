#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>

#include <Eigen/Core>

#include "bnprd/dataset.hpp"
#include "bnprd/partition.hpp"

namespace bnprd {

/// rDP precision and the normal-inverse-gamma base measure:
///   beta | sigma^2 ~ Normal(beta0, sigma^2 C^{-1}),  sigma^2 ~ InverseGamma(a, b).
struct Hyperparameters {
    double alpha = 1.0;
    Eigen::Vector2d beta0 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d C = (Eigen::Matrix2d() << 1e3, 0.0, 0.0, 10.0).finished();
    double a = 1.0;
    double b = 1.0;

    /// Throws InvalidConfig on non-positive alpha/a/b or a C that is not SPD.
    void validate() const;
};

/// Which normalizing constant the partition prior carries.
///  - Normalized: alpha^k / alpha^[n] * n!/k! * prod 1/n_j, a proper distribution.
///  - PrintedN:   same with n in place of n!; differs by a constant.
///  - AlphaTimesK: alpha*k / k! * prod 1/n_j, the literal kernel prefactor.
///    Not a constant offset from the others; forensic use only.
enum class PriorVariant { Normalized, PrintedN, AlphaTimesK };

double log_prior(const OrderedPartition& partition, double alpha,
                 PriorVariant variant = PriorVariant::Normalized);

/// The k-dependent part of the log prior (alpha^k / k! or alpha*k / k!).
double log_prior_k_term(int k, double alpha, PriorVariant variant = PriorVariant::Normalized);

/// Change in log prior when a block of size left+right in a k-block
/// partition is split in two.
double log_prior_split_delta(int left, int right, int k, double alpha,
                             PriorVariant variant = PriorVariant::Normalized);

/// Residual quadratic form V^2 = e'(I + R C^{-1} R')^{-1} e with e = x - R beta0,
/// evaluated as min_beta |e - R beta|^2 + beta' C beta through a 2x2 solve.
double block_quadratic_form(std::span<const double> x, std::span<const double> r,
                            const Hyperparameters& hyper);

/// Log marginal density of a block's x values under x_i ~ N((1, r_i) beta, sigma^2)
/// with (beta, sigma^2) integrated against the base measure.
double block_log_marginal(std::span<const double> x, std::span<const double> r,
                          const Hyperparameters& hyper);

/// Precomputes the hyperparameter-only pieces of block_log_marginal.
class BlockMarginal {
public:
    explicit BlockMarginal(const Hyperparameters& hyper);

    double operator()(std::span<const double> x, std::span<const double> r) const;
    double quadratic_form(std::span<const double> x, std::span<const double> r) const;

private:
    Hyperparameters hyper_;
    double log_det_c_;
    double a_log_b_minus_lgamma_a_;
};

/// Block log marginals keyed by (start, length). Entries never go stale for a
/// fixed dataset and hyperparameters; one cache per chain.
class BlockCache {
public:
    const double* find(int start, int length) const {
        auto it = values_.find(key(start, length));
        return it == values_.end() ? nullptr : &it->second;
    }
    void insert(int start, int length, double value) { values_.emplace(key(start, length), value); }
    std::size_t size() const noexcept { return values_.size(); }
    void clear() { values_.clear(); }

private:
    static std::uint64_t key(int start, int length) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(start)) << 32) |
               static_cast<std::uint32_t>(length);
    }
    std::unordered_map<std::uint64_t, double> values_;
};

/// log prior + sum of block log marginals for partitions of one dataset.
class PosteriorKernel {
public:
    struct Options {
        PriorVariant prior = PriorVariant::Normalized;
        bool use_cache = true;
        bool include_likelihood = true;
    };

    PosteriorKernel(const RDDataset& data, const Hyperparameters& hyper);
    PosteriorKernel(const RDDataset& data, const Hyperparameters& hyper, Options options);

    double operator()(const OrderedPartition& partition);
    double block_term(int start, int length);
    double prior(const OrderedPartition& partition) const;

    const RDDataset& data() const noexcept { return *data_; }
    const Hyperparameters& hyper() const noexcept { return hyper_; }
    const Options& options() const noexcept { return options_; }
    const BlockCache& cache() const noexcept { return cache_; }

private:
    const RDDataset* data_;
    Hyperparameters hyper_;
    Options options_;
    BlockMarginal marginal_;
    BlockCache cache_;
};

/// Free-function form; `cache` may be null.
double log_posterior_kernel(const OrderedPartition& partition, const RDDataset& data,
                            const Hyperparameters& hyper, BlockCache* cache);

}  // namespace bnprd
