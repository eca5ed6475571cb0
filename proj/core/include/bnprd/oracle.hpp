#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "bnprd/dataset.hpp"
#include "bnprd/partition.hpp"
#include "bnprd/partition_model.hpp"

namespace bnprd {

inline constexpr int kMaxEnumerationN = 20;

/// All 2^(n-1) compositions of n, ordered by the (n-1)-bit gap mask where
/// bit i set means a block boundary after subject i. Throws TooLarge above 20.
std::vector<OrderedPartition> enumerate_compositions(int n);

/// Exact partition posterior by enumeration and log-sum-exp normalization.
struct ExactPosterior {
    std::vector<std::pair<OrderedPartition, double>> probabilities;  // mask order
    double log_normalizer = 0.0;

    double probability(const OrderedPartition& p) const;
};

struct ExactOptions {
    PriorVariant prior = PriorVariant::Normalized;
    bool include_likelihood = true;
};

ExactPosterior exact_posterior(const RDDataset& data, const Hyperparameters& hyper,
                               const ExactOptions& options = {});

/// sum_rho f(rho) P(rho | data).
double exact_functional(const RDDataset& data, const Hyperparameters& hyper,
                        const std::function<double(const OrderedPartition&)>& f,
                        const ExactOptions& options = {});

/// E[f | f defined] for a functional that is only defined on some
/// partitions, together with P(f defined). The expectation is absent when
/// that probability is zero.
struct ConditionalExpectation {
    std::optional<double> value;
    double probability_defined = 0.0;
};

ConditionalExpectation exact_conditional_functional(
    const RDDataset& data, const Hyperparameters& hyper,
    const std::function<std::optional<double>(const OrderedPartition&)>& f,
    const ExactOptions& options = {});

/// Posterior co-clustering matrix P(s_i = s_j), row-major n x n.
std::vector<double> co_clustering(const ExactPosterior& posterior);

/// Tab-separated dump: composition and probability, one per line.
void write_exact_table(std::ostream& out, const ExactPosterior& posterior);

}  // namespace bnprd
