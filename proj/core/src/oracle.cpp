#include "bnprd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "oracle";

OrderedPartition composition_from_mask(int n, std::uint32_t mask) {
    std::vector<int> sizes;
    int run = 1;
    for (int i = 0; i + 1 < n; ++i) {
        if (mask >> i & 1U) {
            sizes.push_back(run);
            run = 1;
        } else {
            ++run;
        }
    }
    sizes.push_back(run);
    return OrderedPartition::from_sizes(std::move(sizes));
}

}  // namespace

std::vector<OrderedPartition> enumerate_compositions(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidConfig, kModule, "n must be positive");
    if (n > kMaxEnumerationN) {
        throw Error(ErrorCode::TooLarge, kModule,
                    "enumeration capped at n = " + std::to_string(kMaxEnumerationN));
    }
    const std::uint32_t count = std::uint32_t{1} << (n - 1);
    std::vector<OrderedPartition> out;
    out.reserve(count);
    for (std::uint32_t mask = 0; mask < count; ++mask) out.push_back(composition_from_mask(n, mask));
    return out;
}

double ExactPosterior::probability(const OrderedPartition& p) const {
    for (const auto& [q, prob] : probabilities) {
        if (q == p) return prob;
    }
    return 0.0;
}

ExactPosterior exact_posterior(const RDDataset& data, const Hyperparameters& hyper,
                               const ExactOptions& options) {
    auto parts = enumerate_compositions(static_cast<int>(data.size()));
    PosteriorKernel kernel(data, hyper, {options.prior, true, options.include_likelihood});

    std::vector<double> logs(parts.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        logs[i] = kernel(parts[i]);
        max_log = std::max(max_log, logs[i]);
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - max_log);

    ExactPosterior post;
    post.log_normalizer = max_log + std::log(sum);
    post.probabilities.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        post.probabilities.emplace_back(std::move(parts[i]), std::exp(logs[i] - post.log_normalizer));
    }
    return post;
}

double exact_functional(const RDDataset& data, const Hyperparameters& hyper,
                        const std::function<double(const OrderedPartition&)>& f,
                        const ExactOptions& options) {
    const ExactPosterior post = exact_posterior(data, hyper, options);
    double total = 0.0;
    for (const auto& [p, prob] : post.probabilities) total += prob * f(p);
    return total;
}

ConditionalExpectation exact_conditional_functional(
    const RDDataset& data, const Hyperparameters& hyper,
    const std::function<std::optional<double>(const OrderedPartition&)>& f,
    const ExactOptions& options) {
    const ExactPosterior post = exact_posterior(data, hyper, options);
    double mass = 0.0;
    double weighted = 0.0;
    for (const auto& [p, prob] : post.probabilities) {
        if (const auto v = f(p)) {
            mass += prob;
            weighted += prob * *v;
        }
    }
    ConditionalExpectation out;
    out.probability_defined = mass;
    if (mass > 0.0) out.value = weighted / mass;
    return out;
}

std::vector<double> co_clustering(const ExactPosterior& posterior) {
    if (posterior.probabilities.empty()) return {};
    const auto n = static_cast<std::size_t>(posterior.probabilities.front().first.n());
    std::vector<double> m(n * n, 0.0);
    for (const auto& [p, prob] : posterior.probabilities) {
        std::size_t start = 0;
        for (int size : p.sizes()) {
            const std::size_t end = start + static_cast<std::size_t>(size);
            for (std::size_t i = start; i < end; ++i) {
                for (std::size_t j = start; j < end; ++j) m[i * n + j] += prob;
            }
            start = end;
        }
    }
    return m;
}

void write_exact_table(std::ostream& out, const ExactPosterior& posterior) {
    char buf[64];
    out << "composition\tprobability\n";
    for (const auto& [p, prob] : posterior.probabilities) {
        std::snprintf(buf, sizeof buf, "%.17g", prob);
        out << p.to_string() << '\t' << buf << '\n';
    }
}

}  // namespace bnprd
