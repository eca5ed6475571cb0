#include "bnprd/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {
constexpr const char* kModule = "partition_model";
}

OrderedPartition OrderedPartition::from_sizes(std::vector<int> sizes) {
    if (sizes.empty()) throw Error(ErrorCode::InvalidConfig, kModule, "partition needs a block");
    for (int s : sizes) {
        if (s <= 0) throw Error(ErrorCode::InvalidConfig, kModule, "block sizes must be positive");
    }
    OrderedPartition p;
    p.n_ = std::accumulate(sizes.begin(), sizes.end(), 0);
    p.sizes_ = std::move(sizes);
    return p;
}

OrderedPartition OrderedPartition::from_labels(std::span<const int> labels) {
    if (labels.empty() || labels.front() != 0) {
        throw Error(ErrorCode::InvalidConfig, kModule, "labels must start at 0");
    }
    std::vector<int> sizes{1};
    for (std::size_t i = 1; i < labels.size(); ++i) {
        const int step = labels[i] - labels[i - 1];
        if (step == 0) {
            ++sizes.back();
        } else if (step == 1) {
            sizes.push_back(1);
        } else {
            throw Error(ErrorCode::InvalidConfig, kModule,
                        "labels must be non-decreasing and surjective");
        }
    }
    return from_sizes(std::move(sizes));
}

OrderedPartition OrderedPartition::equal_blocks(int n, int k) {
    if (n < 1) throw Error(ErrorCode::InvalidConfig, kModule, "n must be positive");
    k = std::clamp(k, 1, n);
    std::vector<int> sizes(static_cast<std::size_t>(k), n / k);
    for (int j = 0; j < n % k; ++j) ++sizes[static_cast<std::size_t>(j)];
    return from_sizes(std::move(sizes));
}

int OrderedPartition::block_start(int block) const {
    return std::accumulate(sizes_.begin(), sizes_.begin() + block, 0);
}

OrderedPartition::Location OrderedPartition::locate(int i) const {
    int start = 0;
    for (int j = 0; j < k(); ++j) {
        const int next = start + sizes_[static_cast<std::size_t>(j)];
        if (i < next) return {j, start};
        start = next;
    }
    throw Error(ErrorCode::InvalidConfig, kModule, "subject index out of range");
}

std::vector<int> OrderedPartition::labels() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < k(); ++j) out.insert(out.end(), static_cast<std::size_t>(size(j)), j);
    return out;
}

OrderedPartition OrderedPartition::split(int block, int left) const {
    if (block < 0 || block >= k() || left < 1 || left >= sizes_[static_cast<std::size_t>(block)]) {
        throw Error(ErrorCode::DomainError, kModule, "cannot split block " + std::to_string(block) + " at " +
                                                         std::to_string(left) + " in " + to_string());
    }
    OrderedPartition p = *this;
    auto it = p.sizes_.begin() + block;
    const int right = *it - left;
    *it = left;
    p.sizes_.insert(it + 1, right);
    return p;
}

OrderedPartition OrderedPartition::merge(int block) const {
    if (block < 0 || block + 1 >= k()) {
        throw Error(ErrorCode::DomainError, kModule, "cannot merge block " + std::to_string(block) + " in " + to_string());
    }
    OrderedPartition p = *this;
    auto it = p.sizes_.begin() + block;
    *it += *(it + 1);
    p.sizes_.erase(it + 1);
    return p;
}

std::string OrderedPartition::to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(sizes_[j]);
    }
    return s + ")";
}

std::size_t OrderedPartitionHash::operator()(const OrderedPartition& p) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (int s : p.sizes()) h = (h ^ static_cast<std::size_t>(s)) * 1099511628211ULL;
    return h;
}

}  // namespace bnprd
