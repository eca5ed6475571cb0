#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bnprd {

/// Partition of n r-ordered subjects into k contiguous blocks, stored as the
/// composition (n_1, ..., n_k). Labels s_1 <= ... <= s_n are derived.
class OrderedPartition {
public:
    /// Throws InvalidConfig unless every size is positive and there is at least one block.
    static OrderedPartition from_sizes(std::vector<int> sizes);
    /// Labels must be non-decreasing, start at 0 and increase by at most one per step.
    static OrderedPartition from_labels(std::span<const int> labels);
    /// k contiguous blocks whose sizes differ by at most one; k is clamped to [1, n].
    static OrderedPartition equal_blocks(int n, int k);

    int n() const noexcept { return n_; }
    int k() const noexcept { return static_cast<int>(sizes_.size()); }
    const std::vector<int>& sizes() const noexcept { return sizes_; }
    int size(int block) const { return sizes_[static_cast<std::size_t>(block)]; }

    int block_start(int block) const;
    /// Block containing subject i, with its start offset.
    struct Location {
        int block;
        int start;
    };
    Location locate(int i) const;

    std::vector<int> labels() const;

    /// Split `block` so that its first part has `left` subjects, 1 <= left < size.
    OrderedPartition split(int block, int left) const;
    /// Merge `block` with `block + 1`.
    OrderedPartition merge(int block) const;

    std::string to_string() const;

    auto operator<=>(const OrderedPartition&) const = default;
    bool operator==(const OrderedPartition&) const = default;

private:
    std::vector<int> sizes_;
    int n_ = 0;
};

struct OrderedPartitionHash {
    std::size_t operator()(const OrderedPartition& p) const noexcept;
};

}  // namespace bnprd
