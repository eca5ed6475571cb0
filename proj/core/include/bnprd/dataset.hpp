#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bnprd {

/// One subject as read from input. The treatment column is optional; when
/// absent it is synthesized as 1(r >= r0), the sharp-design assignment.
struct RawSubject {
    std::string id;
    double r = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::optional<bool> t;
};

struct Subject {
    std::string id;
    double r = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool t = false;

    bool operator==(const Subject&) const = default;
};

/// Subjects sorted ascending by assignment variable, immutable after
/// construction. Columns are also kept as contiguous arrays for the
/// numeric kernels.
class RDDataset {
public:
    std::size_t size() const noexcept { return subjects_.size(); }
    double cutoff() const noexcept { return cutoff_; }

    const Subject& operator[](std::size_t i) const { return subjects_[i]; }
    std::span<const Subject> subjects() const noexcept { return subjects_; }

    std::span<const double> r() const noexcept { return r_; }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }
    /// Treatment received, 0 or 1.
    std::span<const std::uint8_t> t() const noexcept { return t_; }

    /// Position of sorted subject i in the caller's original input.
    std::size_t input_position(std::size_t i) const { return input_position_[i]; }

    /// Index of the first subject with r >= cutoff.
    std::size_t first_treated_side() const noexcept { return first_right_; }

    /// FNV-1a over the sorted (id, r, x, y, t) records and the cutoff.
    std::uint64_t digest() const noexcept;

    std::vector<RawSubject> to_raw() const;

    bool operator==(const RDDataset& other) const {
        return cutoff_ == other.cutoff_ && subjects_ == other.subjects_;
    }

private:
    friend RDDataset validate_and_sort(std::vector<RawSubject> raw, double r0);

    std::vector<Subject> subjects_;
    std::vector<std::size_t> input_position_;
    std::vector<double> r_;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<std::uint8_t> t_;
    std::size_t first_right_ = 0;
    double cutoff_ = 0.0;
};

/// Stable sort by r with validation. Throws EmptyInput, NonFiniteValue or
/// OneSidedDesign. A single subject is rejected as one-sided.
RDDataset validate_and_sort(std::vector<RawSubject> raw, double r0);

}  // namespace bnprd
