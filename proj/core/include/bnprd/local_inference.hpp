#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bnprd/dataset.hpp"
#include "bnprd/partition.hpp"
#include "bnprd/special_fn.hpp"

namespace bnprd {

/// Subject nearest the cutoff; ties go to the r >= r0 side, then the smaller index.
std::size_t anchor_index(const RDDataset& data, double r0);
inline std::size_t anchor_index(const RDDataset& data) { return anchor_index(data, data.cutoff()); }

/// The anchor's block. Members are the contiguous run [begin, end) in r order;
/// [begin, split) lies below the cutoff and [split, end) at or above it.
struct LocalCluster {
    std::size_t begin = 0;
    std::size_t split = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    std::size_t control_size() const noexcept { return split - begin; }
    std::size_t treated_size() const noexcept { return end - split; }

    std::vector<std::size_t> members() const;
    std::vector<std::size_t> control() const;
    std::vector<std::size_t> treated() const;

    bool operator==(const LocalCluster&) const = default;
};

LocalCluster extract_cluster(const OrderedPartition& partition, std::size_t i0, const RDDataset& data);

enum class DesignMode { Sharp, Fuzzy };

inline constexpr std::array<double, 7> kQuantileLevels{0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99};

/// One-sample summaries. Mean needs one value; variance (n-1 divisor),
/// IQR and quantiles need two; skewness m3/m2^1.5 and non-excess
/// kurtosis m4/m2^2 (1/m central moments) also need m2 > 0.
struct GroupSummary {
    std::size_t size = 0;
    std::optional<double> mean;
    std::optional<double> variance;
    std::optional<double> iqr;
    std::optional<double> skewness;
    std::optional<double> kurtosis;
    std::array<std::optional<double>, kQuantileLevels.size()> quantiles;
    /// Mean of the treatment-received indicator on this side.
    std::optional<double> compliance;
};

GroupSummary describe_group(std::span<const double> y, std::span<const std::uint8_t> t = {});

struct ComparisonDraw {
    GroupSummary control;
    GroupSummary treatment;

    /// Welch statistic (control mean - treatment mean) / se.
    std::optional<double> t_stat;
    std::optional<double> t_df;
    std::optional<double> t_p;
    /// s^2_control / s^2_treatment.
    std::optional<double> f_stat;
    std::optional<double> f_p;
    std::optional<double> ks_d;
    std::optional<double> ks_p;
    bool ks_exact = false;

    /// Pair counts over treated x control; ge + le - eq == total exactly.
    std::uint64_t pairs_total = 0;
    std::uint64_t pairs_ge = 0;
    std::uint64_t pairs_le = 0;
    std::uint64_t pairs_eq = 0;
    std::optional<double> pr_ge;
    std::optional<double> pr_le;
    std::optional<double> pr_eq;

    /// treatment mean - control mean (intention to treat in fuzzy designs).
    std::optional<double> mean_diff;
    std::optional<double> fuzzy_effect;
    bool weak_instrument = false;
};

struct CompareOptions {
    DesignMode mode = DesignMode::Sharp;
    double fuzzy_tol = 0.05;
    KsMethod ks = KsMethod::Asymptotic;
};

ComparisonDraw compare_groups(std::span<const double> y_treat, std::span<const double> y_control,
                              std::span<const std::uint8_t> t_treat,
                              std::span<const std::uint8_t> t_control,
                              const CompareOptions& options = {});

/// compare_groups on the two sides of a cluster.
ComparisonDraw compare_cluster(const LocalCluster& cluster, const RDDataset& data,
                               const CompareOptions& options = {});

struct FuzzyScale {
    std::optional<double> value;
    bool weak_instrument = false;
};

/// mean_diff / (tbar_right - tbar_left), flagged when |denominator| < tol.
FuzzyScale fuzzy_scale(double mean_diff, double tbar_right, double tbar_left, double tol = 0.05);

/// Reported statistics in fixed order: the conventional two-group table first,
/// extensions after.
enum class StatGroup { NonTreatment, Treatment, Cross };

struct StatisticDef {
    std::string_view key;    // JSON key
    std::string_view label;  // table row label
    StatGroup group;
};

std::span<const StatisticDef> statistic_catalogue();

/// Values of one draw aligned with statistic_catalogue().
std::vector<std::optional<double>> flatten(const ComparisonDraw& draw);

}  // namespace bnprd
