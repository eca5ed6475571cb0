#include "bnprd/local_inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "local_inference";

std::vector<std::size_t> iota_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out(end - begin);
    std::iota(out.begin(), out.end(), begin);
    return out;
}

std::optional<double> side_mean(std::span<const std::uint8_t> t) {
    if (t.empty()) return std::nullopt;
    std::size_t ones = 0;
    for (auto v : t) ones += v ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(t.size());
}

constexpr StatisticDef kCatalogue[] = {
    {"non_treatment.sample_size", "sample size", StatGroup::NonTreatment},
    {"treatment.sample_size", "sample size", StatGroup::Treatment},
    {"non_treatment.mean", "mean", StatGroup::NonTreatment},
    {"treatment.mean", "mean", StatGroup::Treatment},
    {"non_treatment.variance", "variance", StatGroup::NonTreatment},
    {"treatment.variance", "variance", StatGroup::Treatment},
    {"non_treatment.iqr", "interquartile range", StatGroup::NonTreatment},
    {"treatment.iqr", "interquartile range", StatGroup::Treatment},
    {"non_treatment.skewness", "skewness", StatGroup::NonTreatment},
    {"treatment.skewness", "skewness", StatGroup::Treatment},
    {"non_treatment.kurtosis", "kurtosis", StatGroup::NonTreatment},
    {"treatment.kurtosis", "kurtosis", StatGroup::Treatment},
    {"non_treatment.q01", "1%ile", StatGroup::NonTreatment},
    {"treatment.q01", "1%ile", StatGroup::Treatment},
    {"non_treatment.q10", "10%ile", StatGroup::NonTreatment},
    {"treatment.q10", "10%ile", StatGroup::Treatment},
    {"non_treatment.q25", "25%ile", StatGroup::NonTreatment},
    {"treatment.q25", "25%ile", StatGroup::Treatment},
    {"non_treatment.q50", "50%ile", StatGroup::NonTreatment},
    {"treatment.q50", "50%ile", StatGroup::Treatment},
    {"non_treatment.q75", "75%ile", StatGroup::NonTreatment},
    {"treatment.q75", "75%ile", StatGroup::Treatment},
    {"non_treatment.q90", "90%ile", StatGroup::NonTreatment},
    {"treatment.q90", "90%ile", StatGroup::Treatment},
    {"non_treatment.q99", "99%ile", StatGroup::NonTreatment},
    {"treatment.q99", "99%ile", StatGroup::Treatment},
    {"t_statistic", "t-statistic", StatGroup::Cross},
    {"t_p_value", "t-statistic p-value", StatGroup::Cross},
    {"f_statistic", "F test, variance", StatGroup::Cross},
    {"f_p_value", "F test p-value", StatGroup::Cross},
    {"pr_y1_ge_y0", "Pr[Y1 >= Y0]", StatGroup::Cross},
    {"pr_y1_le_y0", "Pr[Y1 <= Y0]", StatGroup::Cross},
    {"ks_statistic", "KS test", StatGroup::Cross},
    {"ks_p_value", "KS test p-value", StatGroup::Cross},
    // extensions
    {"pr_y1_eq_y0", "Pr[Y1 = Y0]", StatGroup::Cross},
    {"t_df", "Welch df", StatGroup::Cross},
    {"mean_difference", "mean difference (treatment - non-treatment)", StatGroup::Cross},
    {"fuzzy_effect", "fuzzy-scaled mean difference", StatGroup::Cross},
    {"non_treatment.compliance", "treatment received (mean)", StatGroup::NonTreatment},
    {"treatment.compliance", "treatment received (mean)", StatGroup::Treatment},
};

}  // namespace

std::size_t anchor_index(const RDDataset& data, double r0) {
    const auto r = data.r();
    std::size_t best = 0;
    double best_dist = std::fabs(r[0] - r0);
    bool best_right = r[0] >= r0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double dist = std::fabs(r[i] - r0);
        const bool right = r[i] >= r0;
        if (dist < best_dist || (dist == best_dist && right && !best_right)) {
            best = i;
            best_dist = dist;
            best_right = right;
        }
    }
    return best;
}

std::vector<std::size_t> LocalCluster::members() const { return iota_range(begin, end); }
std::vector<std::size_t> LocalCluster::control() const { return iota_range(begin, split); }
std::vector<std::size_t> LocalCluster::treated() const { return iota_range(split, end); }

LocalCluster extract_cluster(const OrderedPartition& partition, std::size_t i0, const RDDataset& data) {
    if (partition.n() != static_cast<int>(data.size()) || i0 >= data.size()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "partition or anchor does not match dataset");
    }
    const auto loc = partition.locate(static_cast<int>(i0));
    LocalCluster c;
    c.begin = static_cast<std::size_t>(loc.start);
    c.end = c.begin + static_cast<std::size_t>(partition.size(loc.block));
    c.split = std::clamp(data.first_treated_side(), c.begin, c.end);
    return c;
}

GroupSummary describe_group(std::span<const double> y, std::span<const std::uint8_t> t) {
    GroupSummary g;
    g.size = y.size();
    g.compliance = side_mean(t);
    if (y.empty()) return g;

    const double m = static_cast<double>(y.size());
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / m;
    g.mean = mean;
    if (y.size() < 2) return g;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : y) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    g.variance = m2 / (m - 1.0);
    m2 /= m;
    m3 /= m;
    m4 /= m;
    if (m2 > 0.0) {
        g.skewness = m3 / std::pow(m2, 1.5);
        g.kurtosis = m4 / (m2 * m2);
    }

    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) {
        g.quantiles[q] = sample_quantile(sorted, kQuantileLevels[q]);
    }
    g.iqr = sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25);
    return g;
}

FuzzyScale fuzzy_scale(double mean_diff, double tbar_right, double tbar_left, double tol) {
    const double denom = tbar_right - tbar_left;
    if (!(std::fabs(denom) >= tol)) return {std::nullopt, true};
    return {mean_diff / denom, false};
}

ComparisonDraw compare_groups(std::span<const double> y_treat, std::span<const double> y_control,
                              std::span<const std::uint8_t> t_treat,
                              std::span<const std::uint8_t> t_control, const CompareOptions& options) {
    ComparisonDraw d;
    d.treatment = describe_group(y_treat, t_treat);
    d.control = describe_group(y_control, t_control);

    const std::size_t m1 = y_treat.size();
    const std::size_t m0 = y_control.size();
    if (m1 >= 1 && m0 >= 1) {
        d.mean_diff = *d.treatment.mean - *d.control.mean;

        std::vector<double> control(y_control.begin(), y_control.end());
        std::sort(control.begin(), control.end());
        for (double v : y_treat) {
            const auto lo = std::lower_bound(control.begin(), control.end(), v);
            const auto hi = std::upper_bound(lo, control.end(), v);
            d.pairs_ge += static_cast<std::uint64_t>(hi - control.begin());
            d.pairs_le += static_cast<std::uint64_t>(control.end() - lo);
            d.pairs_eq += static_cast<std::uint64_t>(hi - lo);
        }
        d.pairs_total = static_cast<std::uint64_t>(m1) * m0;
        const double total = static_cast<double>(d.pairs_total);
        d.pr_ge = static_cast<double>(d.pairs_ge) / total;
        d.pr_le = static_cast<double>(d.pairs_le) / total;
        d.pr_eq = static_cast<double>(d.pairs_eq) / total;
    }

    if (m1 >= 2 && m0 >= 2) {
        const double v1 = *d.treatment.variance / static_cast<double>(m1);
        const double v0 = *d.control.variance / static_cast<double>(m0);
        const double se2 = v0 + v1;
        if (se2 > 0.0) {
            d.t_stat = (*d.control.mean - *d.treatment.mean) / std::sqrt(se2);
            d.t_df = se2 * se2 / (v0 * v0 / (m0 - 1.0) + v1 * v1 / (m1 - 1.0));
            d.t_p = t_p_two_sided(*d.t_stat, *d.t_df);
        }
        if (*d.treatment.variance > 0.0) {
            d.f_stat = *d.control.variance / *d.treatment.variance;
            if (*d.f_stat > 0.0) {
                d.f_p = f_p_two_sided(*d.f_stat, m0 - 1.0, m1 - 1.0);
            }
        }
        const KsResult ks = ks_two_sample(y_treat, y_control, options.ks);
        d.ks_d = ks.d;
        d.ks_p = ks.p;
        d.ks_exact = ks.exact;
    }

    if (options.mode == DesignMode::Fuzzy && d.mean_diff && d.treatment.compliance &&
        d.control.compliance) {
        const FuzzyScale s =
            fuzzy_scale(*d.mean_diff, *d.treatment.compliance, *d.control.compliance, options.fuzzy_tol);
        d.fuzzy_effect = s.value;
        d.weak_instrument = s.weak_instrument;
    }
    return d;
}

ComparisonDraw compare_cluster(const LocalCluster& cluster, const RDDataset& data,
                               const CompareOptions& options) {
    const auto y = data.y();
    const auto t = data.t();
    return compare_groups(y.subspan(cluster.split, cluster.treated_size()),
                          y.subspan(cluster.begin, cluster.control_size()),
                          t.subspan(cluster.split, cluster.treated_size()),
                          t.subspan(cluster.begin, cluster.control_size()), options);
}

std::span<const StatisticDef> statistic_catalogue() { return kCatalogue; }

std::vector<std::optional<double>> flatten(const ComparisonDraw& d) {
    std::vector<std::optional<double>> v;
    v.reserve(std::size(kCatalogue));
    auto pair = [&](const std::optional<double>& control, const std::optional<double>& treat) {
        v.push_back(control);
        v.push_back(treat);
    };
    pair(static_cast<double>(d.control.size), static_cast<double>(d.treatment.size));
    pair(d.control.mean, d.treatment.mean);
    pair(d.control.variance, d.treatment.variance);
    pair(d.control.iqr, d.treatment.iqr);
    pair(d.control.skewness, d.treatment.skewness);
    pair(d.control.kurtosis, d.treatment.kurtosis);
    for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) pair(d.control.quantiles[q], d.treatment.quantiles[q]);
    v.push_back(d.t_stat);
    v.push_back(d.t_p);
    v.push_back(d.f_stat);
    v.push_back(d.f_p);
    v.push_back(d.pr_ge);
    v.push_back(d.pr_le);
    v.push_back(d.ks_d);
    v.push_back(d.ks_p);
    v.push_back(d.pr_eq);
    v.push_back(d.t_df);
    v.push_back(d.mean_diff);
    v.push_back(d.fuzzy_effect);
    pair(d.control.compliance, d.treatment.compliance);
    return v;
}

}  // namespace bnprd
