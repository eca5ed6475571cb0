#include "bnprd/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <thread>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "sampler";
constexpr std::int64_t kResyncInterval = 1000;

int count_splittable(const OrderedPartition& p) {
    int s = 0;
    for (int size : p.sizes()) s += size >= 2 ? 1 : 0;
    return s;
}

// Probability of choosing a split given the state (merge gets the rest).
double split_probability(int k, int splittable) {
    if (k == 1) return 1.0;
    if (splittable == 0) return 0.0;
    return 0.5;
}

void write_trace(const std::filesystem::path& path, const auto& values) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, kModule, "cannot write trace " + path.string());
    char buf[32];
    for (const auto v : values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", static_cast<double>(v));
        out << buf;
    }
}

Diagnostics run_one(const RDDataset& data, const Hyperparameters& hyper, const ChainConfig& config,
                    std::uint64_t stream, const DrawSink& sink) {
    PosteriorKernel kernel(data, hyper, {config.prior, true, true});
    std::unique_ptr<PosteriorKernel> scratch;
    if (config.debug_check) {
        scratch = std::make_unique<PosteriorKernel>(
            data, hyper, PosteriorKernel::Options{config.prior, false, true});
    }

    Rng rng(derive_seed(config.seed, stream));
    ChainState state;
    state.partition = OrderedPartition::equal_blocks(static_cast<int>(data.size()), config.initial_blocks);
    state.log_kernel = kernel(state.partition);

    Diagnostics diag;
    diag.seed = config.seed;
    for (std::int64_t step = 1; step <= config.iterations; ++step) {
        mh_step(state, kernel, rng, config.enable_shift_move);

        if (step % kResyncInterval == 0) {
            if (scratch) {
                const double fresh = (*scratch)(state.partition);
                if (std::fabs(fresh - state.log_kernel) > 1e-8) {
                    throw Error(ErrorCode::NumericalBreakdown, kModule,
                                "incremental log kernel drifted from recomputation at step " +
                                    std::to_string(step));
                }
            }
            state.log_kernel = kernel(state.partition);
        }

        if (step > config.burn_in && (step - config.burn_in - 1) % config.thin == 0) {
            sink(state.partition);
            diag.k_trace.push_back(state.partition.k());
            diag.log_kernel_trace.push_back(state.log_kernel);
        }
    }
    diag.counters = state.counters;
    diag.steps = config.iterations;

    if (config.trace_dir) {
        const std::filesystem::path dir(*config.trace_dir);
        std::filesystem::create_directories(dir);
        const std::string suffix = ".chain" + std::to_string(stream) + ".txt";
        write_trace(dir / ("k_n" + suffix), diag.k_trace);
        write_trace(dir / ("log_kernel" + suffix), diag.log_kernel_trace);
    }
    return diag;
}

void finish_diagnostics(Diagnostics& diag) {
    if (diag.k_trace.empty()) return;
    std::vector<double> k(diag.k_trace.begin(), diag.k_trace.end());
    double sum = 0.0;
    for (double v : k) sum += v;
    diag.k_mean = sum / static_cast<double>(k.size());
    if (k.size() >= 100) {
        diag.k_mcse = batch_means_mcse(k);
        double ss = 0.0;
        for (double v : k) ss += (v - diag.k_mean) * (v - diag.k_mean);
        const double var = ss / static_cast<double>(k.size() - 1);
        const double mcse2 = diag.k_mcse->mcse * diag.k_mcse->mcse;
        diag.k_effective_samples = mcse2 > 0.0 ? var / mcse2 : static_cast<double>(k.size());
    }
}

void merge_into(Diagnostics& total, Diagnostics&& part) {
    for (std::size_t m = 0; m < kMoveTypes; ++m) {
        total.counters.proposed[m] += part.counters.proposed[m];
        total.counters.accepted[m] += part.counters.accepted[m];
    }
    total.counters.null_moves += part.counters.null_moves;
    total.steps += part.steps;
    total.k_trace.insert(total.k_trace.end(), part.k_trace.begin(), part.k_trace.end());
    total.log_kernel_trace.insert(total.log_kernel_trace.end(), part.log_kernel_trace.begin(),
                                  part.log_kernel_trace.end());
}

}  // namespace

std::string_view to_string(MoveType m) noexcept {
    switch (m) {
    case MoveType::Split: return "split";
    case MoveType::Merge: return "merge";
    case MoveType::Shift: return "shift";
    }
    return "unknown";
}

double MoveCounters::acceptance_rate(MoveType m) const {
    const auto i = static_cast<std::size_t>(m);
    return proposed[i] == 0 ? 0.0 : static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]);
}

void ChainConfig::validate(std::size_t n) const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, kModule, what); };
    if (iterations < 1) bad("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) bad("burn_in must satisfy 0 <= burn_in < iterations");
    if (thin < 1) bad("thin must be positive");
    if (initial_blocks < 1 || static_cast<std::size_t>(initial_blocks) > n) {
        bad("initial_blocks must lie in [1, n]");
    }
    if (chains < 1) bad("chains must be positive");
}

Proposal propose(const ChainState& state, Rng& rng, bool enable_shift) {
    const OrderedPartition& p = state.partition;
    const int n = p.n();
    const int k = p.k();
    Proposal out;
    out.candidate = p;

    if (n == 1) {
        out.null_move = true;
        return out;
    }

    if (enable_shift && rng.index(3) == 0) {
        out.move = MoveType::Shift;
        if (k == 1) {
            out.null_move = true;
            return out;
        }
        const int b = static_cast<int>(rng.index(static_cast<std::uint64_t>(k - 1)));
        const bool toward_left = rng.index(2) == 0;  // first subject of b+1 joins b
        const int left = p.size(b);
        const int right = p.size(b + 1);
        if ((toward_left && right < 2) || (!toward_left && left < 2)) {
            out.null_move = true;
            return out;
        }
        const int new_left = toward_left ? left + 1 : left - 1;
        const int start = p.block_start(b);
        std::vector<int> sizes = p.sizes();
        sizes[static_cast<std::size_t>(b)] = new_left;
        sizes[static_cast<std::size_t>(b + 1)] = left + right - new_left;
        out.candidate = OrderedPartition::from_sizes(std::move(sizes));
        out.removed = {{start, left}, {start + left, right}};
        out.added = {{start, new_left}, {start + new_left, left + right - new_left}};
        return out;
    }

    const int splittable = count_splittable(p);
    const double p_split = split_probability(k, splittable);
    const bool do_split = p_split == 1.0 || (p_split > 0.0 && rng.uniform() < p_split);

    if (do_split) {
        out.move = MoveType::Split;
        int target = static_cast<int>(rng.index(static_cast<std::uint64_t>(splittable)));
        int block = 0;
        int start = 0;
        for (;; ++block) {
            if (p.size(block) >= 2 && target-- == 0) break;
            start += p.size(block);
        }
        const int m = p.size(block);
        const int left = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(m - 1)));
        out.candidate = p.split(block, left);
        out.removed = {{start, m}};
        out.added = {{start, left}, {start + left, m - left}};

        const double log_forward = std::log(p_split) - std::log(splittable) - std::log(m - 1.0);
        const int splittable_after = splittable - 1 + (left >= 2) + (m - left >= 2);
        const double p_merge_after = splittable_after == 0 ? 1.0 : 0.5;
        const double log_reverse = std::log(p_merge_after) - std::log(static_cast<double>(k));
        out.log_proposal_ratio = log_reverse - log_forward;
        return out;
    }

    out.move = MoveType::Merge;
    const int block = static_cast<int>(rng.index(static_cast<std::uint64_t>(k - 1)));
    const int left = p.size(block);
    const int right = p.size(block + 1);
    const int start = p.block_start(block);
    out.candidate = p.merge(block);
    out.removed = {{start, left}, {start + left, right}};
    out.added = {{start, left + right}};

    const double log_forward = std::log(1.0 - p_split) - std::log(k - 1.0);
    const int splittable_after = splittable - (left >= 2) - (right >= 2) + 1;
    const double p_split_after = split_probability(k - 1, splittable_after);
    const double log_reverse = std::log(p_split_after) - std::log(static_cast<double>(splittable_after)) -
                               std::log(left + right - 1.0);
    out.log_proposal_ratio = log_reverse - log_forward;
    return out;
}

std::vector<std::pair<OrderedPartition, double>> proposal_distribution(const OrderedPartition& p,
                                                                       bool enable_shift) {
    std::map<OrderedPartition, double> mass;
    const int n = p.n();
    const int k = p.k();
    if (n == 1) return {{p, 1.0}};

    const double base = enable_shift ? 2.0 / 3.0 : 1.0;
    if (enable_shift) {
        const double shift = 1.0 / 3.0;
        if (k == 1) {
            mass[p] += shift;
        } else {
            const double each = shift / (k - 1) / 2.0;
            for (int b = 0; b + 1 < k; ++b) {
                for (int dir = 0; dir < 2; ++dir) {
                    const int left = p.size(b);
                    const int right = p.size(b + 1);
                    const int new_left = dir == 0 ? left + 1 : left - 1;
                    if (new_left < 1 || left + right - new_left < 1) {
                        mass[p] += each;
                        continue;
                    }
                    std::vector<int> sizes = p.sizes();
                    sizes[static_cast<std::size_t>(b)] = new_left;
                    sizes[static_cast<std::size_t>(b + 1)] = left + right - new_left;
                    mass[OrderedPartition::from_sizes(std::move(sizes))] += each;
                }
            }
        }
    }

    const int splittable = count_splittable(p);
    const double p_split = split_probability(k, splittable);
    for (int j = 0; j < k && p_split > 0.0; ++j) {
        const int m = p.size(j);
        for (int left = 1; left < m; ++left) {
            mass[p.split(j, left)] += base * p_split / splittable / (m - 1);
        }
    }
    for (int j = 0; j + 1 < k && p_split < 1.0; ++j) {
        mass[p.merge(j)] += base * (1.0 - p_split) / (k - 1);
    }
    return {mass.begin(), mass.end()};
}

bool mh_step(ChainState& state, PosteriorKernel& kernel, Rng& rng, bool enable_shift) {
    Proposal prop = propose(state, rng, enable_shift);
    auto& counters = state.counters;
    ++counters.proposed[static_cast<std::size_t>(prop.move)];
    if (prop.null_move) {
        ++counters.null_moves;
        return false;
    }

    const PriorVariant variant = kernel.options().prior;
    const double alpha = kernel.hyper().alpha;
    double delta = log_prior_k_term(prop.candidate.k(), alpha, variant) -
                   log_prior_k_term(state.partition.k(), alpha, variant);
    for (const auto& [start, len] : prop.removed) {
        delta += std::log(static_cast<double>(len)) - kernel.block_term(start, len);
    }
    for (const auto& [start, len] : prop.added) {
        delta += kernel.block_term(start, len) - std::log(static_cast<double>(len));
    }

    const double log_accept = delta + prop.log_proposal_ratio;
    if (log_accept >= 0.0 || std::log(rng.uniform_open0()) < log_accept) {
        state.partition = std::move(prop.candidate);
        state.log_kernel += delta;
        ++counters.accepted[static_cast<std::size_t>(prop.move)];
        return true;
    }
    return false;
}

McseResult batch_means_mcse(std::span<const double> trace) {
    if (trace.size() < 100) {
        throw Error(ErrorCode::TraceTooShort, kModule,
                    "batch means need at least 100 values, got " + std::to_string(trace.size()));
    }
    McseResult out;
    out.batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(trace.size()))));
    out.batch_size = trace.size() / out.batches;
    // Leading remainder is dropped so the batches end at the last draw.
    const std::size_t offset = trace.size() - out.batches * out.batch_size;

    std::vector<double> means(out.batches, 0.0);
    for (std::size_t b = 0; b < out.batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < out.batch_size; ++i) s += trace[offset + b * out.batch_size + i];
        means[b] = s / static_cast<double>(out.batch_size);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(out.batches);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    const double var_means = ss / static_cast<double>(out.batches - 1);
    out.mcse = std::sqrt(var_means / static_cast<double>(out.batches));
    out.half_width = 1.96 * out.mcse;
    return out;
}

Diagnostics run_chain(const RDDataset& data, const Hyperparameters& hyper, const ChainConfig& config,
                      const DrawSink& sink) {
    config.validate(data.size());
    hyper.validate();
    if (config.chains == 1) {
        Diagnostics diag = run_one(data, hyper, config, 0, sink);
        finish_diagnostics(diag);
        return diag;
    }
    ChainResult all = run_chain(data, hyper, config);
    for (const auto& draw : all.draws) sink(draw);
    return std::move(all.diagnostics);
}

ChainResult run_chain(const RDDataset& data, const Hyperparameters& hyper, const ChainConfig& config) {
    config.validate(data.size());
    hyper.validate();
    const auto chains = static_cast<std::size_t>(config.chains);
    std::vector<std::vector<OrderedPartition>> draws(chains);
    std::vector<Diagnostics> diags(chains);
    std::vector<std::exception_ptr> errors(chains);

    auto work = [&](std::size_t c) {
        try {
            diags[c] = run_one(data, hyper, config, c,
                               [&](const OrderedPartition& p) { draws[c].push_back(p); });
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    if (chains == 1) {
        work(0);
    } else {
        std::vector<std::jthread> threads;
        for (std::size_t c = 0; c < chains; ++c) threads.emplace_back(work, c);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ChainResult result;
    result.diagnostics.seed = config.seed;
    result.diagnostics.chains = config.chains;
    for (std::size_t c = 0; c < chains; ++c) {
        result.draws.insert(result.draws.end(), std::make_move_iterator(draws[c].begin()),
                            std::make_move_iterator(draws[c].end()));
        merge_into(result.diagnostics, std::move(diags[c]));
    }
    finish_diagnostics(result.diagnostics);
    return result;
}

}  // namespace bnprd
