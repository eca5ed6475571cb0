#include "bnprd/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "bnprd/error.hpp"

namespace bnprd {
namespace {

constexpr const char* kModule = "dataset";

void check_finite(const RawSubject& s, double value, const char* field) {
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFiniteValue, kModule,
                    "subject '" + s.id + "' has non-finite " + field);
    }
}

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 0x100000001b3ULL;
        }
    }
    void real(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        bytes(&bits, sizeof bits);
    }
};

}  // namespace

RDDataset validate_and_sort(std::vector<RawSubject> raw, double r0) {
    if (raw.empty()) throw Error(ErrorCode::EmptyInput, kModule, "no subjects");
    if (!std::isfinite(r0)) throw Error(ErrorCode::NonFiniteValue, kModule, "cutoff is not finite");
    for (const auto& s : raw) {
        check_finite(s, s.r, "r");
        check_finite(s, s.x, "x");
        check_finite(s, s.y, "y");
    }

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a].r < raw[b].r; });

    RDDataset d;
    d.cutoff_ = r0;
    d.subjects_.reserve(raw.size());
    for (std::size_t idx : order) {
        auto& s = raw[idx];
        const bool t = s.t.value_or(s.r >= r0);
        d.subjects_.push_back(Subject{std::move(s.id), s.r, s.x, s.y, t});
        d.r_.push_back(s.r);
        d.x_.push_back(s.x);
        d.y_.push_back(s.y);
        d.t_.push_back(t ? 1 : 0);
    }
    d.input_position_ = std::move(order);

    const auto split = std::lower_bound(d.r_.begin(), d.r_.end(), r0);
    d.first_right_ = static_cast<std::size_t>(split - d.r_.begin());
    if (d.first_right_ == 0 || d.first_right_ == d.size()) {
        throw Error(ErrorCode::OneSidedDesign, kModule,
                    "need subjects on both sides of the cutoff");
    }
    return d;
}

std::uint64_t RDDataset::digest() const noexcept {
    Fnv1a h;
    h.real(cutoff_);
    for (const auto& s : subjects_) {
        h.bytes(s.id.data(), s.id.size());
        h.real(s.r);
        h.real(s.x);
        h.real(s.y);
        const unsigned char t = s.t ? 1 : 0;
        h.bytes(&t, 1);
    }
    return h.h;
}

std::vector<RawSubject> RDDataset::to_raw() const {
    std::vector<RawSubject> out;
    out.reserve(size());
    for (const auto& s : subjects_) out.push_back(RawSubject{s.id, s.r, s.x, s.y, s.t});
    return out;
}

}  // namespace bnprd
