#include "tsc/tokenizer.hpp"

#include <algorithm>
#include <cmath>

#include "tsc/rng.hpp"

namespace tsc {

ComponentSequence tokenize(const TimeSeries& s, const SegmentBoundaries& b,
                           std::size_t padded_length) {
    const auto segs = segments_of(b, s.length());
    ComponentSequence cs;
    cs.tokens.reserve(segs.size());
    cs.true_lengths.reserve(segs.size());
    for (const auto& [start, end] : segs) {
        const std::size_t len = end - start;
        if (len > padded_length) {
            throw SegmentTooLongError(len, padded_length);
        }
        std::vector<double> token(padded_length, 0.0);
        std::copy(s.values.begin() + static_cast<std::ptrdiff_t>(start),
                  s.values.begin() + static_cast<std::ptrdiff_t>(end), token.begin());
        cs.tokens.push_back(std::move(token));
        cs.true_lengths.push_back(len);
    }
    return cs;
}

MaskPlan plan_mask(std::size_t k, double ratio, std::uint64_t seed) {
    if (k < 2) {
        throw InvalidArgumentError("mask planning requires at least 2 tokens");
    }
    MaskPlan plan;
    plan.mask_ratio = ratio;
    if (k == 2) {
        plan.masked_indices = {0};
        return plan;
    }

    const std::size_t interior = k - 2;
    auto want = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(k)));
    want = std::clamp<std::size_t>(want, 1, interior);

    std::vector<std::size_t> pool(interior);
    for (std::size_t i = 0; i < interior; ++i) {
        pool[i] = i + 1;
    }
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + rng::uniform_index(gen, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    plan.masked_indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(plan.masked_indices.begin(), plan.masked_indices.end());
    return plan;
}

ComponentSequence apply_mask(const ComponentSequence& cs, const MaskPlan& plan) {
    ComponentSequence out = cs;
    for (std::size_t idx : plan.masked_indices) {
        if (idx >= out.tokens.size()) {
            throw IndexOutOfRangeError("mask index " + std::to_string(idx) +
                                       " out of range for " + std::to_string(out.size()) +
                                       " tokens");
        }
        std::fill(out.tokens[idx].begin(), out.tokens[idx].end(), 0.0);
    }
    return out;
}

} // namespace tsc
