#include "tsc/change_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace tsc {

namespace {

// Prefix sums of x and x^2 so any window variance is O(1).
struct PrefixStats {
    std::vector<double> sum;
    std::vector<double> sum_sq;

    explicit PrefixStats(const std::vector<double>& x)
        : sum(x.size() + 1, 0.0), sum_sq(x.size() + 1, 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            sum[i + 1] = sum[i] + x[i];
            sum_sq[i + 1] = sum_sq[i] + x[i] * x[i];
        }
    }

    // Population variance over [a, b), floored.
    double variance(std::size_t a, std::size_t b, double floor) const {
        const double n = static_cast<double>(b - a);
        const double mean = (sum[b] - sum[a]) / n;
        const double var = (sum_sq[b] - sum_sq[a]) / n - mean * mean;
        return std::max(var, floor);
    }
};

// Two-pass population variance; the definitional route used by the
// single-point score so it stays independent of the prefix-sum kernel.
double variance_two_pass(const std::vector<double>& x, std::size_t a, std::size_t b,
                         double floor) {
    const double n = static_cast<double>(b - a);
    double mean = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        mean += x[i];
    }
    mean /= n;
    double acc = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        const double d = x[i] - mean;
        acc += d * d;
    }
    return std::max(acc / n, floor);
}

void check_in_support(std::size_t t, int delta, std::size_t n) {
    const auto d = static_cast<std::size_t>(delta);
    if (delta < 1 || t < d || t + d > n) {
        throw OutOfSupportError("index " + std::to_string(t) + " with scale " +
                                std::to_string(delta) + " out of support for length " +
                                std::to_string(n));
    }
}

std::vector<int> valid_scales(const ChangeSpaceConfig& cfg, std::size_t n) {
    std::vector<int> out;
    for (int d : cfg.scale_set()) {
        if (2 * static_cast<std::size_t>(d) <= n) {
            out.push_back(d);
        }
    }
    return out;
}

// The shared kernel: multi-scale sum with an arbitrary penalty weight, so the
// detection pipeline can run it penalty-free.
ChangeCurve sum_curve(const std::vector<double>& x, const ChangeSpaceConfig& cfg,
                      double penalty_weight) {
    const std::size_t n = x.size();
    const std::vector<int> scales = valid_scales(cfg, n);
    if (scales.empty()) {
        throw NoValidScaleError(n);
    }

    ChangeCurve curve;
    curve.scores.assign(n, 0.0);
    curve.scale_count.assign(n, 0);
    const auto d_min = static_cast<std::size_t>(scales.front());
    curve.support_lo = d_min;
    curve.support_hi = n - d_min;

    const PrefixStats ps(x);
    const double floor = cfg.variance_floor;
    for (int delta : scales) {
        const auto d = static_cast<std::size_t>(delta);
        const double dd = static_cast<double>(delta);
        const double penalty = penalty_weight * dd * std::log(2.0 * dd);
        for (std::size_t t = d; t + d <= n; ++t) {
            const double vl = ps.variance(t - d, t, floor);
            const double vr = ps.variance(t, t + d, floor);
            const double vp = ps.variance(t - d, t + d, floor);
            curve.scores[t] +=
                dd * std::log(vp) - 0.5 * dd * (std::log(vl) + std::log(vr)) - penalty;
            curve.scale_count[t] += 1;
        }
    }
    return curve;
}

struct RobustStats {
    double median = 0.0;
    double sigma = 0.0; // 1.4826 * MAD
};

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

RobustStats robust_stats(const ChangeCurve& c) {
    std::vector<double> vals(c.scores.begin() + static_cast<std::ptrdiff_t>(c.support_lo),
                             c.scores.begin() + static_cast<std::ptrdiff_t>(c.support_hi) + 1);
    RobustStats rs;
    rs.median = median_of(vals);
    for (double& v : vals) {
        v = std::abs(v - rs.median);
    }
    rs.sigma = 1.4826 * median_of(std::move(vals));
    return rs;
}

} // namespace

WindowStats window_stats(const TimeSeries& s, std::size_t t, int delta,
                         const ChangeSpaceConfig& cfg) {
    check_in_support(t, delta, s.length());
    const auto d = static_cast<std::size_t>(delta);
    WindowStats ws;
    ws.var_left = variance_two_pass(s.values, t - d, t, cfg.variance_floor);
    ws.var_right = variance_two_pass(s.values, t, t + d, cfg.variance_floor);
    ws.var_pooled = variance_two_pass(s.values, t - d, t + d, cfg.variance_floor);
    return ws;
}

double tscs_score(const TimeSeries& s, std::size_t t, int delta,
                  const ChangeSpaceConfig& cfg) {
    const WindowStats ws = window_stats(s, t, delta, cfg);
    const double dd = static_cast<double>(delta);
    return dd * std::log(ws.var_pooled) -
           0.5 * dd * (std::log(ws.var_left) + std::log(ws.var_right)) -
           cfg.penalty_weight * dd * std::log(2.0 * dd);
}

ChangeCurve ms_tscs_curve(const TimeSeries& s, const ChangeSpaceConfig& cfg) {
    const TimeSeries checked = validate_series(s);
    return sum_curve(checked.values, cfg, cfg.penalty_weight);
}

ChangeCurve smooth_curve(const ChangeCurve& c, const ChangeSpaceConfig& cfg) {
    if (c.empty() || c.support_length() == 0) {
        return c;
    }
    const std::size_t len = c.support_length();
    auto window = static_cast<std::size_t>(cfg.smoothing_window);
    if (window > len) {
        window = len % 2 == 1 ? len : len - 1; // largest odd width that fits
    }
    const std::size_t half = window / 2;

    ChangeCurve out;
    out.scores.assign(c.scores.size(), 0.0);
    out.scale_count.assign(c.scores.size(), 0);
    out.support_lo = c.support_lo + half;
    out.support_hi = c.support_hi - half;

    double running = 0.0;
    for (std::size_t t = c.support_lo; t < c.support_lo + window; ++t) {
        running += c.scores[t];
    }
    const double inv = 1.0 / static_cast<double>(window);
    for (std::size_t t = out.support_lo;; ++t) {
        out.scores[t] = running * inv;
        out.scale_count[t] = c.scale_count[t];
        if (t == out.support_hi) {
            break;
        }
        running += c.scores[t + half + 1] - c.scores[t - half];
    }
    return out;
}

PeakSet detect_peaks(const ChangeCurve& c, const ChangeSpaceConfig& cfg) {
    PeakSet result;
    if (c.empty() || c.support_length() == 0) {
        return result;
    }
    const RobustStats rs = robust_stats(c);
    const double scale = std::max(rs.sigma, 1e-12);
    const double threshold = rs.median + cfg.saliency_sigma * scale;

    // One peak per maximal excursion above the threshold, at the (leftmost)
    // maximum of the run.
    std::vector<Peak> candidates;
    std::size_t t = c.support_lo;
    while (t <= c.support_hi) {
        if (c.scores[t] > threshold) {
            std::size_t best = t;
            std::size_t end = t;
            while (end + 1 <= c.support_hi && c.scores[end + 1] > threshold) {
                ++end;
                if (c.scores[end] > c.scores[best]) {
                    best = end;
                }
            }
            candidates.push_back(
                Peak{best, c.scores[best], (c.scores[best] - rs.median) / scale});
            t = end + 1;
        } else {
            ++t;
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Peak& a, const Peak& b) {
        if (a.saliency != b.saliency) {
            return a.saliency > b.saliency;
        }
        return a.index < b.index;
    });

    // Minimum separation: a peak within saliency_window of a stronger one is
    // a shoulder of the same event.
    const auto min_sep = static_cast<std::size_t>(cfg.saliency_window);
    for (const Peak& p : candidates) {
        bool keep = true;
        for (const Peak& kept : result.peaks) {
            const std::size_t gap =
                p.index > kept.index ? p.index - kept.index : kept.index - p.index;
            if (gap < min_sep) {
                keep = false;
                break;
            }
        }
        if (keep) {
            result.peaks.push_back(p);
        }
    }
    return result;
}

PeakSet find_change_points(const TimeSeries& s, const ChangeSpaceConfig& cfg) {
    const TimeSeries checked = validate_series(s);
    cfg.validate();
    const ChangeCurve raw = sum_curve(checked.values, cfg, 0.0);
    const ChangeCurve smoothed = smooth_curve(raw, cfg);
    return detect_peaks(smoothed, cfg);
}

int select_segment_count_from_counts(
    const std::vector<std::pair<int, std::size_t>>& counts) {
    if (counts.empty()) {
        throw EmptyTrainingSetError();
    }
    std::size_t peakless = 0;
    for (const auto& [label, peak_count] : counts) {
        if (peak_count == 0) {
            ++peakless;
        }
    }
    if (2 * peakless > counts.size()) {
        return 15; // uniform fallback: most series had no separable components
    }

    std::map<int, std::pair<double, std::size_t>> per_class; // label -> (sum, n)
    for (const auto& [label, peak_count] : counts) {
        auto& acc = per_class[label];
        acc.first += static_cast<double>(peak_count + 1);
        acc.second += 1;
    }
    double mean_of_means = 0.0;
    for (const auto& [label, acc] : per_class) {
        mean_of_means += acc.first / static_cast<double>(acc.second);
    }
    mean_of_means /= static_cast<double>(per_class.size());

    const auto k = static_cast<int>(std::llround(mean_of_means));
    return std::clamp(k, 2, 50);
}

int select_segment_count(const std::vector<TimeSeries>& train,
                         const ChangeSpaceConfig& cfg) {
    if (train.empty()) {
        throw EmptyTrainingSetError();
    }
    std::vector<std::pair<int, std::size_t>> counts;
    counts.reserve(train.size());
    for (const TimeSeries& s : train) {
        if (!s.label) {
            throw InvalidArgumentError("segment count selection requires labeled series");
        }
        std::size_t peak_count = 0;
        try {
            peak_count = find_change_points(s, cfg).size();
        } catch (const NoValidScaleError&) {
            peak_count = 0; // too short for any scale: no separable components
        }
        counts.emplace_back(*s.label, peak_count);
    }
    return select_segment_count_from_counts(counts);
}

SegmentBoundaries boundaries_from_peaks(const PeakSet& peaks, std::size_t n, int k) {
    if (k < 2 || k > 50) {
        throw InvalidArgumentError("segment count must lie in [2, 50]");
    }
    if (static_cast<std::size_t>(k) > n) {
        throw KTooLargeError(k, n);
    }
    const auto wanted = static_cast<std::size_t>(k - 1);

    std::set<std::size_t> cuts;
    for (const Peak& p : peaks.peaks) {
        if (cuts.size() == wanted) {
            break;
        }
        if (p.index > 0 && p.index < n) {
            cuts.insert(p.index);
        }
    }

    // Supplement from the k-uniform grid, skipping near-collisions first and
    // relaxing only if the grid cannot otherwise fill the quota.
    std::vector<std::size_t> grid;
    for (int j = 1; j < k; ++j) {
        const double pos = static_cast<double>(j) * static_cast<double>(n) /
                           static_cast<double>(k);
        auto rounded = static_cast<std::size_t>(std::llround(pos));
        rounded = std::clamp<std::size_t>(rounded, 1, n - 1);
        grid.push_back(rounded);
    }
    auto near_existing = [&cuts](std::size_t p) {
        for (std::size_t c : cuts) {
            const std::size_t gap = p > c ? p - c : c - p;
            if (gap <= 1) {
                return true;
            }
        }
        return false;
    };
    for (std::size_t g : grid) {
        if (cuts.size() == wanted) {
            break;
        }
        if (!near_existing(g)) {
            cuts.insert(g);
        }
    }
    for (std::size_t g : grid) {
        if (cuts.size() == wanted) {
            break;
        }
        cuts.insert(g);
    }
    for (std::size_t p = 1; p < n && cuts.size() < wanted; ++p) {
        cuts.insert(p);
    }

    SegmentBoundaries b;
    b.cuts.assign(cuts.begin(), cuts.end());
    validate_boundaries(b, n);
    return b;
}

SegmentBoundaries segment_series(const TimeSeries& s, int k, const ChangeSpaceConfig& cfg) {
    const TimeSeries checked = validate_series(s);
    PeakSet peaks;
    try {
        peaks = find_change_points(checked, cfg);
    } catch (const NoValidScaleError&) {
        // fall through to the uniform grid
    }
    return boundaries_from_peaks(peaks, checked.length(), k);
}

} // namespace tsc
