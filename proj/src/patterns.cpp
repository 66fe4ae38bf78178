#include "tsart/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tsart/linalg.hpp"
#include "tsart/stats.hpp"

namespace tsart::patterns {

namespace {

std::vector<double> full_channel(const TimeSeries& series, std::size_t c) {
    return series.channel_segment(c, Range{0, series.length()});
}

std::vector<double> detrend(std::span<const double> xs) {
    const double b = ols_slope(xs);
    const double m = stats::mean_of(xs);
    const double t_mid = static_cast<double>(xs.size() - 1) / 2.0;
    std::vector<double> out(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        out[t] = xs[t] - (m + b * (static_cast<double>(t) - t_mid));
    }
    return out;
}

double variance_of(std::span<const double> xs) {
    const double m = stats::mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size());
}

// Direct projection power at period p: |sum_t x_t * e^{-2*pi*i*t/p}|^2 / n.
double projection_power(std::span<const double> xs, std::size_t period) {
    const double w = 2.0 * std::numbers::pi / static_cast<double>(period);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        re += xs[t] * std::cos(w * static_cast<double>(t));
        im -= xs[t] * std::sin(w * static_cast<double>(t));
    }
    return (re * re + im * im) / static_cast<double>(xs.size());
}

// Prefix sums letting any segment SSE around its mean be read in O(1).
struct SegmentCost {
    std::vector<double> sum;
    std::vector<double> sum2;

    explicit SegmentCost(std::span<const double> xs)
        : sum(xs.size() + 1, 0.0), sum2(xs.size() + 1, 0.0) {
        for (std::size_t t = 0; t < xs.size(); ++t) {
            sum[t + 1] = sum[t] + xs[t];
            sum2[t + 1] = sum2[t] + xs[t] * xs[t];
        }
    }

    // SSE of [s, e) around the segment mean.
    double operator()(std::size_t s, std::size_t e) const {
        const double n = static_cast<double>(e - s);
        const double total = sum[e] - sum[s];
        return std::max(0.0, (sum2[e] - sum2[s]) - total * total / n);
    }
};

struct BestSplit {
    bool found = false;
    std::size_t index = 0;
    double gain = 0.0;
};

BestSplit best_split(const SegmentCost& cost, std::size_t s, std::size_t e) {
    BestSplit best;
    if (e - s < 2) return best;
    const double whole = cost(s, e);
    for (std::size_t i = s + 1; i < e; ++i) {
        const double gain = whole - cost(s, i) - cost(i, e);
        if (!best.found || gain > best.gain) {
            best.found = true;
            best.index = i;
            best.gain = gain;
        }
    }
    return best;
}

void split_by_penalty(const SegmentCost& cost, std::size_t s, std::size_t e, double penalty,
                      std::vector<std::size_t>& out) {
    const BestSplit split = best_split(cost, s, e);
    if (!split.found || split.gain <= penalty) return;
    split_by_penalty(cost, s, split.index, penalty, out);
    out.push_back(split.index);
    split_by_penalty(cost, split.index, e, penalty, out);
}

std::vector<double> rolling_median5(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<double> padded;
    padded.reserve(n + 4);
    padded.push_back(xs[0]);
    padded.push_back(xs[0]);
    padded.insert(padded.end(), xs.begin(), xs.end());
    padded.push_back(xs[n - 1]);
    padded.push_back(xs[n - 1]);
    std::vector<double> out(n);
    double window[5];
    for (std::size_t t = 0; t < n; ++t) {
        std::copy(padded.begin() + static_cast<std::ptrdiff_t>(t),
                  padded.begin() + static_cast<std::ptrdiff_t>(t + 5), window);
        std::sort(window, window + 5);
        out[t] = window[2];
    }
    return out;
}

// MacKinnon response-surface coefficients for the constant-only case,
// crit = b0 + b1/n + b2/n^2 + b3/n^3.
constexpr double kAdf5Pct[4] = {-2.86154, -2.8903, -4.234, -40.040};

double adf_critical_value(std::size_t nobs) {
    const double n = static_cast<double>(nobs);
    return kAdf5Pct[0] + kAdf5Pct[1] / n + kAdf5Pct[2] / (n * n) + kAdf5Pct[3] / (n * n * n);
}

constexpr double kKpss5Pct = 0.463;

// Fits diff[t-1] on a constant, the lagged level, and p lagged differences,
// over rows t = start .. T-1.
linalg::OlsFit adf_regression(std::span<const double> xs, const std::vector<double>& diff,
                              std::size_t p, std::size_t start) {
    const std::size_t t_len = xs.size();
    const std::size_t n = t_len - start;
    const std::size_t k = p + 2;
    if (n <= k) throw std::invalid_argument("series too short for the chosen lag order");
    linalg::Matrix x = linalg::zeros(n, k);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = start + r;
        y[r] = diff[t - 1];
        x.at(r, 0) = 1.0;
        x.at(r, 1) = xs[t - 1];
        for (std::size_t i = 1; i <= p; ++i) x.at(r, 1 + i) = diff[t - 1 - i];
    }
    return linalg::ols(x, y);
}

StationarityResult adf_test(std::span<const double> xs) {
    const std::size_t t_len = xs.size();
    if (std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; }))
        throw std::invalid_argument("stationarity test undefined on a constant series");
    const auto max_p = static_cast<std::size_t>(std::min(
        std::floor(12.0 * std::pow(static_cast<double>(t_len) / 100.0, 0.25)),
        static_cast<double>(t_len) / 3.0));
    std::vector<double> diff(t_len - 1);
    for (std::size_t t = 0; t + 1 < t_len; ++t) diff[t] = xs[t + 1] - xs[t];

    // Pick the lag order by AIC over 0..max_p. Candidates are compared on the
    // common sample t = max_p+1 .. T-1 so their criteria are comparable; the
    // winner is then refit on the longest sample it allows.
    std::size_t best_p = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= max_p; ++p) {
        const linalg::OlsFit candidate = adf_regression(xs, diff, p, max_p + 1);
        const double n = static_cast<double>(candidate.n);
        const double aic =
            n * std::log(candidate.sse / n) + 2.0 * static_cast<double>(candidate.k);
        if (aic < best_aic) {
            best_aic = aic;
            best_p = p;
        }
    }
    const linalg::OlsFit fit = adf_regression(xs, diff, best_p, best_p + 1);
    StationarityResult result;
    result.statistic = fit.beta[1] / fit.std_errors[1];
    result.critical_value = adf_critical_value(fit.n);
    result.stationary = result.statistic < result.critical_value;
    result.used_lags = best_p;
    return result;
}

StationarityResult kpss_test(std::span<const double> xs) {
    const std::size_t t_len = xs.size();
    const auto q = static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(t_len) / 100.0, 0.25)));
    const double m = stats::mean_of(xs);
    std::vector<double> e(t_len);
    for (std::size_t t = 0; t < t_len; ++t) e[t] = xs[t] - m;
    double gamma0 = 0.0;
    for (double v : e) gamma0 += v * v;
    gamma0 /= static_cast<double>(t_len);
    if (gamma0 == 0.0) throw std::invalid_argument("stationarity test undefined on a constant series");
    double lrv = gamma0;
    for (std::size_t lag = 1; lag <= q; ++lag) {
        double gamma = 0.0;
        for (std::size_t t = lag; t < t_len; ++t) gamma += e[t] * e[t - lag];
        gamma /= static_cast<double>(t_len);
        const double w = 1.0 - static_cast<double>(lag) / static_cast<double>(q + 1);
        lrv += 2.0 * w * gamma;
    }
    double cum = 0.0;
    double s2 = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) {
        cum += e[t];
        s2 += cum * cum;
    }
    StationarityResult result;
    result.statistic = s2 / (static_cast<double>(t_len) * static_cast<double>(t_len) * lrv);
    result.critical_value = kKpss5Pct;
    result.stationary = result.statistic < result.critical_value;
    result.used_lags = q;
    return result;
}

}  // namespace

std::string to_string(TrendLabel label) {
    switch (label) {
        case TrendLabel::Up: return "up";
        case TrendLabel::Down: return "down";
        case TrendLabel::Flat: return "flat";
    }
    throw std::logic_error("unreachable trend label");
}

double ols_slope(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double t_mean = static_cast<double>(n - 1) / 2.0;
    const double x_mean = stats::mean_of(xs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dt = static_cast<double>(t) - t_mean;
        num += dt * (xs[t] - x_mean);
        den += dt * dt;
    }
    return num / den;
}

TrendLabel classify_trend(std::span<const double> xs, const PatternConfig& config) {
    if (xs.empty()) throw std::invalid_argument("empty segment");
    if (xs.size() == 1) return TrendLabel::Flat;
    const double b = ols_slope(xs);
    const double spread = stats::population_std(xs);
    const double movement = std::fabs(b) * static_cast<double>(xs.size() - 1);
    if (movement <= config.theta_flat * spread) return TrendLabel::Flat;
    return b > 0.0 ? TrendLabel::Up : TrendLabel::Down;
}

std::vector<TrendLabel> trend_global(const TimeSeries& series, const PatternConfig& config) {
    std::vector<TrendLabel> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        out.push_back(classify_trend(full_channel(series, c), config));
    }
    return out;
}

std::vector<std::vector<TrendSegment>> trend_windowed(const TimeSeries& series,
                                                      std::size_t window,
                                                      const PatternConfig& config) {
    if (window < 2 || window > series.length()) {
        throw std::invalid_argument("window must lie in [2, T]");
    }
    std::vector<std::vector<TrendSegment>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        for (std::size_t s = 0; s < series.length(); s += window) {
            const std::size_t e = std::min(s + window, series.length());
            const auto seg = series.channel_segment(c, Range{s, e});
            out[c].push_back(TrendSegment{s, e, classify_trend(seg, config)});
        }
    }
    return out;
}

std::vector<SeasonalityResult> seasonality_detector(const TimeSeries& series,
                                                    std::size_t max_period,
                                                    const PatternConfig& config) {
    if (max_period < 2) throw std::invalid_argument("max_period must be at least 2");
    if (series.length() < 2 * max_period) {
        throw std::invalid_argument("series must cover at least two candidate periods");
    }
    std::vector<SeasonalityResult> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = full_channel(series, c);
        const auto centered = detrend(xs);

        SeasonalityResult result;
        result.period = 2;
        double best_power = -1.0;
        for (std::size_t p = 2; p <= max_period; ++p) {
            const double power = projection_power(centered, p);
            if (power > best_power) {
                best_power = power;
                result.period = p;
            }
        }

        // Detrending a noiseless line leaves only float dust; treat that as
        // no seasonal variance rather than dividing by it.
        const double var_floor = 1e-12 * std::max(variance_of(xs), 1e-300);
        const double total_var = variance_of(centered);
        if (total_var > var_floor) {
            std::vector<double> phase_sum(result.period, 0.0);
            std::vector<std::size_t> phase_count(result.period, 0);
            for (std::size_t t = 0; t < centered.size(); ++t) {
                phase_sum[t % result.period] += centered[t];
                ++phase_count[t % result.period];
            }
            std::vector<double> residual(centered.size());
            for (std::size_t t = 0; t < centered.size(); ++t) {
                const std::size_t ph = t % result.period;
                residual[t] = centered[t] - phase_sum[ph] / static_cast<double>(phase_count[ph]);
            }
            result.strength_score = std::max(0.0, 1.0 - variance_of(residual) / total_var);
        }
        result.strong = result.strength_score >= config.theta_season;
        out.push_back(result);
    }
    return out;
}

ChangePointSpec parse_change_point_spec(const std::string& text) {
    std::string t = text;
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char ch) { return std::isspace(ch); }),
            t.end());
    ChangePointSpec spec;
    std::string value_text = t;
    if (t.rfind("n_cp=", 0) == 0) {
        spec.mode = ChangePointSpec::Mode::FixedCount;
        value_text = t.substr(5);
    } else if (t.rfind("penalty=", 0) == 0) {
        spec.mode = ChangePointSpec::Mode::Penalty;
        value_text = t.substr(8);
    }
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(value_text, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse change point spec \"" + text + "\"");
    }
    if (consumed != value_text.size()) {
        throw std::invalid_argument("cannot parse change point spec \"" + text + "\"");
    }
    if (value_text == t) {
        spec.mode = (value == std::floor(value) && value >= 1.0)
                        ? ChangePointSpec::Mode::FixedCount
                        : ChangePointSpec::Mode::Penalty;
    }
    spec.value = value;
    if (spec.value <= 0.0) throw std::invalid_argument("change point spec value must be positive");
    if (spec.mode == ChangePointSpec::Mode::FixedCount &&
        spec.value != std::floor(spec.value)) {
        throw std::invalid_argument("change point count must be an integer");
    }
    return spec;
}

std::vector<std::size_t> binary_segmentation(std::span<const double> xs,
                                             const ChangePointSpec& spec) {
    if (xs.size() < 4) throw std::invalid_argument("need at least 4 points");
    if (spec.value <= 0.0) throw std::invalid_argument("change point spec value must be positive");
    const SegmentCost cost(xs);
    std::vector<std::size_t> splits;

    if (spec.mode == ChangePointSpec::Mode::Penalty) {
        split_by_penalty(cost, 0, xs.size(), spec.value, splits);
        return splits;
    }

    const auto want = static_cast<std::size_t>(spec.value);
    if (static_cast<double>(want) * 2.0 >= static_cast<double>(xs.size())) {
        throw std::invalid_argument("requested change point count must be below T/2");
    }
    std::vector<std::size_t> bounds = {0, xs.size()};
    while (splits.size() < want) {
        BestSplit best;
        std::size_t best_seg = 0;
        for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
            const BestSplit cand = best_split(cost, bounds[s], bounds[s + 1]);
            if (cand.found && (!best.found || cand.gain > best.gain)) {
                best = cand;
                best_seg = s;
            }
        }
        if (!best.found) throw std::invalid_argument("series has no remaining splittable segment");
        bounds.insert(bounds.begin() + static_cast<std::ptrdiff_t>(best_seg + 1), best.index);
        splits.push_back(best.index);
    }
    std::sort(splits.begin(), splits.end());
    return splits;
}

std::vector<std::vector<std::size_t>> change_point_detector(const TimeSeries& series,
                                                            const ChangePointSpec& spec) {
    std::vector<std::vector<std::size_t>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        out[c] = binary_segmentation(full_channel(series, c), spec);
    }
    return out;
}

std::string to_string(NoiseLabel label) {
    switch (label) {
        case NoiseLabel::White: return "white";
        case NoiseLabel::Red: return "red";
        case NoiseLabel::Other: return "other";
    }
    throw std::logic_error("unreachable noise label");
}

NoiseLabel classify_noise(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 16) throw std::invalid_argument("segment too short: need at least 16 points");
    const std::size_t max_lag = std::min<std::size_t>(20, n / 4);
    const double band = 1.96 / std::sqrt(static_cast<double>(n));
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) r[lag] = stats::autocorr_of(xs, lag);

    bool white = true;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) white = white && std::fabs(r[lag]) <= band;
    if (white) return NoiseLabel::White;

    if (r[1] > band && r[1] > 0.0 && r[2] > 0.0 && r[3] > 0.0 && r[1] >= r[2] && r[2] >= r[3]) {
        return NoiseLabel::Red;
    }
    return NoiseLabel::Other;
}

std::vector<NoiseLabel> noise_global(const TimeSeries& series) {
    std::vector<NoiseLabel> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        out.push_back(classify_noise(full_channel(series, c)));
    }
    return out;
}

std::vector<std::vector<NoiseSegment>> noise_windowed(const TimeSeries& series,
                                                      std::size_t window) {
    if (window < 16 || window > series.length()) {
        throw std::invalid_argument("window must lie in [16, T]");
    }
    std::vector<std::vector<NoiseSegment>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        for (std::size_t s = 0; s < series.length(); s += window) {
            const std::size_t e = std::min(s + window, series.length());
            if (e - s < 16) break;
            const auto seg = series.channel_segment(c, Range{s, e});
            out[c].push_back(NoiseSegment{s, e, classify_noise(seg)});
        }
    }
    return out;
}

StationarityMethod stationarity_method_from_string(const std::string& name) {
    if (name == "adf") return StationarityMethod::Adf;
    if (name == "kpss") return StationarityMethod::Kpss;
    throw std::invalid_argument("unknown stationarity test \"" + name +
                                "\" (expected adf or kpss)");
}

std::vector<StationarityResult> stationarity_test(const TimeSeries& series,
                                                  StationarityMethod method) {
    if (series.length() < 20) throw std::invalid_argument("need at least 20 points");
    std::vector<StationarityResult> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = full_channel(series, c);
        out.push_back(method == StationarityMethod::Adf ? adf_test(xs) : kpss_test(xs));
    }
    return out;
}

std::vector<std::vector<SpikeEvent>> spike_detector(const TimeSeries& series, double threshold,
                                                    std::size_t min_sep) {
    if (threshold <= 0.0) throw std::invalid_argument("threshold must be positive");
    if (min_sep < 1) throw std::invalid_argument("min_sep must be at least 1");
    if (series.length() < 5) throw std::invalid_argument("need at least 5 points");
    std::vector<std::vector<SpikeEvent>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = full_channel(series, c);
        const auto median = rolling_median5(xs);
        std::vector<double> residual(xs.size());
        for (std::size_t t = 0; t < xs.size(); ++t) residual[t] = xs[t] - median[t];
        const double spread = stats::population_std(residual);
        if (spread == 0.0) continue;
        std::vector<std::size_t> candidates;
        for (std::size_t t = 0; t < residual.size(); ++t) {
            if (std::fabs(residual[t]) >= threshold * spread) candidates.push_back(t);
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](std::size_t a, std::size_t b) {
                             const double ma = std::fabs(residual[a]);
                             const double mb = std::fabs(residual[b]);
                             if (ma != mb) return ma > mb;
                             return a < b;
                         });
        std::vector<std::size_t> kept;
        for (std::size_t cand : candidates) {
            bool blocked = false;
            for (std::size_t k : kept) {
                const std::size_t gap = cand > k ? cand - k : k - cand;
                blocked = blocked || gap < min_sep;
            }
            if (!blocked) kept.push_back(cand);
        }
        std::sort(kept.begin(), kept.end());
        for (std::size_t idx : kept) {
            out[c].push_back(SpikeEvent{idx,
                                        residual[idx] >= 0.0 ? SpikeKind::Spike : SpikeKind::Dip,
                                        std::fabs(residual[idx])});
        }
    }
    return out;
}

}  // namespace tsart::patterns
