#include "tsart/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsart/stats.hpp"

namespace tsart::models {

namespace {

std::vector<double> forecast_channel(const std::vector<double>& xs, std::size_t horizon,
                                     const patterns::SeasonalityResult& season) {
    const std::size_t t_len = xs.size();
    std::vector<double> out;
    out.reserve(horizon);

    if (season.strong && 2 * season.period <= t_len) {
        const std::size_t p = season.period;
        const auto last = std::span<const double>(xs).subspan(t_len - p, p);
        const auto prev = std::span<const double>(xs).subspan(t_len - 2 * p, p);
        const double drift =
            (stats::mean_of(last) - stats::mean_of(prev)) / static_cast<double>(p);
        for (std::size_t h = 0; h < horizon; ++h) {
            out.push_back(last[h % p] + drift * static_cast<double>(h + 1));
        }
        return out;
    }

    const std::size_t fit_len =
        std::min(t_len, 4 * std::max<std::size_t>(season.period, 8));
    const auto tail = std::span<const double>(xs).subspan(t_len - fit_len, fit_len);
    const double slope = patterns::ols_slope(tail);
    const double mean = stats::mean_of(tail);
    const double t_mid = static_cast<double>(fit_len - 1) / 2.0;
    const double at_end = mean + slope * (static_cast<double>(fit_len - 1) - t_mid);
    for (std::size_t h = 0; h < horizon; ++h) {
        out.push_back(at_end + slope * static_cast<double>(h + 1));
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> forecaster(const TimeSeries& series, std::size_t horizon,
                                            const patterns::PatternConfig& config) {
    if (horizon < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    if (series.length() < 8) throw std::invalid_argument("need at least 8 points");
    if (horizon > 4 * series.length()) {
        throw std::invalid_argument("forecast horizon must not exceed 4*T");
    }
    const auto seasons = patterns::seasonality_detector(series, series.length() / 2, config);
    std::vector<std::vector<double>> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = series.channel_segment(c, Range{0, series.length()});
        out.push_back(forecast_channel(xs, horizon, seasons[c]));
    }
    return out;
}

std::vector<AnomalyResult> anomaly_detection(const TimeSeries& series, double threshold) {
    if (threshold <= 0.0) throw std::invalid_argument("anomaly threshold must be positive");
    const std::size_t t_len = series.length();
    if (t_len < 8) throw std::invalid_argument("need at least 8 points");

    std::size_t want = threshold < 1.0
                           ? static_cast<std::size_t>(std::ceil(threshold * static_cast<double>(t_len)))
                           : static_cast<std::size_t>(std::floor(threshold));
    want = std::min(want, t_len);

    std::vector<AnomalyResult> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = series.channel_segment(c, Range{0, t_len});
        AnomalyResult result;
        result.scores.reserve(t_len);
        for (std::size_t t = 0; t < t_len; ++t) {
            const std::size_t lo = t >= 2 ? t - 2 : 0;
            const std::size_t hi = std::min(t + 2, t_len - 1);
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = lo; i <= hi; ++i) {
                if (i == t) continue;
                sum += xs[i];
                ++count;
            }
            const double reconstruction = sum / static_cast<double>(count);
            const double err = xs[t] - reconstruction;
            result.scores.push_back(err * err);
        }
        std::vector<std::size_t> order(t_len);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (result.scores[a] != result.scores[b]) {
                return result.scores[a] > result.scores[b];
            }
            return a < b;
        });
        result.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(want));
        out.push_back(std::move(result));
    }
    return out;
}

}  // namespace tsart::models
