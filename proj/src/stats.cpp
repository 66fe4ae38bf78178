#include "tsart/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsart::stats {

namespace {

void require_nonempty(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("empty value span");
}

}  // namespace

StatKind stat_kind_from_string(const std::string& name) {
    if (name == "mean") return StatKind::Mean;
    if (name == "sum") return StatKind::Sum;
    if (name == "max") return StatKind::Max;
    if (name == "min") return StatKind::Min;
    if (name == "std") return StatKind::Std;
    throw std::invalid_argument("unknown statistic \"" + name +
                                "\" (expected mean, sum, max, min, or std)");
}

std::string to_string(StatKind kind) {
    switch (kind) {
        case StatKind::Mean: return "mean";
        case StatKind::Sum: return "sum";
        case StatKind::Max: return "max";
        case StatKind::Min: return "min";
        case StatKind::Std: return "std";
    }
    throw std::logic_error("unreachable stat kind");
}

ReturnKind return_kind_from_string(const std::string& name) {
    if (name == "pct") return ReturnKind::Pct;
    if (name == "diff") return ReturnKind::Diff;
    throw std::invalid_argument("unknown return kind \"" + name + "\" (expected pct or diff)");
}

double mean_of(std::span<const double> xs) {
    require_nonempty(xs);
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sum_of(std::span<const double> xs) {
    require_nonempty(xs);
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

double min_of(std::span<const double> xs) {
    require_nonempty(xs);
    return *std::min_element(xs.begin(), xs.end());
}

double max_of(std::span<const double> xs) {
    require_nonempty(xs);
    return *std::max_element(xs.begin(), xs.end());
}

double population_std(std::span<const double> xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

double stat_of(std::span<const double> xs, StatKind kind) {
    switch (kind) {
        case StatKind::Mean: return mean_of(xs);
        case StatKind::Sum: return sum_of(xs);
        case StatKind::Max: return max_of(xs);
        case StatKind::Min: return min_of(xs);
        case StatKind::Std: return population_std(xs);
    }
    throw std::logic_error("unreachable stat kind");
}

double autocorr_of(std::span<const double> xs, std::size_t lag) {
    require_nonempty(xs);
    if (lag >= xs.size()) {
        throw std::invalid_argument("lag " + std::to_string(lag) + " must be below length " +
                                    std::to_string(xs.size()));
    }
    const double m = mean_of(xs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) den += (xs[t] - m) * (xs[t] - m);
    if (den == 0.0) throw std::invalid_argument("autocorrelation undefined on a constant segment");
    for (std::size_t t = lag; t < xs.size(); ++t) num += (xs[t] - m) * (xs[t - lag] - m);
    return num / den;
}

double quantile_of(std::span<const double> xs, double q) {
    require_nonempty(xs);
    if (q < 0.0 || q > 1.0) {
        throw std::invalid_argument("quantile level must lie in [0, 1]");
    }
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return sorted[lo];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

SeriesInfo series_info(const TimeSeries& series) {
    SeriesInfo info;
    info.length = series.length();
    info.channels = series.channels();
    info.missing_count = series.missing_count();
    info.missing_by_channel = series.missing_by_channel();
    return info;
}

std::size_t resolve_index(const TimeSeries& series, const IndexOrTimestamp& where) {
    if (std::holds_alternative<std::size_t>(where)) {
        const std::size_t idx = std::get<std::size_t>(where);
        if (idx >= series.length()) {
            throw std::out_of_range("index " + std::to_string(idx) +
                                    " out of range for length " +
                                    std::to_string(series.length()));
        }
        return idx;
    }
    const auto& ts = std::get<std::string>(where);
    const auto idx = series.index_of_timestamp(ts);
    if (!idx) throw std::invalid_argument("unknown timestamp \"" + ts + "\"");
    return *idx;
}

std::vector<double> datapoint_value(const TimeSeries& series, const IndexOrTimestamp& where) {
    return series.row(resolve_index(series, where));
}

std::vector<double> summary_stats(const TimeSeries& series, Range range, StatKind kind) {
    make_range(range.start, range.end, series.length());
    std::vector<double> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto seg = series.channel_segment(c, range);
        out.push_back(stat_of(seg, kind));
    }
    return out;
}

std::vector<double> return_calc(const TimeSeries& series, std::size_t t1, std::size_t t2,
                                ReturnKind kind) {
    if (t1 >= series.length() || t2 >= series.length()) {
        throw std::out_of_range("return indices out of range");
    }
    std::vector<double> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const double a = series.at(t1, c);
        const double b = series.at(t2, c);
        if (std::isnan(a) || std::isnan(b)) {
            throw std::invalid_argument("missing value at a return endpoint");
        }
        if (kind == ReturnKind::Diff) {
            out.push_back(b - a);
        } else {
            if (a == 0.0) throw std::invalid_argument("pct return undefined: value at t1 is 0");
            out.push_back((b - a) / a);
        }
    }
    return out;
}

std::vector<double> autocorr(const TimeSeries& series, std::size_t lag) {
    std::vector<double> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = series.channel_segment(c, Range{0, series.length()});
        out.push_back(autocorr_of(xs, lag));
    }
    return out;
}

std::vector<std::vector<WindowValue>> rolling_stat(const TimeSeries& series, StatKind kind,
                                                   std::size_t window, std::size_t step) {
    if (window < 1 || window > series.length()) {
        throw std::invalid_argument("window must lie in [1, T]");
    }
    if (step < 1) throw std::invalid_argument("step must be at least 1");
    std::vector<std::vector<WindowValue>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        for (std::size_t i = 0; i + window <= series.length(); i += step) {
            const auto seg = series.channel_segment(c, Range{i, i + window});
            out[c].push_back(WindowValue{i, i + window, stat_of(seg, kind)});
        }
    }
    return out;
}

std::vector<double> quantile_value(const TimeSeries& series, double q) {
    std::vector<double> out;
    out.reserve(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = series.channel_segment(c, Range{0, series.length()});
        out.push_back(quantile_of(xs, q));
    }
    return out;
}

std::vector<std::vector<WindowValue>> volatility(const TimeSeries& series, std::size_t window) {
    if (window < 2) throw std::invalid_argument("volatility window must be at least 2");
    if (series.length() < window + 1) {
        throw std::invalid_argument("series too short: need at least window+1 points");
    }
    std::vector<std::vector<WindowValue>> out(series.channels());
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto xs = series.channel_segment(c, Range{0, series.length()});
        std::vector<double> diffs;
        diffs.reserve(xs.size() - 1);
        for (std::size_t t = 0; t + 1 < xs.size(); ++t) diffs.push_back(xs[t + 1] - xs[t]);
        for (std::size_t i = 0; i + window <= diffs.size(); ++i) {
            const std::span<const double> seg(diffs.data() + i, window);
            out[c].push_back(WindowValue{i, i + window, population_std(seg)});
        }
    }
    return out;
}

}  // namespace tsart::stats
