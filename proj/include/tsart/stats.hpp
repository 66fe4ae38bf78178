#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsart/series.hpp"

namespace tsart::stats {

enum class StatKind { Mean, Sum, Max, Min, Std };

StatKind stat_kind_from_string(const std::string& name);
std::string to_string(StatKind kind);

enum class ReturnKind { Pct, Diff };

ReturnKind return_kind_from_string(const std::string& name);

struct SeriesInfo {
    std::size_t length = 0;
    std::size_t channels = 0;
    std::size_t missing_count = 0;
    std::vector<std::size_t> missing_by_channel;
};

struct WindowValue {
    std::size_t window_start = 0;
    std::size_t window_end = 0;
    double value = 0.0;
};

// Scalar helpers over contiguous values. std is population std (divide by n).
double mean_of(std::span<const double> xs);
double sum_of(std::span<const double> xs);
double min_of(std::span<const double> xs);
double max_of(std::span<const double> xs);
double population_std(std::span<const double> xs);
double stat_of(std::span<const double> xs, StatKind kind);

// Sample ACF at one lag: sum_{t>=lag}(x_t-m)(x_{t-lag}-m) / sum_t (x_t-m)^2.
// Throws on a constant segment (zero denominator).
double autocorr_of(std::span<const double> xs, std::size_t lag);

// Empirical quantile with linear interpolation at position q*(n-1).
double quantile_of(std::span<const double> xs, double q);

SeriesInfo series_info(const TimeSeries& series);

// Either a 0-based index or a timestamp to resolve against the series.
using IndexOrTimestamp = std::variant<std::size_t, std::string>;

std::size_t resolve_index(const TimeSeries& series, const IndexOrTimestamp& where);
std::vector<double> datapoint_value(const TimeSeries& series, const IndexOrTimestamp& where);

// Per-channel statistic over [range.start, range.end); rejects missing values.
std::vector<double> summary_stats(const TimeSeries& series, Range range, StatKind kind);

// diff = x[t2]-x[t1]; pct = (x[t2]-x[t1])/x[t1] (errors when x[t1] is 0).
std::vector<double> return_calc(const TimeSeries& series, std::size_t t1, std::size_t t2,
                                ReturnKind kind);

std::vector<double> autocorr(const TimeSeries& series, std::size_t lag);

// Windows [i, i+window) for i = 0, step, 2*step, ... while i+window <= T.
std::vector<std::vector<WindowValue>> rolling_stat(const TimeSeries& series, StatKind kind,
                                                   std::size_t window, std::size_t step);

std::vector<double> quantile_value(const TimeSeries& series, double q);

// Population std of first differences over rolling windows (step 1); the
// reported bounds index the difference series of length T-1.
std::vector<std::vector<WindowValue>> volatility(const TimeSeries& series, std::size_t window);

}  // namespace tsart::stats
