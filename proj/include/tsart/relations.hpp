#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsart/series.hpp"

namespace tsart::relations {

enum class CorrMethod { Pearson, Spearman };

CorrMethod corr_method_from_string(const std::string& name);

enum class DtwMetric { Abs, Squared };

DtwMetric dtw_metric_from_string(const std::string& name);

enum class NormKind { Zscore, Minmax };

NormKind norm_kind_from_string(const std::string& name);

double pearson(std::span<const double> a, std::span<const double> b);

// Average ranks (ties share the mean of their positions), 1-based.
std::vector<double> average_ranks(std::span<const double> xs);

// Correlates a_t against b_{t-lag}; positive lag means b leads a by `lag`
// samples. Requires an overlap of at least 3 points and non-constant overlap
// segments.
double channel_correlation(const TimeSeries& series, std::size_t a, std::size_t b, long lag,
                           CorrMethod method);

struct LagCorrelation {
    long lag = 0;
    double correlation = 0.0;
};

struct CrossCorrelationResult {
    std::vector<LagCorrelation> per_lag;  // lags -max_lag .. +max_lag in order
    long best_lag = 0;
};

// best_lag maximizes the coefficient; ties prefer smaller |lag|, then the
// negative one.
CrossCorrelationResult cross_correlation(const TimeSeries& series, std::size_t a, std::size_t b,
                                         std::size_t max_lag);

// Full-window dynamic program over |x-y| or (x-y)^2 step costs; the squared
// metric reports the summed squared cost without a square root.
double dtw_distance(std::span<const double> a, std::span<const double> b, DtwMetric metric);

double dtw_distance(const TimeSeries& series, std::size_t a, std::size_t b, DtwMetric metric);

// Pearson correlation after per-channel normalization (zscore or minmax).
double shape_similarity(const TimeSeries& series, std::size_t a, std::size_t b, NormKind norm);

struct GrangerResult {
    double f_statistic = 0.0;
    double p_value = 1.0;
    bool causal = false;
};

// F-test comparing effect-on-own-lags against the regression augmented with
// cause lags 1..max_lag; causal when p < 0.05. Requires T >= 4*max_lag + 8.
GrangerResult granger_causality(const TimeSeries& series, std::size_t cause, std::size_t effect,
                                std::size_t max_lag);

}  // namespace tsart::relations
