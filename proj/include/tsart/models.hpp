#pragma once

#include <vector>

#include "tsart/series.hpp"
#include "tsart/patterns.hpp"

namespace tsart::models {

/// Per-channel forecast of `horizon` values. When a strong seasonal period p
/// is detected (max_period = T/2), the forecast repeats the last full period
/// and adds a per-step drift taken from the mean difference between the last
/// two periods; otherwise it extrapolates an OLS line fit to the recent tail.
/// Requires horizon >= 1, horizon <= 4*T, and T >= 8.
std::vector<std::vector<double>> forecaster(const TimeSeries& series, std::size_t horizon,
                                            const patterns::PatternConfig& config = {});

struct AnomalyResult {
    std::vector<double> scores;            // squared leave-one-out reconstruction error
    std::vector<std::size_t> selected;     // ordered by descending score, ties by index
};

/// Scores each point by its squared distance to the mean of its neighbors
/// within a +-2 window (the point itself excluded; edges shrink the window).
/// threshold < 1 selects the top ceil(threshold*T) points, threshold >= 1 the
/// top floor(threshold), capped at T. Requires T >= 8.
std::vector<AnomalyResult> anomaly_detection(const TimeSeries& series, double threshold);

}  // namespace tsart::models
