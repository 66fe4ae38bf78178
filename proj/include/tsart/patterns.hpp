#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsart/series.hpp"

namespace tsart::patterns {

/// Tuning knobs for the label thresholds. theta_flat bounds the total fitted
/// slope movement relative to segment spread; theta_season is the minimum
/// strength score for a "strong" seasonality verdict.
struct PatternConfig {
    double theta_flat = 0.5;
    double theta_season = 0.6;
};

enum class TrendLabel { Up, Down, Flat };

std::string to_string(TrendLabel label);

struct TrendSegment {
    std::size_t start = 0;
    std::size_t end = 0;
    TrendLabel label = TrendLabel::Flat;
};

/// OLS slope of values against 0..n-1.
double ols_slope(std::span<const double> xs);

/// Labels one segment: flat when |slope|*(L-1) <= theta_flat * population std,
/// otherwise the sign of the slope.
TrendLabel classify_trend(std::span<const double> xs, const PatternConfig& config = {});

std::vector<TrendLabel> trend_global(const TimeSeries& series, const PatternConfig& config = {});

/// Partitions [0, T) into [0,w), [w,2w), ... plus a shorter tail and labels
/// each segment. Requires 2 <= window <= T.
std::vector<std::vector<TrendSegment>> trend_windowed(const TimeSeries& series,
                                                      std::size_t window,
                                                      const PatternConfig& config = {});

struct SeasonalityResult {
    std::size_t period = 0;
    double strength_score = 0.0;
    bool strong = false;
};

/// Picks the period in [2, max_period] with the largest direct-projection
/// periodogram power of the detrended channel, then scores it by the variance
/// removed when subtracting per-phase seasonal means. Requires T >= 2*max_period.
std::vector<SeasonalityResult> seasonality_detector(const TimeSeries& series,
                                                    std::size_t max_period,
                                                    const PatternConfig& config = {});

struct ChangePointSpec {
    enum class Mode { Penalty, FixedCount };
    Mode mode = Mode::FixedCount;
    double value = 1.0;
};

/// Parses "n_cp=2", "penalty=5", a bare integer (count), or a bare
/// non-integer number (penalty).
ChangePointSpec parse_change_point_spec(const std::string& text);

/// Binary segmentation over within-segment squared error around segment
/// means. Returns interior split indices i, meaning a boundary between
/// positions i-1 and i, sorted ascending. fixed_count mode returns exactly
/// spec.value splits (requires value < T/2); penalty mode keeps splits whose
/// cost reduction exceeds spec.value.
std::vector<std::size_t> binary_segmentation(std::span<const double> xs,
                                             const ChangePointSpec& spec);

std::vector<std::vector<std::size_t>> change_point_detector(const TimeSeries& series,
                                                            const ChangePointSpec& spec);

enum class NoiseLabel { White, Red, Other };

std::string to_string(NoiseLabel label);

struct NoiseSegment {
    std::size_t start = 0;
    std::size_t end = 0;
    NoiseLabel label = NoiseLabel::Other;
};

/// "white" when the ACF at every lag 1..min(20, L/4) stays inside the
/// +-1.96/sqrt(L) band; "red" when r(1) breaks the band upward and the first
/// three lags are positive and non-increasing; "other" otherwise.
/// Segments shorter than 16 points are rejected.
NoiseLabel classify_noise(std::span<const double> xs);

std::vector<NoiseLabel> noise_global(const TimeSeries& series);

std::vector<std::vector<NoiseSegment>> noise_windowed(const TimeSeries& series,
                                                      std::size_t window);

enum class StationarityMethod { Adf, Kpss };

StationarityMethod stationarity_method_from_string(const std::string& name);

struct StationarityResult {
    bool stationary = false;
    double statistic = 0.0;
    double critical_value = 0.0;
    std::size_t used_lags = 0;
};

/// adf: t-ratio of the lagged-level coefficient in the constant-only
/// augmented regression; the difference-lag order is picked by AIC from
/// 0..min(floor(12*(T/100)^0.25), T/3) and reported as used_lags. Stationary
/// when the statistic falls below the 5% critical value.
/// kpss: level-stationarity LM statistic with a Bartlett long-run variance at
/// bandwidth floor(4*(T/100)^0.25); stationary when below 0.463. T >= 20.
std::vector<StationarityResult> stationarity_test(const TimeSeries& series,
                                                  StationarityMethod method);

enum class SpikeKind { Spike, Dip };

struct SpikeEvent {
    std::size_t index = 0;
    SpikeKind kind = SpikeKind::Spike;
    double magnitude = 0.0;
};

/// Flags points whose residual against an edge-padded rolling median (window
/// 5) reaches threshold * residual std, then keeps the largest magnitude
/// within any min_sep radius. Results are sorted by index.
std::vector<std::vector<SpikeEvent>> spike_detector(const TimeSeries& series, double threshold,
                                                    std::size_t min_sep);

}  // namespace tsart::patterns
