#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsart {

/// Half-open index range [start, end) into a series.
struct Range {
    std::size_t start = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t length() const { return end - start; }
};

/// Builds a Range after checking 0 <= start < end <= limit.
/// @throws std::invalid_argument when the bounds are out of order or past the limit.
[[nodiscard]] Range make_range(std::size_t start, std::size_t end, std::size_t limit);

/// Immutable T x C numeric panel.
///
/// Missing values are stored as quiet NaN; the mask view derives from storage,
/// so the two can never disagree. Timestamps, when present, must be strictly
/// increasing ISO-8601 instants ("2021-08-19", "2021-08-19 13:00:00", or the
/// same with 'T'). Instances are safe to share across threads.
class TimeSeries {
public:
    /// @param rows  one entry per time step, each of identical width C >= 1.
    /// @param timestamps  optional per-step instants, strictly increasing.
    /// @param channel_names  optional per-channel labels, length C.
    /// @throws std::invalid_argument on empty input, ragged rows, or bad timestamps.
    explicit TimeSeries(std::vector<std::vector<double>> rows,
                        std::optional<std::vector<std::string>> timestamps = std::nullopt,
                        std::optional<std::vector<std::string>> channel_names = std::nullopt);

    [[nodiscard]] std::size_t length() const { return rows_; }
    [[nodiscard]] std::size_t channels() const { return cols_; }

    /// Value at time t, channel c (NaN when missing). Bounds-checked.
    [[nodiscard]] double at(std::size_t t, std::size_t c) const;

    [[nodiscard]] bool is_missing(std::size_t t, std::size_t c) const;
    [[nodiscard]] std::size_t missing_count() const;
    [[nodiscard]] std::vector<std::size_t> missing_by_channel() const;

    /// Copy of one row (all channels at time t).
    [[nodiscard]] std::vector<double> row(std::size_t t) const;

    /// Copy of one channel over the full length, missing entries as NaN.
    [[nodiscard]] std::vector<double> channel(std::size_t c) const;

    /// Copy of channel c restricted to [r.start, r.end).
    /// @throws std::invalid_argument when the segment contains a missing value.
    [[nodiscard]] std::vector<double> channel_segment(std::size_t c, Range r) const;

    [[nodiscard]] const std::optional<std::vector<std::string>>& timestamps() const {
        return timestamps_;
    }
    [[nodiscard]] const std::optional<std::vector<std::string>>& channel_names() const {
        return channel_names_;
    }

    /// Exact-match timestamp lookup; no interpolation.
    [[nodiscard]] std::optional<std::size_t> index_of_timestamp(const std::string& ts) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    std::optional<std::vector<std::string>> timestamps_;
    std::optional<std::vector<std::string>> channel_names_;
};

struct CsvOptions {
    bool has_header = false;
    char delimiter = ',';
};

/// Loads a series from disk.
///
/// format "csv": one column per channel, optional header row; cells that do
/// not parse as numbers become missing values. format "json": either an array
/// of rows (or plain numbers for a single channel) or an object
/// {"values": [...], "timestamps": [...], "channel_names": [...]}.
/// @throws std::runtime_error on unreadable files, zero data rows, or ragged rows.
[[nodiscard]] TimeSeries load_series(const std::string& path, const std::string& format,
                                     const CsvOptions& csv = {});

/// Renders the series the way queries quote it: a bracketed comma-separated
/// list per channel, values rounded to `precision` decimals with trailing
/// zeros trimmed. Multi-channel output is one "channel_k: [...]" line per channel.
[[nodiscard]] std::string render_for_prompt(const TimeSeries& series, int precision = 3);

/// Rounds and formats one value the way render_for_prompt does.
[[nodiscard]] std::string format_value(double value, int precision);

/// Parses "[a, b, c]" back into numbers; "NaN" entries become NaN.
/// @throws std::invalid_argument when the text is not a bracketed numeric list.
[[nodiscard]] std::vector<double> parse_bracketed_list(const std::string& text);

}  // namespace tsart
