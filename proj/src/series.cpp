#include "tsart/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tsart {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_number(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* begin = t.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + t.size()) return false;
    out = v;
    return true;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

// Seconds since epoch (with fraction) for "YYYY-MM-DD[{T| }HH:MM:SS[.fff]][Z]".
double parse_instant(const std::string& raw) {
    const std::string s = trim(raw);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) {
        throw std::invalid_argument("timestamp not ISO-8601: \"" + raw + "\"");
    }
    std::string rest = s.substr(consumed);
    if (!rest.empty() && rest.back() == 'Z') rest.pop_back();
    if (!rest.empty()) {
        if (rest.front() != 'T' && rest.front() != ' ') {
            throw std::invalid_argument("timestamp not ISO-8601: \"" + raw + "\"");
        }
        rest.erase(rest.begin());
        int n2 = 0;
        if (std::sscanf(rest.c_str(), "%2d:%2d:%lf%n", &h, &mi, &sec, &n2) != 3 ||
            n2 != static_cast<int>(rest.size())) {
            throw std::invalid_argument("timestamp not ISO-8601: \"" + raw + "\"");
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec >= 61.0) {
        throw std::invalid_argument("timestamp field out of range: \"" + raw + "\"");
    }
    return static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo),
                                               static_cast<unsigned>(d))) *
               86400.0 +
           h * 3600.0 + mi * 60.0 + sec;
}

double cell_value(const nlohmann::json& cell) {
    if (cell.is_number()) return cell.get<double>();
    if (cell.is_string()) {
        double v = 0.0;
        if (parse_number(cell.get<std::string>(), v)) return v;
    }
    return kMissing;
}

std::vector<std::vector<double>> rows_from_json_values(const nlohmann::json& values) {
    if (!values.is_array() || values.empty()) {
        throw std::runtime_error("json series: expected a non-empty array of rows");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(values.size());
    if (values.front().is_array()) {
        for (const auto& row : values) {
            if (!row.is_array()) throw std::runtime_error("json series: mixed row shapes");
            std::vector<double> r;
            r.reserve(row.size());
            for (const auto& cell : row) r.push_back(cell_value(cell));
            rows.push_back(std::move(r));
        }
    } else {
        for (const auto& cell : values) rows.push_back({cell_value(cell)});
    }
    return rows;
}

}  // namespace

Range make_range(std::size_t start, std::size_t end, std::size_t limit) {
    if (start >= end || end > limit) {
        throw std::invalid_argument("invalid range [" + std::to_string(start) + ", " +
                                    std::to_string(end) + ") for length " +
                                    std::to_string(limit));
    }
    return Range{start, end};
}

TimeSeries::TimeSeries(std::vector<std::vector<double>> rows,
                       std::optional<std::vector<std::string>> timestamps,
                       std::optional<std::vector<std::string>> channel_names) {
    if (rows.empty()) throw std::invalid_argument("series must have at least one row");
    cols_ = rows.front().size();
    if (cols_ == 0) throw std::invalid_argument("series must have at least one channel");
    rows_ = rows.size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw std::invalid_argument("ragged rows: expected width " + std::to_string(cols_) +
                                        ", got " + std::to_string(row.size()));
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
    if (timestamps) {
        if (timestamps->size() != rows_) {
            throw std::invalid_argument("timestamp count does not match row count");
        }
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& ts : *timestamps) {
            const double instant = parse_instant(ts);
            if (instant <= prev) {
                throw std::invalid_argument("timestamps must be strictly increasing at \"" + ts +
                                            "\"");
            }
            prev = instant;
        }
        timestamps_ = std::move(timestamps);
    }
    if (channel_names) {
        if (channel_names->size() != cols_) {
            throw std::invalid_argument("channel name count does not match channel count");
        }
        channel_names_ = std::move(channel_names);
    }
}

double TimeSeries::at(std::size_t t, std::size_t c) const {
    if (t >= rows_ || c >= cols_) {
        throw std::out_of_range("series index (" + std::to_string(t) + ", " + std::to_string(c) +
                                ") out of range for " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    }
    return data_[t * cols_ + c];
}

bool TimeSeries::is_missing(std::size_t t, std::size_t c) const { return std::isnan(at(t, c)); }

std::size_t TimeSeries::missing_count() const {
    std::size_t n = 0;
    for (double v : data_) n += std::isnan(v) ? 1 : 0;
    return n;
}

std::vector<std::size_t> TimeSeries::missing_by_channel() const {
    std::vector<std::size_t> out(cols_, 0);
    for (std::size_t t = 0; t < rows_; ++t) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (std::isnan(data_[t * cols_ + c])) ++out[c];
        }
    }
    return out;
}

std::vector<double> TimeSeries::row(std::size_t t) const {
    if (t >= rows_) {
        throw std::out_of_range("row " + std::to_string(t) + " out of range for length " +
                                std::to_string(rows_));
    }
    return {data_.begin() + static_cast<std::ptrdiff_t>(t * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((t + 1) * cols_)};
}

std::vector<double> TimeSeries::channel(std::size_t c) const {
    if (c >= cols_) {
        throw std::out_of_range("channel " + std::to_string(c) + " out of range for width " +
                                std::to_string(cols_));
    }
    std::vector<double> out;
    out.reserve(rows_);
    for (std::size_t t = 0; t < rows_; ++t) out.push_back(data_[t * cols_ + c]);
    return out;
}

std::vector<double> TimeSeries::channel_segment(std::size_t c, Range r) const {
    make_range(r.start, r.end, rows_);
    std::vector<double> out;
    out.reserve(r.length());
    for (std::size_t t = r.start; t < r.end; ++t) {
        const double v = at(t, c);
        if (std::isnan(v)) {
            throw std::invalid_argument("missing value in channel " + std::to_string(c) +
                                        " at index " + std::to_string(t));
        }
        out.push_back(v);
    }
    return out;
}

std::optional<std::size_t> TimeSeries::index_of_timestamp(const std::string& ts) const {
    if (!timestamps_) return std::nullopt;
    const auto it = std::find(timestamps_->begin(), timestamps_->end(), ts);
    if (it == timestamps_->end()) return std::nullopt;
    return static_cast<std::size_t>(it - timestamps_->begin());
}

TimeSeries load_series(const std::string& path, const std::string& format,
                       const CsvOptions& csv) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    if (format == "json") {
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("cannot parse json file " + path + ": " + e.what());
        }
        std::optional<std::vector<std::string>> timestamps;
        std::optional<std::vector<std::string>> names;
        const nlohmann::json* values = &doc;
        if (doc.is_object()) {
            if (!doc.contains("values")) {
                throw std::runtime_error("json series object needs a \"values\" field");
            }
            values = &doc["values"];
            if (doc.contains("timestamps") && !doc["timestamps"].is_null()) {
                timestamps = doc["timestamps"].get<std::vector<std::string>>();
            }
            if (doc.contains("channel_names") && !doc["channel_names"].is_null()) {
                names = doc["channel_names"].get<std::vector<std::string>>();
            }
        }
        return TimeSeries(rows_from_json_values(*values), std::move(timestamps),
                          std::move(names));
    }
    if (format != "csv") throw std::runtime_error("unknown series format: " + format);

    std::vector<std::vector<double>> rows;
    std::string line;
    bool skipped_header = !csv.has_header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, csv.delimiter)) {
            double v = kMissing;
            parse_number(cell, v);
            row.push_back(v);
        }
        if (!line.empty() && line.back() == csv.delimiter) row.push_back(kMissing);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("no data rows in " + path);
    const std::size_t width = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != width) throw std::runtime_error("ragged rows in " + path);
    }
    bool any_numeric = false;
    for (const auto& row : rows) {
        for (double v : row) any_numeric = any_numeric || !std::isnan(v);
    }
    if (!any_numeric) throw std::runtime_error("no numeric data in " + path);
    return TimeSeries(std::move(rows));
}

std::string format_value(double value, int precision) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (precision < 0) precision = 0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string render_for_prompt(const TimeSeries& series, int precision) {
    std::string out;
    for (std::size_t c = 0; c < series.channels(); ++c) {
        if (series.channels() > 1) {
            if (c > 0) out += '\n';
            out += "channel_" + std::to_string(c) + ": ";
        }
        out += '[';
        for (std::size_t t = 0; t < series.length(); ++t) {
            if (t > 0) out += ", ";
            out += format_value(series.at(t, c), precision);
        }
        out += ']';
    }
    return out;
}

std::vector<double> parse_bracketed_list(const std::string& text) {
    const std::size_t open = text.find('[');
    const std::size_t close = text.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close <= open) {
        throw std::invalid_argument("expected a bracketed list");
    }
    std::vector<double> out;
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty()) continue;
        double v = 0.0;
        if (!parse_number(t, v)) {
            throw std::invalid_argument("non-numeric list entry: \"" + t + "\"");
        }
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty bracketed list");
    return out;
}

}  // namespace tsart
