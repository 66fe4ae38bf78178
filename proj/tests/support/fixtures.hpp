#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "tsart/series.hpp"

namespace fixtures {

// Reading sequences used across the suite. Each array is small enough to
// eyeball against the JSON the tools print.
inline const std::vector<double> kOutlierSeries = {
    0.06, 0.11, 0.13, 0.14, 0.12, 0.13, 0.15, 0.14, 0.15, 0.51,
    0.16, 0.13, 0.12, 0.14, 0.11, 0.10, 0.09, 0.08, 0.07, 0.06};

inline const std::vector<double> kIndexSeries = {4875.91, 4871.64, 4875.75,
                                                 4879.98, 4878.27, 4880.68};

inline const std::vector<double> kDeclineSeries = {
    0.07,  0.04,  0.03,  -0.01, -0.06, -0.1,  -0.11, -0.12,
    -0.14, -0.17, -0.21, -0.24, -0.29, -0.34, -0.41, -0.5,
    -0.59, -0.69, -0.76, -0.82, -0.85, -0.87, -0.88, -0.85};

inline const std::vector<double> kVShapeSeries = {
    39.66, 39.69, 39.91, 40.69, 38.47, 37.5,  36.28, 34.31,
    33.12, 33.06, 33.44, 33.72, 33.62, 32.75, 30.44, 29.66,
    29.25, 28.5,  28.94, 31.53, 33.0,  35.16, 37.66, 39.62};

inline const std::vector<double> kGlideSeries = {
    0.52, 0.51, 0.51, 0.5,  0.49, 0.49, 0.48, 0.48, 0.47, 0.46, 0.46, 0.45,
    0.45, 0.44, 0.43, 0.43, 0.42, 0.42, 0.41, 0.41, 0.4,  0.4,  0.39, 0.39};

// Last day of the hourly temperature fixture. The 24 values accumulate to
// exactly 465.29999999999995, whose quotient by 24 is bit-exactly 19.3875,
// so the segment mean serializes as "19.3875".
inline const std::vector<double> kTempLastDay = {
    19.2, 19.1, 19.0, 19.1, 19.2, 19.3, 19.5, 19.6,
    19.7, 19.8, 19.7, 19.6, 19.5, 19.4, 19.3, 19.4,
    19.5, 19.6, 19.4, 19.3, 19.2, 19.3, 19.4, 19.19999999999999};

inline tsart::TimeSeries make_series(const std::vector<double>& values) {
    std::vector<std::vector<double>> rows;
    rows.reserve(values.size());
    for (double v : values) rows.push_back({v});
    return tsart::TimeSeries(std::move(rows));
}

inline std::shared_ptr<const tsart::TimeSeries> make_shared_series(
    const std::vector<double>& values) {
    return std::make_shared<const tsart::TimeSeries>(make_series(values));
}

inline tsart::TimeSeries make_series2(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    std::vector<std::vector<double>> rows;
    rows.reserve(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) rows.push_back({a[t], b[t]});
    return tsart::TimeSeries(std::move(rows));
}

// Deterministic gaussian draws. mt19937 produces identical streams on every
// platform and the Box-Muller transform avoids the libstdc++/libc++ mismatch
// in std::normal_distribution.
class GaussianSource {
public:
    explicit GaussianSource(std::uint32_t seed) : gen_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(gen_()) + 0.5) / 4294967296.0;
        const double u2 = (static_cast<double>(gen_()) + 0.5) / 4294967296.0;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937 gen_;
    bool have_ = false;
    double spare_ = 0.0;
};

inline std::vector<double> white_noise(std::size_t t_len, std::uint32_t seed) {
    GaussianSource src(seed);
    std::vector<double> out(t_len);
    for (auto& v : out) v = src.next();
    return out;
}

inline std::vector<double> random_walk(std::size_t t_len, std::uint32_t seed) {
    GaussianSource src(seed);
    std::vector<double> out(t_len);
    double acc = 0.0;
    for (auto& v : out) {
        acc += src.next();
        v = acc;
    }
    return out;
}

// 0 repeated 20 times then 5 repeated 20 times.
inline std::vector<double> step_fixture() {
    std::vector<double> out(40, 0.0);
    for (std::size_t t = 20; t < 40; ++t) out[t] = 5.0;
    return out;
}

// Repeating [1, 3, 2, 0] pattern, twelve full cycles.
inline std::vector<double> period4_fixture() {
    static const double cycle[4] = {1.0, 3.0, 2.0, 0.0};
    std::vector<double> out(48);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = cycle[t % 4];
    return out;
}

// Fourteen days of plausible hourly temperatures whose final day is pinned
// to the exact-mean block above.
inline std::vector<double> temperature_fixture() {
    std::vector<double> out;
    out.reserve(14 * 24);
    for (int day = 0; day < 13; ++day) {
        for (int hour = 0; hour < 24; ++hour) {
            const double base = 21.0 - 0.1 * day;
            const double swing =
                2.0 * std::sin(2.0 * 3.14159265358979323846 * (hour - 6) / 24.0);
            out.push_back(std::round((base + swing) * 1000.0) / 1000.0);
        }
    }
    out.insert(out.end(), kTempLastDay.begin(), kTempLastDay.end());
    return out;
}

}  // namespace fixtures
