#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

// Slow reference implementations used to cross-check the library. Each one
// takes a deliberately different route than the production code: exhaustive
// enumeration instead of dynamic programming, normal equations instead of QR.
namespace oracles {

inline double point_cost(double x, double y, bool squared) {
    const double d = x - y;
    return squared ? d * d : std::fabs(d);
}

inline double dtw_enumerate(std::span<const double> a, std::span<const double> b,
                            std::size_t i, std::size_t j, bool squared) {
    const double here = point_cost(a[i], b[j], squared);
    if (i == 0 && j == 0) return here;
    double best = std::numeric_limits<double>::infinity();
    if (i > 0) best = std::min(best, dtw_enumerate(a, b, i - 1, j, squared));
    if (j > 0) best = std::min(best, dtw_enumerate(a, b, i, j - 1, squared));
    if (i > 0 && j > 0) best = std::min(best, dtw_enumerate(a, b, i - 1, j - 1, squared));
    return here + best;
}

// Minimal cumulative cost over every monotone warping path. Exponential in
// the input sizes; callers keep both under about eight points.
inline double exhaustive_dtw(std::span<const double> a, std::span<const double> b,
                             bool squared) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty input");
    return dtw_enumerate(a, b, a.size() - 1, b.size() - 1, squared);
}

inline double segment_sse(std::span<const double> xs, std::size_t s, std::size_t e) {
    double mean = 0.0;
    for (std::size_t t = s; t < e; ++t) mean += xs[t];
    mean /= static_cast<double>(e - s);
    double sse = 0.0;
    for (std::size_t t = s; t < e; ++t) sse += (xs[t] - mean) * (xs[t] - mean);
    return sse;
}

// Best single interior split by total within-segment squared error.
inline std::vector<std::size_t> exhaustive_one_split(std::span<const double> xs) {
    const std::size_t n = xs.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 1;
    for (std::size_t j = 1; j < n; ++j) {
        const double cost = segment_sse(xs, 0, j) + segment_sse(xs, j, n);
        if (cost < best) {
            best = cost;
            at = j;
        }
    }
    return {at};
}

// Best pair of interior splits, checked over every candidate pair.
inline std::vector<std::size_t> exhaustive_two_splits(std::span<const double> xs) {
    const std::size_t n = xs.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> at = {1, 2};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double cost =
                segment_sse(xs, 0, i) + segment_sse(xs, i, j) + segment_sse(xs, j, n);
            if (cost < best) {
                best = cost;
                at = {i, j};
            }
        }
    }
    return at;
}

struct NormalFit {
    std::vector<double> beta;
    double sse = 0.0;
};

// Ordinary least squares through explicit normal equations and Gauss-Jordan
// elimination, independent of the QR path the library uses.
inline NormalFit normal_equations(const std::vector<std::vector<double>>& x,
                                  const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t k = x[0].size();
    std::vector<std::vector<double>> aug(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += x[i][r] * x[i][c];
            aug[r][c] = acc;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[i][r] * y[i];
        aug[r][k] = acc;
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
        }
        std::swap(aug[col], aug[pivot]);
        if (aug[col][col] == 0.0) throw std::invalid_argument("singular system");
        const double d = aug[col][col];
        for (auto& v : aug[col]) v /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || aug[r][col] == 0.0) continue;
            const double f = aug[r][col];
            for (std::size_t c = 0; c <= k; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    NormalFit fit;
    fit.beta.resize(k);
    for (std::size_t r = 0; r < k; ++r) fit.beta[r] = aug[r][k];
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t c = 0; c < k; ++c) pred += x[i][c] * fit.beta[c];
        const double resid = y[i] - pred;
        fit.sse += resid * resid;
    }
    return fit;
}

// F statistic for "lags of xs improve the autoregression of ys", recomputed
// from scratch with the normal-equations solver.
inline double granger_f(const std::vector<double>& xs, const std::vector<double>& ys,
                        std::size_t max_lag) {
    const std::size_t t_len = ys.size();
    const std::size_t n = t_len - max_lag;
    std::vector<std::vector<double>> restricted(n), unrestricted(n);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = max_lag + r;
        y[r] = ys[t];
        restricted[r].push_back(1.0);
        unrestricted[r].push_back(1.0);
        for (std::size_t i = 1; i <= max_lag; ++i) {
            restricted[r].push_back(ys[t - i]);
            unrestricted[r].push_back(ys[t - i]);
        }
        for (std::size_t i = 1; i <= max_lag; ++i) unrestricted[r].push_back(xs[t - i]);
    }
    const NormalFit fit_r = normal_equations(restricted, y);
    const NormalFit fit_u = normal_equations(unrestricted, y);
    const double df2 = static_cast<double>(n) - (2.0 * static_cast<double>(max_lag) + 1.0);
    return ((fit_r.sse - fit_u.sse) / static_cast<double>(max_lag)) / (fit_u.sse / df2);
}

// t-ratio of the lagged level in the unit-root regression at a given lag
// order, through the normal-equations path.
inline double adf_t_ratio(const std::vector<double>& xs, std::size_t p) {
    const std::size_t t_len = xs.size();
    std::vector<double> diff(t_len - 1);
    for (std::size_t t = 0; t + 1 < t_len; ++t) diff[t] = xs[t + 1] - xs[t];
    const std::size_t n = t_len - 1 - p;
    const std::size_t k = p + 2;
    std::vector<std::vector<double>> x(n);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = p + 1 + r;
        y[r] = diff[t - 1];
        x[r].push_back(1.0);
        x[r].push_back(xs[t - 1]);
        for (std::size_t i = 1; i <= p; ++i) x[r].push_back(diff[t - 1 - i]);
    }
    const NormalFit fit = normal_equations(x, y);
    const double s2 = fit.sse / static_cast<double>(n - k);

    // Variance of the level coefficient needs one diagonal entry of the
    // inverted Gram matrix; invert by solving k unit systems.
    std::vector<std::vector<double>> gram(k, std::vector<double>(2 * k, 0.0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += x[i][r] * x[i][c];
            gram[r][c] = acc;
        }
        gram[r][k + r] = 1.0;
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::fabs(gram[r][col]) > std::fabs(gram[pivot][col])) pivot = r;
        }
        std::swap(gram[col], gram[pivot]);
        const double d = gram[col][col];
        for (auto& v : gram[col]) v /= d;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || gram[r][col] == 0.0) continue;
            const double f = gram[r][col];
            for (std::size_t c = 0; c < 2 * k; ++c) gram[r][c] -= f * gram[col][c];
        }
    }
    const double se = std::sqrt(s2 * gram[1][k + 1]);
    return fit.beta[1] / se;
}

// KPSS level statistic recomputed directly from its definition.
inline double kpss_statistic(const std::vector<double>& xs) {
    const std::size_t t_len = xs.size();
    const auto q = static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(t_len) / 100.0, 0.25)));
    double m = 0.0;
    for (double v : xs) m += v;
    m /= static_cast<double>(t_len);
    std::vector<double> e(t_len);
    for (std::size_t t = 0; t < t_len; ++t) e[t] = xs[t] - m;
    double lrv = 0.0;
    for (double v : e) lrv += v * v;
    lrv /= static_cast<double>(t_len);
    for (std::size_t lag = 1; lag <= q; ++lag) {
        double gamma = 0.0;
        for (std::size_t t = lag; t < t_len; ++t) gamma += e[t] * e[t - lag];
        gamma /= static_cast<double>(t_len);
        lrv += 2.0 * (1.0 - static_cast<double>(lag) / static_cast<double>(q + 1)) * gamma;
    }
    double cum = 0.0;
    double s2 = 0.0;
    for (double v : e) {
        cum += v;
        s2 += cum * cum;
    }
    return s2 / (static_cast<double>(t_len) * static_cast<double>(t_len) * lrv);
}

}  // namespace oracles
