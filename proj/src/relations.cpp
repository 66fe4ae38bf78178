#include "tsart/relations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tsart/linalg.hpp"
#include "tsart/stats.hpp"

namespace tsart::relations {

namespace {

std::vector<double> full_channel(const TimeSeries& series, std::size_t c) {
    if (c >= series.channels()) {
        throw std::invalid_argument("channel " + std::to_string(c) + " out of range for width " +
                                    std::to_string(series.channels()));
    }
    return series.channel_segment(c, Range{0, series.length()});
}

bool is_constant(std::span<const double> xs) {
    for (double x : xs) {
        if (x != xs.front()) return false;
    }
    return true;
}

std::vector<double> zscore(std::span<const double> xs) {
    const double m = stats::mean_of(xs);
    const double s = stats::population_std(xs);
    if (s == 0.0) throw std::invalid_argument("cannot normalize a constant channel");
    std::vector<double> out(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) out[t] = (xs[t] - m) / s;
    return out;
}

std::vector<double> minmax(std::span<const double> xs) {
    const double lo = stats::min_of(xs);
    const double hi = stats::max_of(xs);
    if (lo == hi) throw std::invalid_argument("cannot normalize a constant channel");
    std::vector<double> out(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) out[t] = (xs[t] - lo) / (hi - lo);
    return out;
}

}  // namespace

CorrMethod corr_method_from_string(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "pearson") return CorrMethod::Pearson;
    if (lower == "spearman") return CorrMethod::Spearman;
    throw std::invalid_argument("unknown correlation method \"" + name +
                                "\" (expected pearson or spearman)");
}

DtwMetric dtw_metric_from_string(const std::string& name) {
    if (name == "abs") return DtwMetric::Abs;
    if (name == "squared") return DtwMetric::Squared;
    throw std::invalid_argument("unknown distance metric \"" + name +
                                "\" (expected abs or squared)");
}

NormKind norm_kind_from_string(const std::string& name) {
    if (name == "zscore") return NormKind::Zscore;
    if (name == "minmax") return NormKind::Minmax;
    throw std::invalid_argument("unknown norm \"" + name + "\" (expected zscore or minmax)");
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
    if (a.size() < 3) throw std::invalid_argument("need at least 3 overlapping points");
    const double ma = stats::mean_of(a);
    const double mb = stats::mean_of(b);
    double num = 0.0;
    double da = 0.0;
    double db = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        num += (a[t] - ma) * (b[t] - mb);
        da += (a[t] - ma) * (a[t] - ma);
        db += (b[t] - mb) * (b[t] - mb);
    }
    if (da == 0.0 || db == 0.0) {
        throw std::invalid_argument("correlation undefined on a constant segment");
    }
    return num / std::sqrt(da * db);
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    std::vector<double> ranks(xs.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double channel_correlation(const TimeSeries& series, std::size_t a, std::size_t b, long lag,
                           CorrMethod method) {
    const auto xs = full_channel(series, a);
    const auto ys = full_channel(series, b);
    const auto t_len = static_cast<long>(series.length());
    if (lag <= -t_len || lag >= t_len) {
        throw std::invalid_argument("|lag| must be below the series length");
    }
    // Pair a_t with b_{t-lag}; valid t range is the overlap of [0,T) shifted.
    const long t_begin = std::max<long>(0, lag);
    const long t_end = std::min<long>(t_len, t_len + lag);
    if (t_end - t_begin < 3) throw std::invalid_argument("need at least 3 overlapping points");
    std::vector<double> av;
    std::vector<double> bv;
    av.reserve(static_cast<std::size_t>(t_end - t_begin));
    bv.reserve(static_cast<std::size_t>(t_end - t_begin));
    for (long t = t_begin; t < t_end; ++t) {
        av.push_back(xs[static_cast<std::size_t>(t)]);
        bv.push_back(ys[static_cast<std::size_t>(t - lag)]);
    }
    if (method == CorrMethod::Spearman) {
        const auto ra = average_ranks(av);
        const auto rb = average_ranks(bv);
        return pearson(ra, rb);
    }
    return pearson(av, bv);
}

CrossCorrelationResult cross_correlation(const TimeSeries& series, std::size_t a, std::size_t b,
                                         std::size_t max_lag) {
    if (2 * max_lag >= series.length()) {
        throw std::invalid_argument("max_lag must be below T/2");
    }
    CrossCorrelationResult result;
    const auto lo = -static_cast<long>(max_lag);
    const auto hi = static_cast<long>(max_lag);
    bool have_best = false;
    double best_value = 0.0;
    for (long lag = lo; lag <= hi; ++lag) {
        const double r = channel_correlation(series, a, b, lag, CorrMethod::Pearson);
        result.per_lag.push_back(LagCorrelation{lag, r});
        const bool better =
            !have_best || r > best_value ||
            (r == best_value && (std::labs(lag) < std::labs(result.best_lag) ||
                                 (std::labs(lag) == std::labs(result.best_lag) &&
                                  lag < result.best_lag)));
        if (better) {
            have_best = true;
            best_value = r;
            result.best_lag = lag;
        }
    }
    return result;
}

double dtw_distance(std::span<const double> a, std::span<const double> b, DtwMetric metric) {
    if (a.empty() || b.empty()) throw std::invalid_argument("channels must be nonempty");
    const auto step = [&](double x, double y) {
        const double d = x - y;
        return metric == DtwMetric::Abs ? std::fabs(d) : d * d;
    };
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, kInf);
    std::vector<double> cur(m + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = kInf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double best = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = step(a[i - 1], b[j - 1]) + best;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double dtw_distance(const TimeSeries& series, std::size_t a, std::size_t b, DtwMetric metric) {
    return dtw_distance(std::span<const double>(full_channel(series, a)),
                        std::span<const double>(full_channel(series, b)), metric);
}

double shape_similarity(const TimeSeries& series, std::size_t a, std::size_t b, NormKind norm) {
    const auto xs = full_channel(series, a);
    const auto ys = full_channel(series, b);
    if (xs.size() != ys.size()) throw std::invalid_argument("length mismatch");
    if (is_constant(xs) || is_constant(ys)) {
        throw std::invalid_argument("cannot normalize a constant channel");
    }
    const auto na = norm == NormKind::Zscore ? zscore(xs) : minmax(xs);
    const auto nb = norm == NormKind::Zscore ? zscore(ys) : minmax(ys);
    return pearson(na, nb);
}

GrangerResult granger_causality(const TimeSeries& series, std::size_t cause, std::size_t effect,
                                std::size_t max_lag) {
    if (max_lag < 1) throw std::invalid_argument("max_lag must be at least 1");
    if (series.length() < 4 * max_lag + 8) {
        throw std::invalid_argument("series too short: need at least 4*max_lag + 8 points");
    }
    const auto xs = full_channel(series, cause);
    const auto ys = full_channel(series, effect);
    const std::size_t t_len = ys.size();
    const std::size_t n = t_len - max_lag;

    linalg::Matrix restricted = linalg::zeros(n, max_lag + 1);
    linalg::Matrix unrestricted = linalg::zeros(n, 2 * max_lag + 1);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = max_lag + r;
        y[r] = ys[t];
        restricted.at(r, 0) = 1.0;
        unrestricted.at(r, 0) = 1.0;
        for (std::size_t i = 1; i <= max_lag; ++i) {
            restricted.at(r, i) = ys[t - i];
            unrestricted.at(r, i) = ys[t - i];
            unrestricted.at(r, max_lag + i) = xs[t - i];
        }
    }
    const linalg::OlsFit fit_r = linalg::ols(restricted, y);
    const linalg::OlsFit fit_u = linalg::ols(unrestricted, y);

    const double df2 = static_cast<double>(n) - (2.0 * static_cast<double>(max_lag) + 1.0);
    if (df2 <= 0.0) throw std::invalid_argument("no residual degrees of freedom");
    GrangerResult result;
    if (fit_u.sse <= 0.0) {
        // A perfect unrestricted fit: the cause lags explain everything.
        result.f_statistic = std::numeric_limits<double>::infinity();
        result.p_value = 0.0;
        result.causal = true;
        return result;
    }
    result.f_statistic = ((fit_r.sse - fit_u.sse) / static_cast<double>(max_lag)) /
                         (fit_u.sse / df2);
    if (result.f_statistic < 0.0) result.f_statistic = 0.0;
    result.p_value = linalg::f_survival(result.f_statistic, static_cast<double>(max_lag), df2);
    result.causal = result.p_value < 0.05;
    return result;
}

}  // namespace tsart::relations
