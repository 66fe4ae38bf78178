#include "tsart/registry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsart/models.hpp"
#include "tsart/relations.hpp"
#include "tsart/stats.hpp"

namespace tsart {

namespace {

Json channel_map(const std::vector<double>& values) {
    Json out = Json::object();
    for (std::size_t c = 0; c < values.size(); ++c) {
        out["channel_" + std::to_string(c)] = values[c];
    }
    return out;
}

std::size_t require_index(const Json& args, const std::string& name) {
    const auto& v = args.at(name);
    const auto raw = v.get<long long>();
    if (raw < 0) throw std::invalid_argument(name + " must be non-negative");
    return static_cast<std::size_t>(raw);
}

std::optional<std::size_t> optional_index(const Json& args, const std::string& name) {
    if (!args.contains(name)) return std::nullopt;
    return require_index(args, name);
}

long long require_int(const Json& args, const std::string& name) {
    return args.at(name).get<long long>();
}

double require_number(const Json& args, const std::string& name) {
    return args.at(name).get<double>();
}

std::string require_text(const Json& args, const std::string& name) {
    return args.at(name).get<std::string>();
}

std::string text_or(const Json& args, const std::string& name, const std::string& fallback) {
    if (!args.contains(name)) return fallback;
    return args.at(name).get<std::string>();
}

Json window_values(const std::vector<stats::WindowValue>& windows, const std::string& value_key) {
    Json out = Json::array();
    for (const auto& w : windows) {
        Json entry = Json::object();
        entry["window_start"] = w.window_start;
        entry["window_end"] = w.window_end;
        entry[value_key] = w.value;
        out.push_back(std::move(entry));
    }
    return out;
}

bool integral_number(double v) { return std::isfinite(v) && v == std::floor(v); }

bool coerce_to_int(Json& value) {
    if (value.is_number_integer() || value.is_number_unsigned()) return true;
    if (value.is_number_float()) {
        const double v = value.get<double>();
        if (!integral_number(v)) return false;
        value = static_cast<long long>(v);
        return true;
    }
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        std::size_t consumed = 0;
        try {
            const double v = std::stod(s, &consumed);
            if (consumed != s.size() || !integral_number(v)) return false;
            value = static_cast<long long>(v);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }
    return false;
}

bool coerce_to_number(Json& value) {
    if (value.is_number()) return true;
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        std::size_t consumed = 0;
        try {
            const double v = std::stod(s, &consumed);
            if (consumed != s.size()) return false;
            value = v;
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }
    return false;
}

bool coerce_param(Json& value, ParamType type) {
    switch (type) {
        case ParamType::Int:
            return coerce_to_int(value);
        case ParamType::Number:
            return coerce_to_number(value);
        case ParamType::Text:
            return value.is_string();
        case ParamType::IndexOrTime: {
            Json as_int = value;
            if (coerce_to_int(as_int)) {
                value = as_int;
                return true;
            }
            return value.is_string();
        }
        case ParamType::CountOrCost:
            return value.is_string() || value.is_number();
    }
    return false;
}

patterns::ChangePointSpec change_point_spec_from(const Json& value) {
    if (value.is_string()) return patterns::parse_change_point_spec(value.get<std::string>());
    const double v = value.get<double>();
    patterns::ChangePointSpec spec;
    if (integral_number(v) && v >= 1.0) {
        spec.mode = patterns::ChangePointSpec::Mode::FixedCount;
    } else {
        spec.mode = patterns::ChangePointSpec::Mode::Penalty;
    }
    spec.value = v;
    if (spec.value <= 0.0) throw std::invalid_argument("change point spec value must be positive");
    return spec;
}

}  // namespace

void ToolRegistry::add_tool(ToolSchema schema, Handler handler) {
    if (index_.contains(schema.name)) {
        throw std::invalid_argument("duplicate tool name \"" + schema.name + "\"");
    }
    index_[schema.name] = schemas_.size();
    schemas_.push_back(std::move(schema));
    handlers_.push_back(std::move(handler));
}

const ToolSchema* ToolRegistry::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        const auto alias = aliases_.find(name);
        if (alias == aliases_.end()) return nullptr;
        it = index_.find(alias->second);
        if (it == index_.end()) return nullptr;
    }
    return &schemas_[it->second];
}

std::string ToolRegistry::render_tool_list() const {
    std::string out;
    for (const auto& schema : schemas_) {
        out += "- " + schema.name + ". (";
        for (std::size_t i = 0; i < schema.params.size(); ++i) {
            if (i > 0) out += ", ";
            out += schema.params[i].name;
        }
        out += "). " + schema.description + "\n";
    }
    return out;
}

std::string ToolRegistry::render_tool_names() const {
    std::string out;
    for (std::size_t i = 0; i < schemas_.size(); ++i) {
        if (i > 0) out += ", ";
        out += schemas_[i].name;
    }
    return out;
}

ValidatedCall ToolRegistry::validate_call(const ToolCall& call) const {
    ValidatedCall result;
    std::string name = call.tool;
    if (const auto alias = aliases_.find(name); alias != aliases_.end()) name = alias->second;
    const auto it = index_.find(name);
    if (it == index_.end()) {
        result.error_kind = "UnknownTool";
        result.error = "unknown tool \"" + call.tool + "\"";
        return result;
    }
    const ToolSchema& schema = schemas_[it->second];
    result.call.tool = name;
    result.call.arguments = Json::object();

    Json args = call.arguments.is_null() ? Json::object() : call.arguments;
    if (!args.is_object()) {
        result.error_kind = "BadParamType";
        result.error = "arguments must be a JSON object";
        return result;
    }
    for (const auto& spec : schema.params) {
        if (!args.contains(spec.name) || args.at(spec.name).is_null()) continue;
        Json value = args.at(spec.name);
        if (!coerce_param(value, spec.type)) {
            result.error_kind = "BadParamType";
            result.error = "parameter \"" + spec.name + "\" of " + name +
                           " has the wrong type" + (spec.note.empty() ? "" : " (" + spec.note + ")");
            return result;
        }
        result.call.arguments[spec.name] = std::move(value);
    }
    for (const auto& spec : schema.params) {
        if (spec.required && !result.call.arguments.contains(spec.name)) {
            result.error_kind = "MissingParam";
            result.error = "missing required parameter \"" + spec.name + "\" for " + name;
            return result;
        }
    }
    for (const auto& [key, value] : args.items()) {
        const bool known = std::any_of(schema.params.begin(), schema.params.end(),
                                       [&](const ParamSpec& p) { return p.name == key; });
        if (!known) result.warnings.push_back("dropped unknown parameter \"" + key + "\"");
    }
    result.ok = true;
    return result;
}

ToolResult ToolRegistry::dispatch(const TimeSeries& series, const ToolCall& call) const {
    ToolResult result;
    result.tool = call.tool;
    const ValidatedCall validated = validate_call(call);
    if (!validated.ok) {
        result.error = validated.error_kind + ": " + validated.error;
        return result;
    }
    result.tool = validated.call.tool;
    try {
        result.payload = handlers_[index_.at(validated.call.tool)](series,
                                                                   validated.call.arguments);
    } catch (const std::exception& e) {
        result.payload.reset();
        result.error = e.what();
    }
    return result;
}

Json ToolRegistry::default_arguments(const std::string& tool, const TimeSeries& series) const {
    if (find(tool) == nullptr) {
        throw std::invalid_argument("unknown tool: " + tool);
    }
    const std::size_t t_len = series.length();
    const std::size_t other = series.channels() > 1 ? 1 : 0;
    Json args = Json::object();
    if (tool == "datapoint_value") {
        args["index_or_timestamp"] = t_len / 2;
    } else if (tool == "summary_stats") {
        args["start"] = 0;
        args["end"] = t_len;
        args["stat"] = "mean";
    } else if (tool == "return_calc") {
        args["t1"] = 0;
        args["t2"] = t_len - 1;
        args["kind"] = "diff";
    } else if (tool == "autocorr") {
        args["lag"] = 1;
    } else if (tool == "rolling_stat") {
        args["stat"] = "mean";
        args["window"] = std::min<std::size_t>(5, t_len);
        args["step"] = 1;
    } else if (tool == "quantile_value") {
        args["q"] = 0.5;
    } else if (tool == "volatility") {
        args["window"] = std::max<std::size_t>(2, std::min<std::size_t>(5, t_len - 1));
    } else if (tool == "seasonality_detector") {
        std::size_t mp = std::max<std::size_t>(2, t_len / 4);
        if (2 * mp > t_len) mp = std::max<std::size_t>(2, t_len / 2);
        args["max_period"] = mp;
    } else if (tool == "change_point_detector") {
        args["penalty_or_n_cp"] = "n_cp=1";
    } else if (tool == "stationarity_test") {
        args["test"] = "adf";
    } else if (tool == "spike_detector") {
        args["threshold"] = 3;
        args["min_sep"] = 1;
    } else if (tool == "channel_correlation") {
        args["channel_1"] = 0;
        args["channel_2"] = other;
        args["lag"] = 0;
        args["method"] = "pearson";
    } else if (tool == "cross_correlation") {
        args["channel_1"] = 0;
        args["channel_2"] = other;
        args["max_lag"] = std::min<std::size_t>(5, t_len >= 4 ? t_len / 2 - 1 : 1);
    } else if (tool == "dtw_distance") {
        args["channel_1"] = 0;
        args["channel_2"] = other;
        args["distance_metric"] = "abs";
    } else if (tool == "shape_similarity") {
        args["channel_1"] = 0;
        args["channel_2"] = other;
        args["norm"] = "zscore";
    } else if (tool == "granger_causality") {
        args["cause_channel"] = 0;
        args["effect_channel"] = other;
        args["max_lag"] = 1;
    } else if (tool == "anomaly_detection") {
        args["anomaly_threshold"] = 1;
    } else if (tool == "forecaster") {
        args["forecast_horizon"] = std::min<std::size_t>(8, 4 * t_len);
    }
    return args;
}

ToolRegistry ToolRegistry::builtin(const patterns::PatternConfig& config) {
    ToolRegistry registry;
    registry.aliases_["anomaly_detector"] = "anomaly_detection";

    registry.add_tool(
        ToolSchema{"series_info",
                   "Retrieves basic metadata of the time series, including sequence length (T), "
                   "number of channels (C), and missing value statistics.",
                   {}},
        [](const TimeSeries& series, const Json&) {
            const auto info = stats::series_info(series);
            Json missing = Json::object();
            for (std::size_t c = 0; c < info.missing_by_channel.size(); ++c) {
                missing["channel_" + std::to_string(c)] = info.missing_by_channel[c];
            }
            return Json{{"length", info.length},
                        {"channels", info.channels},
                        {"missing_count", info.missing_count},
                        {"missing_by_channel", missing}};
        });

    registry.add_tool(
        ToolSchema{"datapoint_value",
                   "Returns the specific values of all channels at a given time index or "
                   "timestamp.",
                   {ParamSpec{"index_or_timestamp", ParamType::IndexOrTime, true,
                              "0-based index or an exact timestamp"}}},
        [](const TimeSeries& series, const Json& args) {
            const Json& where = args.at("index_or_timestamp");
            stats::IndexOrTimestamp key;
            if (where.is_string()) {
                key = where.get<std::string>();
            } else {
                const auto raw = where.get<long long>();
                if (raw < 0) throw std::invalid_argument("index must be non-negative");
                key = static_cast<std::size_t>(raw);
            }
            const std::size_t index = stats::resolve_index(series, key);
            Json payload{{"index", index},
                         {"values", channel_map(stats::datapoint_value(series, key))}};
            if (series.timestamps()) payload["timestamp"] = (*series.timestamps())[index];
            return payload;
        });

    registry.add_tool(
        ToolSchema{"summary_stats",
                   "Calculates a specific statistic (mean, sum, max, min, std) for all channels "
                   "over a defined index range [start, end).",
                   {ParamSpec{"start", ParamType::Int, true, "0-based inclusive start"},
                    ParamSpec{"end", ParamType::Int, true, "exclusive end"},
                    ParamSpec{"stat", ParamType::Text, true,
                              "one of mean, sum, max, min, std"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto start = require_index(args, "start");
            const auto end = require_index(args, "end");
            const auto kind = stats::stat_kind_from_string(require_text(args, "stat"));
            const auto values =
                stats::summary_stats(series, make_range(start, end, series.length()), kind);
            return Json{{"range", Json{{"start", start}, {"end", end}}},
                        {"statistic", stats::to_string(kind)},
                        {"results", channel_map(values)}};
        });

    registry.add_tool(
        ToolSchema{"return_calc",
                   "Computes the percentage return (\"pct\") or absolute difference (\"diff\") "
                   "between two specific time indices.",
                   {ParamSpec{"t1", ParamType::Int, true, "0-based index"},
                    ParamSpec{"t2", ParamType::Int, true, "0-based index"},
                    ParamSpec{"kind", ParamType::Text, true, "pct or diff"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto t1 = require_index(args, "t1");
            const auto t2 = require_index(args, "t2");
            const auto kind = stats::return_kind_from_string(require_text(args, "kind"));
            const auto values = stats::return_calc(series, t1, t2, kind);
            return Json{{"t1", t1},
                        {"t2", t2},
                        {"kind", kind == stats::ReturnKind::Pct ? "pct" : "diff"},
                        {"results", channel_map(values)}};
        });

    registry.add_tool(
        ToolSchema{"autocorr",
                   "Computes the autocorrelation coefficient for each channel at a specified "
                   "time lag to measure self-similarity.",
                   {ParamSpec{"lag", ParamType::Int, true, "0 <= lag < T"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto lag = require_index(args, "lag");
            return Json{{"lag", lag}, {"results", channel_map(stats::autocorr(series, lag))}};
        });

    registry.add_tool(
        ToolSchema{"rolling_stat",
                   "Computes rolling statistics (mean, sum, max, min, std) using a sliding "
                   "window across the time series.",
                   {ParamSpec{"stat", ParamType::Text, true, "one of mean, sum, max, min, std"},
                    ParamSpec{"window", ParamType::Int, true, "1 <= window <= T"},
                    ParamSpec{"step", ParamType::Int, false, "window start stride, default 1"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto kind = stats::stat_kind_from_string(require_text(args, "stat"));
            const auto window = require_index(args, "window");
            const auto step = optional_index(args, "step").value_or(1);
            const auto rolled = stats::rolling_stat(series, kind, window, step);
            const std::string stat_name = stats::to_string(kind);
            Json results = Json::object();
            for (std::size_t c = 0; c < rolled.size(); ++c) {
                results["channel_" + std::to_string(c)] = window_values(rolled[c], stat_name);
            }
            return Json{{"statistic", stat_name},
                        {"window_size", window},
                        {"step_size", step},
                        {"rolling_results", results}};
        });

    registry.add_tool(
        ToolSchema{"quantile_value",
                   "Calculates the empirical value at a specific quantile level (between 0 and "
                   "1) for each channel (e.g., q=0.5 for median).",
                   {ParamSpec{"q", ParamType::Number, true, "quantile level in [0, 1]"}}},
        [](const TimeSeries& series, const Json& args) {
            const double q = require_number(args, "q");
            return Json{{"q", q}, {"results", channel_map(stats::quantile_value(series, q))}};
        });

    registry.add_tool(
        ToolSchema{"volatility",
                   "Computes rolling volatility (calculated as the standard deviation of first "
                   "differences) over a specified window size.",
                   {ParamSpec{"window", ParamType::Int, true, "number of differences, >= 2"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto window = require_index(args, "window");
            const auto rolled = stats::volatility(series, window);
            Json results = Json::object();
            for (std::size_t c = 0; c < rolled.size(); ++c) {
                results["channel_" + std::to_string(c)] = window_values(rolled[c], "volatility");
            }
            return Json{{"window_size", window}, {"volatility_results", results}};
        });

    registry.add_tool(
        ToolSchema{"trend_classifier",
                   "Classifies trends in time series as \"up\", \"down\", or \"flat\"; supports "
                   "global analysis or window-based segment analysis.",
                   {ParamSpec{"window", ParamType::Int, false,
                              "segment width; omit or null for global analysis"}}},
        [config](const TimeSeries& series, const Json& args) {
            Json results = Json::array();
            if (const auto window = optional_index(args, "window")) {
                const auto segments = patterns::trend_windowed(series, *window, config);
                const std::string scope = "window=" + std::to_string(*window);
                for (std::size_t c = 0; c < segments.size(); ++c) {
                    for (const auto& seg : segments[c]) {
                        results.push_back(Json{{"channel", c},
                                               {"trend", patterns::to_string(seg.label)},
                                               {"segment_start", seg.start},
                                               {"segment_end", seg.end},
                                               {"analysis_scope", scope}});
                    }
                }
            } else {
                const auto labels = patterns::trend_global(series, config);
                for (std::size_t c = 0; c < labels.size(); ++c) {
                    results.push_back(Json{{"channel", c},
                                           {"trend", patterns::to_string(labels[c])},
                                           {"analysis_scope", "global"}});
                }
            }
            return Json{{"trend_results", results}};
        });

    registry.add_tool(
        ToolSchema{"seasonality_detector",
                   "Detects periodic patterns and returns estimated period with seasonality "
                   "strength (\"strong\" or \"weak\").",
                   {ParamSpec{"max_period", ParamType::Int, true,
                              "largest candidate period, 2 <= max_period <= T/2"}}},
        [config](const TimeSeries& series, const Json& args) {
            const auto max_period = require_index(args, "max_period");
            const auto found = patterns::seasonality_detector(series, max_period, config);
            Json results = Json::object();
            for (std::size_t c = 0; c < found.size(); ++c) {
                results["channel_" + std::to_string(c)] =
                    Json{{"period", found[c].period},
                         {"strength", found[c].strong ? "strong" : "weak"},
                         {"strength_score", found[c].strength_score}};
            }
            return Json{{"max_period", max_period}, {"seasonality_results", results}};
        });

    registry.add_tool(
        ToolSchema{"change_point_detector",
                   "Detects structural breaks (change points) in mean or variance and returns "
                   "the indices of these changes.",
                   {ParamSpec{"penalty_or_n_cp", ParamType::CountOrCost, true,
                              "\"n_cp=K\" for a fixed count or \"penalty=X\" for a cost floor"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto spec = change_point_spec_from(args.at("penalty_or_n_cp"));
            const auto splits = patterns::change_point_detector(series, spec);
            Json results = Json::array();
            for (std::size_t c = 0; c < splits.size(); ++c) {
                results.push_back(Json{{"channel", c}, {"change_point_indices", splits[c]}});
            }
            return Json{{"change_point_results", results}};
        });

    registry.add_tool(
        ToolSchema{"noise_profile",
                   "Labels noise type (e.g., \"white\", \"red\") based on autocorrelation "
                   "tests; performed globally or over a specific window.",
                   {ParamSpec{"window", ParamType::Int, false,
                              "segment width >= 16; omit or null for global analysis"}}},
        [](const TimeSeries& series, const Json& args) {
            Json results = Json::array();
            if (const auto window = optional_index(args, "window")) {
                const auto segments = patterns::noise_windowed(series, *window);
                const std::string scope = "window=" + std::to_string(*window);
                for (std::size_t c = 0; c < segments.size(); ++c) {
                    for (const auto& seg : segments[c]) {
                        results.push_back(Json{{"channel", c},
                                               {"label", patterns::to_string(seg.label)},
                                               {"segment_start", seg.start},
                                               {"segment_end", seg.end},
                                               {"analysis_scope", scope}});
                    }
                }
            } else {
                const auto labels = patterns::noise_global(series);
                for (std::size_t c = 0; c < labels.size(); ++c) {
                    results.push_back(Json{{"channel", c},
                                           {"label", patterns::to_string(labels[c])},
                                           {"analysis_scope", "global"}});
                }
            }
            return Json{{"noise_results", results}};
        });

    registry.add_tool(
        ToolSchema{"stationarity_test",
                   "Tests stationarity using Augmented Dickey-Fuller or KPSS methods; returns "
                   "status (\"stationary\"/\"nonstationary\") and test statistics.",
                   {ParamSpec{"test", ParamType::Text, true, "adf or kpss"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto method =
                patterns::stationarity_method_from_string(require_text(args, "test"));
            const auto found = patterns::stationarity_test(series, method);
            Json results = Json::array();
            for (std::size_t c = 0; c < found.size(); ++c) {
                results.push_back(
                    Json{{"channel", c},
                         {"status", found[c].stationary ? "stationary" : "nonstationary"},
                         {"statistic", found[c].statistic},
                         {"critical_value", found[c].critical_value},
                         {"used_lags", found[c].used_lags}});
            }
            return Json{{"test", method == patterns::StationarityMethod::Adf ? "adf" : "kpss"},
                        {"stationarity_results", results}};
        });

    registry.add_tool(
        ToolSchema{"spike_detector",
                   "Detects and locates spikes or dips in the series based on amplitude "
                   "threshold and minimum separation.",
                   {ParamSpec{"threshold", ParamType::Number, true,
                              "multiple of the residual standard deviation, > 0"},
                    ParamSpec{"min_sep", ParamType::Int, false,
                              "minimum index distance between reported events, default 1"}}},
        [](const TimeSeries& series, const Json& args) {
            const double threshold = require_number(args, "threshold");
            const auto min_sep = optional_index(args, "min_sep").value_or(1);
            const auto events = patterns::spike_detector(series, threshold, min_sep);
            Json results = Json::object();
            for (std::size_t c = 0; c < events.size(); ++c) {
                Json list = Json::array();
                for (const auto& e : events[c]) {
                    list.push_back(
                        Json{{"index", e.index},
                             {"kind", e.kind == patterns::SpikeKind::Spike ? "spike" : "dip"},
                             {"magnitude", e.magnitude}});
                }
                results["channel_" + std::to_string(c)] = std::move(list);
            }
            return Json{{"threshold", threshold},
                        {"min_sep", min_sep},
                        {"spike_results", results}};
        });

    registry.add_tool(
        ToolSchema{"channel_correlation",
                   "Calculates correlation (\"Pearson\"/\"Spearman\") between two channels with "
                   "an optional time lag.",
                   {ParamSpec{"channel_1", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"channel_2", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"lag", ParamType::Int, false, "default 0"},
                    ParamSpec{"method", ParamType::Text, false,
                              "pearson (default) or spearman"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto a = require_index(args, "channel_1");
            const auto b = require_index(args, "channel_2");
            const long lag = args.contains("lag") ? static_cast<long>(require_int(args, "lag")) : 0;
            const auto method = relations::corr_method_from_string(
                text_or(args, "method", "pearson"));
            const double r = relations::channel_correlation(series, a, b, lag, method);
            return Json{{"channel_1", a},
                        {"channel_2", b},
                        {"lag", lag},
                        {"method", method == relations::CorrMethod::Pearson ? "pearson"
                                                                            : "spearman"},
                        {"correlation", r}};
        });

    registry.add_tool(
        ToolSchema{"cross_correlation",
                   "Computes cross-correlation across multiple lags to find the optimal time "
                   "alignment between two channels.",
                   {ParamSpec{"channel_1", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"channel_2", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"max_lag", ParamType::Int, true, "max_lag < T/2"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto a = require_index(args, "channel_1");
            const auto b = require_index(args, "channel_2");
            const auto max_lag = require_index(args, "max_lag");
            const auto found = relations::cross_correlation(series, a, b, max_lag);
            Json per_lag = Json::array();
            for (const auto& entry : found.per_lag) {
                per_lag.push_back(Json{{"lag", entry.lag}, {"correlation", entry.correlation}});
            }
            return Json{{"channel_1", a},
                        {"channel_2", b},
                        {"max_lag", max_lag},
                        {"per_lag", per_lag},
                        {"best_lag", found.best_lag}};
        });

    registry.add_tool(
        ToolSchema{"dtw_distance",
                   "Measures similarity between two channels using Dynamic Time Warping (DTW); "
                   "returns distance where lower values indicate greater similarity.",
                   {ParamSpec{"channel_1", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"channel_2", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"distance_metric", ParamType::Text, false,
                              "abs (default) or squared"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto a = require_index(args, "channel_1");
            const auto b = require_index(args, "channel_2");
            const auto metric =
                relations::dtw_metric_from_string(text_or(args, "distance_metric", "abs"));
            return Json{{"channel_1", a},
                        {"channel_2", b},
                        {"distance_metric",
                         metric == relations::DtwMetric::Abs ? "abs" : "squared"},
                        {"dtw_distance", relations::dtw_distance(series, a, b, metric)}};
        });

    registry.add_tool(
        ToolSchema{"shape_similarity",
                   "Measures shape similarity between two channels using normalized "
                   "correlation, invariant to amplitude scaling.",
                   {ParamSpec{"channel_1", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"channel_2", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"norm", ParamType::Text, false, "zscore (default) or minmax"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto a = require_index(args, "channel_1");
            const auto b = require_index(args, "channel_2");
            const auto norm = relations::norm_kind_from_string(text_or(args, "norm", "zscore"));
            return Json{{"channel_1", a},
                        {"channel_2", b},
                        {"norm", norm == relations::NormKind::Zscore ? "zscore" : "minmax"},
                        {"similarity", relations::shape_similarity(series, a, b, norm)}};
        });

    registry.add_tool(
        ToolSchema{"granger_causality",
                   "Tests if one channel statistically predicts another (Granger causality) "
                   "within a specified maximum lag.",
                   {ParamSpec{"cause_channel", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"effect_channel", ParamType::Int, true, "0-based channel"},
                    ParamSpec{"max_lag", ParamType::Int, true, "lag order >= 1"}}},
        [](const TimeSeries& series, const Json& args) {
            const auto cause = require_index(args, "cause_channel");
            const auto effect = require_index(args, "effect_channel");
            const auto max_lag = require_index(args, "max_lag");
            const auto found = relations::granger_causality(series, cause, effect, max_lag);
            return Json{{"cause_channel", cause},
                        {"effect_channel", effect},
                        {"max_lag", max_lag},
                        {"f_statistic", found.f_statistic},
                        {"p_value", found.p_value},
                        {"causal", found.causal}};
        });

    registry.add_tool(
        ToolSchema{"anomaly_detection",
                   "Detects anomalies in multivariate time series using a baseline zero-shot "
                   "detector based on reconstruction error (MSE); selects the most significant "
                   "anomalies by interpreting the threshold as a top percentage (if 0-1) or a "
                   "specific count (if >= 1).",
                   {ParamSpec{"anomaly_threshold", ParamType::Number, true,
                              "fraction in (0, 1) or a count >= 1"}}},
        [](const TimeSeries& series, const Json& args) {
            const double threshold = require_number(args, "anomaly_threshold");
            const auto found = models::anomaly_detection(series, threshold);
            Json scores = Json::object();
            Json selected = Json::object();
            for (std::size_t c = 0; c < found.size(); ++c) {
                const std::string key = "channel_" + std::to_string(c);
                scores[key] = found[c].scores;
                selected[key] = found[c].selected;
            }
            return Json{{"anomaly_scores", scores}, {"selected_indices", selected}};
        });

    registry.add_tool(
        ToolSchema{"forecaster",
                   "Generates forecasts for multivariate time series using a baseline zero-shot "
                   "forecaster; returns predicted values for all channels.",
                   {ParamSpec{"forecast_horizon", ParamType::Int, true,
                              "number of future steps, 1 <= horizon <= 4*T"}}},
        [config](const TimeSeries& series, const Json& args) {
            const auto horizon = require_index(args, "forecast_horizon");
            const auto values = models::forecaster(series, horizon, config);
            Json forecasts = Json::object();
            for (std::size_t c = 0; c < values.size(); ++c) {
                forecasts["channel_" + std::to_string(c)] = values[c];
            }
            return Json{{"forecasts", forecasts}};
        });

    return registry;
}

}  // namespace tsart
