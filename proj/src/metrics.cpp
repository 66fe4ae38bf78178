#include "tsart/metrics.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "tsart/stats.hpp"

namespace tsart {

double score_mcq(const std::vector<std::string>& predictions,
                 const std::vector<std::string>& truths) {
    if (predictions.empty()) throw std::invalid_argument("nothing to score");
    if (predictions.size() != truths.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const std::string got = normalize_option(predictions[i]);
        if (!got.empty() && got == normalize_option(truths[i])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

ForecastScore score_forecast(const std::vector<double>& predicted,
                             const std::vector<double>& truth) {
    if (predicted.empty()) throw std::invalid_argument("nothing to score");
    if (predicted.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    ForecastScore score;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (truth[i] == 0.0)
            throw std::invalid_argument("mape is undefined for zero truth values");
        const double diff = predicted[i] - truth[i];
        score.mse += diff * diff;
        score.mae += std::abs(diff);
        score.mape += std::abs(diff) / std::abs(truth[i]);
    }
    const auto n = static_cast<double>(predicted.size());
    score.mse /= n;
    score.mae /= n;
    score.mape = 100.0 * score.mape / n;
    return score;
}

std::vector<double> ema(const std::vector<double>& values, std::size_t n) {
    if (values.empty()) throw std::invalid_argument("ema needs at least one value");
    if (n == 0) throw std::invalid_argument("ema span must be positive");
    const double alpha = 2.0 / (static_cast<double>(n) + 1.0);
    std::vector<double> out(values.size());
    out[0] = values[0];
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = alpha * values[i] + (1.0 - alpha) * out[i - 1];
    return out;
}

std::vector<double> macd(const std::vector<double>& values) {
    if (values.size() < 26) throw std::invalid_argument("macd needs at least 26 points");
    const auto fast = ema(values, 12);
    const auto slow = ema(values, 26);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = fast[i] - slow[i];
    return out;
}

std::vector<double> bollinger_upper(const std::vector<double>& values, std::size_t window,
                                    double k) {
    if (window == 0) throw std::invalid_argument("window must be positive");
    if (values.size() < window)
        throw std::invalid_argument("series shorter than the rolling window");
    std::vector<double> out;
    out.reserve(values.size() - window + 1);
    for (std::size_t i = 0; i + window <= values.size(); ++i) {
        std::vector<double> chunk(values.begin() + static_cast<std::ptrdiff_t>(i),
                                  values.begin() + static_cast<std::ptrdiff_t>(i + window));
        out.push_back(stats::mean_of(chunk) + k * stats::population_std(chunk));
    }
    return out;
}

TaskRecord task_record_from_json(const Json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("task record must be an object");
    TaskRecord record;
    record.sample.query = doc.at("query").get<std::string>();
    record.sample.answer = doc.value("answer", std::string());
    record.sample.answer_kind =
        answer_kind_from_string(doc.value("answer_kind", std::string("fixed_options")));

    const std::string type = doc.value("task_type", std::string("mcq"));
    if (type == "mcq") {
        record.task_type = TaskType::Mcq;
    } else if (type == "forecast") {
        record.task_type = TaskType::Forecast;
    } else {
        throw std::invalid_argument("unknown task_type: " + type);
    }

    if (!doc.contains("series") || !doc["series"].is_array() || doc["series"].empty())
        throw std::invalid_argument("task record needs a non-empty 'series' array");
    std::vector<std::vector<double>> rows;
    for (const Json& cell : doc["series"]) {
        if (cell.is_array()) {
            std::vector<double> row;
            for (const Json& v : cell) row.push_back(v.is_number() ? v.get<double>() : NAN);
            rows.push_back(std::move(row));
        } else {
            rows.push_back({cell.is_number() ? cell.get<double>() : NAN});
        }
    }
    record.sample.series = std::make_shared<TimeSeries>(std::move(rows));

    if (doc.contains("horizon") && !doc["horizon"].is_null())
        record.horizon = doc["horizon"].get<std::size_t>();
    if (doc.contains("truth_values") && !doc["truth_values"].is_null())
        record.truth_values = doc["truth_values"].get<std::vector<double>>();
    if (record.task_type == TaskType::Forecast) {
        if (!record.horizon || !record.truth_values)
            throw std::invalid_argument("forecast tasks need horizon and truth_values");
        if (record.truth_values->size() != *record.horizon)
            throw std::invalid_argument("truth_values length must equal horizon");
    }
    return record;
}

namespace {

/// Pulls the channel_0 forecast out of the last forecaster observation.
std::optional<std::vector<double>> last_forecast(const Trajectory& trajectory) {
    for (auto it = trajectory.steps.rbegin(); it != trajectory.steps.rend(); ++it) {
        if (it->observation.tool != "forecaster" || !it->observation.ok()) continue;
        const Json& payload = *it->observation.payload;
        if (!payload.contains("forecasts")) continue;
        const Json& forecasts = payload["forecasts"];
        if (!forecasts.is_object() || !forecasts.contains("channel_0")) continue;
        return forecasts["channel_0"].get<std::vector<double>>();
    }
    return std::nullopt;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<TaskRecord>& tasks,
                              const ClientFactory& make_client, const ToolRegistry& registry,
                              const EpisodeLimits& limits, std::size_t jobs) {
    BenchmarkReport report;
    report.total = tasks.size();
    report.outcomes = parallel_map<TaskOutcome>(
        tasks.size(), jobs, [&](std::size_t i) {
            const TaskRecord& task = tasks[i];
            TaskOutcome outcome;
            outcome.index = i;
            try {
                auto client = make_client(i);
                if (!client) throw std::runtime_error("client factory returned null");
                const Trajectory trajectory =
                    run_episode(*client, registry, *task.sample.series, task.sample.query,
                                PromptMode::Evaluate, limits);
                outcome.final_answer = trajectory.final_answer;
                if (task.task_type == TaskType::Mcq) {
                    if (!trajectory.final_answer)
                        throw std::runtime_error("episode ended without a final answer");
                    outcome.correct = check_answer(task.sample, *trajectory.final_answer);
                } else {
                    auto forecast = last_forecast(trajectory);
                    if (!forecast)
                        throw std::runtime_error(
                            "trajectory holds no forecaster observation to score");
                    if (forecast->size() < task.truth_values->size())
                        throw std::runtime_error("forecast shorter than the truth vector");
                    forecast->resize(task.truth_values->size());
                    outcome.forecast = score_forecast(*forecast, *task.truth_values);
                }
                outcome.scored = true;
            } catch (const std::exception& err) {
                outcome.scored = false;
                outcome.failure = err.what();
            }
            return outcome;
        });

    std::size_t mcq_scored = 0;
    std::size_t mcq_correct = 0;
    std::size_t forecast_scored = 0;
    ForecastScore sums;
    for (const TaskOutcome& outcome : report.outcomes) {
        if (!outcome.scored) {
            ++report.failed;
            continue;
        }
        ++report.scored;
        if (outcome.correct.has_value()) {
            ++mcq_scored;
            if (*outcome.correct) ++mcq_correct;
        }
        if (outcome.forecast.has_value()) {
            ++forecast_scored;
            sums.mse += outcome.forecast->mse;
            sums.mae += outcome.forecast->mae;
            sums.mape += outcome.forecast->mape;
        }
    }
    if (mcq_scored > 0)
        report.accuracy = static_cast<double>(mcq_correct) / static_cast<double>(mcq_scored);
    if (forecast_scored > 0) {
        const auto n = static_cast<double>(forecast_scored);
        report.errors = ForecastScore{sums.mse / n, sums.mae / n, sums.mape / n};
    }
    return report;
}

Json report_to_json(const BenchmarkReport& report) {
    Json rows = Json::array();
    for (const TaskOutcome& outcome : report.outcomes) {
        Json row;
        row["index"] = outcome.index;
        row["scored"] = outcome.scored;
        if (!outcome.scored) row["failure"] = outcome.failure;
        if (outcome.final_answer) row["final_answer"] = *outcome.final_answer;
        if (outcome.correct) row["correct"] = *outcome.correct;
        if (outcome.forecast) {
            row["mse"] = outcome.forecast->mse;
            row["mae"] = outcome.forecast->mae;
            row["mape"] = outcome.forecast->mape;
        }
        rows.push_back(std::move(row));
    }
    Json doc;
    doc["v"] = 1;
    doc["total"] = report.total;
    doc["scored"] = report.scored;
    doc["failed"] = report.failed;
    if (report.accuracy) doc["accuracy"] = *report.accuracy;
    if (report.errors) {
        doc["mse"] = report.errors->mse;
        doc["mae"] = report.errors->mae;
        doc["mape"] = report.errors->mape;
    }
    doc["tasks"] = std::move(rows);
    return doc;
}

}  // namespace tsart
