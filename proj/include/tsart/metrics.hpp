#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsart/pipeline.hpp"

namespace tsart {

/// Fraction of predictions whose normalized option token matches the truth.
/// @throws std::invalid_argument on empty or mismatched inputs.
double score_mcq(const std::vector<std::string>& predictions,
                 const std::vector<std::string>& truths);

struct ForecastScore {
    double mse = 0.0;
    double mae = 0.0;
    double mape = 0.0;  // percent
};

/// Point-wise forecast errors; mape needs a zero-free truth vector.
/// @throws std::invalid_argument on length mismatch, empty input, or zero truth.
ForecastScore score_forecast(const std::vector<double>& predicted,
                             const std::vector<double>& truth);

/// Exponential moving average seeded with the first value, smoothing 2/(n+1).
std::vector<double> ema(const std::vector<double>& values, std::size_t n);

/// EMA(12) minus EMA(26). @throws std::invalid_argument when length < 26.
std::vector<double> macd(const std::vector<double>& values);

/// Rolling mean plus k rolling standard deviations, one value per full window.
/// @throws std::invalid_argument when length < window or window == 0.
std::vector<double> bollinger_upper(const std::vector<double>& values, std::size_t window = 20,
                                    double k = 2.0);

enum class TaskType { Mcq, Forecast };

struct TaskRecord {
    QASample sample;
    TaskType task_type = TaskType::Mcq;
    std::optional<std::size_t> horizon;
    std::optional<std::vector<double>> truth_values;
};

/// @throws std::invalid_argument on shape errors, including forecast tasks
/// whose truth_values length differs from horizon.
TaskRecord task_record_from_json(const Json& doc);

struct TaskOutcome {
    std::size_t index = 0;
    bool scored = false;
    std::string failure;  // set when scored is false
    std::optional<bool> correct;            // mcq tasks
    std::optional<ForecastScore> forecast;  // forecast tasks
    std::optional<std::string> final_answer;
};

struct BenchmarkReport {
    std::size_t total = 0;
    std::size_t scored = 0;
    std::size_t failed = 0;
    std::optional<double> accuracy;       // over scored mcq tasks
    std::optional<ForecastScore> errors;  // averaged over scored forecast tasks
    std::vector<TaskOutcome> outcomes;
};

using ClientFactory = std::function<std::shared_ptr<ChatClient>(std::size_t task_index)>;

/// Runs one evaluate-mode episode per task (each task gets a fresh client
/// from the factory), scores mcq answers from the final text and forecast
/// answers from the last forecaster observation, and aggregates. Per-task
/// failures are recorded, never thrown; total always equals scored + failed.
BenchmarkReport run_benchmark(const std::vector<TaskRecord>& tasks,
                              const ClientFactory& make_client, const ToolRegistry& registry,
                              const EpisodeLimits& limits, std::size_t jobs = 1);

Json report_to_json(const BenchmarkReport& report);

}  // namespace tsart
