#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsart/io.hpp"
#include "tsart/metrics.hpp"
#include "tsart/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitToolError = 2;
constexpr int kExitEndpoint = 3;
constexpr int kExitTruncated = 4;

using tsart::Json;

struct EndpointFlags {
    std::string api_base;
    std::string api_key;
    std::string model;
    double temperature = -1.0;  // negative means "use the mode default"
    int timeout_ms = 30000;
    int retries = 3;
};

void add_endpoint_flags(CLI::App* cmd, EndpointFlags& flags) {
    cmd->add_option("--api-base", flags.api_base,
                    "Chat endpoint base URL (default: TSART_API_BASE)");
    cmd->add_option("--api-key", flags.api_key, "API key (default: TSART_API_KEY)");
    cmd->add_option("--model", flags.model, "Model name (default: TSART_MODEL)");
    cmd->add_option("--temperature", flags.temperature, "Sampling temperature");
    cmd->add_option("--timeout-ms", flags.timeout_ms, "Per-request timeout");
    cmd->add_option("--retries", flags.retries, "Max retries on transient failures");
}

tsart::EndpointConfig resolve_endpoint(const EndpointFlags& flags, double default_temperature) {
    tsart::EndpointConfig config = tsart::endpoint_from_env();
    if (!flags.api_base.empty()) config.base_url = flags.api_base;
    if (!flags.api_key.empty()) config.api_key = flags.api_key;
    if (!flags.model.empty()) config.model = flags.model;
    config.temperature = flags.temperature >= 0.0 ? flags.temperature : default_temperature;
    config.timeout_ms = flags.timeout_ms;
    config.max_retries = flags.retries;
    if (config.model.empty()) config.model = "default";
    return config;
}

tsart::TimeSeries load_series_auto(const std::string& path, const std::string& format) {
    std::string effective = format;
    if (effective == "auto")
        effective = std::filesystem::path(path).extension() == ".csv" ? "csv" : "json";
    return tsart::load_series(path, effective);
}

/// Builds a per-episode client: fresh scripted turns when a mock file is
/// given, otherwise a fresh HTTP client for the configured endpoint.
tsart::ClientFactory make_client_factory(const std::optional<tsart::io::MockScript>& mock,
                                         const tsart::EndpointConfig& config) {
    if (mock) {
        return [script = *mock](std::size_t index) -> std::shared_ptr<tsart::ChatClient> {
            return std::make_shared<tsart::ScriptedChatClient>(script.turns_for(index));
        };
    }
    if (config.base_url.empty())
        throw CLI::ValidationError(
            "endpoint",
            "no endpoint configured; pass --api-base / TSART_API_BASE or use --mock");
    return [config](std::size_t) -> std::shared_ptr<tsart::ChatClient> {
        return std::make_shared<tsart::HttpChatClient>(config);
    };
}

std::string flags_fingerprint(const Json& flags) { return flags.dump(); }

void write_run_manifest(const std::string& out_path, const std::string& explicit_path,
                        const std::string& command, std::uint64_t seed, const Json& counts,
                        const Json& flags) {
    std::string path = explicit_path;
    if (path.empty()) {
        if (out_path.empty()) return;
        path = out_path + ".manifest.json";
    }
    tsart::io::write_manifest(path, command, seed, counts, flags_fingerprint(flags));
}

void print_trajectory(const tsart::Trajectory& trajectory) {
    for (const auto& step : trajectory.steps) {
        std::cout << "Thought:\n" << step.thought << "\n";
        std::cout << "Action:\n" << tsart::render_call(step.action) << "\n";
        std::cout << "Observation:\n" << tsart::render_observation(step.observation) << "\n";
    }
    if (trajectory.final_answer)
        std::cout << "Final Answer:\n" << *trajectory.final_answer << "\n";
    else
        std::cout << "(episode truncated without a final answer)\n";
}

int run_analyze(const std::string& series_path, const std::string& format,
                const std::string& tool, const std::string& args_text) {
    const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
    if (registry.find(tool) == nullptr) {
        std::cerr << "unknown tool: " << tool << "\nknown tools: "
                  << registry.render_tool_names() << "\n";
        return kExitUsage;
    }
    Json args = Json::parse(args_text, nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
        std::cerr << "--args must be a JSON object\n";
        return kExitUsage;
    }
    const tsart::TimeSeries series = load_series_auto(series_path, format);
    const tsart::ToolResult result = registry.dispatch(series, {tool, std::move(args)});
    if (!result.ok()) {
        std::cerr << "tool error: " << *result.error << "\n";
        return kExitToolError;
    }
    std::cout << result.payload->dump(2) << "\n";
    return kExitOk;
}

int run_agent(const std::string& series_path, const std::string& format,
              const std::string& question, const std::optional<tsart::io::MockScript>& mock,
              const EndpointFlags& endpoint, const tsart::EpisodeLimits& limits,
              const std::string& out_path) {
    const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
    const tsart::TimeSeries series = load_series_auto(series_path, format);
    auto factory = make_client_factory(mock, resolve_endpoint(endpoint, 0.0));
    auto client = factory(0);
    const tsart::Trajectory trajectory = tsart::run_episode(
        *client, registry, series, question, tsart::PromptMode::Evaluate, limits);
    print_trajectory(trajectory);
    if (!out_path.empty()) {
        Json record = tsart::trajectory_to_json(trajectory);
        record["series"] = tsart::io::series_rows_json(series);
        tsart::io::write_jsonl(out_path, {record});
    }
    return trajectory.final_answer ? kExitOk : kExitTruncated;
}

int run_collect(const std::string& samples_path, const std::optional<tsart::io::MockScript>& mock,
                const EndpointFlags& endpoint, const tsart::EpisodeLimits& limits,
                const std::string& out_path, const std::string& manifest_path,
                std::uint64_t seed, std::size_t jobs, const Json& flags) {
    const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
    const std::string base_dir = std::filesystem::path(samples_path).parent_path().string();
    std::vector<tsart::QASample> samples;
    for (const Json& doc : tsart::io::read_jsonl(samples_path))
        samples.push_back(tsart::io::qa_sample_from_json(doc, base_dir));

    auto factory = make_client_factory(mock, resolve_endpoint(endpoint, 0.7));
    std::vector<Json> records = tsart::parallel_map<Json>(
        samples.size(), jobs, [&](std::size_t i) {
            auto client = factory(i);
            const tsart::Trajectory trajectory = tsart::run_episode(
                *client, registry, *samples[i].series, samples[i].query,
                tsart::PromptMode::Collect, limits, samples[i].answer,
                "sample-" + std::to_string(i));
            return tsart::io::trajectory_record(trajectory, samples[i]);
        });

    std::size_t truncated = 0;
    for (const Json& record : records)
        if (record["final_answer"].is_null()) ++truncated;
    tsart::io::write_jsonl(out_path, records);
    write_run_manifest(out_path, manifest_path, "collect", seed,
                       Json{{"samples", samples.size()},
                            {"trajectories", records.size()},
                            {"truncated", truncated}},
                       flags);
    std::cout << "collected " << records.size() << " trajectories (" << truncated
              << " truncated) -> " << out_path << "\n";
    return kExitOk;
}

int run_validate(const std::string& in_path, const std::string& judgers_path, double sigma,
                 std::uint64_t seed, std::size_t jobs, const std::string& out_path,
                 const std::string& kept_path, const std::string& manifest_path,
                 const Json& flags) {
    const auto docs = tsart::io::read_jsonl(in_path);
    std::vector<tsart::io::TrajectoryRecord> records;
    for (const Json& doc : docs) records.push_back(tsart::io::trajectory_record_from_json(doc));
    const auto specs = tsart::io::load_judger_specs(judgers_path);

    std::vector<Json> rows = tsart::parallel_map<Json>(
        records.size(), jobs, [&](std::size_t i) {
            const auto judgers = tsart::io::make_judgers(specs, i);
            const tsart::Verdict verdict =
                tsart::validate(records[i].sample, records[i].trajectory,
                                tsart::token_overlap_f1, sigma, judgers, seed + i);
            Json votes = Json::array();
            for (const auto& vote : verdict.votes) {
                Json row{{"judger", specs[vote.judger_id].name},
                         {"judger_id", vote.judger_id},
                         {"chain_index", vote.chain_index},
                         {"vote", vote.vote}};
                if (!vote.diagnostic.empty()) row["diagnostic"] = vote.diagnostic;
                votes.push_back(std::move(row));
            }
            return Json{{"index", i},
                        {"answer_flag", verdict.answer_flag},
                        {"kept", verdict.kept},
                        {"votes", std::move(votes)}};
        });

    std::size_t kept = 0;
    std::vector<Json> kept_records;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i]["kept"].get<bool>()) {
            ++kept;
            kept_records.push_back(docs[i]);
        }
    }
    tsart::io::write_jsonl(out_path, rows);
    if (!kept_path.empty()) tsart::io::write_jsonl(kept_path, kept_records);
    write_run_manifest(out_path, manifest_path, "validate", seed,
                       Json{{"records", records.size()}, {"kept", kept}}, flags);
    std::cout << "validated " << records.size() << " trajectories, kept " << kept << " -> "
              << out_path << "\n";
    return kExitOk;
}

int run_export(int stage, const std::string& in_path, const std::string& out_path,
               std::uint64_t seed, std::size_t alts, std::size_t mix,
               const std::optional<tsart::io::MockScript>& mock, const EndpointFlags& endpoint,
               const std::string& manifest_path, const Json& flags) {
    const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
    std::vector<tsart::io::TrajectoryRecord> records;
    for (const Json& doc : tsart::io::read_jsonl(in_path))
        records.push_back(tsart::io::trajectory_record_from_json(doc));

    std::vector<tsart::Conversation> conversations;
    if (stage == 2) {
        for (const auto& record : records) {
            auto batch = tsart::export_stage2(record.trajectory);
            conversations.insert(conversations.end(), batch.begin(), batch.end());
        }
    } else if (stage == 1) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& record = records[i];
            tsart::RandomActionSampler sampler(registry, record.sample.series, seed + i);
            const auto experience = tsart::build_early_experience(
                registry, *record.sample.series, record.trajectory, sampler, alts);
            auto batch = tsart::export_stage1(record.trajectory, experience);
            conversations.insert(conversations.end(), batch.begin(), batch.end());
        }
    } else {  // stage 4
        std::optional<tsart::EndpointConfig> config;
        if (!mock) config = resolve_endpoint(endpoint, 0.7);
        std::vector<std::pair<const tsart::Trajectory*, std::vector<tsart::ReflectionSample>>>
            items;
        std::size_t dropped = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& record = records[i];
            tsart::RandomActionSampler sampler(registry, record.sample.series, seed + i);
            const auto experience = tsart::build_early_experience(
                registry, *record.sample.series, record.trajectory, sampler, alts);
            std::shared_ptr<tsart::ChatClient> client;
            if (mock)
                client = std::make_shared<tsart::ScriptedChatClient>(mock->turns_for(i));
            else
                client = std::make_shared<tsart::HttpChatClient>(*config);
            tsart::ReflectionBuild build =
                tsart::build_reflections(experience, record.trajectory, *client);
            dropped += build.dropped.size();
            for (const std::string& reason : build.dropped)
                std::cerr << "record " << i << ": dropped reflection (" << reason << ")\n";
            items.emplace_back(&record.trajectory, std::move(build.samples));
        }
        conversations = tsart::export_stage4(items, tsart::StageFourOptions{mix});
    }

    const Json doc = tsart::conversations_to_json(conversations);
    tsart::validate_sharegpt_json(doc);
    tsart::io::write_text(out_path, doc.dump(2) + "\n");
    write_run_manifest(out_path, manifest_path, "export", seed,
                       Json{{"stage", stage},
                            {"records", records.size()},
                            {"conversations", conversations.size()}},
                       flags);
    std::cout << "exported " << conversations.size() << " conversations -> " << out_path
              << "\n";
    return kExitOk;
}

int run_eval(const std::string& tasks_path, const std::optional<tsart::io::MockScript>& mock,
             const EndpointFlags& endpoint, const tsart::EpisodeLimits& limits,
             const std::string& out_path, const std::string& manifest_path, std::uint64_t seed,
             std::size_t jobs, const Json& flags) {
    const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
    std::vector<tsart::TaskRecord> tasks;
    for (const Json& doc : tsart::io::read_jsonl(tasks_path))
        tasks.push_back(tsart::task_record_from_json(doc));

    auto factory = make_client_factory(mock, resolve_endpoint(endpoint, 0.0));
    const tsart::BenchmarkReport report =
        tsart::run_benchmark(tasks, factory, registry, limits, jobs);
    const Json doc = tsart::report_to_json(report);
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        tsart::io::write_text(out_path, doc.dump(2) + "\n");
        std::cout << "scored " << report.scored << "/" << report.total << " tasks -> "
                  << out_path << "\n";
    }
    write_run_manifest(out_path, manifest_path, "eval", seed,
                       Json{{"total", report.total},
                            {"scored", report.scored},
                            {"failed", report.failed}},
                       flags);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tool-using time series analysis agent and dataset pipeline"};
    app.require_subcommand(1);

    // tools
    auto* tools_cmd = app.add_subcommand("tools", "List the tool catalogue");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Run one tool against a series file");
    std::string an_series, an_format = "auto", an_tool, an_args = "{}";
    analyze_cmd->add_option("--series", an_series, "Series file (.csv or JSON)")->required();
    analyze_cmd->add_option("--format", an_format, "Series format: csv, json, or auto");
    analyze_cmd->add_option("--tool", an_tool, "Tool name")->required();
    analyze_cmd->add_option("--args", an_args, "Tool arguments as a JSON object");

    // agent
    auto* agent_cmd = app.add_subcommand("agent", "Answer one question with the ReAct loop");
    std::string ag_series, ag_format = "auto", ag_question, ag_mock, ag_out;
    EndpointFlags ag_endpoint;
    tsart::EpisodeLimits ag_limits;
    agent_cmd->add_option("--series", ag_series, "Series file")->required();
    agent_cmd->add_option("--format", ag_format, "Series format: csv, json, or auto");
    agent_cmd->add_option("--question", ag_question, "Question to answer")->required();
    agent_cmd->add_option("--mock", ag_mock, "Scripted model turns (JSON array)");
    agent_cmd->add_option("--max-steps", ag_limits.max_steps, "Step budget");
    agent_cmd->add_option("--max-malformed", ag_limits.max_malformed,
                          "Consecutive malformed turn budget");
    agent_cmd->add_option("--out", ag_out, "Write the trajectory to this JSONL file");
    add_endpoint_flags(agent_cmd, ag_endpoint);

    // collect
    auto* collect_cmd =
        app.add_subcommand("collect", "Collect trajectories for question/answer samples");
    std::string co_samples, co_mock, co_out = "trajectories.jsonl", co_manifest;
    EndpointFlags co_endpoint;
    tsart::EpisodeLimits co_limits;
    std::uint64_t co_seed = 0;
    std::size_t co_jobs = 1;
    collect_cmd->add_option("--samples", co_samples, "QA samples JSONL")->required();
    collect_cmd->add_option("--mock", co_mock, "Scripted model turns");
    collect_cmd->add_option("--out", co_out, "Output trajectory JSONL");
    collect_cmd->add_option("--manifest", co_manifest, "Manifest path");
    collect_cmd->add_option("--seed", co_seed, "Run seed");
    collect_cmd->add_option("--jobs", co_jobs, "Worker threads");
    collect_cmd->add_option("--max-steps", co_limits.max_steps, "Step budget");
    collect_cmd->add_option("--max-malformed", co_limits.max_malformed,
                            "Consecutive malformed turn budget");
    add_endpoint_flags(collect_cmd, co_endpoint);

    // validate
    auto* validate_cmd =
        app.add_subcommand("validate", "Answer-check and chain-judge trajectories");
    std::string va_in, va_judgers, va_out = "verdicts.jsonl", va_kept, va_manifest;
    double va_sigma = 0.8;
    std::uint64_t va_seed = 0;
    std::size_t va_jobs = 1;
    validate_cmd->add_option("--in", va_in, "Trajectory JSONL")->required();
    validate_cmd->add_option("--judgers", va_judgers, "Judger roster JSON")->required();
    validate_cmd->add_option("--sigma", va_sigma, "Open-ended score threshold");
    validate_cmd->add_option("--seed", va_seed, "Chain sampling seed");
    validate_cmd->add_option("--jobs", va_jobs, "Worker threads");
    validate_cmd->add_option("--out", va_out, "Verdicts JSONL");
    validate_cmd->add_option("--kept-out", va_kept, "Kept trajectory JSONL");
    validate_cmd->add_option("--manifest", va_manifest, "Manifest path");

    // export
    auto* export_cmd = app.add_subcommand("export", "Render trajectories as sharegpt stages");
    std::string ex_in, ex_out = "stage.json", ex_mock, ex_manifest;
    int ex_stage = 2;
    std::uint64_t ex_seed = 0;
    std::size_t ex_alts = 3, ex_mix = 1;
    EndpointFlags ex_endpoint;
    export_cmd->add_option("--stage", ex_stage, "1, 2, or 4")
        ->check(CLI::IsMember({1, 2, 4}));
    export_cmd->add_option("--in", ex_in, "Trajectory JSONL")->required();
    export_cmd->add_option("--out", ex_out, "Output sharegpt JSON");
    export_cmd->add_option("--seed", ex_seed, "Alternative-action sampling seed");
    export_cmd->add_option("--alts", ex_alts, "Alternatives per step (stages 1 and 4)");
    export_cmd->add_option("--mix", ex_mix, "Reflections per expert conversation (stage 4)");
    export_cmd->add_option("--mock", ex_mock, "Scripted explanation turns (stage 4)");
    export_cmd->add_option("--manifest", ex_manifest, "Manifest path");
    add_endpoint_flags(export_cmd, ex_endpoint);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run the benchmark over a task file");
    std::string ev_tasks, ev_mock, ev_out, ev_manifest;
    EndpointFlags ev_endpoint;
    tsart::EpisodeLimits ev_limits;
    std::uint64_t ev_seed = 0;
    std::size_t ev_jobs = 1;
    eval_cmd->add_option("--tasks", ev_tasks, "Task JSONL")->required();
    eval_cmd->add_option("--mock", ev_mock, "Scripted model turns");
    eval_cmd->add_option("--out", ev_out, "Report JSON path (default: stdout)");
    eval_cmd->add_option("--manifest", ev_manifest, "Manifest path");
    eval_cmd->add_option("--seed", ev_seed, "Run seed");
    eval_cmd->add_option("--jobs", ev_jobs, "Worker threads");
    eval_cmd->add_option("--max-steps", ev_limits.max_steps, "Step budget");
    eval_cmd->add_option("--max-malformed", ev_limits.max_malformed,
                         "Consecutive malformed turn budget");
    add_endpoint_flags(eval_cmd, ev_endpoint);

    CLI11_PARSE(app, argc, argv);

    try {
        if (tools_cmd->parsed()) {
            std::cout << tsart::ToolRegistry::builtin().render_tool_list() << "\n";
            return kExitOk;
        }
        if (analyze_cmd->parsed()) return run_analyze(an_series, an_format, an_tool, an_args);
        if (agent_cmd->parsed()) {
            std::optional<tsart::io::MockScript> mock;
            if (!ag_mock.empty()) mock = tsart::io::load_mock_script(ag_mock);
            return run_agent(ag_series, ag_format, ag_question, mock, ag_endpoint, ag_limits,
                             ag_out);
        }
        if (collect_cmd->parsed()) {
            std::optional<tsart::io::MockScript> mock;
            if (!co_mock.empty()) mock = tsart::io::load_mock_script(co_mock);
            const Json flags{{"command", "collect"},       {"samples", co_samples},
                             {"mock", co_mock},            {"out", co_out},
                             {"seed", co_seed},            {"max_steps", co_limits.max_steps},
                             {"max_malformed", co_limits.max_malformed}};
            return run_collect(co_samples, mock, co_endpoint, co_limits, co_out, co_manifest,
                               co_seed, co_jobs, flags);
        }
        if (validate_cmd->parsed()) {
            const Json flags{{"command", "validate"}, {"in", va_in},
                             {"judgers", va_judgers}, {"sigma", va_sigma},
                             {"seed", va_seed},       {"kept_out", va_kept}};
            return run_validate(va_in, va_judgers, va_sigma, va_seed, va_jobs, va_out, va_kept,
                                va_manifest, flags);
        }
        if (export_cmd->parsed()) {
            std::optional<tsart::io::MockScript> mock;
            if (!ex_mock.empty()) mock = tsart::io::load_mock_script(ex_mock);
            const Json flags{{"command", "export"}, {"stage", ex_stage}, {"in", ex_in},
                             {"out", ex_out},       {"seed", ex_seed},   {"alts", ex_alts},
                             {"mix", ex_mix},       {"mock", ex_mock}};
            return run_export(ex_stage, ex_in, ex_out, ex_seed, ex_alts, ex_mix, mock,
                              ex_endpoint, ex_manifest, flags);
        }
        if (eval_cmd->parsed()) {
            std::optional<tsart::io::MockScript> mock;
            if (!ev_mock.empty()) mock = tsart::io::load_mock_script(ev_mock);
            const Json flags{{"command", "eval"},
                             {"tasks", ev_tasks},
                             {"mock", ev_mock},
                             {"out", ev_out},
                             {"seed", ev_seed},
                             {"max_steps", ev_limits.max_steps}};
            return run_eval(ev_tasks, mock, ev_endpoint, ev_limits, ev_out, ev_manifest,
                            ev_seed, ev_jobs, flags);
        }
    } catch (const CLI::ValidationError& err) {
        std::cerr << err.what() << "\n";
        return kExitUsage;
    } catch (const tsart::EndpointError& err) {
        std::cerr << "endpoint failure: " << err.what() << "\n";
        return kExitEndpoint;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
