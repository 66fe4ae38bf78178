#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsart/chat.hpp"
#include "tsart/registry.hpp"

namespace tsart {

enum class PromptMode { Evaluate, Collect };

/// Fills the {tools}, {tool_names}, and {input} slots of the built-in task
/// template. Collect mode requires the known answer and embeds it after the
/// question. Returns the message list that opens an episode.
/// @throws std::invalid_argument on an empty query or a missing answer in
/// collect mode.
std::vector<ChatMessage> build_prompt(PromptMode mode, const ToolRegistry& registry,
                                      const std::string& query,
                                      const std::optional<std::string>& known_answer = std::nullopt);

struct StepParse {
    enum class Kind { ThoughtAction, Final, Malformed };
    Kind kind = Kind::Malformed;
    std::string thought;
    std::optional<ToolCall> call;      // set for ThoughtAction
    std::optional<std::string> answer; // set for Final
    std::string diagnostic;            // set for Malformed
};

/// Recognizes, case-insensitively and tolerant of surrounding code fences:
/// a "tool: [name]" action with optional "tool_input: {...}" arguments
/// (preceded by optional Thought text), or "Final Answer:" followed by the
/// answer. Anything else is Malformed with a diagnostic; this function never
/// throws.
StepParse parse_step(const std::string& raw);

/// Canonical text of one reasoning step; parse_step inverts it exactly for
/// trimmed inputs.
std::string render_step(const std::string& thought, const ToolCall& call);

std::string render_call(const ToolCall& call);
std::string render_final(const std::string& answer);

/// "tool: [name], output: {compact payload}" or ", error: message".
std::string render_observation(const ToolResult& result);

struct TrajectoryStep {
    std::string thought;
    ToolCall action;
    ToolResult observation;
};

/// One agent episode: the query, the ordered reasoning steps, and the final
/// answer when the episode terminated normally.
struct Trajectory {
    std::string query;
    std::vector<TrajectoryStep> steps;
    std::optional<std::string> final_answer;
    std::string series_ref;
};

struct EpisodeLimits {
    std::size_t max_steps = 8;
    std::size_t max_malformed = 3;
};

/// Runs the ReAct loop against a client: build messages, complete, parse;
/// tool calls are dispatched and their observations appended as the next
/// user turn; malformed replies get a corrective observation and are retried
/// up to max_malformed consecutive times. Stops at a final answer, or
/// truncates (final_answer absent) at max_steps or persistent malformed
/// output. Endpoint failures propagate as EndpointError.
Trajectory run_episode(ChatClient& client, const ToolRegistry& registry,
                       const TimeSeries& series, const std::string& query, PromptMode mode,
                       const EpisodeLimits& limits = {},
                       const std::optional<std::string>& known_answer = std::nullopt,
                       std::string series_ref = "");

Json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& doc);

/// The flat state sequence Q, T_1, A_1, O_1, ..., F as rendered texts.
std::vector<std::string> flat_state_texts(const Trajectory& trajectory);

/// The first 3k-2 flat states: everything before the k-th thought (1-based).
std::vector<std::string> prefix_states(const Trajectory& trajectory, std::size_t k);

/// Joins prefix states into one labeled block for prompt embedding.
std::string render_prefix(const Trajectory& trajectory, std::size_t k);

}  // namespace tsart
