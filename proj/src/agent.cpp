#include "tsart/agent.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace tsart {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(const std::string& s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string strip_code_fences(const std::string& raw) {
    std::istringstream in(raw);
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).rfind("```", 0) == 0) continue;
        out += line;
        out += '\n';
    }
    if (!out.empty()) out.pop_back();
    return out;
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

/// Extracts a balanced JSON object starting at the first '{' at or after
/// `from`, honoring string literals and escapes.
std::optional<std::string> balanced_object(const std::string& text, std::size_t from) {
    std::size_t open = text.find('{', from);
    if (open == std::string::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return text.substr(open, i - open + 1);
        }
    }
    return std::nullopt;
}

const char* kEvaluateTemplate =
    "You are an intelligent Time Series Reasoner capable of performing time series analysis "
    "by invoking appropriate tools step by step.\n"
    "1. You should first understand the question and analyze whether it is necessary to invoke "
    "the tool. If not, you can directly give the final answer.\n"
    "2. If tools are needed, you can utilize them to help answer the question. Multiple tool "
    "calls are encouraged.\n"
    "3. You should think step by step in ReAct-style, output a structured reasoning trajectory "
    "that leads to the final answer.\n"
    "You have access to the following tools:\n{tools}\n"
    "The only tools you may use are: {tool_names}.\n"
    "\"Begin!\"\n"
    "\n"
    "The question is: {input}";

const char* kCollectTemplate =
    "You are an intelligent Time Series Reasoner capable of performing time series analysis "
    "by invoking appropriate tools step by step.\n"
    "1. Given time series data, a question, and the known answer, reconstruct the intermediate "
    "reasoning steps.\n"
    "2. You should understand the time series and use the tools to enhance your confidence. "
    "You shouldn't completely rely on the results from tools.\n"
    "3. You should call a tool at least once to help answer the question. More tool calls are "
    "encouraged.\n"
    "4. You should think step by step in ReAct-style, output a structured reasoning trajectory "
    "that leads to the final answer.\n"
    "You have access to the following tools:\n{tools}\n"
    "The only tools you may use are: {tool_names}.\n"
    "\"Begin!\"\n"
    "\n"
    "The question is: {input}\n"
    "The known answer is: {answer}";

void replace_all(std::string& text, const std::string& slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
}

const char* kCorrectiveObservation =
    "output did not match the required format; reply with a Thought followed by an Action of "
    "the form 'tool: [name], tool_input: {...}', or with 'Final Answer:' followed by the "
    "answer.";

}  // namespace

std::vector<ChatMessage> build_prompt(PromptMode mode, const ToolRegistry& registry,
                                      const std::string& query,
                                      const std::optional<std::string>& known_answer) {
    if (trim(query).empty()) throw std::invalid_argument("query must not be empty");
    if (mode == PromptMode::Collect && !known_answer)
        throw std::invalid_argument("collect mode requires the known answer");
    std::string text =
        mode == PromptMode::Evaluate ? kEvaluateTemplate : kCollectTemplate;
    replace_all(text, "{tools}", registry.render_tool_list());
    replace_all(text, "{tool_names}", registry.render_tool_names());
    replace_all(text, "{input}", query);
    if (mode == PromptMode::Collect) replace_all(text, "{answer}", *known_answer);
    return {ChatMessage{"user", text}};
}

StepParse parse_step(const std::string& raw) {
    StepParse out;
    const std::string text = strip_code_fences(raw);
    const std::string lower = to_lower(text);

    std::size_t header = lower.rfind("action");
    std::size_t tool_pos = std::string::npos;
    if (header != std::string::npos) tool_pos = lower.find("tool:", header);
    if (tool_pos == std::string::npos) {
        header = std::string::npos;
        tool_pos = lower.find("tool:");
    }

    if (tool_pos != std::string::npos) {
        std::size_t p = tool_pos + 5;
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
        std::string name;
        bool ok = true;
        if (p < text.size() && text[p] == '[') {
            std::size_t close = text.find(']', p);
            if (close == std::string::npos) {
                out.diagnostic = "unterminated tool name bracket";
                ok = false;
            } else {
                name = trim(text.substr(p + 1, close - p - 1));
                p = close + 1;
            }
        } else {
            std::size_t start = p;
            while (p < text.size() && is_name_char(text[p])) ++p;
            name = text.substr(start, p - start);
        }
        if (ok && name.empty()) {
            out.diagnostic = "missing tool name after 'tool:'";
            ok = false;
        }
        if (ok) {
            Json arguments = Json::object();
            std::size_t input_pos = lower.find("tool_input", p);
            if (input_pos != std::string::npos) {
                auto body = balanced_object(text, input_pos);
                if (!body) {
                    out.diagnostic = "tool_input present but no balanced {...} object follows";
                    return out;
                }
                arguments = Json::parse(*body, nullptr, false);
                if (arguments.is_discarded()) {
                    out.diagnostic = "tool_input is not valid JSON";
                    return out;
                }
            }
            std::string thought =
                text.substr(0, header != std::string::npos ? header : tool_pos);
            std::string thought_lower = to_lower(thought);
            std::size_t label = thought_lower.find("thought");
            if (label != std::string::npos && trim(thought_lower.substr(0, label)).empty()) {
                std::size_t colon = thought.find(':', label);
                thought = colon == std::string::npos ? "" : thought.substr(colon + 1);
            }
            out.kind = StepParse::Kind::ThoughtAction;
            out.thought = trim(thought);
            out.call = ToolCall{name, std::move(arguments)};
            return out;
        }
    }

    std::size_t final_pos = lower.find("final answer");
    if (final_pos != std::string::npos) {
        std::size_t p = final_pos + std::string("final answer").size();
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
        if (p < text.size() && text[p] == ':') ++p;
        out.kind = StepParse::Kind::Final;
        out.answer = trim(text.substr(p));
        out.diagnostic.clear();
        return out;
    }

    if (out.diagnostic.empty())
        out.diagnostic = "expected a 'tool: [name]' action or a 'Final Answer:' section";
    return out;
}

std::string render_call(const ToolCall& call) {
    return "tool: [" + call.tool + "], tool_input: " + call.arguments.dump();
}

std::string render_step(const std::string& thought, const ToolCall& call) {
    return "Thought:\n" + thought + "\n\nAction:\n" + render_call(call);
}

std::string render_final(const std::string& answer) {
    return "Final Answer:\n" + answer;
}

std::string render_observation(const ToolResult& result) {
    if (result.ok()) return "tool: [" + result.tool + "], output: " + result.payload->dump();
    return "tool: [" + result.tool + "], error: " + *result.error;
}

Trajectory run_episode(ChatClient& client, const ToolRegistry& registry,
                       const TimeSeries& series, const std::string& query, PromptMode mode,
                       const EpisodeLimits& limits,
                       const std::optional<std::string>& known_answer, std::string series_ref) {
    Trajectory trajectory;
    trajectory.query = query;
    trajectory.series_ref = std::move(series_ref);

    std::vector<ChatMessage> messages = build_prompt(mode, registry, query, known_answer);
    std::size_t malformed_streak = 0;
    while (trajectory.steps.size() < limits.max_steps) {
        const std::string reply = client.complete(messages);
        StepParse parsed = parse_step(reply);
        if (parsed.kind == StepParse::Kind::Final) {
            trajectory.final_answer = *parsed.answer;
            return trajectory;
        }
        if (parsed.kind == StepParse::Kind::ThoughtAction) {
            malformed_streak = 0;
            ToolResult observation = registry.dispatch(series, *parsed.call);
            messages.push_back({"assistant", reply});
            messages.push_back({"user", "Observation:\n" + render_observation(observation)});
            trajectory.steps.push_back(
                {parsed.thought, std::move(*parsed.call), std::move(observation)});
            continue;
        }
        if (++malformed_streak >= limits.max_malformed) break;
        messages.push_back({"assistant", reply});
        messages.push_back(
            {"user", std::string("Observation:\n") + kCorrectiveObservation +
                         " (" + parsed.diagnostic + ")"});
    }
    return trajectory;
}

Json trajectory_to_json(const Trajectory& trajectory) {
    Json steps = Json::array();
    for (const auto& step : trajectory.steps) {
        Json observation;
        observation["tool"] = step.observation.tool;
        if (step.observation.ok())
            observation["payload"] = *step.observation.payload;
        else
            observation["error"] = *step.observation.error;
        steps.push_back(Json{{"thought", step.thought},
                             {"action", Json{{"tool", step.action.tool},
                                             {"arguments", step.action.arguments}}},
                             {"observation", std::move(observation)}});
    }
    Json doc;
    doc["v"] = 1;
    doc["query"] = trajectory.query;
    doc["series_ref"] = trajectory.series_ref;
    doc["steps"] = std::move(steps);
    if (trajectory.final_answer)
        doc["final_answer"] = *trajectory.final_answer;
    else
        doc["final_answer"] = nullptr;
    return doc;
}

Trajectory trajectory_from_json(const Json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("trajectory record must be an object");
    Trajectory trajectory;
    trajectory.query = doc.at("query").get<std::string>();
    trajectory.series_ref = doc.value("series_ref", std::string());
    for (const Json& item : doc.at("steps")) {
        TrajectoryStep step;
        step.thought = item.at("thought").get<std::string>();
        step.action.tool = item.at("action").at("tool").get<std::string>();
        step.action.arguments = item.at("action").value("arguments", Json::object());
        const Json& observation = item.at("observation");
        step.observation.tool = observation.at("tool").get<std::string>();
        if (observation.contains("error") && !observation["error"].is_null())
            step.observation.error = observation["error"].get<std::string>();
        else
            step.observation.payload = observation.value("payload", Json());
        trajectory.steps.push_back(std::move(step));
    }
    if (doc.contains("final_answer") && !doc["final_answer"].is_null())
        trajectory.final_answer = doc["final_answer"].get<std::string>();
    return trajectory;
}

std::vector<std::string> flat_state_texts(const Trajectory& trajectory) {
    std::vector<std::string> states;
    states.push_back(trajectory.query);
    for (const auto& step : trajectory.steps) {
        states.push_back(step.thought);
        states.push_back(render_call(step.action));
        states.push_back(render_observation(step.observation));
    }
    if (trajectory.final_answer) states.push_back(*trajectory.final_answer);
    return states;
}

std::vector<std::string> prefix_states(const Trajectory& trajectory, std::size_t k) {
    if (k == 0 || k > trajectory.steps.size() + 1)
        throw std::out_of_range("step index out of range for prefix");
    auto states = flat_state_texts(trajectory);
    states.resize(3 * k - 2);
    return states;
}

std::string render_prefix(const Trajectory& trajectory, std::size_t k) {
    auto states = prefix_states(trajectory, k);
    static const char* kLabels[3] = {"Thought: ", "Action: ", "Observation: "};
    std::string out = "Question: " + states[0];
    for (std::size_t i = 1; i < states.size(); ++i) {
        out += '\n';
        out += kLabels[(i - 1) % 3];
        out += states[i];
    }
    return out;
}

}  // namespace tsart
