#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsart/patterns.hpp"
#include "tsart/series.hpp"

namespace tsart {

using Json = nlohmann::json;

enum class ParamType {
    Int,          // integer, numeric strings coerced
    Number,       // any numeric, numeric strings coerced
    Text,         // string
    IndexOrTime,  // integer index or timestamp string
    CountOrCost,  // "n_cp=K" / "penalty=X" text, or a bare number
};

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Int;
    bool required = true;
    std::string note;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
};

struct ToolCall {
    std::string tool;
    Json arguments = Json::object();
};

/// Exactly one of payload/error is set.
struct ToolResult {
    std::string tool;
    std::optional<Json> payload;
    std::optional<std::string> error;

    [[nodiscard]] bool ok() const { return payload.has_value(); }
};

struct ValidatedCall {
    bool ok = false;
    ToolCall call;                       // normalized name and coerced arguments
    std::vector<std::string> warnings;   // dropped unknown parameters
    std::string error_kind;              // UnknownTool, MissingParam, or BadParamType
    std::string error;
};

/// Immutable catalogue of tool schemas plus their dispatch handlers. The
/// built-in catalogue holds the 21 standard tools in their canonical order,
/// starting with series_info; callers may append custom tools before use.
class ToolRegistry {
public:
    using Handler = std::function<Json(const TimeSeries&, const Json& args)>;

    static ToolRegistry builtin(const patterns::PatternConfig& config = {});

    void add_tool(ToolSchema schema, Handler handler);

    [[nodiscard]] const std::vector<ToolSchema>& schemas() const { return schemas_; }
    [[nodiscard]] const ToolSchema* find(const std::string& name) const;

    /// Text for the {tools} prompt slot: one "- name. (params). description"
    /// line per tool, in catalogue order.
    [[nodiscard]] std::string render_tool_list() const;

    /// Comma-joined names for the {tool_names} prompt slot.
    [[nodiscard]] std::string render_tool_names() const;

    /// Normalizes a call: resolves aliases, drops null and unknown
    /// parameters, coerces numeric strings, and reports missing or
    /// untypeable required parameters.
    [[nodiscard]] ValidatedCall validate_call(const ToolCall& call) const;

    /// Total function from calls to results: validation failures and handler
    /// exceptions both come back as ToolResult.error, never as a throw.
    [[nodiscard]] ToolResult dispatch(const TimeSeries& series, const ToolCall& call) const;

    /// Workable argument document for a tool against a concrete series, used
    /// by samplers that need syntactically valid calls without a model.
    [[nodiscard]] Json default_arguments(const std::string& tool, const TimeSeries& series) const;

private:
    std::vector<ToolSchema> schemas_;
    std::vector<Handler> handlers_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::string> aliases_;
};

}  // namespace tsart
