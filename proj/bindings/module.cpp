#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "tsart/io.hpp"
#include "tsart/metrics.hpp"
#include "tsart/pipeline.hpp"

namespace py = pybind11;
using tsart::Json;

namespace {

py::object to_python(const Json& value) {
    switch (value.type()) {
        case Json::value_t::null:
            return py::none();
        case Json::value_t::boolean:
            return py::bool_(value.get<bool>());
        case Json::value_t::number_integer:
            return py::int_(value.get<std::int64_t>());
        case Json::value_t::number_unsigned:
            return py::int_(value.get<std::uint64_t>());
        case Json::value_t::number_float:
            return py::float_(value.get<double>());
        case Json::value_t::string:
            return py::str(value.get<std::string>());
        case Json::value_t::array: {
            py::list out;
            for (const Json& item : value) out.append(to_python(item));
            return out;
        }
        case Json::value_t::object: {
            py::dict out;
            for (const auto& [key, item] : value.items())
                out[py::str(key)] = to_python(item);
            return out;
        }
        default:
            return py::none();
    }
}

Json to_json(const py::handle& value) {
    if (value.is_none()) return Json();
    if (py::isinstance<py::bool_>(value)) return Json(value.cast<bool>());
    if (py::isinstance<py::int_>(value)) return Json(value.cast<std::int64_t>());
    if (py::isinstance<py::float_>(value)) return Json(value.cast<double>());
    if (py::isinstance<py::str>(value)) return Json(value.cast<std::string>());
    if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
        Json out = Json::array();
        for (const py::handle& item : value) out.push_back(to_json(item));
        return out;
    }
    if (py::isinstance<py::dict>(value)) {
        Json out = Json::object();
        for (const auto& item : value.cast<py::dict>())
            out[item.first.cast<std::string>()] = to_json(item.second);
        return out;
    }
    throw py::type_error("unsupported argument value type");
}

std::shared_ptr<tsart::TimeSeries> make_series(const py::list& rows) {
    Json doc = to_json(rows);
    std::vector<std::vector<double>> data;
    for (const Json& cell : doc) {
        if (cell.is_array()) {
            std::vector<double> row;
            for (const Json& v : cell) row.push_back(v.is_number() ? v.get<double>() : NAN);
            data.push_back(std::move(row));
        } else {
            data.push_back({cell.is_number() ? cell.get<double>() : NAN});
        }
    }
    return std::make_shared<tsart::TimeSeries>(std::move(data));
}

}  // namespace

PYBIND11_MODULE(_tsart, m) {
    m.doc() = "Tool-using time series analysis core";

    py::class_<tsart::TimeSeries, std::shared_ptr<tsart::TimeSeries>>(m, "TimeSeries")
        .def(py::init([](const py::list& rows) { return make_series(rows); }), py::arg("rows"))
        .def_property_readonly("length", &tsart::TimeSeries::length)
        .def_property_readonly("channels", &tsart::TimeSeries::channels)
        .def("at", &tsart::TimeSeries::at, py::arg("t"), py::arg("c") = 0)
        .def("channel", &tsart::TimeSeries::channel, py::arg("c") = 0)
        .def("render", [](const tsart::TimeSeries& s, int precision) {
            return tsart::render_for_prompt(s, precision);
        }, py::arg("precision") = 3);

    m.def("load_series", [](const std::string& path, const std::string& format) {
        return std::make_shared<tsart::TimeSeries>(tsart::load_series(path, format));
    }, py::arg("path"), py::arg("format") = "json");

    m.def("list_tools", [] {
        const tsart::ToolRegistry registry = tsart::ToolRegistry::builtin();
        std::vector<std::string> names;
        names.reserve(registry.schemas().size());
        for (const auto& schema : registry.schemas()) names.push_back(schema.name);
        return names;
    });

    m.def("tool_catalogue", [] { return tsart::ToolRegistry::builtin().render_tool_list(); });

    m.def("call_tool",
          [](const tsart::TimeSeries& series, const std::string& tool, const py::dict& args) {
              const auto registry = tsart::ToolRegistry::builtin();
              const tsart::ToolResult result =
                  registry.dispatch(series, {tool, to_json(args)});
              if (!result.ok()) throw std::runtime_error(*result.error);
              return to_python(*result.payload);
          },
          py::arg("series"), py::arg("tool"), py::arg("args") = py::dict());

    m.def("run_mock_episode",
          [](const tsart::TimeSeries& series, const std::string& question,
             const std::vector<std::string>& turns, const std::string& mode,
             const py::object& answer, std::size_t max_steps, std::size_t max_malformed) {
              const auto registry = tsart::ToolRegistry::builtin();
              tsart::ScriptedChatClient client(turns);
              std::optional<std::string> known;
              if (!answer.is_none()) known = answer.cast<std::string>();
              const auto trajectory = tsart::run_episode(
                  client, registry, series, question,
                  mode == "collect" ? tsart::PromptMode::Collect
                                    : tsart::PromptMode::Evaluate,
                  tsart::EpisodeLimits{max_steps, max_malformed}, known);
              return to_python(tsart::trajectory_to_json(trajectory));
          },
          py::arg("series"), py::arg("question"), py::arg("turns"),
          py::arg("mode") = "evaluate", py::arg("answer") = py::none(),
          py::arg("max_steps") = 8, py::arg("max_malformed") = 3);

    m.def("check_answer",
          [](const std::string& kind, const std::string& answer, const std::string& final_text,
             double sigma) {
              tsart::QASample sample;
              sample.answer = answer;
              sample.answer_kind = tsart::answer_kind_from_string(kind);
              sample.series = nullptr;  // unused by the check
              return tsart::check_answer(sample, final_text, tsart::token_overlap_f1, sigma);
          },
          py::arg("kind"), py::arg("answer"), py::arg("final"), py::arg("sigma") = 0.8);

    m.def("normalize_option", &tsart::normalize_option, py::arg("text"));
    m.def("token_overlap_f1", &tsart::token_overlap_f1, py::arg("a"), py::arg("b"));
    m.def("score_mcq", &tsart::score_mcq, py::arg("predictions"), py::arg("truths"));

    m.def("score_forecast",
          [](const std::vector<double>& predicted, const std::vector<double>& truth) {
              const auto score = tsart::score_forecast(predicted, truth);
              py::dict out;
              out["mse"] = score.mse;
              out["mae"] = score.mae;
              out["mape"] = score.mape;
              return out;
          },
          py::arg("predicted"), py::arg("truth"));

    m.def("ema", &tsart::ema, py::arg("values"), py::arg("n"));
    m.def("macd", &tsart::macd, py::arg("values"));
    m.def("bollinger_upper", &tsart::bollinger_upper, py::arg("values"),
          py::arg("window") = 20, py::arg("k") = 2.0);
}
