#include "tsart/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsart::io {

std::vector<Json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Json> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        if (blank) continue;
        Json doc = Json::parse(line, nullptr, false);
        if (doc.is_discarded())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid JSON");
        records.push_back(std::move(doc));
    }
    return records;
}

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const Json& record : records) out << record.dump() << '\n';
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Json series_rows_json(const TimeSeries& series) {
    Json rows = Json::array();
    for (std::size_t t = 0; t < series.length(); ++t) {
        if (series.channels() == 1) {
            const double v = series.at(t, 0);
            rows.push_back(std::isnan(v) ? Json() : Json(v));
        } else {
            Json row = Json::array();
            for (std::size_t c = 0; c < series.channels(); ++c) {
                const double v = series.at(t, c);
                row.push_back(std::isnan(v) ? Json() : Json(v));
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::shared_ptr<const TimeSeries> series_from_json(const Json& doc) {
    if (!doc.is_array() || doc.empty())
        throw std::invalid_argument("series must be a non-empty array");
    std::vector<std::vector<double>> rows;
    rows.reserve(doc.size());
    for (const Json& cell : doc) {
        if (cell.is_array()) {
            std::vector<double> row;
            row.reserve(cell.size());
            for (const Json& v : cell) row.push_back(v.is_number() ? v.get<double>() : NAN);
            rows.push_back(std::move(row));
        } else {
            rows.push_back({cell.is_number() ? cell.get<double>() : NAN});
        }
    }
    return std::make_shared<TimeSeries>(std::move(rows));
}

QASample qa_sample_from_json(const Json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw std::invalid_argument("sample record must be an object");
    QASample sample;
    sample.query = doc.at("query").get<std::string>();
    sample.answer = doc.at("answer").get<std::string>();
    sample.answer_kind =
        answer_kind_from_string(doc.value("answer_kind", std::string("fixed_options")));
    if (doc.contains("series")) {
        sample.series = series_from_json(doc["series"]);
    } else if (doc.contains("series_path")) {
        std::filesystem::path p = doc["series_path"].get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        const std::string format = p.extension() == ".csv" ? "csv" : "json";
        sample.series = std::make_shared<TimeSeries>(load_series(p.string(), format));
    } else {
        throw std::invalid_argument("sample record needs 'series' or 'series_path'");
    }
    return sample;
}

Json qa_sample_to_json(const QASample& sample) {
    Json doc;
    doc["query"] = sample.query;
    doc["answer"] = sample.answer;
    doc["answer_kind"] = to_string(sample.answer_kind);
    doc["series"] = series_rows_json(*sample.series);
    return doc;
}

Json trajectory_record(const Trajectory& trajectory, const QASample& sample) {
    Json doc = trajectory_to_json(trajectory);
    doc["answer"] = sample.answer;
    doc["answer_kind"] = to_string(sample.answer_kind);
    doc["series"] = series_rows_json(*sample.series);
    return doc;
}

TrajectoryRecord trajectory_record_from_json(const Json& doc) {
    TrajectoryRecord record;
    record.trajectory = trajectory_from_json(doc);
    record.sample.query = record.trajectory.query;
    record.sample.answer = doc.value("answer", std::string());
    record.sample.answer_kind =
        answer_kind_from_string(doc.value("answer_kind", std::string("fixed_options")));
    if (!doc.contains("series"))
        throw std::invalid_argument("trajectory record is missing its 'series'");
    record.sample.series = series_from_json(doc["series"]);
    return record;
}

const std::vector<std::string>& MockScript::turns_for(std::size_t index) const {
    if (episodes.empty()) throw std::out_of_range("mock script has no episodes");
    if (!per_episode) return episodes.front();
    if (index >= episodes.size())
        throw std::out_of_range("mock script has no episode " + std::to_string(index));
    return episodes[index];
}

MockScript load_mock_script(const std::string& path) {
    Json doc = Json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_array() || doc.empty())
        throw std::runtime_error(path + ": mock script must be a non-empty JSON array");
    MockScript script;
    if (doc.front().is_array()) {
        script.per_episode = true;
        for (const Json& episode : doc) {
            if (!episode.is_array())
                throw std::runtime_error(path + ": mixed script shapes; use arrays throughout");
            script.episodes.push_back(episode.get<std::vector<std::string>>());
        }
    } else {
        script.per_episode = false;
        script.episodes.push_back(doc.get<std::vector<std::string>>());
    }
    return script;
}

std::vector<JudgerSpec> load_judger_specs(const std::string& path) {
    Json doc = Json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_array() || doc.empty())
        throw std::runtime_error(path + ": judger roster must be a non-empty JSON array");
    std::vector<JudgerSpec> specs;
    for (const Json& item : doc) {
        JudgerSpec spec;
        spec.name = item.value("name", "judger" + std::to_string(specs.size()));
        const std::string mode = item.value("mode", std::string("always_yes"));
        if (mode == "always_yes") {
            spec.mode = JudgerMode::AlwaysYes;
        } else if (mode == "always_no") {
            spec.mode = JudgerMode::AlwaysNo;
        } else if (mode == "scripted") {
            spec.mode = JudgerMode::Scripted;
            spec.replies = item.at("replies").get<std::vector<std::string>>();
            if (spec.replies.empty())
                throw std::runtime_error(path + ": scripted judger needs replies");
        } else if (mode == "endpoint") {
            spec.mode = JudgerMode::Endpoint;
            spec.endpoint.base_url = item.at("base_url").get<std::string>();
            spec.endpoint.api_key = item.value("api_key", std::string());
            spec.endpoint.model = item.value("model", std::string("default"));
            if (item.contains("timeout_ms"))
                spec.endpoint.timeout_ms = item["timeout_ms"].get<int>();
            if (item.contains("max_retries"))
                spec.endpoint.max_retries = item["max_retries"].get<int>();
        } else {
            throw std::runtime_error(path + ": unknown judger mode: " + mode);
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<Judger> make_judgers(const std::vector<JudgerSpec>& specs, std::size_t task_index) {
    std::vector<Judger> judgers;
    judgers.reserve(specs.size());
    for (const JudgerSpec& spec : specs) {
        std::shared_ptr<ChatClient> client;
        switch (spec.mode) {
            case JudgerMode::AlwaysYes:
                client = std::make_shared<ScriptedChatClient>(
                    std::vector<std::string>{"yes, the step follows from the state."});
                break;
            case JudgerMode::AlwaysNo:
                client = std::make_shared<ScriptedChatClient>(
                    std::vector<std::string>{"no, the step does not follow."});
                break;
            case JudgerMode::Scripted:
                client = std::make_shared<ScriptedChatClient>(std::vector<std::string>{
                    spec.replies[task_index % spec.replies.size()]});
                break;
            case JudgerMode::Endpoint:
                client = std::make_shared<HttpChatClient>(spec.endpoint);
                break;
        }
        judgers.push_back(Judger{spec.name, std::move(client)});
    }
    return judgers;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

void write_manifest(const std::string& path, const std::string& command, std::uint64_t seed,
                    const Json& counts, const std::string& config_text) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    Json doc;
    doc["v"] = 1;
    doc["command"] = command;
    doc["seed"] = seed;
    doc["config_hash"] = hex;
    doc["counts"] = counts;
    write_text(path, doc.dump(2) + "\n");
}

}  // namespace tsart::io
