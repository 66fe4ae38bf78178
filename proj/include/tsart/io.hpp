#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tsart/metrics.hpp"
#include "tsart/pipeline.hpp"

namespace tsart::io {

/// One parsed JSON document per non-blank line.
/// @throws std::runtime_error on unreadable files or unparseable lines.
std::vector<Json> read_jsonl(const std::string& path);

/// Compact dump of each record, one per line.
void write_jsonl(const std::string& path, const std::vector<Json>& records);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Series rows as JSON: flat numbers for one channel, row arrays otherwise.
Json series_rows_json(const TimeSeries& series);

/// Inverse of series_rows_json; non-numeric cells become missing values.
std::shared_ptr<const TimeSeries> series_from_json(const Json& rows);

/// Reads {query, answer, answer_kind, series | series_path}; relative paths
/// resolve against base_dir. File format follows the extension (.csv or JSON).
QASample qa_sample_from_json(const Json& doc, const std::string& base_dir);

Json qa_sample_to_json(const QASample& sample);

/// Trajectory plus the sample fields needed to re-validate it standalone.
Json trajectory_record(const Trajectory& trajectory, const QASample& sample);

struct TrajectoryRecord {
    Trajectory trajectory;
    QASample sample;
};

TrajectoryRecord trajectory_record_from_json(const Json& doc);

/// Scripted model turns: either one shared turn list replayed for every
/// episode, or one list per episode (array of arrays).
struct MockScript {
    std::vector<std::vector<std::string>> episodes;
    bool per_episode = false;

    [[nodiscard]] const std::vector<std::string>& turns_for(std::size_t index) const;
};

MockScript load_mock_script(const std::string& path);

enum class JudgerMode { AlwaysYes, AlwaysNo, Scripted, Endpoint };

struct JudgerSpec {
    std::string name;
    JudgerMode mode = JudgerMode::AlwaysYes;
    std::vector<std::string> replies;  // scripted mode: one reply per task, cycled
    EndpointConfig endpoint;           // endpoint mode
};

/// Judger roster file: JSON array of {name, mode, replies?, base_url?, ...}.
std::vector<JudgerSpec> load_judger_specs(const std::string& path);

/// Fresh single-use clients for one task; scripted judgers reply with
/// replies[task_index mod size].
std::vector<Judger> make_judgers(const std::vector<JudgerSpec>& specs, std::size_t task_index);

std::uint64_t fnv1a64(const std::string& text);

/// Reproducibility sidecar: {v, command, seed, config_hash, counts}. Content
/// is a pure function of its inputs, so identical runs write identical bytes.
void write_manifest(const std::string& path, const std::string& command, std::uint64_t seed,
                    const Json& counts, const std::string& config_text);

}  // namespace tsart::io
