#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tsart/agent.hpp"

namespace tsart {

enum class AnswerKind { FixedOptions, OpenEnded };

AnswerKind answer_kind_from_string(const std::string& text);
std::string to_string(AnswerKind kind);

/// One question/answer task bound to its series.
struct QASample {
    std::string query;
    std::string answer;
    AnswerKind answer_kind = AnswerKind::FixedOptions;
    std::shared_ptr<const TimeSeries> series;
};

/// Reduces option-style answers to a comparable token: "A", "A)", "a) 0.51"
/// all become "a". Free text falls back to lowercased, space-collapsed form.
std::string normalize_option(const std::string& text);

using Scorer = std::function<double(const std::string&, const std::string&)>;

/// Bag-of-words F1 overlap in [0, 1]; the zero-dependency default scorer for
/// open-ended answers.
double token_overlap_f1(const std::string& a, const std::string& b);

/// Fixed options: normalized exact match. Open ended: scorer(final, answer)
/// strictly above sigma.
bool check_answer(const QASample& sample, const std::string& final_answer,
                  const Scorer& scorer = token_overlap_f1, double sigma = 0.8);

struct ChainVote {
    std::size_t judger_id = 0;
    std::size_t chain_index = 0;  // 1-based step k
    bool vote = false;
    std::string diagnostic;
};

struct Verdict {
    bool answer_flag = false;
    std::vector<ChainVote> votes;
    bool kept = false;
};

struct Judger {
    std::string name;
    std::shared_ptr<ChatClient> client;
};

/// Each judger independently reviews one uniformly sampled reasoning chain
/// (previous observation, thought, action) and votes yes/no; a chain at k=1
/// uses the query in place of the previous observation. Endpoint failures
/// count as negative votes with a diagnostic.
/// @throws std::invalid_argument when the trajectory has no steps.
std::vector<ChainVote> judge_chains(const Trajectory& trajectory,
                                    const std::vector<Judger>& judgers, std::uint64_t seed);

/// The judger-facing description of chain k, also used by tests to assert
/// prompt contents.
std::string chain_prompt(const Trajectory& trajectory, std::size_t k);

/// Answer check first; chains are judged only when the answer matched.
/// kept = answer_flag AND every vote positive.
Verdict validate(const QASample& sample, const Trajectory& trajectory, const Scorer& scorer,
                 double sigma, const std::vector<Judger>& judgers, std::uint64_t seed);

struct ExperienceSample {
    std::size_t step = 0;  // 1-based k
    std::string context;   // rendered prefix before the k-th thought
    std::string thought;
    ToolCall alt_action;
    ToolResult alt_observation;
};

/// Proposes alternative tool calls for the state before step k.
class ActionSampler {
public:
    virtual ~ActionSampler() = default;
    virtual std::vector<ToolCall> propose(const Trajectory& trajectory, std::size_t k,
                                          std::size_t count) = 0;
};

/// Uniform draw over the registry catalogue with workable default arguments.
class RandomActionSampler final : public ActionSampler {
public:
    RandomActionSampler(const ToolRegistry& registry, std::shared_ptr<const TimeSeries> series,
                        std::uint64_t seed);
    std::vector<ToolCall> propose(const Trajectory& trajectory, std::size_t k,
                                  std::size_t count) override;

private:
    const ToolRegistry& registry_;
    std::shared_ptr<const TimeSeries> series_;
    std::mt19937_64 rng_;
};

/// Asks a chat endpoint for one action suggestion per draw; any failure or
/// unparseable reply falls back to the uniform-random proposer.
class EndpointActionSampler final : public ActionSampler {
public:
    EndpointActionSampler(std::shared_ptr<ChatClient> client, const ToolRegistry& registry,
                          std::shared_ptr<const TimeSeries> series, std::uint64_t seed);
    std::vector<ToolCall> propose(const Trajectory& trajectory, std::size_t k,
                                  std::size_t count) override;

private:
    std::shared_ptr<ChatClient> client_;
    const ToolRegistry& registry_;
    RandomActionSampler fallback_;
};

/// For every step k of the trajectory, draws J alternative actions and
/// executes each against the series: exactly J*K samples out.
/// @throws std::invalid_argument when J == 0.
std::vector<ExperienceSample> build_early_experience(const ToolRegistry& registry,
                                                     const TimeSeries& series,
                                                     const Trajectory& trajectory,
                                                     ActionSampler& sampler, std::size_t J);

struct ReflectionSample {
    std::size_t step = 0;  // 1-based k
    std::string context;
    std::string thought;
    ToolCall expert_action;
    ToolResult expert_observation;
    ToolCall alt_action;
    ToolResult alt_observation;
    std::string explanation;
};

struct ReflectionBuild {
    std::vector<ReflectionSample> samples;
    std::vector<std::string> dropped;  // one reason per dropped input
};

/// The filled explanation-request template for one experience sample; embeds
/// the situation, the expert action with its outcome, and the alternative
/// with its resulting state.
std::string reflection_prompt(const Trajectory& trajectory, const ExperienceSample& experience);

/// Collects an explanation monologue per experience sample. Empty replies,
/// refusals, and endpoint failures drop the sample with a recorded reason.
ReflectionBuild build_reflections(const std::vector<ExperienceSample>& experience,
                                  const Trajectory& trajectory, ChatClient& client);

struct ShareGptTurn {
    std::string from;  // human | gpt | function_call | observation
    std::string value;
};

using Conversation = std::vector<ShareGptTurn>;

/// @throws std::logic_error unless human/observation turns sit at odd
/// 1-based positions and gpt/function_call turns at even ones.
void check_parity(const Conversation& conversation);

/// Full expert trajectory as a conversation: the query, then per step the
/// thought, a "(continue)" prompt, the call, and the observation, closing
/// with the final answer when present.
Conversation trajectory_conversation(const Trajectory& trajectory);

/// One conversation per experience sample, ending with the alternative
/// observation as the learned turn.
std::vector<Conversation> export_stage1(const Trajectory& trajectory,
                                        const std::vector<ExperienceSample>& experience);

/// One conversation per trajectory step, ending with the expert call as the
/// learned turn.
std::vector<Conversation> export_stage2(const Trajectory& trajectory);

struct StageFourOptions {
    std::size_t reflections_per_expert = 1;
};

/// Reflection conversations (explanation then expert call as the learned
/// turns) interleaved with full expert conversations at the configured rate.
std::vector<Conversation> export_stage4(
    const std::vector<std::pair<const Trajectory*, std::vector<ReflectionSample>>>& items,
    const StageFourOptions& options = {});

Json conversations_to_json(const std::vector<Conversation>& conversations);

/// Re-checks a rendered sharegpt document; returns the conversation count.
/// @throws std::invalid_argument on shape errors, std::logic_error on parity.
std::size_t validate_sharegpt_json(const Json& doc);

/// Runs fn over every index with a bounded worker pool; results keep input
/// order. jobs == 1 runs inline. The first exception is rethrown.
template <typename Out>
std::vector<Out> parallel_map(std::size_t count, std::size_t jobs,
                              const std::function<Out(std::size_t)>& fn) {
    std::vector<Out> results(count);
    if (count == 0) return results;
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    std::size_t width = std::min(jobs, count);
    pool.reserve(width);
    for (std::size_t i = 0; i < width; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace tsart
