#include "tsart/pipeline.hpp"

#include <cctype>
#include <map>
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

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> word_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool looks_like_refusal(const std::string& reply) {
    static const char* kPrefixes[] = {"i cannot", "i can't", "i am unable", "i'm unable",
                                      "i'm sorry", "i am sorry", "sorry,"};
    const std::string lowered = to_lower(trim(reply));
    for (const char* prefix : kPrefixes)
        if (lowered.rfind(prefix, 0) == 0) return true;
    return false;
}

ShareGptTurn human(std::string value) { return {"human", std::move(value)}; }
ShareGptTurn gpt(std::string value) { return {"gpt", std::move(value)}; }
ShareGptTurn function_call(const ToolCall& call) { return {"function_call", render_call(call)}; }
ShareGptTurn observation(const ToolResult& result) {
    return {"observation", render_observation(result)};
}

const char* kContinue = "(continue)";

/// Conversation prefix through the k-th thought: the query plus k-1 complete
/// steps, then the thought itself.
Conversation prefix_conversation(const Trajectory& trajectory, std::size_t k) {
    Conversation turns;
    turns.push_back(human(trajectory.query));
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const TrajectoryStep& step = trajectory.steps[i];
        turns.push_back(gpt(step.thought));
        turns.push_back(human(kContinue));
        turns.push_back(function_call(step.action));
        turns.push_back(observation(step.observation));
    }
    turns.push_back(gpt(trajectory.steps[k - 1].thought));
    return turns;
}

}  // namespace

AnswerKind answer_kind_from_string(const std::string& text) {
    const std::string lowered = to_lower(trim(text));
    if (lowered == "fixed_options") return AnswerKind::FixedOptions;
    if (lowered == "open_ended") return AnswerKind::OpenEnded;
    throw std::invalid_argument("unknown answer kind: " + text);
}

std::string to_string(AnswerKind kind) {
    return kind == AnswerKind::FixedOptions ? "fixed_options" : "open_ended";
}

std::string normalize_option(const std::string& text) {
    std::string lowered = to_lower(trim(text));
    std::size_t i = 0;
    while (i < lowered.size() && (lowered[i] == '(' || lowered[i] == '[')) ++i;
    if (i < lowered.size() && std::isalnum(static_cast<unsigned char>(lowered[i]))) {
        std::size_t j = i + 1;
        bool lone = j >= lowered.size();
        if (!lone) {
            char next = lowered[j];
            lone = next == ')' || next == ']' || next == '.' || next == ':' || next == ',' ||
                   std::isspace(static_cast<unsigned char>(next));
        }
        if (lone) return std::string(1, lowered[i]);
    }
    std::string collapsed;
    for (const std::string& token : word_tokens(lowered)) {
        if (!collapsed.empty()) collapsed += ' ';
        collapsed += token;
    }
    return collapsed;
}

double token_overlap_f1(const std::string& a, const std::string& b) {
    const auto ta = word_tokens(a);
    const auto tb = word_tokens(b);
    if (ta.empty() && tb.empty()) return 1.0;
    if (ta.empty() || tb.empty()) return 0.0;
    std::map<std::string, std::size_t> counts;
    for (const auto& token : ta) ++counts[token];
    std::size_t overlap = 0;
    for (const auto& token : tb) {
        auto it = counts.find(token);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return 2.0 * static_cast<double>(overlap) / static_cast<double>(ta.size() + tb.size());
}

bool check_answer(const QASample& sample, const std::string& final_answer, const Scorer& scorer,
                  double sigma) {
    if (sample.answer_kind == AnswerKind::FixedOptions) {
        const std::string got = normalize_option(final_answer);
        return !got.empty() && got == normalize_option(sample.answer);
    }
    return scorer(final_answer, sample.answer) > sigma;
}

std::string chain_prompt(const Trajectory& trajectory, std::size_t k) {
    if (k == 0 || k > trajectory.steps.size())
        throw std::out_of_range("chain index out of range");
    const TrajectoryStep& step = trajectory.steps[k - 1];
    const std::string previous =
        k == 1 ? "Question: " + trajectory.query
               : "Observation: " + render_observation(trajectory.steps[k - 2].observation);
    return "You are reviewing one reasoning step from a tool-using time series analysis "
           "session.\n" +
           previous + "\nThought: " + step.thought + "\nAction: " + render_call(step.action) +
           "\nIs this step a reasonable continuation of the session? Begin your reply with "
           "\"yes\" or \"no\", then give one sentence of justification.";
}

std::vector<ChainVote> judge_chains(const Trajectory& trajectory,
                                    const std::vector<Judger>& judgers, std::uint64_t seed) {
    if (trajectory.steps.empty())
        throw std::invalid_argument("chain judging needs at least one step");
    std::vector<ChainVote> votes;
    votes.reserve(judgers.size());
    for (std::size_t m = 0; m < judgers.size(); ++m) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (m + 1));
        std::uniform_int_distribution<std::size_t> pick(1, trajectory.steps.size());
        ChainVote vote;
        vote.judger_id = m;
        vote.chain_index = pick(rng);
        try {
            const std::string reply = judgers[m].client->complete(
                {ChatMessage{"user", chain_prompt(trajectory, vote.chain_index)}});
            const auto tokens = word_tokens(reply);
            if (!tokens.empty() && tokens.front() == "yes") {
                vote.vote = true;
            } else {
                vote.vote = false;
                vote.diagnostic = tokens.empty() ? "empty judger reply"
                                                 : "judger verdict: " + tokens.front();
            }
        } catch (const std::exception& err) {
            vote.vote = false;
            vote.diagnostic = std::string("judger endpoint failure: ") + err.what();
        }
        votes.push_back(std::move(vote));
    }
    return votes;
}

Verdict validate(const QASample& sample, const Trajectory& trajectory, const Scorer& scorer,
                 double sigma, const std::vector<Judger>& judgers, std::uint64_t seed) {
    Verdict verdict;
    verdict.answer_flag =
        trajectory.final_answer && check_answer(sample, *trajectory.final_answer, scorer, sigma);
    if (!verdict.answer_flag || trajectory.steps.empty()) {
        verdict.kept = false;
        return verdict;
    }
    verdict.votes = judge_chains(trajectory, judgers, seed);
    verdict.kept = true;
    for (const ChainVote& vote : verdict.votes) verdict.kept = verdict.kept && vote.vote;
    return verdict;
}

RandomActionSampler::RandomActionSampler(const ToolRegistry& registry,
                                         std::shared_ptr<const TimeSeries> series,
                                         std::uint64_t seed)
    : registry_(registry), series_(std::move(series)), rng_(seed) {
    if (!series_) throw std::invalid_argument("sampler needs a series");
}

std::vector<ToolCall> RandomActionSampler::propose(const Trajectory&, std::size_t,
                                                   std::size_t count) {
    const auto& schemas = registry_.schemas();
    if (schemas.empty()) throw std::logic_error("empty tool catalogue");
    std::uniform_int_distribution<std::size_t> pick(0, schemas.size() - 1);
    std::vector<ToolCall> calls;
    calls.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string& name = schemas[pick(rng_)].name;
        calls.push_back(ToolCall{name, registry_.default_arguments(name, *series_)});
    }
    return calls;
}

EndpointActionSampler::EndpointActionSampler(std::shared_ptr<ChatClient> client,
                                             const ToolRegistry& registry,
                                             std::shared_ptr<const TimeSeries> series,
                                             std::uint64_t seed)
    : client_(std::move(client)), registry_(registry), fallback_(registry, std::move(series), seed) {
    if (!client_) throw std::invalid_argument("sampler needs a client");
}

std::vector<ToolCall> EndpointActionSampler::propose(const Trajectory& trajectory, std::size_t k,
                                                     std::size_t count) {
    std::vector<ToolCall> calls;
    calls.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        try {
            const std::string prompt =
                "Here is the transcript of a tool-using time series analysis session so "
                "far.\n" +
                render_prefix(trajectory, k) + "\nThought: " + trajectory.steps[k - 1].thought +
                "\nPropose one plausible next tool call in the exact form 'tool: [name], "
                "tool_input: {...}'. The available tools are: " +
                registry_.render_tool_names() + ".";
            const StepParse parsed =
                parse_step(client_->complete({ChatMessage{"user", prompt}}));
            if (parsed.kind == StepParse::Kind::ThoughtAction) {
                calls.push_back(*parsed.call);
                continue;
            }
        } catch (const std::exception&) {
        }
        calls.push_back(fallback_.propose(trajectory, k, 1).front());
    }
    return calls;
}

std::vector<ExperienceSample> build_early_experience(const ToolRegistry& registry,
                                                     const TimeSeries& series,
                                                     const Trajectory& trajectory,
                                                     ActionSampler& sampler, std::size_t J) {
    if (J == 0) throw std::invalid_argument("need at least one alternative per step");
    std::vector<ExperienceSample> samples;
    samples.reserve(J * trajectory.steps.size());
    for (std::size_t k = 1; k <= trajectory.steps.size(); ++k) {
        std::vector<ToolCall> calls = sampler.propose(trajectory, k, J);
        calls.resize(J, ToolCall{"series_info", Json::object()});
        const std::string context = render_prefix(trajectory, k);
        for (std::size_t j = 0; j < J; ++j) {
            ExperienceSample sample;
            sample.step = k;
            sample.context = context;
            sample.thought = trajectory.steps[k - 1].thought;
            sample.alt_action = calls[j];
            sample.alt_observation = registry.dispatch(series, calls[j]);
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

std::string reflection_prompt(const Trajectory& trajectory, const ExperienceSample& experience) {
    const TrajectoryStep& step = trajectory.steps.at(experience.step - 1);
    std::string text =
        "You will be presented with a situation where you need to choose between multiple "
        "possible actions. Your task is to analyze the situation and provide reasoning about "
        "why we decide to take the expert action.\n\n";
    text += "Situation Description: " + experience.context + "\n";
    text += "Expert Action: " + render_call(step.action) + "\n";
    text += "Expected Outcome: " + render_observation(step.observation) + "\n";
    text += "Alternative Actions:\n";
    text += "1. Action: " + render_call(experience.alt_action) +
            ", resulting state: " + render_observation(experience.alt_observation) + "\n\n";
    text +=
        "Provide a detailed self-reflection as an internal monologue that demonstrates your "
        "reasoning process for the current situation. Your monologue should:\n"
        "1. Analyze the situation and the goal.\n"
        "2. Compare the possible actions, explaining why each may be less optimal.\n"
        "3. Justify why the expert action is most suitable, grounded in the expected outcome.\n"
        "4. Highlight any relevant clues, constraints, or consequences from the situation.\n\n"
        "Guidelines:\n"
        "- Stay strictly within the provided information.\n"
        "- Avoid meta-commentary about being an AI.\n"
        "- Use natural, step-by-step reasoning.\n"
        "- Focus on logical decision-making.\n\n"
        "Output: Directly write the self-reflection monologue, no extra headings, disclaimers, "
        "or external notes.";
    return text;
}

ReflectionBuild build_reflections(const std::vector<ExperienceSample>& experience,
                                  const Trajectory& trajectory, ChatClient& client) {
    ReflectionBuild build;
    for (std::size_t i = 0; i < experience.size(); ++i) {
        const ExperienceSample& item = experience[i];
        std::string reply;
        try {
            reply = client.complete({ChatMessage{"user", reflection_prompt(trajectory, item)}});
        } catch (const std::exception& err) {
            build.dropped.push_back("sample " + std::to_string(i) +
                                    ": endpoint failure: " + err.what());
            continue;
        }
        const std::string cleaned = trim(reply);
        if (cleaned.empty()) {
            build.dropped.push_back("sample " + std::to_string(i) + ": empty explanation");
            continue;
        }
        if (looks_like_refusal(cleaned)) {
            build.dropped.push_back("sample " + std::to_string(i) + ": refusal");
            continue;
        }
        const TrajectoryStep& step = trajectory.steps.at(item.step - 1);
        build.samples.push_back(ReflectionSample{item.step, item.context, item.thought,
                                                 step.action, step.observation, item.alt_action,
                                                 item.alt_observation, cleaned});
    }
    return build;
}

void check_parity(const Conversation& conversation) {
    for (std::size_t i = 0; i < conversation.size(); ++i) {
        const std::string& from = conversation[i].from;
        const bool odd = i % 2 == 0;  // 1-based position i+1
        const bool human_side = from == "human" || from == "observation";
        const bool model_side = from == "gpt" || from == "function_call";
        if (!human_side && !model_side)
            throw std::logic_error("unknown conversation role: " + from);
        if (odd != human_side)
            throw std::logic_error("role " + from + " at 1-based position " +
                                   std::to_string(i + 1) + " breaks turn parity");
    }
}

Conversation trajectory_conversation(const Trajectory& trajectory) {
    Conversation turns;
    turns.push_back(human(trajectory.query));
    for (const TrajectoryStep& step : trajectory.steps) {
        turns.push_back(gpt(step.thought));
        turns.push_back(human(kContinue));
        turns.push_back(function_call(step.action));
        turns.push_back(observation(step.observation));
    }
    if (trajectory.final_answer) turns.push_back(gpt(*trajectory.final_answer));
    check_parity(turns);
    return turns;
}

std::vector<Conversation> export_stage1(const Trajectory& trajectory,
                                        const std::vector<ExperienceSample>& experience) {
    std::vector<Conversation> out;
    out.reserve(experience.size());
    for (const ExperienceSample& item : experience) {
        Conversation turns = prefix_conversation(trajectory, item.step);
        turns.push_back(human(kContinue));
        turns.push_back(function_call(item.alt_action));
        turns.push_back(observation(item.alt_observation));
        check_parity(turns);
        out.push_back(std::move(turns));
    }
    return out;
}

std::vector<Conversation> export_stage2(const Trajectory& trajectory) {
    std::vector<Conversation> out;
    out.reserve(trajectory.steps.size());
    for (std::size_t k = 1; k <= trajectory.steps.size(); ++k) {
        Conversation turns = prefix_conversation(trajectory, k);
        turns.push_back(human(kContinue));
        turns.push_back(function_call(trajectory.steps[k - 1].action));
        check_parity(turns);
        out.push_back(std::move(turns));
    }
    return out;
}

std::vector<Conversation> export_stage4(
    const std::vector<std::pair<const Trajectory*, std::vector<ReflectionSample>>>& items,
    const StageFourOptions& options) {
    std::vector<Conversation> reflections;
    std::vector<Conversation> experts;
    for (const auto& [trajectory, samples] : items) {
        if (!trajectory) throw std::invalid_argument("null trajectory in stage4 input");
        if (trajectory->final_answer) experts.push_back(trajectory_conversation(*trajectory));
        for (const ReflectionSample& sample : samples) {
            Conversation turns;
            turns.push_back(human(trajectory->query));
            for (std::size_t i = 0; i + 1 < sample.step; ++i) {
                const TrajectoryStep& step = trajectory->steps[i];
                turns.push_back(gpt(step.thought));
                turns.push_back(human(kContinue));
                turns.push_back(function_call(step.action));
                turns.push_back(observation(step.observation));
            }
            turns.push_back(gpt(sample.thought));
            turns.push_back(human(kContinue));
            turns.push_back(gpt(sample.explanation));
            turns.push_back(human(kContinue));
            turns.push_back(function_call(sample.expert_action));
            check_parity(turns);
            reflections.push_back(std::move(turns));
        }
    }
    std::vector<Conversation> mixed;
    mixed.reserve(reflections.size() + experts.size());
    std::size_t e = 0;
    std::size_t since_expert = 0;
    for (auto& conversation : reflections) {
        mixed.push_back(std::move(conversation));
        if (++since_expert >= options.reflections_per_expert && e < experts.size()) {
            mixed.push_back(std::move(experts[e++]));
            since_expert = 0;
        }
    }
    while (e < experts.size()) mixed.push_back(std::move(experts[e++]));
    return mixed;
}

Json conversations_to_json(const std::vector<Conversation>& conversations) {
    Json out = Json::array();
    for (const Conversation& conversation : conversations) {
        Json turns = Json::array();
        for (const ShareGptTurn& turn : conversation)
            turns.push_back(Json{{"from", turn.from}, {"value", turn.value}});
        out.push_back(Json{{"conversations", std::move(turns)}});
    }
    return out;
}

std::size_t validate_sharegpt_json(const Json& doc) {
    if (!doc.is_array()) throw std::invalid_argument("sharegpt document must be an array");
    for (const Json& item : doc) {
        if (!item.is_object() || !item.contains("conversations") ||
            !item["conversations"].is_array())
            throw std::invalid_argument("each entry needs a 'conversations' array");
        Conversation turns;
        for (const Json& turn : item["conversations"]) {
            if (!turn.is_object() || !turn.contains("from") || !turn.contains("value"))
                throw std::invalid_argument("each turn needs 'from' and 'value'");
            turns.push_back({turn["from"].get<std::string>(), turn["value"].get<std::string>()});
        }
        check_parity(turns);
    }
    return doc.size();
}

}  // namespace tsart
