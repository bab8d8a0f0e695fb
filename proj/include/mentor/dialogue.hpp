#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <deque>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"
#include "mentor/map_model.hpp"
#include "mentor/nlu/classifier.hpp"

namespace mentor {

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

enum class StateKind {
    AskProduct,
    AskCustomer,
    MoreCustomers,
    AskProblem,
    MoreProblems,
    AskFeature,
    AskFeatureTarget,
    AskPolarity,
    MoreFeatures,
    AskRefine,
    AskRefineConcept,
    AskRefineLowerPolarity,
    AskRefineUpperPolarity,
    Summary,
    Done,
};

inline constexpr StateKind all_state_kinds[] = {
    StateKind::AskProduct,       StateKind::AskCustomer,            StateKind::MoreCustomers,
    StateKind::AskProblem,       StateKind::MoreProblems,           StateKind::AskFeature,
    StateKind::AskFeatureTarget, StateKind::AskPolarity,            StateKind::MoreFeatures,
    StateKind::AskRefine,        StateKind::AskRefineConcept,       StateKind::AskRefineLowerPolarity,
    StateKind::AskRefineUpperPolarity, StateKind::Summary,          StateKind::Done,
};

inline std::string_view to_string(StateKind k)
{
    switch (k) {
    case StateKind::AskProduct: return "ask_product";
    case StateKind::AskCustomer: return "ask_customer";
    case StateKind::MoreCustomers: return "more_customers";
    case StateKind::AskProblem: return "ask_problem";
    case StateKind::MoreProblems: return "more_problems";
    case StateKind::AskFeature: return "ask_feature";
    case StateKind::AskFeatureTarget: return "ask_feature_target";
    case StateKind::AskPolarity: return "ask_polarity";
    case StateKind::MoreFeatures: return "more_features";
    case StateKind::AskRefine: return "ask_refine";
    case StateKind::AskRefineConcept: return "ask_refine_concept";
    case StateKind::AskRefineLowerPolarity: return "ask_refine_lower_polarity";
    case StateKind::AskRefineUpperPolarity: return "ask_refine_upper_polarity";
    case StateKind::Summary: return "summary";
    case StateKind::Done: return "done";
    }
    return "";
}

/// A feature answer waiting for its target aspect and polarity.
struct StagedFeature {
    std::string clause;
    ClauseForm form = ClauseForm::NounPhrase;
    std::optional<NodeId> target;

    friend bool operator==(const StagedFeature&, const StagedFeature&) = default;
};

/// A refinement concept waiting for its polarities.
struct StagedRefinement {
    EdgeId edge;
    std::string clause;
    ClauseKind kind = ClauseKind::Difficulty;
    ClauseForm form = ClauseForm::NounPhrase;
    std::optional<Polarity> lower;

    friend bool operator==(const StagedRefinement&, const StagedRefinement&) = default;
};

/// Current question plus the parameters it refers to. Only the fields
/// meaningful for `kind` are set.
struct DialogueState {
    DialogueState(StateKind k = StateKind::AskProduct) : kind(k) {}

    StateKind kind;
    std::optional<NodeId> customer;             // AskProblem, MoreProblems
    std::optional<StagedFeature> feature;       // AskFeatureTarget, AskPolarity
    std::optional<EdgeId> edge;                 // AskRefine, AskRefineConcept
    std::optional<StagedRefinement> refinement; // AskRefine*Polarity

    friend bool operator==(const DialogueState&, const DialogueState&) = default;
};

struct EngineConfig {
    std::size_t max_refinement_rounds = 5;
    double clarification_threshold = nlu::default_clarification_threshold;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

enum class Speaker { User, Bot };

struct TranscriptEntry {
    Speaker speaker;
    std::string text;
    std::string timestamp;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct DialogueSession {
    std::string id;
    CognitiveMap map;
    DialogueState state;
    std::deque<EdgeId> refinement_queue;
    std::set<EdgeId> asked_refinements;
    /// Number of refinements between an edge and the arrow the interview
    /// originally drew. Edges at depth >= max_refinement_rounds are not asked.
    std::map<EdgeId, std::size_t> lineage_depth;
    std::vector<TranscriptEntry> transcript;
    std::optional<std::vector<Hypothesis>> hypotheses;
    EngineConfig config;

    bool done() const noexcept { return state.kind == StateKind::Done; }

    friend bool operator==(const DialogueSession&, const DialogueSession&) = default;
};

struct TurnResult {
    std::vector<std::string> replies;
    DialogueState state;
    CognitiveMap map;
    std::optional<std::vector<Hypothesis>> hypotheses;
    bool done = false;
};

class SessionDone : public std::logic_error {
public:
    explicit SessionDone(const std::string& id)
        : std::logic_error("SessionDone: session '" + id + "' has finished")
    {}
};

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0')
       << ms.count() << 'Z';
    return os.str();
}

inline std::string random_session_id()
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << rng();
    return os.str();
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

namespace detail {

inline std::string product_name(const CognitiveMap& map)
{
    return map.product() ? map.node(*map.product()).clause_text : std::string("your product");
}

inline std::string label_of(const CognitiveMap& map, const NodeId& id)
{
    const auto* n = map.find_node(id);
    return n ? display_label(*n) : id.value;
}

inline std::vector<const MapNode*> problem_list(const CognitiveMap& map)
{
    return map.nodes_of(NodeKind::Problem);
}

inline std::string polarity_question(const std::string& subject, const std::string& object)
{
    return "Does " + subject + " increase, decrease, or not affect " + object + "?";
}

}  // namespace detail

/// The one question asked in `state`. Not defined for Done.
inline std::string prompt_for(const DialogueState& state, const CognitiveMap& map)
{
    const auto product = detail::product_name(map);
    switch (state.kind) {
    case StateKind::AskProduct:
        return "What is the product name?";
    case StateKind::AskCustomer:
        if (map.nodes_of(NodeKind::Customer).empty()) {
            return "What are the customers targeted by " + product + "?";
        }
        return "Who is another customer?";
    case StateKind::MoreCustomers:
        return "Do you want to add another customer? (yes/no)";
    case StateKind::AskProblem:
        return "Why would " + detail::label_of(map, state.customer.value_or(NodeId{})) +
               " want to use " + product + "?";
    case StateKind::MoreProblems:
        return "Do you want to add another reason why " +
               detail::label_of(map, state.customer.value_or(NodeId{})) + " would use " + product +
               "? (yes/no)";
    case StateKind::AskFeature:
        return "Which feature do you plan for " + product + "?";
    case StateKind::AskFeatureTarget: {
        std::string s = "Which of these aspects does " +
                        (state.feature ? state.feature->clause : std::string("this feature")) +
                        " fulfill?";
        std::size_t i = 1;
        for (const auto* p : detail::problem_list(map)) {
            s += "\n" + std::to_string(i++) + ". " + display_label(*p);
        }
        return s;
    }
    case StateKind::AskPolarity:
        return detail::polarity_question(
            state.feature ? state.feature->clause : std::string("this feature"),
            state.feature && state.feature->target ? detail::label_of(map, *state.feature->target)
                                                   : std::string("the aspect"));
    case StateKind::MoreFeatures:
        return "Do you want to add another feature? (yes/no)";
    case StateKind::AskRefine:
    case StateKind::AskRefineConcept: {
        const auto* e = state.edge ? map.find_edge(*state.edge) : nullptr;
        const auto source = e ? detail::label_of(map, e->source) : std::string("these elements");
        const auto target = e ? detail::label_of(map, e->target) : std::string("the next one");
        if (state.kind == StateKind::AskRefine) {
            return "Is there any underlying concept that explains the relationship between " +
                   source + " and " + target + "?";
        }
        return "What is the underlying concept that connects " + source + " and " + target + "?";
    }
    case StateKind::AskRefineLowerPolarity:
    case StateKind::AskRefineUpperPolarity: {
        const auto& r = state.refinement;
        const auto* e = r ? map.find_edge(r->edge) : nullptr;
        MapNode concept_node{NodeId{}, NodeKind::Problem, r ? r->clause : std::string("the concept"),
                             r ? std::optional(r->kind) : std::nullopt,
                             r ? std::optional(r->form) : std::nullopt};
        const auto concept_label = display_label(concept_node);
        if (state.kind == StateKind::AskRefineLowerPolarity) {
            return detail::polarity_question(e ? detail::label_of(map, e->source) : "the source",
                                             concept_label);
        }
        return detail::polarity_question(concept_label,
                                         e ? detail::label_of(map, e->target) : "the target");
    }
    case StateKind::Summary:
        return "Here are the hypotheses derived from your map:";
    case StateKind::Done:
        break;
    }
    throw std::logic_error("no prompt for a finished interview");
}

/// Authored help text for each state. None of them contains a question
/// mark: the help reply is followed by the state's prompt.
inline std::string clarification_for(StateKind kind)
{
    static const std::string polarity_help =
        "Tell me how the first element influences the second. Answer increase if it makes it "
        "grow, decrease if it makes it shrink, or not affect if there is no influence.";
    switch (kind) {
    case StateKind::AskProduct:
        return "I need the product name, the name of the product or service you are building, "
               "for example \"Uber\".";
    case StateKind::AskCustomer:
        return "Name one customer segment, a group of people who would use or pay for the "
               "product, for example \"riders\" or \"drivers\". One segment at a time is enough.";
    case StateKind::MoreCustomers:
        return "Answer yes if another customer segment is targeted by the product, or no to "
               "continue with the reasons customers would use it.";
    case StateKind::AskProblem:
        return "Describe one reason this customer would use the product. It can be a desire, "
               "something they would like to do such as \"to book a ride\", or a difficulty "
               "they face such as \"it is hard to find a cab\".";
    case StateKind::MoreProblems:
        return "Answer yes to add another desire or difficulty for this customer, or no to "
               "continue.";
    case StateKind::AskFeature:
        return "Describe one feature you plan to build, for example \"book a ride\" or "
               "\"fare splitting\".";
    case StateKind::AskFeatureTarget:
        return "Pick the aspect this feature fulfills by typing its number in the list or the "
               "first words of its text.";
    case StateKind::AskPolarity:
    case StateKind::AskRefineLowerPolarity:
    case StateKind::AskRefineUpperPolarity:
        return polarity_help;
    case StateKind::MoreFeatures:
        return "Answer yes to describe another feature, or no to review the arrows of the map.";
    case StateKind::AskRefine:
        return "An underlying concept explains why one element influences the other, for "
               "example waiting time at the curb between booking a ride and the difficulty to "
               "find a cab. Answer yes to add one, or no to keep the arrow as it is.";
    case StateKind::AskRefineConcept:
        return "Describe the concept in a few words, as a desire such as \"to reach work on "
               "time\" or as a difficulty such as \"there is a long waiting time at the curb\".";
    case StateKind::Summary:
        return "The interview is complete and the hypotheses are listed below.";
    case StateKind::Done:
        break;
    }
    throw std::logic_error("no clarification for a finished interview");
}

inline std::string clarification_for(const DialogueState& state)
{
    return clarification_for(state.kind);
}

inline nlu::IntentSet admissible_intents(StateKind kind)
{
    using nlu::IntentKind;
    nlu::IntentSet s;
    switch (kind) {
    case StateKind::AskProduct: s = {IntentKind::ProductName}; break;
    case StateKind::AskCustomer: s = {IntentKind::CustomerDescription}; break;
    case StateKind::MoreCustomers:
    case StateKind::MoreProblems:
    case StateKind::MoreFeatures:
    case StateKind::AskRefine: s = {IntentKind::Affirm, IntentKind::Deny}; break;
    case StateKind::AskProblem:
    case StateKind::AskRefineConcept:
        s = {IntentKind::DesireDescription, IntentKind::DifficultyDescription};
        break;
    case StateKind::AskFeature: s = {IntentKind::FeatureDescription}; break;
    case StateKind::AskFeatureTarget: s = {IntentKind::TargetReference}; break;
    case StateKind::AskPolarity:
    case StateKind::AskRefineLowerPolarity:
    case StateKind::AskRefineUpperPolarity: s = {IntentKind::PolarityAnswer}; break;
    case StateKind::Summary: break;
    case StateKind::Done: return {};
    }
    s.insert(IntentKind::HelpRequest);
    s.insert(IntentKind::Stop);
    return s;
}

inline nlu::IntentSet admissible_intents(const DialogueState& state)
{
    return admissible_intents(state.kind);
}

// ---------------------------------------------------------------------------
// Target resolution
// ---------------------------------------------------------------------------

/// Resolves "2", "the second one", or a case-insensitive prefix of a problem
/// label against the numbered list shown by AskFeatureTarget. Returns
/// nothing when the reference is unknown or ambiguous.
inline std::optional<NodeId> resolve_target(const CognitiveMap& map, std::string_view reference)
{
    const auto problems = detail::problem_list(map);
    auto ref = mentor::detail::lower(mentor::detail::trim(reference));
    for (std::string_view p : {"the ", "number ", "aspect ", "option ", "no. "}) {
        if (ref.starts_with(p)) ref.erase(0, p.size());
    }
    for (std::string_view s : {" one", " aspect", " option"}) {
        if (ref.size() > s.size() && ref.ends_with(s)) ref.erase(ref.size() - s.size());
    }
    if (ref.empty()) return std::nullopt;

    std::optional<std::size_t> index;
    if (std::all_of(ref.begin(), ref.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
        if (ref.size() <= 6) index = std::stoul(ref);
    } else {
        static const std::map<std::string, std::size_t> words = {
            {"first", 1}, {"1st", 1},  {"one", 1},   {"second", 2}, {"2nd", 2},  {"two", 2},
            {"third", 3}, {"3rd", 3},  {"three", 3}, {"fourth", 4}, {"4th", 4},  {"four", 4},
            {"fifth", 5}, {"5th", 5},  {"five", 5},  {"sixth", 6},  {"six", 6},  {"seventh", 7},
            {"seven", 7}, {"eighth", 8}, {"eight", 8}, {"ninth", 9}, {"nine", 9}, {"tenth", 10},
            {"ten", 10},  {"last", problems.size()}};
        if (auto it = words.find(ref); it != words.end()) index = it->second;
    }
    if (index) {
        if (*index >= 1 && *index <= problems.size()) return problems[*index - 1]->id;
        return std::nullopt;
    }

    std::vector<const MapNode*> hits;
    for (const auto* p : problems) {
        const auto label = mentor::detail::lower(display_label(*p));
        const auto clause = mentor::detail::lower(p->clause_text);
        if (label == ref || clause == ref) return p->id;
        if (label.starts_with(ref) || clause.starts_with(ref)) hits.push_back(p);
    }
    if (hits.size() == 1) return hits.front()->id;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Runs the interview. The engine is stateless apart from the shared,
/// read-only intent model; all progress lives in DialogueSession, and
/// identical utterances produce identical sessions.
class DialogueEngine {
public:
    explicit DialogueEngine(std::shared_ptr<const nlu::ClassifierModel> model)
        : model_(std::move(model))
    {
        if (!model_) throw std::invalid_argument("DialogueEngine needs a model");
    }

    const nlu::ClassifierModel& model() const noexcept { return *model_; }

    DialogueSession new_session(EngineConfig config = {}, std::string id = random_session_id(),
                                const std::string& timestamp = utc_timestamp()) const
    {
        DialogueSession s;
        s.id = std::move(id);
        s.config = config;
        for (auto& line : opening_lines()) {
            s.transcript.push_back({Speaker::Bot, std::move(line), timestamp});
        }
        return s;
    }

    /// Bot lines shown before the first user turn.
    static std::vector<std::string> opening_lines()
    {
        return {"Hello! I am your startup mentor. Together we will draw a map of your product "
                "idea and turn it into hypotheses you can test.",
                prompt_for(DialogueState{}, CognitiveMap{})};
    }

    TurnResult handle(DialogueSession& session, std::string_view user_text,
                      const std::string& timestamp = utc_timestamp()) const
    {
        if (session.done()) throw SessionDone(session.id);
        session.transcript.push_back({Speaker::User, std::string(user_text), timestamp});

        const auto parse = nlu::classify(*model_, user_text, admissible_intents(session.state),
                                         session.config.clarification_threshold);
        std::vector<std::string> replies;
        switch (parse.intent.kind) {
        case nlu::IntentKind::HelpRequest:
            clarify(session, parse, replies);
            break;
        case nlu::IntentKind::Stop:
            replies.push_back("Alright, let's stop here.");
            finish(session, replies);
            break;
        default:
            advance(session, parse, replies);
            break;
        }

        for (const auto& r : replies) session.transcript.push_back({Speaker::Bot, r, timestamp});
        return TurnResult{std::move(replies), session.state, session.map, session.hypotheses,
                          session.done()};
    }

private:
    std::shared_ptr<const nlu::ClassifierModel> model_;

    static void ask(const DialogueSession& s, std::vector<std::string>& replies)
    {
        replies.push_back(prompt_for(s.state, s.map));
    }

    static void clarify(const DialogueSession& s, const nlu::ParseResult& parse,
                        std::vector<std::string>& replies)
    {
        const auto& rule = parse.matched_rule;
        if (rule && (*rule == "low_confidence" || *rule == "unresolved_polarity" ||
                     *rule == "empty_utterance")) {
            replies.push_back("Sorry, I did not quite get that.");
        }
        replies.push_back(clarification_for(s.state));
        ask(s, replies);
    }

    static void retry(const DialogueSession& s, std::string note, std::vector<std::string>& replies)
    {
        replies.push_back(std::move(note));
        ask(s, replies);
    }

    static void go(DialogueSession& s, DialogueState next, std::vector<std::string>& replies)
    {
        s.state = std::move(next);
        ask(s, replies);
    }

    static const nlu::Clause& clause_of(const nlu::ParseResult& p)
    {
        if (!p.clause) throw std::logic_error("content intent without clause");
        return *p.clause;
    }

    void advance(DialogueSession& s, const nlu::ParseResult& parse,
                 std::vector<std::string>& replies) const
    {
        using nlu::IntentKind;
        const auto intent = parse.intent.kind;
        try {
            switch (s.state.kind) {
            case StateKind::AskProduct:
                s.map.set_product(clause_of(parse).text);
                return go(s, {StateKind::AskCustomer}, replies);

            case StateKind::AskCustomer: {
                const auto& text = clause_of(parse).text;
                if (s.map.find_by_label(NodeKind::Customer, text)) {
                    return retry(s, "\"" + text + "\" is already on the map.", replies);
                }
                s.map.add_customer(text);
                return go(s, {StateKind::MoreCustomers}, replies);
            }

            case StateKind::MoreCustomers:
                if (intent == IntentKind::Affirm) return go(s, {StateKind::AskCustomer}, replies);
                return go(s, ask_problem_for(s.map, std::nullopt), replies);

            case StateKind::AskProblem: {
                const auto& c = clause_of(parse);
                const auto kind = intent == IntentKind::DesireDescription ? ClauseKind::Desire
                                                                          : ClauseKind::Difficulty;
                s.map.add_problem(c.text, kind, c.form, s.state.customer.value());
                DialogueState next{StateKind::MoreProblems};
                next.customer = s.state.customer;
                return go(s, std::move(next), replies);
            }

            case StateKind::MoreProblems:
                if (intent == IntentKind::Affirm) {
                    DialogueState next{StateKind::AskProblem};
                    next.customer = s.state.customer;
                    return go(s, std::move(next), replies);
                }
                return go(s, ask_problem_for(s.map, s.state.customer), replies);

            case StateKind::AskFeature: {
                const auto& c = clause_of(parse);
                DialogueState next{StateKind::AskFeatureTarget};
                next.feature = StagedFeature{c.text, c.form, std::nullopt};
                return go(s, std::move(next), replies);
            }

            case StateKind::AskFeatureTarget: {
                auto target = resolve_target(s.map, clause_of(parse).text);
                if (!target) {
                    return retry(s, "I could not tell which aspect you mean.", replies);
                }
                DialogueState next{StateKind::AskPolarity};
                next.feature = s.state.feature;
                next.feature->target = *target;
                return go(s, std::move(next), replies);
            }

            case StateKind::AskPolarity: {
                const auto& f = s.state.feature.value();
                const auto polarity = parse.intent.polarity.value();
                if (auto existing = s.map.find_by_label(NodeKind::Feature, f.clause)) {
                    if (s.map.has_edge(EdgeKind::Value, *existing, f.target.value())) {
                        replies.push_back("That arrow is already on the map.");
                    } else {
                        s.map.link_feature_to_problem(*existing, f.target.value(), polarity);
                    }
                } else {
                    s.map.add_feature(f.clause, f.form, f.target.value(), polarity);
                }
                return go(s, {StateKind::MoreFeatures}, replies);
            }

            case StateKind::MoreFeatures:
                if (intent == IntentKind::Affirm) return go(s, {StateKind::AskFeature}, replies);
                seed_refinements(s);
                if (!s.refinement_queue.empty()) {
                    replies.push_back("Now let's look at the arrows of the map one by one.");
                }
                return next_refinement(s, replies);

            case StateKind::AskRefine:
                if (intent == IntentKind::Affirm) {
                    DialogueState next{StateKind::AskRefineConcept};
                    next.edge = s.state.edge;
                    return go(s, std::move(next), replies);
                }
                return next_refinement(s, replies);

            case StateKind::AskRefineConcept: {
                const auto& c = clause_of(parse);
                const auto kind = intent == IntentKind::DesireDescription ? ClauseKind::Desire
                                                                          : ClauseKind::Difficulty;
                DialogueState next{StateKind::AskRefineLowerPolarity};
                next.refinement = StagedRefinement{s.state.edge.value(), c.text, kind, c.form,
                                                   std::nullopt};
                return go(s, std::move(next), replies);
            }

            case StateKind::AskRefineLowerPolarity: {
                auto staged = s.state.refinement.value();
                staged.lower = parse.intent.polarity.value();
                if (s.map.edge(staged.edge).kind == EdgeKind::Value) {
                    DialogueState next{StateKind::AskRefineUpperPolarity};
                    next.refinement = std::move(staged);
                    return go(s, std::move(next), replies);
                }
                apply_refinement(s, staged, std::nullopt);
                return next_refinement(s, replies);
            }

            case StateKind::AskRefineUpperPolarity: {
                const auto staged = s.state.refinement.value();
                apply_refinement(s, staged, parse.intent.polarity.value());
                return next_refinement(s, replies);
            }

            case StateKind::Summary:
            case StateKind::Done:
                break;
            }
        } catch (const MapError& e) {
            return retry(s, "That answer does not fit the map (" + std::string(to_string(e.code())) + ").",
                         replies);
        }
        clarify(s, parse, replies);
    }

    /// AskProblem for the customer after `after` in id order, or AskFeature.
    static DialogueState ask_problem_for(const CognitiveMap& map, const std::optional<NodeId>& after)
    {
        for (const auto* c : map.nodes_of(NodeKind::Customer)) {
            if (!after || *after < c->id) {
                DialogueState next{StateKind::AskProblem};
                next.customer = c->id;
                return next;
            }
        }
        return DialogueState{StateKind::AskFeature};
    }

    static void enqueue(DialogueSession& s, const EdgeId& e, std::size_t depth)
    {
        s.lineage_depth[e] = depth;
        if (depth >= s.config.max_refinement_rounds) return;
        if (s.asked_refinements.contains(e)) return;
        if (std::find(s.refinement_queue.begin(), s.refinement_queue.end(), e) !=
            s.refinement_queue.end()) {
            return;
        }
        s.refinement_queue.push_back(e);
    }

    static void seed_refinements(DialogueSession& s)
    {
        for (const auto& [id, e] : s.map.edges()) {
            if (e.kind == EdgeKind::Value || e.kind == EdgeKind::ProblemLink) enqueue(s, id, 0);
        }
    }

    static void apply_refinement(DialogueSession& s, const StagedRefinement& r,
                                 std::optional<Polarity> upper)
    {
        const auto depth = s.lineage_depth.contains(r.edge) ? s.lineage_depth.at(r.edge) : 0;
        auto result = s.map.refine_edge(r.edge, r.clause, r.kind, r.form, r.lower.value(), upper);
        enqueue(s, result.lower, depth + 1);
        enqueue(s, result.upper, depth + 1);
    }

    static void next_refinement(DialogueSession& s, std::vector<std::string>& replies)
    {
        while (!s.refinement_queue.empty()) {
            auto e = s.refinement_queue.front();
            s.refinement_queue.pop_front();
            if (!s.map.find_edge(e)) continue;
            s.asked_refinements.insert(e);
            DialogueState next{StateKind::AskRefine};
            next.edge = e;
            return go(s, std::move(next), replies);
        }
        finish(s, replies);
    }

    static void finish(DialogueSession& s, std::vector<std::string>& replies)
    {
        s.state = DialogueState{StateKind::Summary};
        auto hs = render_all_edges(s.map);
        if (hs.empty()) {
            replies.push_back("The map has no arrows yet, so there are no hypotheses to test.");
        } else {
            replies.push_back(prompt_for(s.state, s.map));
            for (const auto& h : hs) replies.push_back(h.statement);
        }
        replies.push_back("Thank you, the interview is complete.");
        s.hypotheses = std::move(hs);
        s.state = DialogueState{StateKind::Done};
    }
};

// ---------------------------------------------------------------------------
// JSON views
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json state_to_json(const DialogueState& s)
{
    nlohmann::ordered_json j;
    j["name"] = to_string(s.kind);
    if (s.customer) j["customer"] = s.customer->value;
    if (s.feature) {
        nlohmann::ordered_json f;
        f["clause"] = s.feature->clause;
        f["clause_form"] = to_string(s.feature->form);
        if (s.feature->target) f["target"] = s.feature->target->value;
        j["feature"] = std::move(f);
    }
    if (s.edge) j["edge"] = s.edge->value;
    if (s.refinement) {
        nlohmann::ordered_json r;
        r["edge"] = s.refinement->edge.value;
        r["clause"] = s.refinement->clause;
        r["clause_kind"] = to_string(s.refinement->kind);
        r["clause_form"] = to_string(s.refinement->form);
        if (s.refinement->lower) r["lower_polarity"] = display_form(*s.refinement->lower);
        j["refinement"] = std::move(r);
    }
    return j;
}

inline nlohmann::ordered_json transcript_to_json(const std::vector<TranscriptEntry>& t)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : t) {
        nlohmann::ordered_json j;
        j["speaker"] = e.speaker == Speaker::User ? "user" : "bot";
        j["text"] = e.text;
        j["timestamp"] = e.timestamp;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline nlohmann::ordered_json turn_to_json(const TurnResult& t)
{
    nlohmann::ordered_json j;
    j["replies"] = t.replies;
    j["state"] = to_string(t.state.kind);
    j["state_detail"] = state_to_json(t.state);
    j["map"] = map_to_json_value(t.map);
    j["hypotheses"] = t.hypotheses ? hypotheses_to_json(*t.hypotheses) : nlohmann::ordered_json(nullptr);
    j["done"] = t.done;
    return j;
}

inline nlohmann::ordered_json session_to_json(const DialogueSession& s)
{
    nlohmann::ordered_json j;
    j["session_id"] = s.id;
    j["state"] = to_string(s.state.kind);
    j["state_detail"] = state_to_json(s.state);
    j["done"] = s.done();
    j["map"] = map_to_json_value(s.map);
    j["hypotheses"] = s.hypotheses ? hypotheses_to_json(*s.hypotheses) : nlohmann::ordered_json(nullptr);
    auto queue = nlohmann::ordered_json::array();
    for (const auto& e : s.refinement_queue) queue.push_back(e.value);
    j["refinement_queue"] = std::move(queue);
    j["transcript"] = transcript_to_json(s.transcript);
    return j;
}

}  // namespace mentor
