#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/map_model.hpp"
#include "mentor/realize.hpp"

namespace mentor {

enum class HypothesisKind { Feasibility, Value, Problem };

inline std::string_view to_string(HypothesisKind k)
{
    switch (k) {
    case HypothesisKind::Feasibility: return "feasibility";
    case HypothesisKind::Value: return "value";
    case HypothesisKind::Problem: return "problem";
    }
    return "";
}

inline HypothesisKind hypothesis_kind_for(EdgeKind k)
{
    switch (k) {
    case EdgeKind::Feasibility: return HypothesisKind::Feasibility;
    case EdgeKind::Value: return HypothesisKind::Value;
    case EdgeKind::ProblemLink: return HypothesisKind::Problem;
    }
    return HypothesisKind::Value;
}

struct Hypothesis {
    HypothesisKind kind;
    std::string statement;
    EdgeId edge;

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

class InvalidMap : public std::runtime_error {
public:
    explicit InvalidMap(std::vector<Violation> violations)
        : std::runtime_error(summarize(violations))
        , violations_(std::move(violations))
    {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;

    static std::string summarize(const std::vector<Violation>& vs)
    {
        std::string s = "map is not complete:";
        for (const auto& v : vs) {
            s += " " + v.message;
            if (v.subject) s += " (" + *v.subject + ")";
            s += ";";
        }
        return s;
    }
};

// Statement templates. Verbs are emitted as written in the templates, with no
// subject agreement, so "Riders has ..." is the expected output.

inline std::string render_feasibility(const MapNode& product, const MapNode& feature)
{
    return "The team developing " + product.clause_text + " is capable of implementing " +
           feature.clause_text + ".";
}

inline std::string render_value(const MapNode& source, Polarity polarity, const MapNode& target)
{
    const std::string subject =
        source.kind == NodeKind::Problem ? realize_problem_np(source) : source.clause_text;
    return capitalize(subject) + " " + std::string(polarity_verb(polarity)) + " " +
           realize_problem_np(target) + ".";
}

inline std::string render_problem(const MapNode& customer, const MapNode& problem)
{
    const auto kind = problem.clause_kind.value_or(ClauseKind::Difficulty);
    const auto form = problem.clause_form.value_or(ClauseForm::NounPhrase);
    std::string verb;
    if (kind == ClauseKind::Difficulty) {
        verb = form == ClauseForm::VerbPhrase ? "has difficulty to" : "has";
    } else {
        verb = form == ClauseForm::VerbPhrase ? "would like to" : "would like";
    }
    return capitalize(customer.clause_text) + " " + verb + " " + problem.clause_text + ".";
}

inline Hypothesis render_edge(const CognitiveMap& map, const MapEdge& e)
{
    const auto& src = map.node(e.source);
    const auto& tgt = map.node(e.target);
    std::string statement;
    switch (e.kind) {
    case EdgeKind::Feasibility: statement = render_feasibility(src, tgt); break;
    case EdgeKind::Value: statement = render_value(src, e.polarity.value_or(Polarity::Neutral), tgt); break;
    case EdgeKind::ProblemLink: statement = render_problem(tgt, src); break;
    }
    return Hypothesis{hypothesis_kind_for(e.kind), std::move(statement), e.id};
}

/// One hypothesis per edge in edge-id order, without checking that the map
/// is complete. Used for interviews that end early.
inline std::vector<Hypothesis> render_all_edges(const CognitiveMap& map)
{
    std::vector<Hypothesis> out;
    out.reserve(map.edges().size());
    for (const auto& [id, e] : map.edges()) out.push_back(render_edge(map, e));
    return out;
}

/// Throws InvalidMap when the map has any structural violation.
inline std::vector<Hypothesis> hypotheses_for(const CognitiveMap& map)
{
    if (auto v = map.validate(); !v.empty()) throw InvalidMap(std::move(v));
    return render_all_edges(map);
}

inline nlohmann::ordered_json hypotheses_to_json(const std::vector<Hypothesis>& hs)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& h : hs) {
        nlohmann::ordered_json j;
        j["kind"] = to_string(h.kind);
        j["statement"] = h.statement;
        j["edge"] = h.edge.value;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::string markdown_report(const CognitiveMap& map, const std::vector<Hypothesis>& hs)
{
    std::ostringstream os;
    os << "# Hypotheses";
    if (map.product()) os << " for " << map.node(*map.product()).clause_text;
    os << "\n";
    constexpr HypothesisKind order[] = {HypothesisKind::Feasibility, HypothesisKind::Value,
                                        HypothesisKind::Problem};
    constexpr std::string_view titles[] = {"Feasibility", "Value", "Problem"};
    for (std::size_t i = 0; i < 3; ++i) {
        os << "\n## " << titles[i] << " hypotheses\n\n";
        bool any = false;
        for (const auto& h : hs) {
            if (h.kind != order[i]) continue;
            os << "- " << h.statement << " (" << h.edge.value << ")\n";
            any = true;
        }
        if (!any) os << "_None yet._\n";
    }
    return os.str();
}

}  // namespace mentor
