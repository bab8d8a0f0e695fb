#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "mentor/map_model.hpp"

namespace mentor {

inline std::string_view polarity_verb(Polarity p)
{
    switch (p) {
    case Polarity::Increase: return "increases";
    case Polarity::Decrease: return "decreases";
    case Polarity::Neutral: return "does not affect";
    }
    return "does not affect";
}

/// Upper-cases the first character only; the rest of the clause is kept.
inline std::string capitalize(std::string s)
{
    if (!s.empty()) s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
    return s;
}

/// Noun-phrase realization of a problem box, used as a value-hypothesis slot.
///
///   difficulty + VP  ->  "difficulty to <clause>"
///   difficulty + NP  ->  "<clause>"
///   desire     + VP  ->  "the desire to <clause>"
///   desire     + NP  ->  "the desire for <clause>"
inline std::string realize_problem_np(const MapNode& problem)
{
    const auto kind = problem.clause_kind.value_or(ClauseKind::Difficulty);
    const auto form = problem.clause_form.value_or(ClauseForm::NounPhrase);
    if (kind == ClauseKind::Difficulty) {
        return form == ClauseForm::VerbPhrase ? "difficulty to " + problem.clause_text
                                              : problem.clause_text;
    }
    return (form == ClauseForm::VerbPhrase ? "the desire to " : "the desire for ") +
           problem.clause_text;
}

/// Label drawn inside a node's shape. Problems use their noun-phrase
/// realization without the leading article.
inline std::string display_label(const MapNode& node)
{
    if (node.kind != NodeKind::Problem) return node.clause_text;
    auto np = realize_problem_np(node);
    constexpr std::string_view article = "the ";
    if (node.clause_kind == ClauseKind::Desire && np.starts_with(article)) {
        np.erase(0, article.size());
    }
    return np;
}

}  // namespace mentor
