#pragma once

#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mentor/map_model.hpp"
#include "mentor/nlu/text.hpp"

namespace mentor::nlu {

struct Clause {
    std::string text;
    ClauseForm form = ClauseForm::NounPhrase;

    friend bool operator==(const Clause&, const Clause&) = default;
};

struct Extraction {
    std::optional<ClauseKind> kind;
    Clause clause;
    std::string rule;  // "fallback" when no pattern matched
    /// Byte offset of the clause inside the normalized utterance.
    std::size_t offset = 0;

    bool matched() const noexcept { return rule != "fallback"; }
};

enum class NluErrc { EmptyUtterance, EmptyCorpus, EmptyAdmissibleSet, CorpusTooSmall };

inline std::string_view to_string(NluErrc e)
{
    switch (e) {
    case NluErrc::EmptyUtterance: return "EmptyUtterance";
    case NluErrc::EmptyCorpus: return "EmptyCorpus";
    case NluErrc::EmptyAdmissibleSet: return "EmptyAdmissibleSet";
    case NluErrc::CorpusTooSmall: return "CorpusTooSmall";
    }
    return "";
}

class NluError : public std::invalid_argument {
public:
    NluError(NluErrc code, const std::string& what)
        : std::invalid_argument(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {}

    NluErrc code() const noexcept { return code_; }

private:
    NluErrc code_;
};

namespace detail {

/// Drops trailing punctuation and whitespace; returns the kept length.
inline std::size_t clause_length(std::string_view s)
{
    std::size_t n = s.size();
    while (n > 0) {
        const char c = s[n - 1];
        if (c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':' || is_space(c)) {
            --n;
        } else {
            break;
        }
    }
    return n;
}

/// False when the first word is a function word (determiner, pronoun,
/// number, preposition, conjunction) or punctuation: "to the station" is a
/// destination, "to book a ride" a desire. Unknown words pass.
inline bool starts_with_verb(std::string_view text)
{
    auto toks = tokenize(text);
    if (toks.empty()) return false;
    switch (tag_word(toks.front().lower)) {
    case Tag::Det:
    case Tag::Pron:
    case Tag::Num:
    case Tag::Prep:
    case Tag::Conj:
    case Tag::Other:
        return false;
    default:
        return true;
    }
}

/// VerbPhrase iff the first token that is not a pronoun, determiner or
/// punctuation mark is a verb.
inline ClauseForm form_of(std::string_view text)
{
    for (const auto& t : pos_tag(tokenize(text))) {
        if (t.tag == Tag::Pron || t.tag == Tag::Det || t.tag == Tag::Other) continue;
        return t.tag == Tag::Verb ? ClauseForm::VerbPhrase : ClauseForm::NounPhrase;
    }
    return ClauseForm::NounPhrase;
}

struct ExtractionRule {
    std::string id;
    std::regex pattern;  // group 1 captures the clause
    std::optional<ClauseKind> kind;
    ClauseForm form;
    bool needs_leading_verb = false;
};

inline const std::vector<ExtractionRule>& extraction_rules()
{
    using enum ClauseKind;
    using enum ClauseForm;
    constexpr auto icase = std::regex::ECMAScript | std::regex::icase;
    static const std::vector<ExtractionRule> rules = {
        {"desire_want",
         std::regex(R"(^(?:(?:they|he|she|(?:the )?users|(?:the )?customers|people) )?)"
                    R"((?:want|wants|would like|need|needs) to (.+)$)", icase),
         Desire, VerbPhrase},
        {"desire_to", std::regex(R"(^to (.+)$)", icase), Desire, VerbPhrase, true},
        {"difficulty_hard",
         std::regex(R"(^it(?:'s| 's| is| was) (?:(?:very|really|quite|too|so|often) )?)"
                    R"((?:hard|difficult) (?:for [a-z]+ )?to (.+)$)", icase),
         Difficulty, VerbPhrase},
        {"difficulty_struggle",
         std::regex(R"(^(?:they|users|people|customers) )"
                    R"((?:struggle|find it hard|find it difficult) to (.+)$)", icase),
         Difficulty, VerbPhrase},
        {"difficulty_have",
         std::regex(R"(^(?:they|users|people|customers) (?:face|have|pay) (.+)$)", icase),
         Difficulty, NounPhrase},
        {"difficulty_there", std::regex(R"(^there(?: is| are|'s) (.+)$)", icase), Difficulty,
         NounPhrase},
        {"feature_allows",
         std::regex(R"(^(?:the app|the product|it) (?:allows|lets|enables) )"
                    R"((?:(?:the users?|them|users) )?(?:to )?(.+)$)", icase),
         std::nullopt, VerbPhrase},
        {"feature_can", std::regex(R"(^(?:the )?users can (.+)$)", icase), std::nullopt,
         VerbPhrase},
    };
    return rules;
}

}  // namespace detail

/// Pulls the map-element clause out of a normalized utterance. Rules are
/// tried in order (desire, difficulty, feature); the first match wins and
/// otherwise the whole utterance is the clause.
///
/// Throws NluError(EmptyUtterance) when no word is left after trimming punctuation.
inline Extraction extract_clause(std::string_view normalized)
{
    const std::string text(normalized);
    for (const auto& rule : detail::extraction_rules()) {
        std::smatch m;
        if (!std::regex_match(text, m, rule.pattern)) continue;
        const auto pos = static_cast<std::size_t>(m.position(1));
        const auto captured = std::string_view(text).substr(pos);
        const auto len = detail::clause_length(captured);
        if (len == 0) continue;
        auto clause = std::string(captured.substr(0, len));
        if (rule.needs_leading_verb && !detail::starts_with_verb(clause)) continue;
        return Extraction{rule.kind, Clause{std::move(clause), rule.form}, rule.id, pos};
    }

    std::string_view whole = text;
    std::size_t lead = 0;
    while (lead < whole.size() && detail::is_space(whole[lead])) ++lead;
    whole.remove_prefix(lead);
    const auto len = detail::clause_length(whole);
    bool has_word = false;
    for (char c : whole.substr(0, len)) has_word = has_word || detail::is_word_byte(c);
    if (len == 0 || !has_word) throw NluError(NluErrc::EmptyUtterance, "nothing to extract");
    auto clause = std::string(whole.substr(0, len));
    auto form = detail::form_of(clause);
    return Extraction{std::nullopt, Clause{std::move(clause), form}, "fallback", lead};
}

}  // namespace mentor::nlu
