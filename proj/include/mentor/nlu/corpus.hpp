#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/map_io.hpp"
#include "mentor/nlu/intent.hpp"
#include "mentor/nlu/text.hpp"

namespace mentor::nlu {

struct LabeledUtterance {
    std::string text;
    IntentKind intent = IntentKind::HelpRequest;
    std::optional<std::string> clause_text;
    std::optional<ClauseForm> clause_form;

    friend bool operator==(const LabeledUtterance&, const LabeledUtterance&) = default;
};

using Corpus = std::vector<LabeledUtterance>;

class CorpusError : public std::runtime_error {
public:
    CorpusError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what)
        , line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// JSON Lines: {"text": ..., "intent": ..., "clause": ...?, "clause_form": "vp"|"np"?}.
/// Blank lines are skipped. A clause must occur in the normalized text.
inline Corpus read_corpus(std::istream& in)
{
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw CorpusError(lineno, std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
            !j.contains("intent") || !j["intent"].is_string()) {
            throw CorpusError(lineno, "expected string fields 'text' and 'intent'");
        }
        LabeledUtterance u;
        u.text = j["text"].get<std::string>();
        auto intent = intent_from_string(j["intent"].get<std::string>());
        if (!intent) throw CorpusError(lineno, "unknown intent '" + j["intent"].get<std::string>() + "'");
        u.intent = *intent;
        if (j.contains("clause")) {
            if (!j["clause"].is_string()) throw CorpusError(lineno, "'clause' must be a string");
            u.clause_text = j["clause"].get<std::string>();
            if (normalize(u.text).find(*u.clause_text) == std::string::npos) {
                throw CorpusError(lineno, "clause '" + *u.clause_text + "' is not part of the text");
            }
        }
        if (j.contains("clause_form")) {
            const auto f = j["clause_form"].is_string() ? j["clause_form"].get<std::string>() : "";
            u.clause_form = clause_form_from_string(f);
            if (!u.clause_form) throw CorpusError(lineno, "clause_form must be \"vp\" or \"np\"");
        }
        corpus.push_back(std::move(u));
    }
    return corpus;
}

inline Corpus load_corpus(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
    return read_corpus(in);
}

inline std::string write_corpus_line(const LabeledUtterance& u)
{
    nlohmann::ordered_json j;
    j["text"] = u.text;
    j["intent"] = to_string(u.intent);
    if (u.clause_text) j["clause"] = *u.clause_text;
    if (u.clause_form) j["clause_form"] = to_string(*u.clause_form);
    return j.dump();
}

}  // namespace mentor::nlu
