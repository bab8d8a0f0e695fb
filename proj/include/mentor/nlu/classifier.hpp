#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mentor/nlu/corpus.hpp"
#include "mentor/nlu/extract.hpp"
#include "mentor/nlu/intent.hpp"
#include "mentor/nlu/text.hpp"

namespace mentor::nlu {

namespace detail {

/// Coarse orthographic class: "Xx" capitalised, "XxXx" inner capital,
/// "X" all caps, "x" lowercase, "d" digits, "p" anything else.
inline std::string word_shape(std::string_view w)
{
    if (w.empty()) return "p";
    bool upper = false, lower = false, digit = false, inner_upper = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto c = static_cast<unsigned char>(w[i]);
        if (std::isupper(c)) {
            upper = true;
            if (i > 0) inner_upper = true;
        } else if (std::islower(c)) {
            lower = true;
        } else if (std::isdigit(c)) {
            digit = true;
        }
    }
    if (digit && !upper && !lower) return "d";
    if (!upper && !lower) return "p";
    if (upper && !lower) return "X";
    if (!upper) return "x";
    if (std::isupper(static_cast<unsigned char>(w.front()))) return inner_upper ? "XxXx" : "Xx";
    return "xX";
}

}  // namespace detail

/// Bag-of-features vector: lowercased unigrams, word bigrams and POS-tag
/// bigrams with sentence boundary markers, plus word shapes, three-letter
/// suffixes and a token-count bucket. The last three let the model place
/// names it has never seen (a capitalised brand against a plural noun).
inline std::vector<std::string> extract_features(std::string_view text)
{
    const auto tagged = pos_tag(tokenize(text));
    std::vector<std::string> out;
    out.reserve(tagged.size() * 5 + 3);
    std::string prev_word = "<s>";
    std::string prev_tag = "<s>";
    for (const auto& t : tagged) {
        const std::string tag(to_string(t.tag));
        out.push_back("w=" + t.token.lower);
        out.push_back("b=" + prev_word + "_" + t.token.lower);
        out.push_back("t=" + prev_tag + "_" + tag);
        out.push_back("s=" + detail::word_shape(t.token.text));
        const auto& w = t.token.lower;
        if (w.size() >= 4 && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isalpha(c); })) {
            out.push_back("x=" + w.substr(w.size() - 3));
        }
        prev_word = t.token.lower;
        prev_tag = tag;
    }
    out.push_back("b=" + prev_word + "_</s>");
    out.push_back("t=" + prev_tag + "_</s>");
    out.push_back("n=" + (tagged.size() >= 4 ? std::string("4+") : std::to_string(tagged.size())));
    return out;
}

/// Multinomial naive Bayes over extract_features, add-one smoothed.
/// Immutable once trained; safe to share between sessions.
class ClassifierModel {
public:
    struct Posterior {
        IntentKind intent;
        double probability;
    };

    const std::vector<IntentKind>& classes() const noexcept { return classes_; }
    std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
    std::size_t document_count() const noexcept { return documents_; }

    bool knows(IntentKind k) const
    {
        return std::find(classes_.begin(), classes_.end(), k) != classes_.end();
    }

    /// log P(c) + sum over in-vocabulary features of log P(f | c).
    double log_score(IntentKind k, const std::vector<std::string>& features) const
    {
        const auto& table = tables_.at(k);
        double score = table.log_prior;
        for (const auto& f : features) {
            if (!vocabulary_.contains(f)) continue;
            auto it = table.log_likelihood.find(f);
            score += it == table.log_likelihood.end() ? table.log_unseen : it->second;
        }
        return score;
    }

    /// Posterior renormalized over `candidates` (classes unknown to the
    /// model are skipped), sorted by descending probability then intent.
    std::vector<Posterior> posterior(std::string_view text, const IntentSet& candidates) const
    {
        const auto features = extract_features(text);
        std::vector<Posterior> out;
        for (auto k : classes_) {
            if (candidates.contains(k)) out.push_back({k, log_score(k, features)});
        }
        if (out.empty()) return out;
        double max_log = -std::numeric_limits<double>::infinity();
        for (const auto& p : out) max_log = std::max(max_log, p.probability);
        double total = 0.0;
        for (auto& p : out) {
            p.probability = std::exp(p.probability - max_log);
            total += p.probability;
        }
        for (auto& p : out) p.probability /= total;
        std::stable_sort(out.begin(), out.end(), [](const Posterior& a, const Posterior& b) {
            return a.probability > b.probability;
        });
        return out;
    }

private:
    struct Table {
        double log_prior = 0.0;
        double log_unseen = 0.0;
        std::unordered_map<std::string, double> log_likelihood;
    };

    std::vector<IntentKind> classes_;
    std::map<IntentKind, Table> tables_;
    std::unordered_set<std::string> vocabulary_;
    std::size_t documents_ = 0;

    friend ClassifierModel train(const Corpus& corpus);
};

inline ClassifierModel train(const Corpus& corpus)
{
    if (corpus.empty()) throw NluError(NluErrc::EmptyCorpus, "cannot train on an empty corpus");

    struct Counts {
        std::size_t documents = 0;
        std::size_t features = 0;
        std::unordered_map<std::string, std::size_t> per_feature;
    };
    std::map<IntentKind, Counts> counts;
    ClassifierModel model;
    for (const auto& u : corpus) {
        auto& c = counts[u.intent];
        ++c.documents;
        for (auto& f : extract_features(u.text)) {
            ++c.per_feature[f];
            ++c.features;
            model.vocabulary_.insert(std::move(f));
        }
    }

    model.documents_ = corpus.size();
    const double vocab = static_cast<double>(model.vocabulary_.size());
    for (const auto& [intent, c] : counts) {
        model.classes_.push_back(intent);
        ClassifierModel::Table t;
        const double denom = static_cast<double>(c.features) + vocab;
        t.log_prior = std::log(static_cast<double>(c.documents) / static_cast<double>(corpus.size()));
        t.log_unseen = std::log(1.0 / denom);
        for (const auto& [f, n] : c.per_feature) {
            t.log_likelihood.emplace(f, std::log((static_cast<double>(n) + 1.0) / denom));
        }
        model.tables_.emplace(intent, std::move(t));
    }
    return model;
}

struct ParseResult {
    Intent intent;
    double confidence = 0.0;
    std::optional<Clause> clause;
    std::optional<ClauseKind> clause_kind;  // kind signalled by the extraction rule, if any
    std::optional<std::string> matched_rule;
};

namespace detail {

inline std::string control_key(std::string_view normalized)
{
    auto key = ascii_lower(normalized);
    if (key.find_first_not_of("?") == std::string::npos) return key;
    while (!key.empty() && (key.back() == '.' || key.back() == '!' || key.back() == '?' ||
                            key.back() == ' ')) {
        key.pop_back();
    }
    return key;
}

inline const std::unordered_set<std::string>& help_lexicon()
{
    static const std::unordered_set<std::string> words = {
        "help", "help me", "i need help", "help please", "please help", "what do you mean",
        "what does that mean", "what does this mean", "i don't understand", "i do not understand",
        "i dont understand", "i don't get it", "i do not get it", "can you explain",
        "could you explain", "explain", "please explain", "explain please", "what", "huh",
        "pardon", "sorry", "i'm confused", "i am confused", "not sure what you mean",
        "what should i say", "what should i answer", "what do you want", "can you give an example",
        "give me an example", "example", "?", "??", "???"};
    return words;
}

inline const std::unordered_set<std::string>& stop_lexicon()
{
    static const std::unordered_set<std::string> words = {
        "stop", "quit", "exit", "bye", "goodbye", "end", "finish", "i want to stop",
        "let's stop", "lets stop", "stop the interview", "end the interview", "that's enough",
        "enough", "i'm done", "i am done", "let's finish", "finish the interview"};
    return words;
}

inline const std::unordered_set<std::string>& affirm_lexicon()
{
    static const std::unordered_set<std::string> words = {
        "yes", "y", "yeah", "yep", "yup", "sure", "ok", "okay", "of course", "correct", "right",
        "absolutely", "definitely", "yes please", "certainly", "indeed", "i do", "yes there is",
        "yes, there is", "yes i do", "yes, one more", "one more", "sure thing", "go ahead"};
    return words;
}

inline const std::unordered_set<std::string>& deny_lexicon()
{
    static const std::unordered_set<std::string> words = {
        "no", "n", "nope", "nah", "no thanks", "no, thanks", "not really", "none", "that's all",
        "that is all", "no more", "nothing else", "i don't think so", "not at all", "there isn't",
        "there is not", "no there isn't", "no, there isn't", "that's it", "no, that's it",
        "no, that's all", "i'm good", "not now"};
    return words;
}

/// Multi-word stop phrases that may close a longer sentence
/// ("I have to go, let's stop here").
inline bool ends_with_stop_phrase(const std::string& key)
{
    static constexpr std::string_view phrases[] = {"let's stop", "let's stop here", "lets stop",
                                                   "stop the interview", "end the interview",
                                                   "let's finish", "let's end here", "i want to stop"};
    for (auto p : phrases) {
        if (key.size() > p.size() + 1 && key.ends_with(p)) {
            const char before = key[key.size() - p.size() - 1];
            if (before == ' ' || before == ',') return true;
        }
    }
    return false;
}

inline const std::vector<std::string>& affirm_prefixes()
{
    static const std::vector<std::string> p = {"yes,", "yes ", "yeah,", "yeah ", "yep,", "sure,", "ok,", "okay,"};
    return p;
}

/// "no " is left out: "no time to cook" is an answer, not a refusal.
inline const std::vector<std::string>& deny_prefixes()
{
    static const std::vector<std::string> p = {"no,", "nope,", "nah,", "no thanks,", "no thank you"};
    return p;
}

inline bool has_answer_prefix(const std::string& key, const std::vector<std::string>& prefixes)
{
    return std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
        return key.size() > p.size() && key.starts_with(p);
    });
}

/// Token-joined lowercase form with "n't" spelled out, padded with spaces
/// so that phrase lookups respect word boundaries.
inline std::string phrase_view(std::string_view text)
{
    std::string out = " ";
    for (const auto& t : tokenize(text)) {
        out += t.lower == "n't" ? "not" : t.lower;
        out += ' ';
    }
    return out;
}

inline std::optional<Polarity> match_polarity(std::string_view text)
{
    const auto view = phrase_view(text);
    auto has = [&](std::string_view phrase) {
        return view.find(" " + std::string(phrase) + " ") != std::string::npos;
    };
    static constexpr std::string_view neutral[] = {
        "neutral", "no effect", "not affect", "no impact", "nothing", "no influence",
        "not change", "not increase", "not decrease", "not reduce", "/ o /", "unaffected",
        "no difference"};
    for (auto p : neutral) {
        if (has(p)) return Polarity::Neutral;
    }
    static constexpr std::string_view increase[] = {
        "positive", "increase", "increases", "increasing", "more", "higher", "raise", "raises",
        "+", "up"};
    static constexpr std::string_view decrease[] = {
        "negative", "decrease", "decreases", "decreasing", "reduce", "reduces", "reducing",
        "less", "lower", "lowers", "fewer", "-", "down", "minus"};
    const bool inc = std::any_of(std::begin(increase), std::end(increase), has);
    const bool dec = std::any_of(std::begin(decrease), std::end(decrease), has);
    if (inc == dec) return std::nullopt;
    return inc ? Polarity::Increase : Polarity::Decrease;
}

struct LeadIn {
    IntentKind intent;
    std::regex pattern;
};

/// Introductory phrases dropped from fallback clauses, per content intent.
/// A match also signals the intent when several content intents are open.
inline const std::vector<LeadIn>& lead_ins()
{
    constexpr auto icase = std::regex::ECMAScript | std::regex::icase;
    static const std::vector<LeadIn> patterns = {
        {IntentKind::ProductName,
         std::regex(R"(^(?:(?:it|the product|the app|our (?:product|app|startup|service))(?:'s| is) )"
                    R"((?:called|named) |(?:the product|the app|our (?:product|app|startup|service)) is )"
                    R"(|we call it |we named it |the (?:product )?name is |)"
                    R"(the name of (?:the|our) (?:product|app) is |we are building |we're building ))"
                    R"((.+)$)", icase)},
        {IntentKind::CustomerDescription,
         std::regex(R"(^(?:(?:our|the) (?:main |target )?(?:customers|users|audience|segment) (?:are|is) )"
                    R"(|we (?:target|serve|focus on) |mainly |mostly |another one is |)"
                    R"(another customer is |another segment is ))"
                    R"((.+)$)", icase)},
        {IntentKind::FeatureDescription,
         std::regex(R"(^(?:a feature (?:to|for|that) |we plan (?:to (?:offer|add|build) )?|)"
                    R"(we will (?:offer|add|build) |an option to |the possibility to ))"
                    R"((.+)$)", icase)},
    };
    return patterns;
}

/// The content intent whose lead-in starts `text`, if exactly one does.
inline std::optional<IntentKind> lead_in_intent(const std::string& text, const IntentSet& content)
{
    std::optional<IntentKind> found;
    for (const auto& l : lead_ins()) {
        if (!content.contains(l.intent) || !std::regex_match(text, l.pattern)) continue;
        if (found && *found != l.intent) return std::nullopt;
        found = l.intent;
    }
    return found;
}

/// "2", "the second one", "number 3", "option 1", "last".
inline bool is_index_reference(const std::string& text)
{
    static const std::regex pattern(
        R"(^(?:the |number |option |no\. )?(?:\d{1,3}|first|second|third|fourth|fifth|sixth|seventh|)"
        R"(eighth|ninth|tenth|last|1st|2nd|3rd|4th|5th)(?: one| aspect| option)?[.!]?$)",
        std::regex::ECMAScript | std::regex::icase);
    return std::regex_match(text, pattern);
}

/// Returns the clause with an intent-specific introductory phrase removed.
/// The result stays a suffix of the original clause.
inline Clause strip_lead_in(IntentKind intent, Clause clause)
{
    for (const auto& l : lead_ins()) {
        if (l.intent != intent) continue;
        std::smatch m;
        if (!std::regex_match(clause.text, m, l.pattern)) continue;
        auto rest = m.str(1);
        if (rest.empty()) continue;
        clause.text = std::move(rest);
        clause.form = form_of(clause.text);
    }
    return clause;
}

inline std::optional<IntentKind> intent_for_rule(const Extraction& e)
{
    if (!e.matched()) return std::nullopt;
    if (e.kind == ClauseKind::Desire) return IntentKind::DesireDescription;
    if (e.kind == ClauseKind::Difficulty) return IntentKind::DifficultyDescription;
    return IntentKind::FeatureDescription;
}

inline ParseResult control(IntentKind k, const std::string& rule)
{
    return ParseResult{Intent{k, std::nullopt}, 1.0, std::nullopt, std::nullopt, rule};
}

inline ParseResult with_clause(IntentKind k, const Extraction& e, double confidence,
                               std::string rule)
{
    Clause clause = e.clause;
    if (!e.matched()) clause = strip_lead_in(k, std::move(clause));
    return ParseResult{Intent{k, std::nullopt}, confidence, std::move(clause), e.kind,
                       std::move(rule)};
}

}  // namespace detail

inline constexpr double default_clarification_threshold = 0.5;

/// Resolves an utterance against the intents admissible in the current
/// dialogue state. help_request and stop are always admissible.
///
/// Resolution order:
///  1. exact control phrases (help, stop, yes, no);
///  2. extraction rules, when the admissible content intents leave at most
///     the desire/difficulty choice open or a rule names an admissible intent;
///  3. polarity words, when a polarity answer is expected;
///  4. the statistical model restricted to the admissible intents. A winner
///     below `threshold` comes back as help_request with matched_rule
///     "low_confidence", which callers treat as a request to clarify.
inline ParseResult classify(const ClassifierModel& model, std::string_view text,
                            const IntentSet& admissible,
                            double threshold = default_clarification_threshold)
{
    if (admissible.empty()) {
        throw NluError(NluErrc::EmptyAdmissibleSet, "no admissible intent given");
    }
    IntentSet allowed = admissible;
    allowed.insert(IntentKind::HelpRequest);
    allowed.insert(IntentKind::Stop);

    const auto normalized = normalize(text);
    const auto key = detail::control_key(normalized);
    if (key.empty()) return detail::control(IntentKind::HelpRequest, "empty_utterance");

    if (detail::help_lexicon().contains(key)) return detail::control(IntentKind::HelpRequest, "control:help");
    if (detail::stop_lexicon().contains(key)) return detail::control(IntentKind::Stop, "control:stop");
    if (detail::ends_with_stop_phrase(key)) return detail::control(IntentKind::Stop, "control:stop");
    if (allowed.contains(IntentKind::Affirm) &&
        (detail::affirm_lexicon().contains(key) || detail::has_answer_prefix(key, detail::affirm_prefixes()))) {
        return detail::control(IntentKind::Affirm, "control:affirm");
    }
    if (allowed.contains(IntentKind::Deny) &&
        (detail::deny_lexicon().contains(key) || detail::has_answer_prefix(key, detail::deny_prefixes()))) {
        return detail::control(IntentKind::Deny, "control:deny");
    }

    IntentSet content;
    for (auto k : allowed) {
        if (is_content_intent(k)) content.insert(k);
    }

    std::optional<Extraction> extraction;
    if (!content.empty()) {
        try {
            extraction = extract_clause(normalized);
        } catch (const NluError&) {
            return detail::control(IntentKind::HelpRequest, "empty_utterance");
        }
        const auto& e = *extraction;
        const double conf = e.matched() ? 0.9 : 0.6;
        const IntentSet problem_pair = {IntentKind::DesireDescription, IntentKind::DifficultyDescription};

        if (content.size() == 1) {
            return detail::with_clause(*content.begin(), e, conf, e.rule);
        }
        if (content == problem_pair) {
            IntentKind k;
            if (e.kind) {
                k = *e.kind == ClauseKind::Desire ? IntentKind::DesireDescription
                                                  : IntentKind::DifficultyDescription;
            } else {
                k = e.clause.form == ClauseForm::VerbPhrase ? IntentKind::DesireDescription
                                                            : IntentKind::DifficultyDescription;
            }
            return detail::with_clause(k, e, conf, e.rule);
        }
        if (auto k = detail::intent_for_rule(e); k && content.contains(*k)) {
            return detail::with_clause(*k, e, 0.9, e.rule);
        }
        if (!e.matched()) {
            if (content.contains(IntentKind::TargetReference) && detail::is_index_reference(e.clause.text)) {
                return detail::with_clause(IntentKind::TargetReference, e, 0.9, "target_index");
            }
            if (auto k = detail::lead_in_intent(e.clause.text, content)) {
                return detail::with_clause(*k, e, 0.9, "lead_in");
            }
        }
    }

    if (allowed.contains(IntentKind::PolarityAnswer)) {
        if (auto p = detail::match_polarity(normalized)) {
            return ParseResult{Intent{IntentKind::PolarityAnswer, p}, 1.0, std::nullopt,
                               std::nullopt, "polarity"};
        }
    }

    const auto ranked = model.posterior(normalized, allowed);
    if (ranked.empty()) {
        return ParseResult{Intent{IntentKind::HelpRequest, std::nullopt}, 0.0, std::nullopt,
                           std::nullopt, "low_confidence"};
    }
    const auto& best = ranked.front();
    if (best.probability < threshold) {
        return ParseResult{Intent{IntentKind::HelpRequest, std::nullopt}, best.probability,
                           std::nullopt, std::nullopt, "low_confidence"};
    }
    if (best.intent == IntentKind::PolarityAnswer) {
        // The model can tell that a polarity was meant but not which one.
        return ParseResult{Intent{IntentKind::HelpRequest, std::nullopt}, best.probability,
                           std::nullopt, std::nullopt, "unresolved_polarity"};
    }
    if (is_content_intent(best.intent) && extraction) {
        return detail::with_clause(best.intent, *extraction, best.probability, "model");
    }
    return ParseResult{Intent{best.intent, std::nullopt}, best.probability, std::nullopt,
                       std::nullopt, "model"};
}

}  // namespace mentor::nlu
