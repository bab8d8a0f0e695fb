#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/nlu/classifier.hpp"

namespace mentor::nlu {

struct Metrics {
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::size_t clause_total = 0;
    std::size_t clause_matches = 0;
    double clause_exact_match = 0.0;
    /// (gold, predicted) -> count
    std::map<std::pair<IntentKind, IntentKind>, std::size_t> confusion;
    std::map<IntentKind, double> f1;
};

/// 64-bit FNV-1a; fold assignment must not depend on std::hash.
inline std::uint64_t stable_hash(std::string_view s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Accuracy, macro-F1 and clause exact-match from (gold, prediction) pairs.
/// Macro-F1 averages over every intent seen as gold or prediction.
inline Metrics score_predictions(const Corpus& gold, const std::vector<ParseResult>& predicted)
{
    Metrics m;
    m.total = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& g = gold[i];
        const auto& p = predicted[i];
        ++m.confusion[{g.intent, p.intent.kind}];
        if (g.intent == p.intent.kind) ++m.correct;
        if (g.clause_text) {
            ++m.clause_total;
            if (p.clause && p.clause->text == *g.clause_text) ++m.clause_matches;
        }
    }
    m.accuracy = m.total ? static_cast<double>(m.correct) / static_cast<double>(m.total) : 0.0;
    m.clause_exact_match = m.clause_total ? static_cast<double>(m.clause_matches) /
                                                static_cast<double>(m.clause_total)
                                          : 0.0;

    std::map<IntentKind, std::size_t> tp, fp, fn;
    std::set<IntentKind> labels;
    for (const auto& [pair, n] : m.confusion) {
        const auto [g, p] = pair;
        labels.insert(g);
        labels.insert(p);
        if (g == p) {
            tp[g] += n;
        } else {
            fn[g] += n;
            fp[p] += n;
        }
    }
    double sum = 0.0;
    for (auto k : labels) {
        const double t = static_cast<double>(tp[k]);
        const double precision = t + fp[k] > 0 ? t / (t + fp[k]) : 0.0;
        const double recall = t + fn[k] > 0 ? t / (t + fn[k]) : 0.0;
        const double f = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
        m.f1[k] = f;
        sum += f;
    }
    m.macro_f1 = labels.empty() ? 0.0 : sum / static_cast<double>(labels.size());
    return m;
}

/// k-fold cross-validation. Each utterance goes to fold stable_hash(text) % folds;
/// each fold is classified by a model trained on the others, with every
/// intent admissible.
inline Metrics evaluate(const Corpus& corpus, std::size_t folds,
                        double threshold = default_clarification_threshold)
{
    if (folds < 2 || corpus.size() < folds) {
        throw NluError(NluErrc::CorpusTooSmall,
                       "need at least 2 folds and one utterance per fold (corpus " +
                           std::to_string(corpus.size()) + ", folds " + std::to_string(folds) + ")");
    }
    const IntentSet everything(all_intents.begin(), all_intents.end());

    std::vector<std::size_t> fold_of(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) fold_of[i] = stable_hash(corpus[i].text) % folds;

    Corpus gold;
    std::vector<ParseResult> predicted;
    for (std::size_t f = 0; f < folds; ++f) {
        Corpus train_set;
        Corpus test_set;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            (fold_of[i] == f ? test_set : train_set).push_back(corpus[i]);
        }
        if (test_set.empty() || train_set.empty()) continue;
        const auto model = train(train_set);
        for (const auto& u : test_set) {
            predicted.push_back(classify(model, u.text, everything, threshold));
            gold.push_back(u);
        }
    }
    return score_predictions(gold, predicted);
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m)
{
    nlohmann::ordered_json j;
    j["total"] = m.total;
    j["correct"] = m.correct;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    j["clause_total"] = m.clause_total;
    j["clause_matches"] = m.clause_matches;
    j["clause_exact_match"] = m.clause_exact_match;
    auto per = nlohmann::ordered_json::object();
    for (const auto& [k, f] : m.f1) per[std::string(to_string(k))] = f;
    j["f1"] = std::move(per);
    auto conf = nlohmann::ordered_json::array();
    for (const auto& [pair, n] : m.confusion) {
        nlohmann::ordered_json c;
        c["gold"] = to_string(pair.first);
        c["predicted"] = to_string(pair.second);
        c["count"] = n;
        conf.push_back(std::move(c));
    }
    j["confusion"] = std::move(conf);
    return j;
}

/// Plain-text confusion matrix: rows are gold intents, columns predictions.
inline std::string confusion_table(const Metrics& m)
{
    std::set<IntentKind> labels;
    for (const auto& [pair, n] : m.confusion) {
        labels.insert(pair.first);
        labels.insert(pair.second);
    }
    std::size_t width = 10;
    for (auto k : labels) width = std::max(width, to_string(k).size());

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "gold\\pred";
    std::size_t col = 0;
    for ([[maybe_unused]] auto k : labels) os << std::right << std::setw(5) << ("#" + std::to_string(col++));
    os << "\n";
    for (auto g : labels) {
        os << std::left << std::setw(static_cast<int>(width)) << to_string(g);
        for (auto p : labels) {
            auto it = m.confusion.find({g, p});
            os << std::right << std::setw(5) << (it == m.confusion.end() ? 0 : it->second);
        }
        os << "\n";
    }
    col = 0;
    for (auto k : labels) os << "#" << col++ << " = " << to_string(k) << "\n";
    return os.str();
}

}  // namespace mentor::nlu
