#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/dialogue.hpp"
#include "mentor/map_model.hpp"
#include "mentor/nlu/classifier.hpp"
#include "mentor/nlu/corpus.hpp"

namespace mentor::testing {

inline std::string data_path(const std::string& name) { return std::string(MENTOR_TEST_DATA) + "/" + name; }
inline std::string golden_path(const std::string& name) { return std::string(MENTOR_GOLDEN_DIR) + "/" + name; }

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::vector<std::string> read_lines(const std::string& path)
{
    std::vector<std::string> out;
    std::istringstream in(read_file(path));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

inline std::vector<std::string> uber_script()
{
    std::vector<std::string> out;
    for (const auto& line : read_lines(data_path("uber_script.jsonl"))) {
        out.push_back(nlohmann::json::parse(line).at("text").get<std::string>());
    }
    return out;
}

inline std::shared_ptr<const nlu::ClassifierModel> seed_model()
{
    static const auto model = std::make_shared<const nlu::ClassifierModel>(
        nlu::train(nlu::load_corpus(data_path("seed_corpus.jsonl"))));
    return model;
}

inline constexpr const char* fixed_stamp = "2020-01-01T00:00:00.000Z";

/// Runs utterances through a fresh session with fixed id and timestamps.
inline DialogueSession run_script(const std::vector<std::string>& utterances, EngineConfig config = {})
{
    DialogueEngine engine(seed_model());
    auto s = engine.new_session(config, "scripted", fixed_stamp);
    for (const auto& u : utterances) {
        if (s.done()) break;
        engine.handle(s, u, fixed_stamp);
    }
    return s;
}

/// Utterance prefixes that leave a fresh session in each askable state.
/// Summary is transient and never waits for input, Done takes no input.
inline std::vector<std::pair<StateKind, std::vector<std::string>>> state_reaching_scripts()
{
    const auto uber = uber_script();
    auto first = [&](std::size_t n) { return std::vector<std::string>(uber.begin(), uber.begin() + n); };
    auto refine = [&](std::initializer_list<const char*> extra) {
        auto v = first(15);
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    return {
        {StateKind::AskProduct, {}},
        {StateKind::AskCustomer, first(1)},
        {StateKind::MoreCustomers, first(2)},
        {StateKind::AskProblem, first(3)},
        {StateKind::MoreProblems, first(4)},
        {StateKind::AskFeature, first(7)},
        {StateKind::AskFeatureTarget, first(8)},
        {StateKind::AskPolarity, first(9)},
        {StateKind::MoreFeatures, first(10)},
        {StateKind::AskRefine, first(15)},
        {StateKind::AskRefineConcept, refine({"yes"})},
        {StateKind::AskRefineLowerPolarity, refine({"yes", "to reach work on time"})},
        {StateKind::AskRefineUpperPolarity,
         refine({"no", "no", "yes", "there is a long waiting time at the curb", "decrease"})},
    };
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("mentor-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Random valid map: a product, customers with problems, features linked
/// to problems, then `refinements` random edge refinements.
inline CognitiveMap random_valid_map(std::mt19937& rng, int refinements = -1)
{
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto polarity = [&] { return static_cast<Polarity>(pick(0, 2)); };
    auto kind = [&] { return pick(0, 1) ? ClauseKind::Desire : ClauseKind::Difficulty; };
    auto form = [&] { return pick(0, 1) ? ClauseForm::VerbPhrase : ClauseForm::NounPhrase; };

    CognitiveMap m;
    m.set_product("product " + std::to_string(pick(1, 999)));
    std::vector<NodeId> problems;
    const int customers = pick(1, 3);
    for (int c = 0; c < customers; ++c) {
        auto cid = m.add_customer("segment " + std::to_string(c));
        const int n = pick(1, 3);
        for (int p = 0; p < n; ++p) {
            problems.push_back(m.add_problem("aspect " + std::to_string(c) + "." + std::to_string(p),
                                             kind(), form(), cid).first);
        }
    }
    const int features = pick(1, 4);
    for (int f = 0; f < features; ++f) {
        auto target = problems[static_cast<std::size_t>(pick(0, static_cast<int>(problems.size()) - 1))];
        auto links = m.add_feature("feature " + std::to_string(f), form(), target, polarity());
        if (pick(0, 2) == 0) {
            auto other = problems[static_cast<std::size_t>(pick(0, static_cast<int>(problems.size()) - 1))];
            if (!m.has_edge(EdgeKind::Value, links.node, other)) {
                m.link_feature_to_problem(links.node, other, polarity());
            }
        }
    }
    const int rounds = refinements >= 0 ? refinements : pick(0, 6);
    for (int r = 0; r < rounds; ++r) {
        std::vector<EdgeId> refinable;
        for (const auto& [id, e] : m.edges()) {
            if (e.kind != EdgeKind::Feasibility) refinable.push_back(id);
        }
        const auto& e = refinable[static_cast<std::size_t>(pick(0, static_cast<int>(refinable.size()) - 1))];
        const bool value = m.edge(e).kind == EdgeKind::Value;
        m.refine_edge(e, "concept " + std::to_string(r), kind(), form(), polarity(),
                      value ? std::optional(polarity()) : std::nullopt);
    }
    return m;
}

}  // namespace mentor::testing
