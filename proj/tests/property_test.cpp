#include <gtest/gtest.h>

#include <functional>

#include "mentor/hypothesis.hpp"
#include "mentor/map_io.hpp"
#include "support/fixtures.hpp"

using namespace mentor;
using mentor::testing::random_valid_map;

namespace {

constexpr int trials = 200;

bool acyclic(const CognitiveMap& m)
{
    enum Mark { White, Grey, Black };
    std::map<NodeId, Mark> mark;
    std::function<bool(const NodeId&)> visit = [&](const NodeId& n) {
        mark[n] = Grey;
        for (const auto* e : m.out_edges(n)) {
            const auto state = mark.contains(e->target) ? mark[e->target] : White;
            if (state == Grey) return false;
            if (state == White && !visit(e->target)) return false;
        }
        mark[n] = Black;
        return true;
    };
    for (const auto& [id, node] : m.nodes()) {
        if (!mark.contains(id) && !visit(id)) return false;
    }
    return true;
}

}  // namespace

TEST(Property, OneHypothesisPerEdge)
{
    std::mt19937 rng(1234);
    for (int i = 0; i < trials; ++i) {
        const auto m = random_valid_map(rng);
        ASSERT_TRUE(m.validate().empty()) << to_json(m);
        const auto hs = hypotheses_for(m);
        ASSERT_EQ(hs.size(), m.edges().size());
        std::set<EdgeId> seen;
        for (const auto& h : hs) {
            EXPECT_TRUE(seen.insert(h.edge).second);
            EXPECT_EQ(h.kind, hypothesis_kind_for(m.edge(h.edge).kind));
            EXPECT_FALSE(h.statement.empty());
            EXPECT_EQ(h.statement.back(), '.');
            EXPECT_TRUE(std::isupper(static_cast<unsigned char>(h.statement.front()))) << h.statement;
        }
    }
}

TEST(Property, RefinementDeltas)
{
    std::mt19937 rng(99);
    for (int i = 0; i < trials; ++i) {
        auto m = random_valid_map(rng, 0);
        std::vector<EdgeId> refinable;
        for (const auto& [id, e] : m.edges()) {
            if (e.kind != EdgeKind::Feasibility) refinable.push_back(id);
        }
        const auto target = refinable[rng() % refinable.size()];
        const auto original = m.edge(target);
        const auto nodes = m.nodes().size();
        const auto edges = m.edges().size();
        const auto hypotheses = hypotheses_for(m).size();

        const bool value = original.kind == EdgeKind::Value;
        const auto r = m.refine_edge(target, "concept", ClauseKind::Desire, ClauseForm::NounPhrase,
                                     Polarity::Increase, value ? std::optional(Polarity::Neutral) : std::nullopt);
        EXPECT_EQ(m.nodes().size(), nodes + 1);
        EXPECT_EQ(m.edges().size(), edges + 1);
        EXPECT_EQ(hypotheses_for(m).size(), hypotheses + 1);
        EXPECT_EQ(m.find_edge(target), nullptr);
        EXPECT_EQ(m.edge(r.lower).source, original.source);
        EXPECT_EQ(m.edge(r.lower).target, r.node);
        EXPECT_EQ(m.edge(r.upper).source, r.node);
        EXPECT_EQ(m.edge(r.upper).target, original.target);
        EXPECT_EQ(m.edge(r.upper).kind, original.kind);
        EXPECT_TRUE(m.validate().empty());
    }
}

TEST(Property, MapsStayAcyclic)
{
    std::mt19937 rng(7);
    for (int i = 0; i < trials; ++i) {
        EXPECT_TRUE(acyclic(random_valid_map(rng)));
    }
}

TEST(Property, JsonRoundTrip)
{
    std::mt19937 rng(2024);
    for (int i = 0; i < trials; ++i) {
        const auto m = random_valid_map(rng);
        const auto text = to_json(m);
        const auto back = from_json(text);
        ASSERT_EQ(back, m) << text;
        EXPECT_EQ(to_json(back), text);
        EXPECT_EQ(to_dot(back), to_dot(m));
    }
}

TEST(Property, RoundTripKeepsCounters)
{
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto m = random_valid_map(rng);
        auto back = from_json(to_json(m));
        const auto c = m.add_customer("fresh segment");
        EXPECT_EQ(back.add_customer("fresh segment"), c);
    }
}
