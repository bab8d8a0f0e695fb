#include <gtest/gtest.h>

#include <algorithm>

#include "mentor/map_model.hpp"

using namespace mentor;

namespace {

std::vector<std::string> messages(const std::vector<Violation>& vs)
{
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(v.message);
    return out;
}

template <class F>
MapErrc error_of(F&& f)
{
    try {
        f();
    } catch (const MapError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected MapError";
    return MapErrc::ParseError;
}

struct UberMap {
    CognitiveMap map;
    NodeId product, riders, find_cab, high_costs, book, splitting;
    EdgeId cab_link, costs_link, book_feas, book_value, split_feas, split_value;

    UberMap()
    {
        product = map.set_product("Uber");
        riders = map.add_customer("riders");
        std::tie(find_cab, cab_link) =
            map.add_problem("find a cab in some places", ClauseKind::Difficulty, ClauseForm::VerbPhrase, riders);
        std::tie(high_costs, costs_link) =
            map.add_problem("high costs for a ride", ClauseKind::Difficulty, ClauseForm::NounPhrase, riders);
        auto b = map.add_feature("book a ride", ClauseForm::VerbPhrase, find_cab, Polarity::Decrease);
        book = b.node;
        book_feas = b.feasibility;
        book_value = b.value;
        auto s = map.add_feature("fare splitting", ClauseForm::NounPhrase, high_costs, Polarity::Decrease);
        splitting = s.node;
        split_feas = s.feasibility;
        split_value = s.value;
    }
};

}  // namespace

TEST(NaturalCompare, OrdersNumericSuffixesByValue)
{
    EXPECT_TRUE(natural_compare("e2", "e10") < 0);
    EXPECT_TRUE(natural_compare("e10", "e2") > 0);
    EXPECT_TRUE(natural_compare("b1", "c1") < 0);
    EXPECT_TRUE(natural_compare("e7", "e7") == 0);
    EXPECT_LT(EdgeId{"e9"}, EdgeId{"e10"});
}

TEST(Polarity, DisplayFormsRoundTrip)
{
    EXPECT_EQ(display_form(Polarity::Increase), "+");
    EXPECT_EQ(display_form(Polarity::Decrease), "-");
    EXPECT_EQ(display_form(Polarity::Neutral), "/o/");
    for (auto p : {Polarity::Increase, Polarity::Decrease, Polarity::Neutral}) {
        EXPECT_EQ(polarity_from_display(display_form(p)), p);
    }
    EXPECT_FALSE(polarity_from_display("o").has_value());
}

TEST(NewMap, IsEmpty)
{
    CognitiveMap m;
    EXPECT_TRUE(m.nodes().empty());
    EXPECT_TRUE(m.edges().empty());
    EXPECT_FALSE(m.product().has_value());
}

TEST(NewMap, ReportsMissingProductAndCustomers)
{
    EXPECT_EQ(messages(CognitiveMap{}.validate()),
              (std::vector<std::string>{"product missing", "no customers"}));
}

TEST(SetProduct, CreatesProductNode)
{
    CognitiveMap m;
    auto id = m.set_product("Uber");
    EXPECT_EQ(id.value, "p1");
    EXPECT_EQ(m.node(id).kind, NodeKind::Product);
    EXPECT_EQ(m.node(id).clause_text, "Uber");
    EXPECT_EQ(m.product(), id);
}

TEST(SetProduct, TrimsLabel)
{
    CognitiveMap m;
    EXPECT_EQ(m.node(m.set_product("  Uber \t")).clause_text, "Uber");
}

TEST(SetProduct, RejectsEmptyAndSecondProduct)
{
    CognitiveMap m;
    EXPECT_EQ(error_of([&] { m.set_product(""); }), MapErrc::EmptyLabel);
    EXPECT_EQ(error_of([&] { m.set_product("   "); }), MapErrc::EmptyLabel);
    m.set_product("Uber");
    EXPECT_EQ(error_of([&] { m.set_product("X"); }), MapErrc::ProductAlreadySet);
}

TEST(AddCustomer, AddsDistinctSegments)
{
    CognitiveMap m;
    auto riders = m.add_customer("riders");
    auto drivers = m.add_customer("drivers");
    EXPECT_EQ(riders.value, "c1");
    EXPECT_EQ(drivers.value, "c2");
    EXPECT_EQ(m.nodes_of(NodeKind::Customer).size(), 2u);
}

TEST(AddCustomer, RejectsDuplicateLabelIgnoringCase)
{
    CognitiveMap m;
    m.add_customer("riders");
    EXPECT_EQ(error_of([&] { m.add_customer("riders"); }), MapErrc::DuplicateLabel);
    EXPECT_EQ(error_of([&] { m.add_customer("Riders"); }), MapErrc::DuplicateLabel);
}

TEST(AddProblem, LinksProblemToCustomer)
{
    CognitiveMap m;
    auto riders = m.add_customer("riders");
    auto [cab, link] = m.add_problem("find a cab", ClauseKind::Difficulty, ClauseForm::VerbPhrase, riders);
    const auto& n = m.node(cab);
    EXPECT_EQ(n.kind, NodeKind::Problem);
    EXPECT_EQ(n.clause_kind, ClauseKind::Difficulty);
    EXPECT_EQ(n.clause_form, ClauseForm::VerbPhrase);
    const auto& e = m.edge(link);
    EXPECT_EQ(e.kind, EdgeKind::ProblemLink);
    EXPECT_EQ(e.source, cab);
    EXPECT_EQ(e.target, riders);
    EXPECT_FALSE(e.polarity.has_value());

    auto [costs, link2] = m.add_problem("high costs for a ride", ClauseKind::Difficulty, ClauseForm::NounPhrase, riders);
    EXPECT_EQ(m.node(costs).clause_form, ClauseForm::NounPhrase);
    EXPECT_EQ(m.edge(link2).target, riders);
}

TEST(AddProblem, RequiresCustomerNode)
{
    CognitiveMap m;
    auto p = m.set_product("Uber");
    EXPECT_EQ(error_of([&] { m.add_problem("x", ClauseKind::Desire, ClauseForm::VerbPhrase, p); }),
              MapErrc::WrongNodeKind);
    EXPECT_EQ(error_of([&] { m.add_problem("x", ClauseKind::Desire, ClauseForm::VerbPhrase, NodeId{"c9"}); }),
              MapErrc::UnknownNode);
}

TEST(AddFeature, AddsNodeWithFeasibilityAndValueEdges)
{
    CognitiveMap m;
    auto product = m.set_product("Uber");
    auto riders = m.add_customer("riders");
    auto cab = m.add_problem("find a cab", ClauseKind::Difficulty, ClauseForm::VerbPhrase, riders).first;
    const auto nodes = m.nodes().size();
    const auto edges = m.edges().size();
    auto links = m.add_feature("book a ride", ClauseForm::VerbPhrase, cab, Polarity::Decrease);
    EXPECT_EQ(m.nodes().size(), nodes + 1);
    EXPECT_EQ(m.edges().size(), edges + 2);
    EXPECT_EQ(m.edge(links.feasibility).kind, EdgeKind::Feasibility);
    EXPECT_EQ(m.edge(links.feasibility).source, product);
    EXPECT_EQ(m.edge(links.feasibility).target, links.node);
    EXPECT_EQ(m.edge(links.value).kind, EdgeKind::Value);
    EXPECT_EQ(m.edge(links.value).polarity, Polarity::Decrease);
    EXPECT_EQ(m.edge(links.value).target, cab);

    auto export_data = m.add_feature("export data", ClauseForm::VerbPhrase, cab, Polarity::Increase);
    EXPECT_EQ(m.edge(export_data.value).polarity, Polarity::Increase);
}

TEST(AddFeature, NeedsProductAndProblemTarget)
{
    CognitiveMap m;
    auto riders = m.add_customer("riders");
    auto cab = m.add_problem("find a cab", ClauseKind::Difficulty, ClauseForm::VerbPhrase, riders).first;
    EXPECT_EQ(error_of([&] { m.add_feature("book a ride", ClauseForm::VerbPhrase, cab, Polarity::Decrease); }),
              MapErrc::ProductMissing);
    m.set_product("Uber");
    EXPECT_EQ(error_of([&] { m.add_feature("book a ride", ClauseForm::VerbPhrase, riders, Polarity::Decrease); }),
              MapErrc::WrongNodeKind);
    m.add_feature("book a ride", ClauseForm::VerbPhrase, cab, Polarity::Decrease);
    EXPECT_EQ(error_of([&] { m.add_feature("Book a ride", ClauseForm::VerbPhrase, cab, Polarity::Increase); }),
              MapErrc::DuplicateLabel);
}

TEST(LinkFeature, AddsValueEdgeOnce)
{
    UberMap u;
    auto e = u.map.link_feature_to_problem(u.book, u.high_costs, Polarity::Decrease);
    EXPECT_EQ(u.map.edge(e).kind, EdgeKind::Value);
    EXPECT_EQ(u.map.edge(e).source, u.book);
    EXPECT_EQ(u.map.edge(e).target, u.high_costs);
    EXPECT_EQ(error_of([&] { u.map.link_feature_to_problem(u.book, u.high_costs, Polarity::Decrease); }),
              MapErrc::DuplicateEdge);
    EXPECT_EQ(error_of([&] { u.map.link_feature_to_problem(u.book, u.splitting, Polarity::Increase); }),
              MapErrc::WrongNodeKind);
}

TEST(RefineEdge, SplitsValueEdgeThroughNewProblem)
{
    UberMap u;
    const auto nodes = u.map.nodes().size();
    const auto edges = u.map.edges().size();
    auto r = u.map.refine_edge(u.book_value, "waiting time at the curb", ClauseKind::Difficulty,
                               ClauseForm::NounPhrase, Polarity::Decrease, Polarity::Decrease);
    EXPECT_EQ(u.map.nodes().size(), nodes + 1);
    EXPECT_EQ(u.map.edges().size(), edges + 1);
    EXPECT_EQ(u.map.find_edge(u.book_value), nullptr);

    const auto& lower = u.map.edge(r.lower);
    EXPECT_EQ(lower.kind, EdgeKind::Value);
    EXPECT_EQ(lower.source, u.book);
    EXPECT_EQ(lower.target, r.node);
    EXPECT_EQ(lower.polarity, Polarity::Decrease);
    const auto& upper = u.map.edge(r.upper);
    EXPECT_EQ(upper.kind, EdgeKind::Value);
    EXPECT_EQ(upper.source, r.node);
    EXPECT_EQ(upper.target, u.find_cab);
    EXPECT_EQ(upper.polarity, Polarity::Decrease);
    EXPECT_TRUE(u.map.validate().empty());
}

TEST(RefineEdge, SplitsProblemLinkKeepingLinkOnTop)
{
    UberMap u;
    auto r = u.map.refine_edge(u.cab_link, "reach work on time", ClauseKind::Desire, ClauseForm::VerbPhrase,
                               Polarity::Increase, std::nullopt);
    const auto& lower = u.map.edge(r.lower);
    EXPECT_EQ(lower.kind, EdgeKind::Value);
    EXPECT_EQ(lower.source, u.find_cab);
    EXPECT_EQ(lower.target, r.node);
    EXPECT_EQ(lower.polarity, Polarity::Increase);
    const auto& upper = u.map.edge(r.upper);
    EXPECT_EQ(upper.kind, EdgeKind::ProblemLink);
    EXPECT_EQ(upper.source, r.node);
    EXPECT_EQ(upper.target, u.riders);
    EXPECT_FALSE(upper.polarity.has_value());
    EXPECT_TRUE(u.map.validate().empty());
}

TEST(RefineEdge, RejectsFeasibilityUnknownAndPolarityMismatch)
{
    UberMap u;
    auto refine = [&](const EdgeId& e, std::optional<Polarity> upper) {
        return [&u, e, upper] {
            u.map.refine_edge(e, "x", ClauseKind::Desire, ClauseForm::VerbPhrase, Polarity::Increase, upper);
        };
    };
    EXPECT_EQ(error_of(refine(u.book_feas, Polarity::Increase)), MapErrc::NotRefinable);
    EXPECT_EQ(error_of(refine(EdgeId{"e99"}, Polarity::Increase)), MapErrc::UnknownEdge);
    EXPECT_EQ(error_of(refine(u.book_value, std::nullopt)), MapErrc::PolarityMismatch);
    EXPECT_EQ(error_of(refine(u.cab_link, Polarity::Increase)), MapErrc::PolarityMismatch);
    EXPECT_EQ(u.map.edges().size(), 6u);
}

TEST(Validate, CompleteUberMapIsValid)
{
    UberMap u;
    EXPECT_TRUE(u.map.validate().empty());
}

TEST(Validate, FeatureWithoutValueEdge)
{
    auto m = CognitiveMap::from_parts(
        {{NodeId{"p1"}, NodeKind::Product, "Uber", std::nullopt, std::nullopt},
         {NodeId{"c1"}, NodeKind::Customer, "riders", std::nullopt, std::nullopt},
         {NodeId{"f1"}, NodeKind::Feature, "book a ride", std::nullopt, ClauseForm::VerbPhrase}},
        {{EdgeId{"e1"}, EdgeKind::Feasibility, NodeId{"p1"}, NodeId{"f1"}, std::nullopt}}, NodeId{"p1"});
    const auto msgs = messages(m.validate());
    EXPECT_NE(std::find(msgs.begin(), msgs.end(), "feature without value edge"), msgs.end());
}

TEST(Validate, DetectsCycleAndOrphans)
{
    auto m = CognitiveMap::from_parts(
        {{NodeId{"p1"}, NodeKind::Product, "P", std::nullopt, std::nullopt},
         {NodeId{"c1"}, NodeKind::Customer, "c", std::nullopt, std::nullopt},
         {NodeId{"b1"}, NodeKind::Problem, "x", ClauseKind::Desire, ClauseForm::VerbPhrase},
         {NodeId{"b2"}, NodeKind::Problem, "y", ClauseKind::Desire, ClauseForm::VerbPhrase}},
        {{EdgeId{"e1"}, EdgeKind::Value, NodeId{"b1"}, NodeId{"b2"}, Polarity::Increase},
         {EdgeId{"e2"}, EdgeKind::Value, NodeId{"b2"}, NodeId{"b1"}, Polarity::Increase}},
        NodeId{"p1"});
    const auto msgs = messages(m.validate());
    EXPECT_NE(std::find(msgs.begin(), msgs.end(), "cycle detected"), msgs.end());
    EXPECT_NE(std::find(msgs.begin(), msgs.end(), "problem without path to customer"), msgs.end());
    EXPECT_NE(std::find(msgs.begin(), msgs.end(), "orphan node"), msgs.end());
}

TEST(FromParts, CountersResumeAfterHighestId)
{
    UberMap u;
    auto copy = CognitiveMap::from_parts(
        [&] { std::vector<MapNode> v; for (auto& [id, n] : u.map.nodes()) v.push_back(n); return v; }(),
        [&] { std::vector<MapEdge> v; for (auto& [id, e] : u.map.edges()) v.push_back(e); return v; }(),
        u.map.product());
    EXPECT_EQ(copy, u.map);
    EXPECT_EQ(copy.add_customer("drivers").value, "c2");
    auto r = copy.refine_edge(u.split_value, "z", ClauseKind::Desire, ClauseForm::VerbPhrase,
                              Polarity::Increase, Polarity::Increase);
    EXPECT_EQ(r.node.value, "b3");
    EXPECT_EQ(r.lower.value, "e7");
    EXPECT_EQ(r.upper.value, "e8");
}

TEST(FindByLabel, IsCaseInsensitiveAndKindSpecific)
{
    UberMap u;
    EXPECT_EQ(u.map.find_by_label(NodeKind::Feature, "Book a Ride"), u.book);
    EXPECT_FALSE(u.map.find_by_label(NodeKind::Customer, "book a ride").has_value());
}
