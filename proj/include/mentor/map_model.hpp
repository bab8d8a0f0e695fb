#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mentor {

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Compares identifiers of the form "<letters><digits>" so that "e2" < "e10".
inline std::strong_ordering natural_compare(std::string_view a, std::string_view b)
{
    auto split = [](std::string_view s) {
        std::size_t i = 0;
        while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        return std::pair{s.substr(0, i), s.substr(i)};
    };
    auto [pa, na] = split(a);
    auto [pb, nb] = split(b);
    if (auto c = pa.compare(pb); c != 0) {
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    // Numeric suffixes never carry leading zeros, so length decides first.
    if (na.size() != nb.size()) {
        return na.size() <=> nb.size();
    }
    auto c = na.compare(nb);
    return c == 0 ? std::strong_ordering::equal
                  : (c < 0 ? std::strong_ordering::less : std::strong_ordering::greater);
}

template <class Tag>
struct Id {
    std::string value;

    friend bool operator==(const Id&, const Id&) = default;
    friend std::strong_ordering operator<=>(const Id& a, const Id& b)
    {
        return natural_compare(a.value, b.value);
    }
};

struct NodeTag {};
struct EdgeTag {};
using NodeId = Id<NodeTag>;
using EdgeId = Id<EdgeTag>;

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class Polarity { Increase, Decrease, Neutral };
enum class ClauseKind { Desire, Difficulty };
enum class ClauseForm { VerbPhrase, NounPhrase };
enum class NodeKind { Product, Customer, Problem, Feature };
enum class EdgeKind { Feasibility, Value, ProblemLink };

/// "+", "-" or "/o/".
inline std::string_view display_form(Polarity p)
{
    switch (p) {
    case Polarity::Increase: return "+";
    case Polarity::Decrease: return "-";
    case Polarity::Neutral: return "/o/";
    }
    return "/o/";
}

inline std::optional<Polarity> polarity_from_display(std::string_view s)
{
    if (s == "+") return Polarity::Increase;
    if (s == "-") return Polarity::Decrease;
    if (s == "/o/") return Polarity::Neutral;
    return std::nullopt;
}

inline std::string_view to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::Product: return "product";
    case NodeKind::Customer: return "customer";
    case NodeKind::Problem: return "problem";
    case NodeKind::Feature: return "feature";
    }
    return "";
}

inline std::string_view to_string(EdgeKind k)
{
    switch (k) {
    case EdgeKind::Feasibility: return "feasibility";
    case EdgeKind::Value: return "value";
    case EdgeKind::ProblemLink: return "problem_link";
    }
    return "";
}

inline std::string_view to_string(ClauseKind k)
{
    return k == ClauseKind::Desire ? "desire" : "difficulty";
}

inline std::string_view to_string(ClauseForm f)
{
    return f == ClauseForm::VerbPhrase ? "vp" : "np";
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class MapErrc {
    EmptyLabel,
    DuplicateLabel,
    ProductAlreadySet,
    ProductMissing,
    UnknownNode,
    UnknownEdge,
    WrongNodeKind,
    DuplicateEdge,
    NotRefinable,
    PolarityMismatch,
    ParseError,
};

inline std::string_view to_string(MapErrc e)
{
    switch (e) {
    case MapErrc::EmptyLabel: return "EmptyLabel";
    case MapErrc::DuplicateLabel: return "DuplicateLabel";
    case MapErrc::ProductAlreadySet: return "ProductAlreadySet";
    case MapErrc::ProductMissing: return "ProductMissing";
    case MapErrc::UnknownNode: return "UnknownNode";
    case MapErrc::UnknownEdge: return "UnknownEdge";
    case MapErrc::WrongNodeKind: return "WrongNodeKind";
    case MapErrc::DuplicateEdge: return "DuplicateEdge";
    case MapErrc::NotRefinable: return "NotRefinable";
    case MapErrc::PolarityMismatch: return "PolarityMismatch";
    case MapErrc::ParseError: return "ParseError";
    }
    return "";
}

class MapError : public std::runtime_error {
public:
    MapError(MapErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {}

    MapErrc code() const noexcept { return code_; }

private:
    MapErrc code_;
};

// ---------------------------------------------------------------------------
// Nodes and edges
// ---------------------------------------------------------------------------

struct MapNode {
    NodeId id;
    NodeKind kind = NodeKind::Problem;
    std::string clause_text;
    std::optional<ClauseKind> clause_kind;  // Problem only
    std::optional<ClauseForm> clause_form;  // Problem and Feature only

    friend bool operator==(const MapNode&, const MapNode&) = default;
};

struct MapEdge {
    EdgeId id;
    EdgeKind kind = EdgeKind::Value;
    NodeId source;
    NodeId target;
    std::optional<Polarity> polarity;  // Value only

    friend bool operator==(const MapEdge&, const MapEdge&) = default;
};

struct Violation {
    enum class Rule {
        ProductMissing,
        NoCustomers,
        FeatureWithoutFeasibility,
        FeatureWithoutValue,
        ProblemWithoutCustomerPath,
        Cycle,
        OrphanNode,
    };

    Rule rule;
    std::string message;
    std::optional<std::string> subject;  // offending node id, if any

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string_view to_string(Violation::Rule r)
{
    switch (r) {
    case Violation::Rule::ProductMissing: return "product missing";
    case Violation::Rule::NoCustomers: return "no customers";
    case Violation::Rule::FeatureWithoutFeasibility: return "feature without feasibility edge";
    case Violation::Rule::FeatureWithoutValue: return "feature without value edge";
    case Violation::Rule::ProblemWithoutCustomerPath: return "problem without path to customer";
    case Violation::Rule::Cycle: return "cycle detected";
    case Violation::Rule::OrphanNode: return "orphan node";
    }
    return "";
}

namespace detail {

inline std::string trim(std::string_view s)
{
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return std::string(s);
}

inline std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline char node_prefix(NodeKind k)
{
    switch (k) {
    case NodeKind::Product: return 'p';
    case NodeKind::Customer: return 'c';
    case NodeKind::Problem: return 'b';
    case NodeKind::Feature: return 'f';
    }
    return 'x';
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CognitiveMap
// ---------------------------------------------------------------------------

/// Layered hypothesis map: customers on top, problem layers in the middle,
/// features above the single product at the bottom. Edges always point
/// upward in layer order (product -> feature -> problem ... -> customer).
///
/// Not synchronized; the owning session serializes all mutation.
class CognitiveMap {
public:
    struct Refinement {
        NodeId node;
        EdgeId lower;
        EdgeId upper;
    };

    struct FeatureLinks {
        NodeId node;
        EdgeId feasibility;
        EdgeId value;
    };

    CognitiveMap() = default;

    const std::map<NodeId, MapNode>& nodes() const noexcept { return nodes_; }
    const std::map<EdgeId, MapEdge>& edges() const noexcept { return edges_; }
    const std::optional<NodeId>& product() const noexcept { return product_; }

    const MapNode* find_node(const NodeId& id) const
    {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second;
    }

    const MapEdge* find_edge(const EdgeId& id) const
    {
        auto it = edges_.find(id);
        return it == edges_.end() ? nullptr : &it->second;
    }

    const MapNode& node(const NodeId& id) const { return require_node(id); }

    const MapEdge& edge(const EdgeId& id) const
    {
        auto it = edges_.find(id);
        if (it == edges_.end()) {
            throw MapError(MapErrc::UnknownEdge, "no edge '" + id.value + "'");
        }
        return it->second;
    }

    std::vector<const MapNode*> nodes_of(NodeKind kind) const
    {
        std::vector<const MapNode*> out;
        for (const auto& [id, n] : nodes_) {
            if (n.kind == kind) out.push_back(&n);
        }
        return out;
    }

    /// Case-insensitive exact match within one node kind.
    std::optional<NodeId> find_by_label(NodeKind kind, std::string_view clause_text) const
    {
        const auto key = detail::lower(detail::trim(clause_text));
        for (const auto& [id, n] : nodes_) {
            if (n.kind == kind && detail::lower(n.clause_text) == key) return id;
        }
        return std::nullopt;
    }

    NodeId set_product(std::string_view clause_text)
    {
        auto text = require_label(clause_text);
        if (product_) {
            throw MapError(MapErrc::ProductAlreadySet, "product is already '" +
                                                           nodes_.at(*product_).clause_text + "'");
        }
        auto id = insert_node(NodeKind::Product, std::move(text), std::nullopt, std::nullopt);
        product_ = id;
        return id;
    }

    NodeId add_customer(std::string_view clause_text)
    {
        auto text = require_label(clause_text);
        if (find_by_label(NodeKind::Customer, text)) {
            throw MapError(MapErrc::DuplicateLabel, "customer '" + text + "' already exists");
        }
        return insert_node(NodeKind::Customer, std::move(text), std::nullopt, std::nullopt);
    }

    std::pair<NodeId, EdgeId> add_problem(std::string_view clause_text, ClauseKind kind,
                                          ClauseForm form, const NodeId& customer)
    {
        auto text = require_label(clause_text);
        require_kind(customer, NodeKind::Customer);
        auto id = insert_node(NodeKind::Problem, std::move(text), kind, form);
        auto edge = insert_edge(EdgeKind::ProblemLink, id, customer, std::nullopt);
        return {id, edge};
    }

    /// Adds a feature box, its feasibility arrow from the product and its
    /// first value arrow. Re-using an existing feature label is rejected;
    /// use link_feature_to_problem for additional aspects.
    FeatureLinks add_feature(std::string_view clause_text, ClauseForm form,
                             const NodeId& target_problem, Polarity polarity)
    {
        auto text = require_label(clause_text);
        if (!product_) {
            throw MapError(MapErrc::ProductMissing, "a feature needs a product");
        }
        require_kind(target_problem, NodeKind::Problem);
        if (find_by_label(NodeKind::Feature, text)) {
            throw MapError(MapErrc::DuplicateLabel, "feature '" + text + "' already exists");
        }
        auto id = insert_node(NodeKind::Feature, std::move(text), std::nullopt, form);
        auto feas = insert_edge(EdgeKind::Feasibility, *product_, id, std::nullopt);
        auto value = insert_edge(EdgeKind::Value, id, target_problem, polarity);
        return {id, feas, value};
    }

    EdgeId link_feature_to_problem(const NodeId& feature, const NodeId& problem, Polarity polarity)
    {
        require_kind(feature, NodeKind::Feature);
        require_kind(problem, NodeKind::Problem);
        if (has_edge(EdgeKind::Value, feature, problem)) {
            throw MapError(MapErrc::DuplicateEdge,
                           "value edge " + feature.value + "->" + problem.value + " exists");
        }
        return insert_edge(EdgeKind::Value, feature, problem, polarity);
    }

    /// Replaces `edge` with source -> N -> target where N is a new problem box.
    /// The upper edge keeps the original kind; a value edge needs an upper
    /// polarity, a problem link must not get one.
    Refinement refine_edge(const EdgeId& edge, std::string_view clause_text, ClauseKind kind,
                           ClauseForm form, Polarity lower_polarity,
                           std::optional<Polarity> upper_polarity)
    {
        auto it = edges_.find(edge);
        if (it == edges_.end()) {
            throw MapError(MapErrc::UnknownEdge, "no edge '" + edge.value + "'");
        }
        const MapEdge original = it->second;
        if (original.kind == EdgeKind::Feasibility) {
            throw MapError(MapErrc::NotRefinable, "feasibility edges cannot be refined");
        }
        const bool needs_upper = original.kind == EdgeKind::Value;
        if (needs_upper != upper_polarity.has_value()) {
            throw MapError(MapErrc::PolarityMismatch,
                           needs_upper ? "refining a value edge needs an upper polarity"
                                       : "a problem link carries no polarity");
        }
        auto text = require_label(clause_text);

        auto node = insert_node(NodeKind::Problem, std::move(text), kind, form);
        edges_.erase(it);
        auto lower = insert_edge(EdgeKind::Value, original.source, node, lower_polarity);
        auto upper = insert_edge(original.kind, node, original.target, upper_polarity);
        return {node, lower, upper};
    }

    bool has_edge(EdgeKind kind, const NodeId& source, const NodeId& target) const
    {
        return std::any_of(edges_.begin(), edges_.end(), [&](const auto& kv) {
            const auto& e = kv.second;
            return e.kind == kind && e.source == source && e.target == target;
        });
    }

    std::vector<const MapEdge*> out_edges(const NodeId& id) const
    {
        std::vector<const MapEdge*> out;
        for (const auto& [eid, e] : edges_) {
            if (e.source == id) out.push_back(&e);
        }
        return out;
    }

    std::vector<const MapEdge*> in_edges(const NodeId& id) const
    {
        std::vector<const MapEdge*> out;
        for (const auto& [eid, e] : edges_) {
            if (e.target == id) out.push_back(&e);
        }
        return out;
    }

    /// Reports every structural violation; never throws.
    std::vector<Violation> validate() const;

    /// Rebuilds a map from already-checked parts (used by deserialization).
    /// Counters resume after the highest id seen for each prefix.
    static CognitiveMap from_parts(std::vector<MapNode> nodes, std::vector<MapEdge> edges,
                                   std::optional<NodeId> product);

    friend bool operator==(const CognitiveMap& a, const CognitiveMap& b)
    {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.product_ == b.product_;
    }

private:
    std::map<NodeId, MapNode> nodes_;
    std::map<EdgeId, MapEdge> edges_;
    std::optional<NodeId> product_;
    std::map<char, std::uint64_t> node_counters_;
    std::uint64_t edge_counter_ = 0;

    static std::string require_label(std::string_view clause_text)
    {
        auto text = detail::trim(clause_text);
        if (text.empty()) throw MapError(MapErrc::EmptyLabel, "label must not be empty");
        return text;
    }

    const MapNode& require_node(const NodeId& id) const
    {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) {
            throw MapError(MapErrc::UnknownNode, "no node '" + id.value + "'");
        }
        return it->second;
    }

    void require_kind(const NodeId& id, NodeKind kind) const
    {
        const auto& n = require_node(id);
        if (n.kind != kind) {
            throw MapError(MapErrc::WrongNodeKind, "node '" + id.value + "' is a " +
                                                       std::string(to_string(n.kind)) + ", not a " +
                                                       std::string(to_string(kind)));
        }
    }

    NodeId insert_node(NodeKind kind, std::string text, std::optional<ClauseKind> ck,
                       std::optional<ClauseForm> cf)
    {
        const char prefix = detail::node_prefix(kind);
        NodeId id{std::string(1, prefix) + std::to_string(++node_counters_[prefix])};
        nodes_.emplace(id, MapNode{id, kind, std::move(text), ck, cf});
        return id;
    }

    EdgeId insert_edge(EdgeKind kind, const NodeId& source, const NodeId& target,
                       std::optional<Polarity> polarity)
    {
        EdgeId id{"e" + std::to_string(++edge_counter_)};
        edges_.emplace(id, MapEdge{id, kind, source, target, polarity});
        return id;
    }
};

inline std::vector<Violation> CognitiveMap::validate() const
{
    using Rule = Violation::Rule;
    std::vector<Violation> out;
    auto report = [&](Rule r, std::optional<std::string> subject = std::nullopt) {
        out.push_back(Violation{r, std::string(to_string(r)), std::move(subject)});
    };

    if (!product_) report(Rule::ProductMissing);
    if (nodes_of(NodeKind::Customer).empty()) report(Rule::NoCustomers);

    for (const auto* f : nodes_of(NodeKind::Feature)) {
        bool feasible = false;
        bool valued = false;
        for (const auto& [eid, e] : edges_) {
            if (e.kind == EdgeKind::Feasibility && e.target == f->id) feasible = true;
            if (e.kind == EdgeKind::Value && e.source == f->id) valued = true;
        }
        if (!feasible) report(Rule::FeatureWithoutFeasibility, f->id.value);
        if (!valued) report(Rule::FeatureWithoutValue, f->id.value);
    }

    // Reachability of a customer, following edges upward from each problem.
    for (const auto* p : nodes_of(NodeKind::Problem)) {
        std::set<NodeId> seen{p->id};
        std::vector<NodeId> stack{p->id};
        bool reached = false;
        while (!stack.empty() && !reached) {
            auto cur = stack.back();
            stack.pop_back();
            for (const auto* e : out_edges(cur)) {
                const auto* t = find_node(e->target);
                if (t == nullptr) continue;
                if (t->kind == NodeKind::Customer) {
                    reached = true;
                    break;
                }
                if (seen.insert(t->id).second) stack.push_back(t->id);
            }
        }
        if (!reached) report(Rule::ProblemWithoutCustomerPath, p->id.value);
    }

    // Cycle detection: iterative three-colour DFS.
    {
        enum class Colour { White, Grey, Black };
        std::map<NodeId, Colour> colour;
        for (const auto& [id, n] : nodes_) colour[id] = Colour::White;
        bool cyclic = false;
        for (const auto& [root, n] : nodes_) {
            if (cyclic || colour[root] != Colour::White) continue;
            std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
            colour[root] = Colour::Grey;
            while (!stack.empty() && !cyclic) {
                auto& [cur, next] = stack.back();
                auto outs = out_edges(cur);
                if (next < outs.size()) {
                    const auto& tgt = outs[next++]->target;
                    auto c = colour.find(tgt);
                    if (c == colour.end()) continue;
                    if (c->second == Colour::Grey) {
                        cyclic = true;
                    } else if (c->second == Colour::White) {
                        c->second = Colour::Grey;
                        stack.emplace_back(tgt, 0);
                    }
                } else {
                    colour[cur] = Colour::Black;
                    stack.pop_back();
                }
            }
        }
        if (cyclic) report(Rule::Cycle);
    }

    for (const auto& [id, n] : nodes_) {
        bool touched = std::any_of(edges_.begin(), edges_.end(), [&](const auto& kv) {
            return kv.second.source == id || kv.second.target == id;
        });
        if (!touched) report(Rule::OrphanNode, id.value);
    }
    return out;
}

inline CognitiveMap CognitiveMap::from_parts(std::vector<MapNode> nodes, std::vector<MapEdge> edges,
                                             std::optional<NodeId> product)
{
    auto suffix = [](const std::string& id) -> std::uint64_t {
        auto pos = id.find_first_of("0123456789");
        return pos == std::string::npos ? 0 : std::stoull(id.substr(pos));
    };
    CognitiveMap m;
    for (auto& n : nodes) {
        auto& counter = m.node_counters_[n.id.value.empty() ? 'x' : n.id.value.front()];
        counter = std::max(counter, suffix(n.id.value));
        m.nodes_.emplace(n.id, std::move(n));
    }
    for (auto& e : edges) {
        m.edge_counter_ = std::max(m.edge_counter_, suffix(e.id.value));
        m.edges_.emplace(e.id, std::move(e));
    }
    m.product_ = std::move(product);
    return m;
}

}  // namespace mentor
