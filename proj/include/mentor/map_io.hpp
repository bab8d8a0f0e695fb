#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mentor/map_model.hpp"
#include "mentor/realize.hpp"

namespace mentor {

// Map JSON uses a fixed key order (product, nodes, edges; id first in each
// element) and id-sorted arrays, so equal maps serialize byte-identically.

inline nlohmann::ordered_json map_to_json_value(const CognitiveMap& map)
{
    using nlohmann::ordered_json;
    ordered_json root = ordered_json::object();
    root["product"] = map.product() ? ordered_json(map.product()->value) : ordered_json(nullptr);

    auto nodes = ordered_json::array();
    for (const auto& [id, n] : map.nodes()) {
        ordered_json j;
        j["id"] = n.id.value;
        j["kind"] = to_string(n.kind);
        j["clause_text"] = n.clause_text;
        if (n.clause_kind) j["clause_kind"] = to_string(*n.clause_kind);
        if (n.clause_form) j["clause_form"] = to_string(*n.clause_form);
        nodes.push_back(std::move(j));
    }
    root["nodes"] = std::move(nodes);

    auto edges = ordered_json::array();
    for (const auto& [id, e] : map.edges()) {
        ordered_json j;
        j["id"] = e.id.value;
        j["kind"] = to_string(e.kind);
        j["source"] = e.source.value;
        j["target"] = e.target.value;
        if (e.polarity) j["polarity"] = display_form(*e.polarity);
        edges.push_back(std::move(j));
    }
    root["edges"] = std::move(edges);
    return root;
}

inline std::string to_json(const CognitiveMap& map)
{
    return map_to_json_value(map).dump();
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what)
{
    throw MapError(MapErrc::ParseError, where + ": " + what);
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key,
                                    const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(where, std::string("missing key '") + key + "'");
    return *it;
}

inline std::string string_member(const nlohmann::json& obj, const char* key,
                                 const std::string& where)
{
    const auto& v = member(obj, key, where);
    if (!v.is_string()) parse_fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                                  const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) parse_fail(where + "." + key, "expected a string");
    return it->get<std::string>();
}

inline NodeKind parse_node_kind(const std::string& s, const std::string& where)
{
    if (s == "product") return NodeKind::Product;
    if (s == "customer") return NodeKind::Customer;
    if (s == "problem") return NodeKind::Problem;
    if (s == "feature") return NodeKind::Feature;
    parse_fail(where, "unknown node kind '" + s + "'");
}

inline EdgeKind parse_edge_kind(const std::string& s, const std::string& where)
{
    if (s == "feasibility") return EdgeKind::Feasibility;
    if (s == "value") return EdgeKind::Value;
    if (s == "problem_link") return EdgeKind::ProblemLink;
    parse_fail(where, "unknown edge kind '" + s + "'");
}

}  // namespace detail

inline std::optional<ClauseForm> clause_form_from_string(std::string_view s)
{
    if (s == "vp") return ClauseForm::VerbPhrase;
    if (s == "np") return ClauseForm::NounPhrase;
    return std::nullopt;
}

inline std::optional<ClauseKind> clause_kind_from_string(std::string_view s)
{
    if (s == "desire") return ClauseKind::Desire;
    if (s == "difficulty") return ClauseKind::Difficulty;
    return std::nullopt;
}

/// Checks kinds, endpoints and metadata of every element. Acyclicity and
/// completeness are left to CognitiveMap::validate.
inline CognitiveMap map_from_json_value(const nlohmann::json& root)
{
    using detail::parse_fail;
    if (!root.is_object()) parse_fail("$", "expected an object");

    std::optional<NodeId> product;
    const auto& pj = detail::member(root, "product", "$");
    if (pj.is_string()) {
        product = NodeId{pj.get<std::string>()};
    } else if (!pj.is_null()) {
        parse_fail("$.product", "expected a string or null");
    }

    const auto& nj = detail::member(root, "nodes", "$");
    const auto& ej = detail::member(root, "edges", "$");
    if (!nj.is_array()) parse_fail("$.nodes", "expected an array");
    if (!ej.is_array()) parse_fail("$.edges", "expected an array");

    std::vector<MapNode> nodes;
    std::map<NodeId, NodeKind> kinds;
    for (std::size_t i = 0; i < nj.size(); ++i) {
        const std::string where = "$.nodes[" + std::to_string(i) + "]";
        const auto& j = nj[i];
        if (!j.is_object()) parse_fail(where, "expected an object");
        MapNode n;
        n.id = NodeId{detail::string_member(j, "id", where)};
        n.kind = detail::parse_node_kind(detail::string_member(j, "kind", where), where + ".kind");
        n.clause_text = detail::string_member(j, "clause_text", where);
        if (detail::trim(n.clause_text).empty() || detail::trim(n.clause_text) != n.clause_text) {
            parse_fail(where + ".clause_text", "must be non-empty and trimmed");
        }
        if (auto ck = detail::optional_string(j, "clause_kind", where)) {
            n.clause_kind = clause_kind_from_string(*ck);
            if (!n.clause_kind) parse_fail(where + ".clause_kind", "unknown value '" + *ck + "'");
        }
        if (auto cf = detail::optional_string(j, "clause_form", where)) {
            n.clause_form = clause_form_from_string(*cf);
            if (!n.clause_form) parse_fail(where + ".clause_form", "unknown value '" + *cf + "'");
        }
        const bool wants_kind = n.kind == NodeKind::Problem;
        const bool wants_form = n.kind == NodeKind::Problem || n.kind == NodeKind::Feature;
        if (wants_kind != n.clause_kind.has_value()) {
            parse_fail(where + ".clause_kind", wants_kind ? "required for problems"
                                                          : "only problems carry a clause kind");
        }
        if (wants_form != n.clause_form.has_value()) {
            parse_fail(where + ".clause_form", wants_form ? "required for problems and features"
                                                          : "not allowed on this node kind");
        }
        if (!kinds.emplace(n.id, n.kind).second) parse_fail(where + ".id", "duplicate id");
        nodes.push_back(std::move(n));
    }

    const auto product_count = std::count_if(kinds.begin(), kinds.end(), [](const auto& kv) {
        return kv.second == NodeKind::Product;
    });
    if (product_count > 1) parse_fail("$.nodes", "more than one product");
    if (product) {
        auto it = kinds.find(*product);
        if (it == kinds.end() || it->second != NodeKind::Product) {
            parse_fail("$.product", "does not name a product node");
        }
    } else if (product_count == 1) {
        parse_fail("$.product", "product node present but not referenced");
    }

    std::vector<MapEdge> edges;
    std::set<EdgeId> edge_ids;
    std::set<std::tuple<EdgeKind, NodeId, NodeId>> triples;
    for (std::size_t i = 0; i < ej.size(); ++i) {
        const std::string where = "$.edges[" + std::to_string(i) + "]";
        const auto& j = ej[i];
        if (!j.is_object()) parse_fail(where, "expected an object");
        MapEdge e;
        e.id = EdgeId{detail::string_member(j, "id", where)};
        e.kind = detail::parse_edge_kind(detail::string_member(j, "kind", where), where + ".kind");
        e.source = NodeId{detail::string_member(j, "source", where)};
        e.target = NodeId{detail::string_member(j, "target", where)};
        if (auto p = detail::optional_string(j, "polarity", where)) {
            e.polarity = polarity_from_display(*p);
            if (!e.polarity) parse_fail(where + ".polarity", "unknown polarity '" + *p + "'");
        }
        auto src = kinds.find(e.source);
        auto tgt = kinds.find(e.target);
        if (src == kinds.end()) parse_fail(where + ".source", "unknown node '" + e.source.value + "'");
        if (tgt == kinds.end()) parse_fail(where + ".target", "unknown node '" + e.target.value + "'");
        bool ok = false;
        switch (e.kind) {
        case EdgeKind::Feasibility:
            ok = src->second == NodeKind::Product && tgt->second == NodeKind::Feature;
            break;
        case EdgeKind::Value:
            ok = (src->second == NodeKind::Feature || src->second == NodeKind::Problem) &&
                 tgt->second == NodeKind::Problem;
            break;
        case EdgeKind::ProblemLink:
            ok = src->second == NodeKind::Problem && tgt->second == NodeKind::Customer;
            break;
        }
        if (!ok) parse_fail(where, "endpoint kinds do not fit a " + std::string(to_string(e.kind)) + " edge");
        if ((e.kind == EdgeKind::Value) != e.polarity.has_value()) {
            parse_fail(where + ".polarity", e.kind == EdgeKind::Value ? "required on value edges"
                                                                       : "only value edges carry a polarity");
        }
        if (!edge_ids.insert(e.id).second) parse_fail(where + ".id", "duplicate id");
        if (!triples.emplace(e.kind, e.source, e.target).second) parse_fail(where, "duplicate edge");
        edges.push_back(std::move(e));
    }

    return CognitiveMap::from_parts(std::move(nodes), std::move(edges), std::move(product));
}

inline CognitiveMap from_json(std::string_view text)
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MapError(MapErrc::ParseError, "at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return map_from_json_value(root);
}

namespace detail {

inline std::string dot_quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

/// Graphviz rendering. The product
/// is an ellipse at the bottom, customers are circles at the top, problems
/// are solid boxes and features dashed boxes. Value arrows carry their
/// polarity label.
inline std::string to_dot(const CognitiveMap& map)
{
    std::ostringstream os;
    os << "digraph hypothesis_map {\n"
       << "  rankdir=BT;\n"
       << "  node [fontname=\"Helvetica\"];\n";

    auto emit_node = [&](const MapNode& n, std::string_view indent) {
        os << indent << n.id.value << " [label=" << detail::dot_quote(display_label(n));
        switch (n.kind) {
        case NodeKind::Product: os << ", shape=ellipse"; break;
        case NodeKind::Customer: os << ", shape=circle"; break;
        case NodeKind::Problem: os << ", shape=box, style=solid"; break;
        case NodeKind::Feature: os << ", shape=box, style=dashed"; break;
        }
        os << "];\n";
    };

    auto emit_layer = [&](NodeKind kind, std::string_view rank) {
        auto layer = map.nodes_of(kind);
        if (layer.empty()) return;
        os << "  { rank=" << rank << ";\n";
        for (const auto* n : layer) emit_node(*n, "    ");
        os << "  }\n";
    };

    emit_layer(NodeKind::Customer, "max");
    for (const auto* n : map.nodes_of(NodeKind::Problem)) emit_node(*n, "  ");
    emit_layer(NodeKind::Feature, "same");
    emit_layer(NodeKind::Product, "min");

    for (const auto& [id, e] : map.edges()) {
        os << "  " << e.source.value << " -> " << e.target.value;
        if (e.polarity) os << " [label=" << detail::dot_quote(display_form(*e.polarity)) << "]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace mentor
