#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "mentor/map_model.hpp"

namespace mentor::nlu {

enum class IntentKind {
    ProductName,
    CustomerDescription,
    DesireDescription,
    DifficultyDescription,
    FeatureDescription,
    TargetReference,
    PolarityAnswer,
    Affirm,
    Deny,
    HelpRequest,
    Stop,
};

inline constexpr std::array<IntentKind, 11> all_intents = {
    IntentKind::ProductName,     IntentKind::CustomerDescription,  IntentKind::DesireDescription,
    IntentKind::DifficultyDescription, IntentKind::FeatureDescription, IntentKind::TargetReference,
    IntentKind::PolarityAnswer,  IntentKind::Affirm,               IntentKind::Deny,
    IntentKind::HelpRequest,     IntentKind::Stop,
};

using IntentSet = std::set<IntentKind>;

inline std::string_view to_string(IntentKind k)
{
    switch (k) {
    case IntentKind::ProductName: return "product_name";
    case IntentKind::CustomerDescription: return "customer_description";
    case IntentKind::DesireDescription: return "desire_description";
    case IntentKind::DifficultyDescription: return "difficulty_description";
    case IntentKind::FeatureDescription: return "feature_description";
    case IntentKind::TargetReference: return "target_reference";
    case IntentKind::PolarityAnswer: return "polarity_answer";
    case IntentKind::Affirm: return "affirm";
    case IntentKind::Deny: return "deny";
    case IntentKind::HelpRequest: return "help_request";
    case IntentKind::Stop: return "stop";
    }
    return "";
}

inline std::optional<IntentKind> intent_from_string(std::string_view s)
{
    for (auto k : all_intents) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

/// Intents that fill a map element and therefore carry a clause.
inline bool is_content_intent(IntentKind k)
{
    switch (k) {
    case IntentKind::ProductName:
    case IntentKind::CustomerDescription:
    case IntentKind::DesireDescription:
    case IntentKind::DifficultyDescription:
    case IntentKind::FeatureDescription:
    case IntentKind::TargetReference:
        return true;
    default:
        return false;
    }
}

inline bool is_global_intent(IntentKind k)
{
    return k == IntentKind::HelpRequest || k == IntentKind::Stop;
}

struct Intent {
    IntentKind kind = IntentKind::HelpRequest;
    std::optional<Polarity> polarity;  // set for PolarityAnswer only

    friend bool operator==(const Intent&, const Intent&) = default;
};

}  // namespace mentor::nlu
