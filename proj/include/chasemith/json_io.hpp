#pragma once

#include <nlohmann/json.hpp>

#include "chasemith/condtab.hpp"
#include "chasemith/entail.hpp"
#include "chasemith/readiness.hpp"
#include "chasemith/skb.hpp"

namespace chasemith {

inline constexpr const char* kJsonFormat = "chasemith/1";

nlohmann::json value_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

// {"R": {"attributes": [...], "tuples": [[...], ...]}, ...}, tuples sorted.
nlohmann::json instance_json(const Instance& i);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json skb_json(const ScopedKnowledgeBase& k);
// Reads base, gamma (tgd text) and scope; other keys are ignored.
ScopedKnowledgeBase skb_from_json(const nlohmann::json& j);
nlohmann::json table_json(const ConditionalInstance& t);
nlohmann::json answer_json(const ReadinessAnswer& a);
nlohmann::json entail_json(const EntailResult& r);

// Adds the format tag and renders with two-space indentation.
std::string render(nlohmann::json j);

}  // namespace chasemith
