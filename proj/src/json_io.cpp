#include "chasemith/json_io.hpp"

#include "chasemith/dsl.hpp"

namespace chasemith {

using nlohmann::json;

json value_json(const Value& v) {
  if (v.is_null()) return json{{"null", v.id}};
  return v.text;
}

Value value_from_json(const json& j) {
  if (j.is_string()) return Value::constant(j.get<std::string>());
  if (j.is_number_integer()) return Value::constant(std::to_string(j.get<long long>()));
  if (j.is_object() && j.contains("null")) return Value::make_null(j.at("null").get<std::uint64_t>());
  throw Error("expected a value: " + j.dump());
}

json instance_json(const Instance& i) {
  json out = json::object();
  for (const auto& [r, attrs] : i.schema().relations()) {
    json rows = json::array();
    for (const auto& t : i.rows(r)) {
      json row = json::array();
      for (const auto& v : t) row.push_back(value_json(v));
      rows.push_back(row);
    }
    out[r] = {{"attributes", attrs}, {"tuples", rows}};
  }
  return out;
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw Error("instance JSON must be an object");
  Schema s;
  for (const auto& [r, body] : j.items()) s.define(r, body.at("attributes").get<std::vector<AttrName>>());
  Instance i(s);
  for (const auto& [r, body] : j.items()) {
    auto attrs = body.at("attributes").get<std::vector<AttrName>>();
    for (const auto& row : body.at("tuples")) {
      if (row.size() != attrs.size()) throw Error("tuple arity mismatch in " + r);
      NamedTuple t;
      for (std::size_t k = 0; k < attrs.size(); ++k) t[attrs[k]] = value_from_json(row[k]);
      i.insert(r, t);
    }
  }
  return i;
}

json skb_json(const ScopedKnowledgeBase& k) {
  json gamma = json::array();
  for (const auto& t : canonical_set(k.gamma)) gamma.push_back(t.str());
  auto f = k.flags();
  return {{"base", instance_json(k.base)},
          {"gamma", gamma},
          {"scope", k.scope},
          {"flags", {{"full", f.full}, {"acyclic", f.acyclic}, {"safe", f.safe}}},
          {"minimal_instance", instance_json(minimal_instance(k))}};
}

ScopedKnowledgeBase skb_from_json(const json& j) {
  const json& body = j.contains("skb") ? j.at("skb") : j;
  ScopedKnowledgeBase k;
  k.base = instance_from_json(body.at("base"));
  for (const auto& t : body.at("gamma")) {
    auto d = parse_dependency("tgd: " + t.get<std::string>());
    k.gamma.push_back(std::get<Tgd>(d));
  }
  for (const auto& r : body.at("scope")) k.scope.insert(r.get<std::string>());
  return k;
}

json table_json(const ConditionalInstance& t) {
  json out = json::object();
  for (const auto& [r, attrs] : t.schema().relations()) {
    json rows = json::array();
    for (const auto& [tup, cond] : t.rows(r)) {
      json row = json::array();
      for (const auto& v : tup) row.push_back(value_json(v));
      rows.push_back({{"tuple", row}, {"condition", cond.str()}});
    }
    out[r] = {{"attributes", attrs}, {"rows", rows}};
  }
  return out;
}

json answer_json(const ReadinessAnswer& a) {
  json out = {{"status", to_string(a.status)},
              {"stats", {{"nodes", a.stats.nodes}, {"dedup_hits", a.stats.dedup_hits}}}};
  if (a.status == ReadinessStatus::Witness) out["witness"] = a.witness;
  if (a.status == ReadinessStatus::NoWithinBound) out["bound"] = a.bound;
  if (!a.reason.empty()) out["reason"] = a.reason;
  return out;
}

json entail_json(const EntailResult& r) {
  json out = {{"holds", r.holds}};
  if (!r.note.empty()) out["note"] = r.note;
  if (r.counterexample) out["counterexample"] = instance_json(*r.counterexample);
  return out;
}

std::string render(json j) {
  j["format"] = kJsonFormat;
  return j.dump(2) + "\n";
}

}  // namespace chasemith
