#include "chasemith/dynschema.hpp"

#include <set>

#include "chasemith/condtab.hpp"

namespace chasemith {

namespace {

MinimalSchemaResult fail(std::string why) {
  MinimalSchemaResult r;
  r.diagnostic = std::move(why);
  return r;
}

}  // namespace

std::string schema_str(const Schema& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [r, attrs] : s.relations()) {
    out += first ? "" : ", ";
    first = false;
    out += r + "(";
    for (std::size_t k = 0; k < attrs.size(); ++k) out += (k ? "," : "") + attrs[k];
    out += ")";
  }
  return out + "}";
}

MinimalSchemaResult minimal_schema(const Procedure& p, const Schema& s) {
  for (const auto& d : p.pre) {
    if (const auto* sc = std::get_if<StructureConstraint>(&d)) {
      if (!satisfies_structure(s, *sc)) return fail("precondition " + sc->str() + " does not hold");
    } else if (!compatible(d, s)) {
      return fail("precondition " + to_string(d) + " is incompatible with the schema");
    }
  }
  for (const auto& q : p.preserve)
    if (!compatible(q, s)) return fail("preservation query " + to_string(q) + " is incompatible with the schema");
  for (const auto& sc : p.scope) {
    if (!s.has(sc.rel)) return fail("scope constraint " + sc.str() + " names an undefined relation");
    for (const auto& a : sc.attrs)
      if (!s.has_attr(sc.rel, a)) return fail("scope constraint " + sc.str() + " names an undefined attribute");
  }

  std::map<RelName, std::set<AttrName>> out;
  std::map<RelName, std::size_t> labels;
  for (const auto& q : p.preserve)
    if (const auto* t = std::get_if<TotalQuery>(&q)) {
      const auto& attrs = s.attrs(t->rel);
      if (attrs.empty()) return fail("total query on " + t->rel + ", which has no attributes");
      out[t->rel].insert(attrs.begin(), attrs.end());
      labels[t->rel] = attrs.size();
    }
  for (const auto& sc : post_structures(p))
    if (sc.wildcard) out[sc.rel];

  auto add = [&](const RelName& r, const auto& attrs) { out[r].insert(attrs.begin(), attrs.end()); };
  std::set<RelName> scoped;
  for (const auto& sc : p.scope) scoped.insert(sc.rel);
  for (const auto& [r, attrs] : s.relations())
    if (!scoped.count(r)) add(r, attrs);
  for (const auto& sc : p.scope) {
    if (sc.wildcard) continue;
    std::set<AttrName> rest(s.attrs(sc.rel).begin(), s.attrs(sc.rel).end());
    for (const auto& a : sc.attrs) rest.erase(a);
    add(sc.rel, rest);
  }
  auto add_atoms = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) add(a.rel, a.attrs());
  };
  for (const auto& q : p.preserve)
    if (const auto* cq = std::get_if<ConjunctiveQuery>(&q)) add_atoms(cq->atoms);
  for (const auto& d : p.post) {
    if (const auto* t = std::get_if<Tgd>(&d)) {
      add_atoms(t->premise);
      add_atoms(t->conclusion);
    } else if (const auto* e = std::get_if<Egd>(&d)) {
      add_atoms(e->premise);
    } else {
      const auto& sc = std::get<StructureConstraint>(d);
      add(sc.rel, sc.attrs);
    }
  }

  for (const auto& [r, n] : labels)
    if (out[r].size() > n)
      return fail("relation " + r + " needs " + std::to_string(out[r].size()) + " attributes but its total query pins " +
                  std::to_string(n));

  MinimalSchemaResult r;
  r.ok = true;
  r.labels = labels;
  for (const auto& [rel, attrs] : out) r.schema.define(rel, {attrs.begin(), attrs.end()});
  return r;
}

SchemaFold applicability_dyn(const std::vector<Procedure>& ps, const Schema& s) {
  for (const auto& p : ps)
    for (const auto& d : p.pre)
      if (!std::holds_alternative<StructureConstraint>(d))
        throw Unsupported("procedure " + p.name + " has a data precondition " + to_string(d));
  SchemaFold f;
  f.schemas.push_back(s);
  f.trace.push_back("S0 = " + schema_str(s));
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto r = minimal_schema(ps[k], f.schemas.back());
    if (!r.ok) {
      f.ok = false;
      f.trace.push_back("S" + std::to_string(k + 1) + " = failure at " + ps[k].name + ": " + r.diagnostic);
      return f;
    }
    f.schemas.push_back(r.schema);
    f.trace.push_back("S" + std::to_string(k + 1) + " = " + schema_str(r.schema) + " after " + ps[k].name);
  }
  return f;
}

bool dyn_nonempty(const Instance& i, const std::vector<Procedure>& ps) {
  for (const auto& p : ps) {
    auto c = classify(p);
    if (!c.safe_scope && !c.safe_alteration)
      throw Unsupported("procedure " + p.name + " is neither safe-scope nor safe-alteration");
  }
  if (!applicability_dyn(ps, i.schema()).ok) return false;
  return outcomes_condtab(i, ps).status == CondStatus::Ok;
}

}  // namespace chasemith
