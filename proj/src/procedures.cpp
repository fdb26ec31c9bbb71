#include "chasemith/procedures.hpp"

#include <algorithm>

#include "chasemith/dynschema.hpp"

namespace chasemith {

namespace {

template <class T>
std::vector<T> post_of(const Procedure& p) {
  std::vector<T> out;
  for (const auto& d : p.post)
    if (const T* x = std::get_if<T>(&d)) out.push_back(*x);
  return out;
}

// Attributes of each scoped relation that stay outside the scope; a wildcard
// leaves nothing.
std::map<RelName, std::vector<AttrName>> remaining_attrs(const Schema& s, const std::vector<StructureConstraint>& c) {
  std::map<RelName, std::set<AttrName>> named;
  std::set<RelName> wild;
  for (const auto& sc : c) {
    if (!s.has(sc.rel)) throw Error("scope constraint " + sc.str() + " names a relation outside the schema");
    if (sc.wildcard) {
      wild.insert(sc.rel);
      continue;
    }
    for (const auto& a : sc.attrs) {
      if (!s.has_attr(sc.rel, a)) throw Error("scope constraint " + sc.str() + " names an attribute outside the schema");
      named[sc.rel].insert(a);
    }
  }
  std::map<RelName, std::vector<AttrName>> out;
  for (const auto& [r, attrs] : s.relations()) {
    if (wild.count(r)) continue;
    std::vector<AttrName> keep;
    for (const auto& a : attrs)
      if (!named[r].count(a)) keep.push_back(a);
    if (!keep.empty()) out[r] = keep;
  }
  return out;
}

}  // namespace

std::vector<Tgd> post_tgds(const Procedure& p) { return post_of<Tgd>(p); }
std::vector<Egd> post_egds(const Procedure& p) { return post_of<Egd>(p); }
std::vector<StructureConstraint> post_structures(const Procedure& p) { return post_of<StructureConstraint>(p); }

bool post_full(const Procedure& p) {
  auto g = post_tgds(p);
  return std::all_of(g.begin(), g.end(), [](const Tgd& t) { return t.is_full(); });
}

std::set<RelName> scope_relations(const Procedure& p) {
  std::set<RelName> out;
  for (const auto& c : p.scope) out.insert(c.rel);
  return out;
}

ProcedureClass classify(const Procedure& p) {
  ProcedureClass c;
  auto tgds = post_tgds(p);
  bool only_tgds = tgds.size() == p.post.size();
  c.forces_alteration = !post_structures(p).empty();

  if (p.pre.empty() && only_tgds && classify_tgd_set(tgds).acyclic) {
    std::set<RelName> heads;
    for (const auto& t : tgds)
      for (const auto& a : t.conclusion) heads.insert(a.rel);
    std::set<RelName> scoped;
    bool all_star = true;
    for (const auto& sc : p.scope) {
      all_star = all_star && sc.wildcard;
      scoped.insert(sc.rel);
    }
    std::set<RelName> totals;
    bool only_totals = true;
    for (const auto& q : p.preserve) {
      if (const auto* t = std::get_if<TotalQuery>(&q)) totals.insert(t->rel);
      else only_totals = false;
    }
    c.safe_scope = all_star && scoped == heads && only_totals && totals == scoped &&
                   p.preserve.size() == totals.size() && p.scope.size() == scoped.size();
  }
  c.safe_alteration = p.scope.empty() && p.preserve.empty() && p.pre.empty() &&
                      post_structures(p).size() == p.post.size();
  return c;
}

void require_safe_scope(const Procedure& p) {
  if (!classify(p).safe_scope) throw Unsupported("procedure " + p.name + " is not safe-scope");
}

void require_safe_scope_full(const Procedure& p) {
  require_safe_scope(p);
  if (!post_full(p)) throw Unsupported("procedure " + p.name + " has non-full postcondition tgds");
}

std::string to_string(Semantics s) { return s == Semantics::Static ? "static" : "dynamic"; }

std::vector<ConjunctiveQuery> scope_complement_parts(const Schema& s, const std::vector<StructureConstraint>& c) {
  std::vector<ConjunctiveQuery> out;
  int n = 0;
  for (const auto& [r, attrs] : remaining_attrs(s, c)) {
    std::vector<std::pair<AttrName, Term>> args;
    for (const auto& a : attrs) args.push_back({a, var("q" + std::to_string(++n))});
    out.push_back(cq_all_free({atom(r, args)}));
  }
  return out;
}

ConjunctiveQuery scope_complement_query(const Schema& s, const std::vector<StructureConstraint>& c) {
  std::vector<Atom> atoms;
  for (const auto& q : scope_complement_parts(s, c)) atoms.push_back(q.atoms.front());
  return cq_all_free(atoms);
}

bool is_applicable(const Procedure& p, const Instance& i) {
  for (const auto& q : p.preserve)
    if (!compatible(q, i.schema())) return false;
  return satisfies_all(i, p.pre);
}

bool is_possible_outcome(const Procedure& p, const Instance& i, const Instance& j, Semantics mode,
                         ScopeQueryMode qmode) {
  if (!is_applicable(p, i)) return false;
  if (mode == Semantics::Static && j.schema() != i.schema()) return false;
  if (!satisfies_all(j, p.post)) return false;

  std::vector<ConjunctiveQuery> qs;
  try {
    if (qmode == ScopeQueryMode::Conjoined) qs.push_back(scope_complement_query(i.schema(), p.scope));
    else qs = scope_complement_parts(i.schema(), p.scope);
  } catch (const Error&) {
    return false;
  }
  for (const auto& q : qs) {
    if (!compatible(q, j.schema())) return false;
    if (eval_cq(q, i) != eval_cq(q, j)) return false;
  }

  for (const auto& q : p.preserve) {
    if (!compatible(q, j.schema())) return false;
    if (const auto* t = std::get_if<TotalQuery>(&q))
      if (i.schema().has(t->rel) && j.schema().attrs(t->rel).size() != i.schema().attrs(t->rel).size()) return false;
    auto before = eval_query(q, i);
    auto after = eval_query(q, j);
    if (!std::includes(after.begin(), after.end(), before.begin(), before.end())) return false;
  }
  return true;
}

SequenceApplicability check_applicability_sequence(const std::vector<Procedure>& ps, const Schema& s) {
  SequenceApplicability out;
  bool all_empty = std::all_of(ps.begin(), ps.end(), [](const Procedure& p) { return p.pre.empty(); });
  if (all_empty) {
    out.supported = true;
    out.answer = true;
    out.trace.push_back("all preconditions empty");
    return out;
  }
  for (const auto& p : ps)
    for (const auto& d : p.pre)
      if (!std::holds_alternative<StructureConstraint>(d)) {
        out.trace.push_back("procedure " + p.name + " has a data precondition " + to_string(d));
        return out;
      }
  auto fold = applicability_dyn(ps, s);
  out.supported = true;
  out.answer = fold.ok;
  out.trace = fold.trace;
  return out;
}

}  // namespace chasemith
