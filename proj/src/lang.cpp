#include "chasemith/lang.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "chasemith/match.hpp"

namespace chasemith {

namespace {

bool canonical_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t k = (s[0] == '-') ? 1 : 0;
  if (k == s.size()) return false;
  if (s[k] == '0' && s.size() > k + 1) return false;
  if (s == "-0") return false;
  for (std::size_t j = k; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return false;
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (k) out += " & ";
    out += atoms[k].str();
  }
  return out;
}

}  // namespace

std::string Term::str() const {
  if (is_var) return var;
  if (value.is_null()) return value.str();
  return canonical_integer(value.text) ? value.text : quote(value.text);
}

Term var(const std::string& name) { return Term::variable(name); }
Term cst(const std::string& text) { return Term::constant(val(text)); }

std::vector<AttrName> Atom::attrs() const {
  std::vector<AttrName> out;
  for (const auto& [a, _] : args) out.push_back(a);
  return out;
}

const Term* Atom::find(const AttrName& a) const {
  for (const auto& [b, t] : args)
    if (a == b) return &t;
  return nullptr;
}

std::string Atom::str() const {
  std::string out = rel + "(";
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (k) out += ", ";
    out += args[k].first + ": " + args[k].second.str();
  }
  return out + ")";
}

Atom atom(RelName rel, std::vector<std::pair<AttrName, Term>> args) {
  std::sort(args.begin(), args.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 1; k < args.size(); ++k)
    if (args[k].first == args[k - 1].first)
      throw Error("attribute " + args[k].first + " repeated in atom over " + rel);
  return Atom{std::move(rel), std::move(args)};
}

std::string ConjunctiveQuery::str() const {
  std::string out;
  if (!existential_vars.empty()) {
    out += "exists ";
    for (std::size_t k = 0; k < existential_vars.size(); ++k) out += (k ? ", " : "") + existential_vars[k];
    out += ". ";
  }
  return out + join_atoms(atoms);
}

ConjunctiveQuery cq_all_free(std::vector<Atom> atoms) {
  ConjunctiveQuery q;
  q.free_vars = vars_of(atoms);
  q.atoms = std::move(atoms);
  return q;
}

ConjunctiveQuery cq_boolean(std::vector<Atom> atoms) {
  ConjunctiveQuery q;
  q.existential_vars = vars_of(atoms);
  q.atoms = std::move(atoms);
  return q;
}

std::vector<std::string> Tgd::premise_vars() const { return vars_of(premise); }

std::vector<std::string> Tgd::frontier() const {
  auto pv = premise_vars();
  std::set<std::string> ps(pv.begin(), pv.end());
  std::vector<std::string> out;
  for (const auto& v : vars_of(conclusion))
    if (ps.count(v)) out.push_back(v);
  return out;
}

std::vector<std::string> Tgd::existentials() const {
  auto pv = premise_vars();
  std::set<std::string> ps(pv.begin(), pv.end());
  std::vector<std::string> out;
  for (const auto& v : vars_of(conclusion))
    if (!ps.count(v)) out.push_back(v);
  return out;
}

std::string Tgd::str() const {
  std::string out = join_atoms(premise) + " -> ";
  auto ex = existentials();
  if (!ex.empty()) {
    out += "exists ";
    for (std::size_t k = 0; k < ex.size(); ++k) out += (k ? ", " : "") + ex[k];
    out += ". ";
  }
  return out + join_atoms(conclusion);
}

std::string Egd::str() const { return join_atoms(premise) + " -> " + lhs + " = " + rhs; }

std::string StructureConstraint::str() const {
  if (wildcard) return rel + "[*]";
  std::string out = rel + "[";
  for (std::size_t k = 0; k < attrs.size(); ++k) out += (k ? ", " : "") + attrs[k];
  return out + "]";
}

StructureConstraint star(const RelName& r) { return StructureConstraint{r, true, {}}; }

StructureConstraint structure(const RelName& r, std::vector<AttrName> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  if (attrs.empty()) throw Error("structure constraint on " + r + " needs attributes or *");
  return StructureConstraint{r, false, std::move(attrs)};
}

std::string to_string(const Dependency& d) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Tgd>) return "tgd: " + x.str();
        else if constexpr (std::is_same_v<T, Egd>) return "egd: " + x.str();
        else return x.str();
      },
      d);
}

std::string to_string(const Query& q) {
  if (auto t = std::get_if<TotalQuery>(&q)) return "total " + t->rel;
  return std::get<ConjunctiveQuery>(q).str();
}

std::vector<std::string> vars_of(const std::vector<Atom>& atoms) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& a : atoms)
    for (const auto& [_, t] : a.args)
      if (t.is_var && seen.insert(t.var).second) out.push_back(t.var);
  return out;
}

std::vector<Value> constants_of(const std::vector<Atom>& atoms) {
  std::set<Value> out;
  for (const auto& a : atoms)
    for (const auto& [_, t] : a.args)
      if (!t.is_var) out.insert(t.value);
  return {out.begin(), out.end()};
}

std::vector<RelName> relations_of(const std::vector<Atom>& atoms) {
  std::set<RelName> out;
  for (const auto& a : atoms) out.insert(a.rel);
  return {out.begin(), out.end()};
}

bool compatible(const Atom& a, const Schema& s) {
  if (!s.has(a.rel)) return false;
  for (const auto& [attr, _] : a.args)
    if (!s.has_attr(a.rel, attr)) return false;
  return true;
}

bool compatible(const std::vector<Atom>& atoms, const Schema& s) {
  return std::all_of(atoms.begin(), atoms.end(), [&](const Atom& a) { return compatible(a, s); });
}

bool compatible(const ConjunctiveQuery& q, const Schema& s) { return compatible(q.atoms, s); }
bool compatible(const TotalQuery& q, const Schema& s) { return s.has(q.rel); }
bool compatible(const Query& q, const Schema& s) {
  return std::visit([&](const auto& x) { return compatible(x, s); }, q);
}
bool compatible(const Tgd& t, const Schema& s) { return compatible(t.premise, s) && compatible(t.conclusion, s); }
bool compatible(const Egd& e, const Schema& s) { return compatible(e.premise, s); }
bool compatible(const Dependency& d, const Schema& s) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StructureConstraint>) return true;
        else return compatible(x, s);
      },
      d);
}

std::set<Tuple> eval_cq(const ConjunctiveQuery& q, const Instance& i) {
  if (!compatible(q, i.schema())) throw Error("query is not compatible with the schema: " + q.str());
  Pattern p(q.atoms, q.free_vars);
  std::set<Tuple> out;
  std::size_t k = q.free_vars.size();
  p.for_each(i, p.empty_binding(), [&](const std::vector<Value>& vals) {
    out.insert(Tuple(vals.begin(), vals.begin() + static_cast<long>(k)));
    return !(k == 0);
  });
  return out;
}

std::set<Tuple> eval_total(const TotalQuery& q, const Instance& i) {
  if (!i.schema().has(q.rel)) throw Error("total query over undefined relation " + q.rel);
  return i.rows(q.rel);
}

std::set<Tuple> eval_query(const Query& q, const Instance& i) {
  if (auto t = std::get_if<TotalQuery>(&q)) return eval_total(*t, i);
  return eval_cq(std::get<ConjunctiveQuery>(q), i);
}

bool satisfies_structure(const Schema& s, const StructureConstraint& c) {
  if (!s.has(c.rel)) return false;
  if (c.wildcard) return true;
  for (const auto& a : c.attrs)
    if (!s.has_attr(c.rel, a)) return false;
  return true;
}

bool satisfies_dependency(const Instance& i, const Tgd& t) {
  if (!compatible(t, i.schema())) return false;
  Pattern prem(t.premise);
  auto fr = t.frontier();
  Pattern concl(t.conclusion, fr);
  std::vector<int> from;
  for (const auto& v : fr) from.push_back(prem.slot(v));
  bool ok = true;
  prem.for_each(i, prem.empty_binding(), [&](const std::vector<Value>& vals) {
    Binding seed = concl.empty_binding();
    for (std::size_t k = 0; k < fr.size(); ++k) seed.set(static_cast<int>(k), vals[from[k]]);
    if (!concl.exists(i, seed)) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

bool satisfies_dependency(const Instance& i, const Egd& e) {
  if (!compatible(e, i.schema())) return false;
  Pattern prem(e.premise);
  int l = prem.slot(e.lhs), r = prem.slot(e.rhs);
  if (l < 0 || r < 0) throw Error("egd equates a variable absent from its premise: " + e.str());
  bool ok = true;
  prem.for_each(i, prem.empty_binding(), [&](const std::vector<Value>& vals) {
    if (vals[l] != vals[r]) ok = false;
    return ok;
  });
  return ok;
}

bool satisfies(const Instance& i, const Dependency& d) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StructureConstraint>) return satisfies_structure(i.schema(), x);
        else return satisfies_dependency(i, x);
      },
      d);
}

bool satisfies_all(const Instance& i, const std::vector<Dependency>& ds) {
  return std::all_of(ds.begin(), ds.end(), [&](const Dependency& d) { return satisfies(i, d); });
}

std::map<RelName, std::set<RelName>> relation_graph(const std::vector<Tgd>& g) {
  std::map<RelName, std::set<RelName>> out;
  for (const auto& t : g) {
    for (const auto& a : t.premise) out[a.rel];
    for (const auto& b : t.conclusion) out[b.rel];
    for (const auto& a : t.premise)
      for (const auto& b : t.conclusion) out[a.rel].insert(b.rel);
  }
  return out;
}

std::vector<RelName> topo_order(const std::map<RelName, std::set<RelName>>& g) {
  std::map<RelName, int> indeg;
  for (const auto& [n, succ] : g) {
    indeg[n];
    for (const auto& m : succ) indeg[m]++;
  }
  // Kahn's algorithm
  std::set<RelName> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.insert(n);
  std::vector<RelName> out;
  while (!ready.empty()) {
    RelName n = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(n);
    auto it = g.find(n);
    if (it == g.end()) continue;
    for (const auto& m : it->second)
      if (--indeg[m] == 0) ready.insert(m);
  }
  return out;
}

bool graph_acyclic(const std::map<RelName, std::set<RelName>>& g) {
  std::set<RelName> nodes;
  for (const auto& [n, succ] : g) {
    nodes.insert(n);
    nodes.insert(succ.begin(), succ.end());
  }
  return topo_order(g).size() == nodes.size();
}

namespace {

using Position = std::pair<RelName, AttrName>;

bool weakly_acyclic(const std::vector<Tgd>& g) {
  // Position graph with regular (0) and special (1) edges; weakly acyclic iff
  // no cycle passes through a special edge.
  std::map<Position, std::set<std::pair<Position, int>>> edges;
  for (const auto& t : g) {
    auto ex = t.existentials();
    std::set<std::string> exs(ex.begin(), ex.end());
    std::map<std::string, std::vector<Position>> prem_pos;
    for (const auto& a : t.premise)
      for (const auto& [attr, term] : a.args)
        if (term.is_var) prem_pos[term.var].push_back({a.rel, attr});
    std::vector<Position> ex_pos;
    for (const auto& b : t.conclusion)
      for (const auto& [attr, term] : b.args)
        if (term.is_var && exs.count(term.var)) ex_pos.push_back({b.rel, attr});
    for (const auto& b : t.conclusion)
      for (const auto& [attr, term] : b.args) {
        if (!term.is_var || exs.count(term.var)) continue;
        for (const auto& p : prem_pos[term.var]) {
          edges[p].insert({{b.rel, attr}, 0});
          for (const auto& q : ex_pos) edges[p].insert({q, 1});
        }
      }
  }
  // A special edge p -> q lies on a cycle iff p is reachable from q.
  auto reach = [&](const Position& from, const Position& to) {
    std::set<Position> seen{from};
    std::vector<Position> stack{from};
    while (!stack.empty()) {
      Position cur = stack.back();
      stack.pop_back();
      if (cur == to) return true;
      auto it = edges.find(cur);
      if (it == edges.end()) continue;
      for (const auto& [nx, _] : it->second)
        if (seen.insert(nx).second) stack.push_back(nx);
    }
    return false;
  };
  for (const auto& [p, outs] : edges)
    for (const auto& [q, kind] : outs)
      if (kind == 1 && reach(q, p)) return false;
  return true;
}

}  // namespace

TgdFlags classify_tgd_set(const std::vector<Tgd>& g) {
  TgdFlags f;
  for (const auto& t : g)
    if (!t.is_full()) f.full = false;
  f.acyclic = graph_acyclic(relation_graph(g));
  f.weakly_acyclic = f.full || f.acyclic || weakly_acyclic(g);
  return f;
}

namespace {

std::string shape(const Atom& a, const std::map<std::string, std::string>& names) {
  std::string out = a.rel + "(";
  for (const auto& [attr, t] : a.args) {
    out += attr + ":";
    if (!t.is_var) out += "c" + t.value.str();
    else if (auto it = names.find(t.var); it != names.end()) out += "v" + it->second;
    else out += "?";
    out += ",";
  }
  return out + ")";
}

std::vector<Atom> sorted_unique(std::vector<Atom> atoms, const std::map<std::string, std::string>& names) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [&](const Atom& a, const Atom& b) { return shape(a, names) < shape(b, names); });
  std::vector<Atom> out;
  for (auto& a : atoms)
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
  return out;
}

Atom rename(const Atom& a, const std::map<std::string, std::string>& m) {
  Atom out = a;
  for (auto& [_, t] : out.args)
    if (t.is_var) {
      auto it = m.find(t.var);
      if (it != m.end()) t.var = it->second;
    }
  return out;
}

}  // namespace

Tgd canonical(const Tgd& t) {
  Tgd cur = t;
  std::map<std::string, std::string> names;
  for (int round = 0; round < 4; ++round) {
    cur.premise = sorted_unique(cur.premise, names);
    cur.conclusion = sorted_unique(cur.conclusion, names);
    std::vector<Atom> all = cur.premise;
    all.insert(all.end(), cur.conclusion.begin(), cur.conclusion.end());
    std::map<std::string, std::string> fresh;
    int n = 0;
    for (const auto& v : vars_of(all)) fresh[v] = "v" + std::to_string(n++);
    Tgd next;
    for (const auto& a : cur.premise) next.premise.push_back(rename(a, fresh));
    for (const auto& a : cur.conclusion) next.conclusion.push_back(rename(a, fresh));
    names.clear();
    for (const auto& v : vars_of(next.premise)) names[v] = v;
    for (const auto& v : vars_of(next.conclusion)) names[v] = v;
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::string canonical_key(const Tgd& t) { return canonical(t).str(); }

std::vector<Tgd> canonical_set(const std::vector<Tgd>& g) {
  std::map<std::string, Tgd> byKey;
  for (const auto& t : g) {
    Tgd c = canonical(t);
    byKey.emplace(c.str(), std::move(c));
  }
  std::vector<Tgd> out;
  for (auto& [_, t] : byKey) out.push_back(std::move(t));
  return out;
}

Tgd rename_apart(const Tgd& t, const std::string& prefix) {
  std::map<std::string, std::string> m;
  std::vector<Atom> all = t.premise;
  all.insert(all.end(), t.conclusion.begin(), t.conclusion.end());
  for (const auto& v : vars_of(all)) m[v] = prefix + v;
  Tgd out;
  for (const auto& a : t.premise) out.premise.push_back(rename(a, m));
  for (const auto& a : t.conclusion) out.conclusion.push_back(rename(a, m));
  return out;
}

}  // namespace chasemith
