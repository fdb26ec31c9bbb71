#include "chasemith/entail.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "chasemith/chase.hpp"
#include "chasemith/match.hpp"

namespace chasemith {

namespace {

bool heads_complete(const std::vector<Tgd>& g, const Schema& s) {
  for (const auto& t : g)
    for (const auto& a : t.conclusion)
      if (!s.has(a.rel) || a.args.size() != s.attrs(a.rel).size()) return false;
  return true;
}

Instance chase_gamma(const Instance& i, const std::vector<Tgd>& g) {
  bool full = std::all_of(g.begin(), g.end(), [](const Tgd& t) { return t.is_full(); });
  if (full && heads_complete(g, i.schema())) return chase_full(i, g);
  if (!classify_tgd_set(g).weakly_acyclic) throw Unsupported("SKB gamma is not weakly acyclic");
  std::vector<DataDependency> deps(g.begin(), g.end());
  auto r = chase_standard(i, deps);
  if (r.status == ChaseStatus::StepLimitExceeded) throw ResourceError("chase of the SKB base exceeded its step limit");
  return r.instance;
}

bool pinned_unchanged(const Instance& j, const Instance& base, const std::set<RelName>& scope) {
  for (const auto& [r, _] : base.schema().relations())
    if (!scope.count(r) && j.rows(r) != base.rows(r)) return false;
  return true;
}

// Fresh constants outside a given set of values.
class FreshPool {
 public:
  explicit FreshPool(std::set<Value> taken) : taken_(std::move(taken)) {}
  Value next() {
    for (;;) {
      Value v = Value::constant("_f" + std::to_string(++n_));
      if (!taken_.count(v)) {
        taken_.insert(v);
        return v;
      }
    }
  }

 private:
  std::set<Value> taken_;
  std::size_t n_ = 0;
};

std::set<Value> taken_values(const ScopedKnowledgeBase& k, const std::vector<Atom>& atoms) {
  std::set<Value> out = k.base.active_domain();
  for (const auto& v : constants_of(atoms)) out.insert(v);
  for (const auto& t : k.gamma) {
    for (const auto& v : constants_of(t.premise)) out.insert(v);
    for (const auto& v : constants_of(t.conclusion)) out.insert(v);
  }
  return out;
}

Instance freeze_nulls(const Instance& i, FreshPool& fresh) {
  std::map<Value, Value> m;
  Instance out(i.schema());
  for (const auto& [r, rows] : i.data())
    for (const auto& row : rows) {
      Tuple t = row;
      for (auto& v : t)
        if (v.is_null()) {
          auto it = m.find(v);
          if (it == m.end()) it = m.emplace(v, fresh.next()).first;
          v = it->second;
        }
      out.insert(r, std::move(t));
    }
  return out;
}

// Atoms padded with fresh variables for the attributes they leave out.
std::vector<Atom> complete_atoms(const std::vector<Atom>& atoms, const Schema& s) {
  std::vector<Atom> out;
  int n = 0;
  for (const auto& a : atoms) {
    std::vector<std::pair<AttrName, Term>> args = a.args;
    for (const auto& attr : s.attrs(a.rel))
      if (!a.find(attr)) args.push_back({attr, var("_pad" + std::to_string(n++))});
    out.push_back(atom(a.rel, args));
  }
  return out;
}

Tuple instantiate(const Atom& a, const Schema& s, const std::map<std::string, Value>& nu) {
  Tuple t;
  for (const auto& attr : s.attrs(a.rel)) {
    const Term* term = a.find(attr);
    t.push_back(term->is_var ? nu.at(term->var) : term->value);
  }
  return t;
}

void partitions(std::size_t n, const std::function<void(const std::vector<std::size_t>&, std::size_t)>& f) {
  std::vector<std::size_t> cls(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t used) {
    if (k == n) {
      f(cls, used);
      return;
    }
    for (std::size_t c = 0; c <= used; ++c) {
      cls[k] = c;
      rec(k + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
}

// Calls f for each assignment of the premise: closed atoms map into the
// base; the remaining variables are all fresh and distinct when `fresh_only`,
// and otherwise range over every partition with each class fresh or a pool
// constant. f returns false to stop.
void premise_assignments(const ScopedKnowledgeBase& k, const Instance& base, const std::vector<Atom>& atoms,
                         bool fresh_only, const std::vector<Value>& pool, FreshPool& fresh, std::size_t var_budget,
                         const std::function<bool(const std::map<std::string, Value>&, const std::vector<Atom>&)>& f) {
  std::vector<Atom> closed, open;
  for (const auto& a : atoms) (k.scope.count(a.rel) ? open : closed).push_back(a);
  Pattern pc(closed);
  std::vector<std::string> open_vars;
  for (const auto& v : vars_of(open))
    if (pc.slot(v) < 0) open_vars.push_back(v);
  if (!fresh_only && open_vars.size() > var_budget)
    throw ResourceError("egd search needs " + std::to_string(open_vars.size()) + " open variables, budget is " +
                        std::to_string(var_budget));
  pc.for_each(base, pc.empty_binding(), [&](const std::vector<Value>& vals) {
    std::map<std::string, Value> nu;
    for (std::size_t s = 0; s < pc.vars().size(); ++s) nu[pc.vars()[s]] = vals[s];
    if (fresh_only) {
      for (const auto& v : open_vars) nu[v] = fresh.next();
      return f(nu, open);
    }
    bool go = true;
    partitions(open_vars.size(), [&](const std::vector<std::size_t>& cls, std::size_t ncls) {
      if (!go) return;
      std::vector<std::size_t> pick(ncls, 0);
      std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (!go) return;
        if (c < ncls) {
          for (std::size_t p = 0; p <= pool.size(); ++p) {
            pick[c] = p;
            rec(c + 1);
          }
          return;
        }
        std::vector<Value> cv(ncls);
        for (std::size_t x = 0; x < ncls; ++x) cv[x] = pick[x] ? pool[pick[x] - 1] : fresh.next();
        for (std::size_t v = 0; v < open_vars.size(); ++v) nu[open_vars[v]] = cv[cls[v]];
        go = f(nu, open);
      };
      rec(0);
    });
    return go;
  });
}

std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + t[k].str();
  return s + ")";
}

// Gamma dependency over its normalized premise: distinct variables at every
// position, plus the equalities the original premise imposed.
struct NormRule {
  Pattern prem;
  std::vector<std::pair<int, int>> eq;
  std::vector<std::pair<int, Value>> eq_const;
  Pattern concl;
  std::vector<int> frontier_slot;
  std::vector<std::string> existentials;
  std::vector<Atom> conclusion;
};

NormRule normalize(const Tgd& g) {
  NormRule r;
  std::vector<Atom> atoms;
  std::map<std::string, std::string> first;
  std::vector<std::pair<std::string, std::string>> eqv;
  std::vector<std::pair<std::string, Value>> eqc;
  int n = 0;
  for (const auto& a : g.premise) {
    std::vector<std::pair<AttrName, Term>> args;
    for (const auto& [attr, t] : a.args) {
      std::string nv = "_n" + std::to_string(n++);
      args.push_back({attr, var(nv)});
      if (!t.is_var) {
        eqc.push_back({nv, t.value});
      } else if (auto it = first.find(t.var); it != first.end()) {
        eqv.push_back({nv, it->second});
      } else {
        first[t.var] = nv;
      }
    }
    atoms.push_back(atom(a.rel, args));
  }
  r.prem = Pattern(atoms);
  for (const auto& [a, b] : eqv) r.eq.push_back({r.prem.slot(a), r.prem.slot(b)});
  for (const auto& [a, c] : eqc) r.eq_const.push_back({r.prem.slot(a), c});
  auto fr = g.frontier();
  r.concl = Pattern(g.conclusion, fr);
  for (const auto& v : fr) r.frontier_slot.push_back(r.prem.slot(first.at(v)));
  r.existentials = g.existentials();
  r.conclusion = g.conclusion;
  return r;
}

std::pair<Value, Value> ordered(const Value& a, const Value& b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

// Applies a null-to-constant substitution; false if an inequality collapses.
bool substitute(CqNeq& d, const std::map<Value, Value>& m) {
  auto f = [&](const Value& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  Instance body(d.body.schema());
  for (const auto& [r, rows] : d.body.data())
    for (const auto& row : rows) {
      Tuple t = row;
      for (auto& v : t) v = f(v);
      body.insert(r, std::move(t));
    }
  d.body = std::move(body);
  for (auto& v : d.head) v = f(v);
  std::set<std::pair<Value, Value>> neq;
  for (const auto& [a, b] : d.neq) {
    Value x = f(a), y = f(b);
    if (x == y) return false;
    if (x.is_null() || y.is_null()) neq.insert(ordered(x, y));
  }
  d.neq = std::move(neq);
  return true;
}

}  // namespace

std::string CqNeq::str() const {
  std::ostringstream out;
  out << tuple_str(head) << " <-";
  bool first = true;
  for (const auto& [r, rows] : body.data())
    for (const auto& row : rows) {
      out << (first ? " " : ", ") << r << tuple_str(row);
      first = false;
    }
  for (const auto& [a, b] : neq) out << ", " << a.str() << " != " << b.str();
  return out.str();
}

EntailResult skb_satisfies_egd(const ScopedKnowledgeBase& k, const Egd& e, std::size_t var_budget) {
  const Schema& s = k.base.schema();
  if (!compatible(e, s)) return {false, "egd premise is not compatible with the schema", std::nullopt};
  Instance base = chase_gamma(k.base, k.gamma);
  if (!pinned_unchanged(base, k.base, k.scope)) return {true, "rep(K) is empty", std::nullopt};
  auto atoms = complete_atoms(e.premise, s);
  FreshPool fresh(taken_values(k, atoms));
  bool safe = k.flags().safe;
  std::vector<Value> pool;
  if (!safe) {
    auto t = taken_values(k, atoms);
    pool.assign(t.begin(), t.end());
  }
  EntailResult out;
  premise_assignments(k, base, atoms, safe, pool, fresh, var_budget,
                      [&](const std::map<std::string, Value>& nu, const std::vector<Atom>& open) {
                        Instance d = base;
                        for (const auto& a : open) d.insert(a.rel, instantiate(a, s, nu));
                        Instance c = chase_gamma(d, k.gamma);
                        if (!pinned_unchanged(c, k.base, k.scope)) return true;
                        if (satisfies_dependency(c, e)) return true;
                        out.holds = false;
                        out.note = "premise realized with " + nu.at(e.lhs).str() + " != " + nu.at(e.rhs).str();
                        out.counterexample = freeze_nulls(c, fresh);
                        return false;
                      });
  return out;
}

EntailResult skb_satisfies_tgd_safe(const ScopedKnowledgeBase& k, const Tgd& t) {
  if (!k.flags().safe) return skb_satisfies_tgd_general(k, t);
  const Schema& s = k.base.schema();
  if (!compatible(t, s)) return {false, "tgd is not compatible with the schema", std::nullopt};
  Instance base = chase_gamma(k.base, k.gamma);
  auto atoms = complete_atoms(t.premise, s);
  FreshPool fresh(taken_values(k, atoms));
  auto fr = t.frontier();
  Pattern concl(t.conclusion, fr);
  EntailResult out;
  premise_assignments(k, base, atoms, true, {}, fresh, 0,
                      [&](const std::map<std::string, Value>& nu, const std::vector<Atom>& open) {
                        Instance d = base;
                        for (const auto& a : open) d.insert(a.rel, instantiate(a, s, nu));
                        Instance c = chase_gamma(d, k.gamma);
                        Binding seed = concl.empty_binding();
                        for (std::size_t x = 0; x < fr.size(); ++x) seed.set(static_cast<int>(x), nu.at(fr[x]));
                        if (concl.exists(c, seed)) return true;
                        out.holds = false;
                        out.note = "frozen premise does not force the conclusion";
                        out.counterexample = freeze_nulls(c, fresh);
                        return false;
                      });
  return out;
}

UcqNeq rewrite_premise(const ScopedKnowledgeBase& k, const Tgd& t, std::size_t budget) {
  const Schema& s = k.base.schema();
  std::uint64_t next = next_null_label(k.base);
  std::map<std::string, Value> nu;
  CqNeq start{{}, k.base, {}};
  for (const auto& a : complete_atoms(t.premise, s)) {
    for (const auto& [attr, term] : a.args)
      if (term.is_var && !nu.count(term.var)) nu[term.var] = Value::make_null(next++);
    start.body.insert(a.rel, instantiate(a, s, nu));
  }
  for (const auto& v : t.frontier()) start.head.push_back(nu.at(v));

  std::vector<NormRule> rules;
  for (const auto& g : k.gamma) rules.push_back(normalize(g));

  UcqNeq out;
  std::set<std::string> emitted;
  std::vector<CqNeq> stack{std::move(start)};
  std::size_t steps = 0;
  while (!stack.empty()) {
    if (++steps > budget) throw ResourceError("UCQ rewriting exceeded " + std::to_string(budget) + " steps");
    CqNeq d = std::move(stack.back());
    stack.pop_back();

    // Relations outside the scope hold exactly their base tuples.
    bool branched = false, dead = false;
    for (const auto& [r, attrs] : s.relations()) {
      if (k.scope.count(r)) continue;
      const auto& allowed = k.base.rows(r);
      for (const auto& row : d.body.rows(r)) {
        if (allowed.count(row)) continue;
        bool ground = std::none_of(row.begin(), row.end(), [](const Value& v) { return v.is_null(); });
        if (ground || allowed.empty()) {
          dead = true;
          break;
        }
        for (const auto& tup : allowed) {
          std::map<Value, Value> m;
          bool ok = true;
          for (std::size_t x = 0; x < row.size() && ok; ++x) {
            if (!row[x].is_null()) {
              ok = row[x] == tup[x];
            } else if (auto it = m.find(row[x]); it != m.end()) {
              ok = it->second == tup[x];
            } else {
              m[row[x]] = tup[x];
            }
          }
          if (!ok) continue;
          CqNeq b = d;
          if (substitute(b, m)) stack.push_back(std::move(b));
        }
        branched = true;
        break;
      }
      if (dead || branched) break;
    }
    if (dead || branched) continue;

    // First active gamma trigger, branching on its conclusion or on a failed equality.
    bool fired = false;
    for (const auto& rule : rules) {
      rule.prem.for_each(d.body, rule.prem.empty_binding(), [&](const std::vector<Value>& vals) {
        std::vector<std::pair<Value, Value>> open_eq;
        for (const auto& [a, b] : rule.eq) open_eq.push_back({vals[a], vals[b]});
        for (const auto& [a, c] : rule.eq_const) open_eq.push_back({vals[a], c});
        std::vector<std::pair<Value, Value>> negatable;
        for (const auto& [x, y] : open_eq) {
          if (x == y) continue;
          if (!x.is_null() && !y.is_null()) return true;
          if (d.neq.count(ordered(x, y))) return true;
          negatable.push_back(ordered(x, y));
        }
        Binding seed = rule.concl.empty_binding();
        for (std::size_t f = 0; f < rule.frontier_slot.size(); ++f)
          seed.set(static_cast<int>(f), vals[rule.frontier_slot[f]]);
        if (rule.concl.exists(d.body, seed)) return true;

        CqNeq a = d;
        std::map<std::string, Value> m;
        for (std::size_t f = 0; f < rule.frontier_slot.size(); ++f)
          m[rule.concl.vars()[f]] = vals[rule.frontier_slot[f]];
        for (const auto& z : rule.existentials) m[z] = Value::make_null(next++);
        for (const auto& c : complete_atoms(rule.conclusion, s)) {
          for (const auto& [attr, term] : c.args)
            if (term.is_var && !m.count(term.var)) m[term.var] = Value::make_null(next++);
          a.body.insert(c.rel, instantiate(c, s, m));
        }
        stack.push_back(std::move(a));
        for (const auto& p : negatable) {
          CqNeq b = d;
          b.neq.insert(p);
          stack.push_back(std::move(b));
        }
        fired = true;
        return false;
      });
      if (fired) break;
    }
    if (fired) continue;
    if (emitted.insert(d.str()).second) out.disjuncts.push_back(std::move(d));
  }
  return out;
}

bool ucq_contained_in_cq(const UcqNeq& u, const ConjunctiveQuery& q) {
  Pattern p(q.atoms, q.free_vars);
  for (const auto& d : u.disjuncts) {
    if (std::any_of(d.neq.begin(), d.neq.end(), [](const auto& e) { return e.first == e.second; })) continue;
    if (d.head.size() != q.free_vars.size()) throw Error("disjunct head and query arity differ");
    Binding seed = p.empty_binding();
    for (std::size_t x = 0; x < d.head.size(); ++x) seed.set(static_cast<int>(x), d.head[x]);
    if (!p.exists(d.body, seed)) return false;
  }
  return true;
}

EntailResult skb_satisfies_tgd_general(const ScopedKnowledgeBase& k, const Tgd& t, std::size_t budget) {
  const Schema& s = k.base.schema();
  if (!compatible(t, s)) return {false, "tgd is not compatible with the schema", std::nullopt};
  if (!classify_tgd_set(k.gamma).weakly_acyclic) throw Unsupported("SKB gamma is not weakly acyclic");
  Instance base = chase_gamma(k.base, k.gamma);
  if (!pinned_unchanged(base, k.base, k.scope)) return {true, "rep(K) is empty", std::nullopt};
  auto u = rewrite_premise(k, t, budget);
  ConjunctiveQuery p;
  p.free_vars = t.frontier();
  p.existential_vars = t.existentials();
  p.atoms = t.conclusion;
  for (const auto& d : u.disjuncts) {
    UcqNeq one{{d}};
    if (ucq_contained_in_cq(one, p)) continue;
    FreshPool fresh(taken_values(k, t.premise));
    return {false, "no containment mapping into " + d.str(), freeze_nulls(d.body, fresh)};
  }
  return {true, std::to_string(u.disjuncts.size()) + " disjuncts contained", std::nullopt};
}

EntailResult skb_satisfies(const ScopedKnowledgeBase& k, const Dependency& d) {
  if (const auto* t = std::get_if<Tgd>(&d)) return skb_satisfies_tgd_safe(k, *t);
  if (const auto* e = std::get_if<Egd>(&d)) return skb_satisfies_egd(k, *e);
  const auto& c = std::get<StructureConstraint>(d);
  bool ok = satisfies_structure(k.base.schema(), c);
  return {ok, ok ? "" : "schema lacks " + c.str(), std::nullopt};
}

}  // namespace chasemith
