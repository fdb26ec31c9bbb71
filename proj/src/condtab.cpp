#include "chasemith/condtab.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "chasemith/dynschema.hpp"
#include "chasemith/match.hpp"

namespace chasemith {

Literal eq_lit(const Value& a, const Value& b) { return a <= b ? Literal{a, b, true} : Literal{b, a, true}; }
Literal neq_lit(const Value& a, const Value& b) { return a <= b ? Literal{a, b, false} : Literal{b, a, false}; }

namespace {

// Union-find over the values of one clause.
struct Classes {
  std::map<Value, Value> parent;
  const Value& find(const Value& v) {
    auto it = parent.find(v);
    if (it == parent.end()) return parent.emplace(v, v).first->second;
    if (it->second == v) return it->second;
    Value root = find(it->second);
    parent[v] = root;
    return parent[v];
  }
  // False when two distinct constants meet.
  bool join(const Value& a, const Value& b) {
    Value x = find(a), y = find(b);
    if (x == y) return true;
    if (!x.is_null() && !y.is_null()) return false;
    // Constants stay roots.
    if (x.is_null()) parent[x] = y;
    else parent[y] = x;
    return true;
  }
};

// Drops trivial literals; returns false if the clause is unsatisfiable.
bool simplify(Condition::Clause& c) {
  Condition::Clause out;
  Classes cls;
  for (const auto& l : c) {
    if (l.eq) {
      if (l.a == l.b) continue;
      if (!l.a.is_null() && !l.b.is_null()) return false;
      if (!cls.join(l.a, l.b)) return false;
      out.insert(l);
    } else {
      if (l.a == l.b) return false;
      if (!l.a.is_null() && !l.b.is_null()) continue;
      out.insert(l);
    }
  }
  for (const auto& l : out)
    if (!l.eq && cls.find(l.a) == cls.find(l.b)) return false;
  c = std::move(out);
  return true;
}

const Value& sub(const Value& v, const std::map<std::uint64_t, Value>& nu) {
  if (!v.is_null()) return v;
  auto it = nu.find(v.id);
  return it == nu.end() ? v : it->second;
}

}  // namespace

Condition::Condition(std::set<Clause> clauses) {
  std::vector<Clause> kept;
  for (auto c : clauses)
    if (simplify(c)) kept.push_back(std::move(c));
  std::sort(kept.begin(), kept.end(), [](const Clause& a, const Clause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  // Absorption: a clause implied by a smaller one is dropped.
  for (const auto& c : kept) {
    bool absorbed = false;
    for (const auto& d : clauses_)
      if (std::includes(c.begin(), c.end(), d.begin(), d.end())) {
        absorbed = true;
        break;
      }
    if (!absorbed) clauses_.insert(c);
  }
}

bool Condition::is_true() const { return clauses_.size() == 1 && clauses_.begin()->empty(); }

bool Condition::positive() const {
  for (const auto& c : clauses_)
    for (const auto& l : c)
      if (!l.eq) return false;
  return true;
}

Condition Condition::operator&&(const Condition& o) const {
  std::set<Clause> out;
  for (const auto& a : clauses_)
    for (const auto& b : o.clauses_) {
      Clause c = a;
      c.insert(b.begin(), b.end());
      out.insert(std::move(c));
    }
  return Condition(std::move(out));
}

Condition Condition::operator||(const Condition& o) const {
  std::set<Clause> out = clauses_;
  out.insert(o.clauses_.begin(), o.clauses_.end());
  return Condition(std::move(out));
}

bool Condition::holds(const std::map<std::uint64_t, Value>& nu) const {
  for (const auto& c : clauses_) {
    bool all = true;
    for (const auto& l : c) {
      bool same = sub(l.a, nu) == sub(l.b, nu);
      if (same != l.eq) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::set<std::uint64_t> Condition::nulls() const {
  std::set<std::uint64_t> out;
  for (const auto& c : clauses_)
    for (const auto& l : c)
      for (const Value* v : {&l.a, &l.b})
        if (v->is_null()) out.insert(v->id);
  return out;
}

std::string Condition::str() const {
  if (is_true()) return "true";
  if (is_false()) return "false";
  std::string out;
  bool first_clause = true;
  for (const auto& c : clauses_) {
    out += first_clause ? "" : " | ";
    first_clause = false;
    bool first = true;
    for (const auto& l : c) {
      out += first ? "" : " & ";
      first = false;
      out += l.a.str() + (l.eq ? " = " : " != ") + l.b.str();
    }
  }
  return out;
}

ConditionalInstance::ConditionalInstance(Schema s) : schema_(std::move(s)) {
  for (const auto& [r, _] : schema_.relations()) data_[r];
}

ConditionalInstance ConditionalInstance::ground(const Instance& i) {
  ConditionalInstance t(i.schema());
  for (const auto& [r, rows] : i.data())
    for (const auto& row : rows) t.data_[r][row] = Condition::always();
  return t;
}

const std::map<Tuple, Condition>& ConditionalInstance::rows(const RelName& r) const {
  auto it = data_.find(r);
  if (it == data_.end()) throw Error("unknown relation " + r);
  return it->second;
}

void ConditionalInstance::add(const RelName& r, const Tuple& t, const Condition& c) {
  if (!schema_.has(r)) throw Error("unknown relation " + r);
  if (t.size() != schema_.attrs(r).size()) throw Error("arity mismatch for " + r);
  if (c.is_false()) return;
  auto& rows = data_[r];
  auto it = rows.find(t);
  if (it == rows.end()) rows.emplace(t, c);
  else it->second = it->second || c;
}

void ConditionalInstance::widen(const RelName& r, const std::vector<AttrName>& attrs, std::uint64_t& next_null) {
  std::vector<AttrName> old = schema_.has(r) ? schema_.attrs(r) : std::vector<AttrName>{};
  std::vector<AttrName> merged = old;
  merged.insert(merged.end(), attrs.begin(), attrs.end());
  schema_.define(r, merged);
  const auto& now = schema_.attrs(r);
  auto& rows = data_[r];
  if (now == old) return;
  std::map<Tuple, Condition> rebuilt;
  for (const auto& [t, c] : rows) {
    Tuple nt;
    for (const auto& a : now) {
      auto it = std::find(old.begin(), old.end(), a);
      nt.push_back(it != old.end() ? t[static_cast<std::size_t>(it - old.begin())] : Value::make_null(next_null++));
    }
    rebuilt.emplace(std::move(nt), c);
  }
  rows = std::move(rebuilt);
}

bool ConditionalInstance::positive() const {
  for (const auto& [r, rows] : data_)
    for (const auto& [t, c] : rows)
      if (!c.positive()) return false;
  return true;
}

std::set<std::uint64_t> ConditionalInstance::nulls() const {
  std::set<std::uint64_t> out;
  for (const auto& [r, rows] : data_)
    for (const auto& [t, c] : rows) {
      for (const auto& v : t)
        if (v.is_null()) out.insert(v.id);
      auto cn = c.nulls();
      out.insert(cn.begin(), cn.end());
    }
  return out;
}

std::uint64_t ConditionalInstance::next_null() const {
  auto n = nulls();
  return n.empty() ? 1 : *n.rbegin() + 1;
}

std::size_t ConditionalInstance::tuple_count() const {
  std::size_t n = 0;
  for (const auto& [r, rows] : data_) n += rows.size();
  return n;
}

Instance ConditionalInstance::apply(const std::map<std::uint64_t, Value>& nu) const {
  Instance out(schema_);
  for (const auto& [r, rows] : data_)
    for (const auto& [t, c] : rows) {
      if (!c.holds(nu)) continue;
      Tuple g;
      for (const auto& v : t) g.push_back(sub(v, nu));
      out.insert(r, g);
    }
  return out;
}

Instance ConditionalInstance::naive() const {
  Instance out(schema_);
  for (const auto& [r, rows] : data_)
    for (const auto& [t, c] : rows)
      if (c.is_true()) out.insert(r, t);
  return out;
}

bool cond_rep_contains(const ConditionalInstance& t, const Instance& j) {
  if (!schema_extends(j.schema(), t.schema())) return false;
  std::map<RelName, std::set<Tuple>> target;
  for (const auto& [r, attrs] : t.schema().relations()) target[r] = project(j, r, attrs);

  std::vector<std::uint64_t> order;
  std::map<std::uint64_t, std::size_t> rank;
  auto note = [&](std::uint64_t id) {
    if (!rank.count(id)) {
      rank[id] = order.size();
      order.push_back(id);
    }
  };
  struct Row {
    const RelName* rel;
    const Tuple* tuple;
    const Condition* cond;
  };
  // checks[k]: rows whose nulls are all assigned once null k is.
  std::vector<std::vector<Row>> checks;
  std::vector<Row> ground;
  for (const auto& [r, rows] : t.data())
    for (const auto& [tup, c] : rows) {
      for (const auto& v : tup)
        if (v.is_null()) note(v.id);
      for (auto id : c.nulls()) note(id);
    }
  checks.resize(order.size());
  for (const auto& [r, rows] : t.data())
    for (const auto& [tup, c] : rows) {
      int last = -1;
      for (const auto& v : tup)
        if (v.is_null()) last = std::max(last, static_cast<int>(rank[v.id]));
      for (auto id : c.nulls()) last = std::max(last, static_cast<int>(rank[id]));
      Row row{&r, &tup, &c};
      if (last < 0) ground.push_back(row);
      else checks[static_cast<std::size_t>(last)].push_back(row);
    }

  std::map<std::uint64_t, Value> nu;
  auto ok_row = [&](const Row& row) {
    if (!row.cond->holds(nu)) return true;
    Tuple g;
    for (const auto& v : *row.tuple) g.push_back(sub(v, nu));
    return target[*row.rel].count(g) > 0;
  };
  for (const auto& row : ground)
    if (!ok_row(row)) return false;

  std::set<Value> pool = j.active_domain();
  for (const auto& [r, rows] : t.data())
    for (const auto& [tup, c] : rows) {
      for (const auto& v : tup)
        if (!v.is_null()) pool.insert(v);
      for (const auto& cl : c.clauses())
        for (const auto& l : cl)
          for (const Value* v : {&l.a, &l.b})
            if (!v->is_null()) pool.insert(*v);
    }
  std::string fresh_base = "#fresh";
  for (const auto& v : pool)
    while (!v.is_null() && v.text.rfind(fresh_base, 0) == 0) fresh_base += "#";

  std::function<bool(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) return true;
    std::uint64_t id = order[k];
    auto attempt = [&](const Value& v) {
      nu[id] = v;
      for (const auto& row : checks[k])
        if (!ok_row(row)) return false;
      return rec(k + 1);
    };
    if (attempt(Value::constant(fresh_base + std::to_string(id)))) return true;
    for (const auto& v : pool)
      if (attempt(v)) return true;
    nu.erase(id);
    return false;
  };
  return rec(0);
}

namespace {

// Orders tgds so that producers come before consumers.
std::vector<std::size_t> tgd_order(const std::vector<Tgd>& g) {
  std::size_t n = g.size();
  std::vector<std::set<std::size_t>> succ(n);
  std::vector<int> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool feeds = false;
      for (const auto& h : g[a].conclusion)
        for (const auto& p : g[b].premise) feeds = feeds || h.rel == p.rel;
      if (feeds && succ[a].insert(b).second) ++indeg[b];
    }
  std::set<std::size_t> ready;
  for (std::size_t k = 0; k < n; ++k)
    if (indeg[k] == 0) ready.insert(k);
  std::vector<std::size_t> out;
  while (!ready.empty()) {
    std::size_t k = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(k);
    for (auto s : succ[k])
      if (--indeg[s] == 0) ready.insert(s);
  }
  if (out.size() != n) throw Error("postcondition tgds are cyclic");
  return out;
}

struct CondMatch {
  std::map<std::string, Value> binding;
  Condition cond;
};

void match_atoms(const ConditionalInstance& t, const std::vector<Atom>& atoms, std::size_t k, CondMatch& cur,
                 std::vector<CondMatch>& out) {
  if (k == atoms.size()) {
    out.push_back(cur);
    return;
  }
  const Atom& a = atoms[k];
  const Schema& s = t.schema();
  std::vector<int> pos;
  for (const auto& [attr, term] : a.args) {
    int p = s.position(a.rel, attr);
    if (p < 0) throw Error("atom " + a.str() + " is incompatible with the conditional instance");
    pos.push_back(p);
  }
  for (const auto& [row, rc] : t.rows(a.rel)) {
    CondMatch next{cur.binding, cur.cond};
    Condition::Clause lits;
    bool ok = true;
    for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
      const Term& term = a.args[j].second;
      const Value& v = row[static_cast<std::size_t>(pos[j])];
      const Value* want = nullptr;
      if (!term.is_var) want = &term.value;
      else if (auto it = next.binding.find(term.var); it != next.binding.end()) want = &it->second;
      else next.binding[term.var] = v;
      if (!want || *want == v) continue;
      if (!want->is_null() && !v.is_null()) ok = false;
      else lits.insert(eq_lit(*want, v));
    }
    if (!ok) continue;
    next.cond = next.cond && rc && Condition::of(lits);
    if (next.cond.is_false()) continue;
    match_atoms(t, atoms, k + 1, next, out);
  }
}

}  // namespace

ConditionalInstance chase_conditional(const ConditionalInstance& t, const Procedure& p, std::size_t max_tuples) {
  if (!t.positive()) throw Error("conditional chase requires a positive table");
  if (!classify(p).safe_scope) throw Unsupported("procedure " + p.name + " is not safe-scope");
  auto g = post_tgds(p);
  ConditionalInstance out = t;
  std::uint64_t next = out.next_null();
  for (std::size_t idx : tgd_order(g)) {
    const Tgd& tgd = g[idx];
    for (const auto& a : tgd.conclusion)
      if (!compatible(a, out.schema())) throw Error("atom " + a.str() + " is incompatible with the conditional instance");
    std::vector<CondMatch> matches;
    CondMatch seed{{}, Condition::always()};
    match_atoms(out, tgd.premise, 0, seed, matches);
    auto fr = tgd.frontier();
    Pattern concl(tgd.conclusion, fr);
    for (const auto& m : matches) {
      Instance naive = out.naive();
      Binding b = concl.empty_binding();
      for (std::size_t k = 0; k < fr.size(); ++k) b.set(static_cast<int>(k), m.binding.at(fr[k]));
      if (concl.exists(naive, b)) continue;
      std::map<std::string, Value> asg = m.binding;
      for (const auto& z : tgd.existentials()) asg[z] = Value::make_null(next++);
      for (const auto& a : tgd.conclusion) {
        const auto& attrs = out.schema().attrs(a.rel);
        Tuple row;
        for (const auto& attr : attrs) {
          const Term* term = a.find(attr);
          if (!term) row.push_back(Value::make_null(next++));
          else row.push_back(term->is_var ? asg.at(term->var) : term->value);
        }
        out.add(a.rel, row, m.cond);
      }
      if (out.tuple_count() > max_tuples) throw ResourceError("conditional table exceeded the tuple budget");
    }
  }
  return out;
}

CondResult extend_schema_conditional(const ConditionalInstance& t, const Procedure& p) {
  if (!classify(p).safe_alteration) throw Unsupported("procedure " + p.name + " is not a safe schema-alteration");
  CondResult res;
  auto ms = minimal_schema(p, t.schema());
  if (!ms.ok) {
    res.status = CondStatus::EmptyOutcome;
    res.diagnostic = p.name + ": " + ms.diagnostic;
    return res;
  }
  res.table = t;
  std::uint64_t next = t.next_null();
  for (const auto& [r, attrs] : ms.schema.relations()) res.table.widen(r, attrs, next);
  return res;
}

CondResult outcomes_condtab(const ConditionalInstance& start, const std::vector<Procedure>& ps, std::size_t max_tuples) {
  CondResult res;
  res.table = start;
  for (const auto& p : ps) {
    if (!post_egds(p).empty()) throw Unsupported("procedure " + p.name + " has egd postconditions");
    auto c = classify(p);
    if (c.safe_scope) {
      auto ms = minimal_schema(p, res.table.schema());
      if (!ms.ok) {
        res.status = CondStatus::EmptyOutcome;
        res.diagnostic = p.name + ": " + ms.diagnostic;
        return res;
      }
      std::uint64_t next = res.table.next_null();
      for (const auto& [r, attrs] : ms.schema.relations()) res.table.widen(r, attrs, next);
      res.table = chase_conditional(res.table, p, max_tuples);
    } else if (c.safe_alteration) {
      auto step = extend_schema_conditional(res.table, p);
      if (step.status != CondStatus::Ok) return step;
      res.table = std::move(step.table);
    } else {
      throw Unsupported("procedure " + p.name + " is neither safe-scope nor safe-alteration");
    }
  }
  return res;
}

CondResult outcomes_condtab(const Instance& i, const std::vector<Procedure>& ps, std::size_t max_tuples) {
  return outcomes_condtab(ConditionalInstance::ground(i), ps, max_tuples);
}

bool certain_boolean(const ConditionalInstance& t, const ConjunctiveQuery& q) {
  if (!compatible(q, t.schema())) return false;
  return Pattern(q.atoms).exists(t.naive());
}

}  // namespace chasemith
