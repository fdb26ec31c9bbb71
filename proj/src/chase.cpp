#include "chasemith/chase.hpp"

#include <algorithm>
#include <map>

#include "chasemith/match.hpp"

namespace chasemith {

std::string to_string(ChaseStatus s) {
  switch (s) {
    case ChaseStatus::Success: return "success";
    case ChaseStatus::EgdFailure: return "egd-failure";
    case ChaseStatus::StepLimitExceeded: return "step-limit-exceeded";
  }
  return "?";
}

std::uint64_t next_null_label(const Instance& i) {
  std::uint64_t n = 0;
  for (const auto& v : i.nulls()) n = std::max(n, v.id);
  return n + 1;
}

namespace {

// Builds the tuples of a conclusion under an assignment of the premise
// variables, allocating nulls for existentials and unbound attributes.
std::vector<std::pair<RelName, Tuple>> instantiate(const Tgd& t, const Schema& s, const Pattern& prem,
                                                   const std::vector<Value>& vals, std::uint64_t& next_null) {
  std::map<std::string, Value> ex;
  for (const auto& z : t.existentials()) ex[z] = Value::make_null(next_null++);
  std::vector<std::pair<RelName, Tuple>> out;
  for (const auto& a : t.conclusion) {
    Tuple row;
    for (const auto& attr : s.attrs(a.rel)) {
      const Term* term = a.find(attr);
      if (!term) {
        row.push_back(Value::make_null(next_null++));
      } else if (!term->is_var) {
        row.push_back(term->value);
      } else if (auto it = ex.find(term->var); it != ex.end()) {
        row.push_back(it->second);
      } else {
        row.push_back(vals[prem.slot(term->var)]);
      }
    }
    out.emplace_back(a.rel, std::move(row));
  }
  return out;
}

Instance substitute(const Instance& i, const Value& from, const Value& to) {
  Instance out(i.schema());
  for (const auto& [r, rows] : i.data())
    for (const auto& t : rows) {
      Tuple nt = t;
      for (auto& v : nt)
        if (v == from) v = to;
      out.insert(r, std::move(nt));
    }
  return out;
}

struct Prepared {
  Pattern prem;
  Pattern concl;
  std::vector<int> frontier_from;
  int lhs = -1, rhs = -1;
};

Prepared prepare(const DataDependency& d) {
  Prepared p;
  if (auto t = std::get_if<Tgd>(&d)) {
    p.prem = Pattern(t->premise);
    auto fr = t->frontier();
    p.concl = Pattern(t->conclusion, fr);
    for (const auto& v : fr) p.frontier_from.push_back(p.prem.slot(v));
  } else {
    const auto& e = std::get<Egd>(d);
    p.prem = Pattern(e.premise);
    p.lhs = p.prem.slot(e.lhs);
    p.rhs = p.prem.slot(e.rhs);
    if (p.lhs < 0 || p.rhs < 0) throw Error("egd equates a variable absent from its premise: " + e.str());
  }
  return p;
}

bool tgd_active(const Prepared& p, const Instance& i, const std::vector<Value>& vals) {
  Binding seed = p.concl.empty_binding();
  for (std::size_t k = 0; k < p.frontier_from.size(); ++k) seed.set(static_cast<int>(k), vals[p.frontier_from[k]]);
  return !p.concl.exists(i, seed);
}

std::vector<std::vector<Value>> active_assignments(const DataDependency& d, const Prepared& p, const Instance& i) {
  std::vector<std::vector<Value>> out;
  bool is_tgd = std::holds_alternative<Tgd>(d);
  p.prem.for_each(i, p.prem.empty_binding(), [&](const std::vector<Value>& vals) {
    if (is_tgd ? tgd_active(p, i, vals) : vals[p.lhs] != vals[p.rhs]) out.push_back(vals);
    return true;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Returns false on a constant clash.
bool unify(Instance& i, const Value& a, const Value& b) {
  if (a == b) return true;
  if (!a.is_null() && !b.is_null()) return false;
  Value from = a, to = b;
  if (!a.is_null() || (b.is_null() && b.id < a.id)) std::swap(from, to);
  i = substitute(i, from, to);
  return true;
}

}  // namespace

Instance chase_full(const Instance& i, const std::vector<Tgd>& g) {
  for (const auto& t : g) {
    if (!t.is_full()) throw Error("chase_full needs full tgds: " + t.str());
    if (!compatible(t, i.schema())) throw Error("tgd is not compatible with the schema: " + t.str());
    for (const auto& a : t.conclusion)
      if (a.args.size() != i.schema().attrs(a.rel).size())
        throw Error("conclusion atom must bind every attribute of " + a.rel + ": " + t.str());
  }
  std::vector<Pattern> prems;
  for (const auto& t : g) prems.emplace_back(t.premise);
  Instance cur = i;
  std::uint64_t unused = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<std::pair<RelName, Tuple>> add;
      prems[k].for_each(cur, prems[k].empty_binding(), [&](const std::vector<Value>& vals) {
        for (auto& rt : instantiate(g[k], cur.schema(), prems[k], vals, unused)) add.push_back(std::move(rt));
        return true;
      });
      for (auto& [r, t] : add)
        if (cur.insert(r, std::move(t))) changed = true;
    }
  }
  return cur;
}

std::vector<Trigger> fire_order(const std::vector<DataDependency>& deps, const Instance& i) {
  std::vector<Trigger> out;
  for (std::size_t k = 0; k < deps.size(); ++k) {
    Prepared p = prepare(deps[k]);
    for (auto& vals : active_assignments(deps[k], p, i))
      out.push_back(Trigger{k, p.prem.vars(), std::move(vals)});
  }
  return out;
}

ChaseResult chase_standard(const Instance& i, const std::vector<DataDependency>& deps, std::size_t step_limit) {
  for (const auto& d : deps) {
    bool ok = std::visit([&](const auto& x) { return compatible(x, i.schema()); }, d);
    if (!ok) throw Error("dependency is not compatible with the schema");
  }
  std::vector<Prepared> prep;
  for (const auto& d : deps) prep.push_back(prepare(d));
  ChaseResult res;
  res.instance = i;
  std::uint64_t next = next_null_label(i);
  Instance& cur = res.instance;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < deps.size(); ++k) {
      const Prepared& p = prep[k];
      if (const Tgd* t = std::get_if<Tgd>(&deps[k])) {
        for (const auto& vals : active_assignments(deps[k], p, cur)) {
          if (!tgd_active(p, cur, vals)) continue;
          if (res.steps.size() >= step_limit) {
            res.status = ChaseStatus::StepLimitExceeded;
            return res;
          }
          for (auto& [r, row] : instantiate(*t, cur.schema(), p.prem, vals, next)) cur.insert(r, std::move(row));
          res.steps.push_back(Trigger{k, p.prem.vars(), vals});
          changed = true;
        }
      } else {
        while (true) {
          auto viol = active_assignments(deps[k], p, cur);
          if (viol.empty()) break;
          if (res.steps.size() >= step_limit) {
            res.status = ChaseStatus::StepLimitExceeded;
            return res;
          }
          const auto& vals = viol.front();
          res.steps.push_back(Trigger{k, p.prem.vars(), vals});
          if (!unify(cur, vals[p.lhs], vals[p.rhs])) {
            res.status = ChaseStatus::EgdFailure;
            return res;
          }
          changed = true;
        }
      }
    }
  }
  return res;
}

Instance replay(const Instance& i, const std::vector<DataDependency>& deps, const std::vector<Trigger>& steps) {
  Instance cur = i;
  std::uint64_t next = next_null_label(i);
  for (const auto& s : steps) {
    if (s.dep >= deps.size()) throw Error("replay step refers to an unknown dependency");
    Prepared p = prepare(deps[s.dep]);
    if (const Tgd* t = std::get_if<Tgd>(&deps[s.dep])) {
      for (auto& [r, row] : instantiate(*t, cur.schema(), p.prem, s.values, next)) cur.insert(r, std::move(row));
    } else if (!unify(cur, s.values[p.lhs], s.values[p.rhs])) {
      break;
    }
  }
  return cur;
}

}  // namespace chasemith
