#include "chasemith/readiness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "chasemith/chase.hpp"
#include "chasemith/dynschema.hpp"
#include "chasemith/entail.hpp"
#include "chasemith/parallel.hpp"

namespace chasemith {

std::string ReadinessGoal::str() const {
  if (const auto* q = std::get_if<ConjunctiveQuery>(&goal)) return q->str();
  if (const auto* t = std::get_if<Tgd>(&goal)) return t->str();
  return std::get<Egd>(goal).str();
}

std::string to_string(ReadinessStatus s) {
  switch (s) {
    case ReadinessStatus::Witness: return "witness";
    case ReadinessStatus::NoWithinBound: return "no-within-bound";
    case ReadinessStatus::Unsupported: return "unsupported";
  }
  return "?";
}

namespace {

template <class State>
struct Space {
  // nullopt marks a node with no outcomes.
  std::function<std::optional<State>(const State&, const Procedure&)> step;
  std::function<std::string(const State&)> key;
  std::function<bool(const State&)> goal;
  bool alterations_once = false;
};

bool is_alteration(const Procedure& p) {
  auto c = classify(p);
  return c.safe_alteration && !c.safe_scope;
}

template <class State>
ReadinessAnswer search(const State& root, const std::vector<Procedure>& catalog, const Space<State>& sp,
                       const ReadinessOptions& opts) {
  struct Node {
    State state;
    std::vector<std::size_t> path;
  };
  struct Child {
    std::optional<State> state;
    std::string key;
    bool ok = false;
    std::exception_ptr err;
  };
  ReadinessAnswer ans;
  std::set<std::string> seen{sp.key(root)};
  ans.stats.nodes = 1;
  auto names = [&](const std::vector<std::size_t>& path) {
    std::vector<std::string> out;
    for (auto k : path) out.push_back(catalog[k].name);
    return out;
  };
  if (sp.goal(root)) {
    ans.status = ReadinessStatus::Witness;
    return ans;
  }
  std::vector<Node> frontier{{root, {}}};
  for (std::size_t depth = 1; depth <= opts.max_len && !frontier.empty(); ++depth) {
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t f = 0; f < frontier.size(); ++f)
      for (std::size_t p = 0; p < catalog.size(); ++p) {
        const auto& path = frontier[f].path;
        if (sp.alterations_once && is_alteration(catalog[p]) &&
            std::find(path.begin(), path.end(), p) != path.end())
          continue;
        work.push_back({f, p});
      }
    std::vector<Child> out(work.size());
    parallel_for(work.size(), opts.threads, [&](std::size_t k) {
      try {
        auto& c = out[k];
        c.state = sp.step(frontier[work[k].first].state, catalog[work[k].second]);
        if (!c.state) return;
        c.key = sp.key(*c.state);
        c.ok = sp.goal(*c.state);
      } catch (...) {
        out[k].err = std::current_exception();
      }
    });
    std::vector<Node> next;
    for (std::size_t k = 0; k < work.size(); ++k) {
      auto& c = out[k];
      if (c.err) std::rethrow_exception(c.err);
      if (!c.state) continue;
      if (!seen.insert(c.key).second) {
        ++ans.stats.dedup_hits;
        continue;
      }
      ++ans.stats.nodes;
      auto path = frontier[work[k].first].path;
      path.push_back(work[k].second);
      if (c.ok) {
        ans.status = ReadinessStatus::Witness;
        ans.witness = names(path);
        return ans;
      }
      next.push_back({std::move(*c.state), std::move(path)});
    }
    frontier = std::move(next);
  }
  ans.status = ReadinessStatus::NoWithinBound;
  ans.bound = opts.max_len;
  return ans;
}

void value_key(std::ostringstream& os, const Value& v, std::map<std::uint64_t, std::size_t>& names) {
  if (!v.is_null()) {
    os << v.str();
    return;
  }
  auto it = names.emplace(v.id, names.size()).first;
  os << "_" << it->second;
}

std::string instance_key(const Instance& i) {
  std::ostringstream os;
  std::map<std::uint64_t, std::size_t> names;
  for (const auto& [r, attrs] : i.schema().relations()) {
    os << r << "(";
    for (const auto& a : attrs) os << a << ",";
    os << "){";
    for (const auto& t : i.rows(r)) {
      for (const auto& v : t) {
        value_key(os, v, names);
        os << ",";
      }
      os << ";";
    }
    os << "}";
  }
  return os.str();
}

std::string skb_key(const ScopedKnowledgeBase& k) {
  std::ostringstream os;
  os << instance_key(k.base) << "|";
  for (const auto& t : canonical_set(k.gamma)) os << canonical_key(t) << ";";
  os << "|";
  for (const auto& r : k.scope) os << r << ",";
  return os.str();
}

// Nulls are named by first occurrence; equal keys mean isomorphic tables.
std::string table_key(const ConditionalInstance& t) {
  std::ostringstream os;
  std::map<std::uint64_t, std::size_t> names;
  for (const auto& [r, attrs] : t.schema().relations()) {
    os << r << "(";
    for (const auto& a : attrs) os << a << ",";
    os << "){";
    for (const auto& [tup, cond] : t.rows(r)) {
      for (const auto& v : tup) {
        value_key(os, v, names);
        os << ",";
      }
      os << "[";
      for (const auto& clause : cond.clauses()) {
        for (const auto& l : clause) {
          value_key(os, l.a, names);
          os << (l.eq ? "=" : "!=");
          value_key(os, l.b, names);
          os << "&";
        }
        os << "|";
      }
      os << "];";
    }
    os << "}";
  }
  return os.str();
}

void require_static_catalog(const std::vector<Procedure>& catalog) {
  for (const auto& p : catalog) require_safe_scope_full(p);
}

void require_dynamic_catalog(const std::vector<Procedure>& catalog) {
  for (const auto& p : catalog) {
    auto c = classify(p);
    if (c.safe_alteration) continue;
    if (!c.safe_scope) throw Unsupported("procedure " + p.name + " is neither safe-scope nor safe-alteration");
    if (!post_full(p)) throw Unsupported("procedure " + p.name + " has non-full tgds");
  }
}

std::vector<Procedure> resolve(const std::vector<Procedure>& catalog, const std::vector<std::string>& names) {
  std::vector<Procedure> out;
  for (const auto& n : names) {
    auto it = std::find_if(catalog.begin(), catalog.end(), [&](const Procedure& p) { return p.name == n; });
    if (it == catalog.end()) throw Error("unknown procedure " + n);
    out.push_back(*it);
  }
  return out;
}

ScopedKnowledgeBase root_skb(const Instance& i) { return {i, {}, {}}; }

template <class Fn>
ReadinessAnswer guarded(Fn fn) {
  try {
    return fn();
  } catch (const Unsupported& e) {
    ReadinessAnswer a;
    a.status = ReadinessStatus::Unsupported;
    a.reason = e.what();
    return a;
  } catch (const ResourceError& e) {
    ReadinessAnswer a;
    a.status = ReadinessStatus::Unsupported;
    a.reason = std::string("resource limit: ") + e.what();
    return a;
  }
}

void confirm(const ReadinessAnswer& a, const Instance& i, const std::vector<Procedure>& catalog,
             const ReadinessGoal& goal, Semantics mode) {
  if (a.status == ReadinessStatus::Witness && !verify_witness(i, catalog, goal, mode, a.witness))
    throw Error("witness failed re-verification: " + goal.str());
}

}  // namespace

ReadinessAnswer constraint_ready(const Instance& i, const std::vector<Procedure>& catalog,
                                 const std::variant<Tgd, Egd>& goal, const ReadinessOptions& opts) {
  ReadinessGoal g;
  if (const auto* t = std::get_if<Tgd>(&goal)) g.goal = *t;
  else g.goal = std::get<Egd>(goal);
  auto a = guarded([&] {
    require_static_catalog(catalog);
    if (const auto* e = std::get_if<Egd>(&goal)) {
      ReadinessAnswer r;
      if (satisfies_dependency(i, *e)) {
        r.status = ReadinessStatus::Witness;
      } else {
        r.status = ReadinessStatus::NoWithinBound;
        r.bound = opts.max_len;
        r.reason = "the input violates the egd and safe-scope procedures keep every violation";
      }
      r.stats.nodes = 1;
      return r;
    }
    const Tgd& t = std::get<Tgd>(goal);
    Space<ScopedKnowledgeBase> sp;
    sp.step = [&](const ScopedKnowledgeBase& k, const Procedure& p) {
      return std::optional<ScopedKnowledgeBase>(apply_procedure(k, p, nullptr, opts.gamma_cap));
    };
    sp.key = skb_key;
    sp.goal = [&](const ScopedKnowledgeBase& k) { return skb_satisfies_tgd_safe(k, t).holds; };
    return search(root_skb(i), catalog, sp, opts);
  });
  confirm(a, i, catalog, g, Semantics::Static);
  return a;
}

ReadinessAnswer query_ready(const Instance& i, const std::vector<Procedure>& catalog, const ConjunctiveQuery& goal,
                            const ReadinessOptions& opts) {
  auto a = guarded([&] {
    require_static_catalog(catalog);
    Space<ScopedKnowledgeBase> sp;
    sp.step = [&](const ScopedKnowledgeBase& k, const Procedure& p) {
      return std::optional<ScopedKnowledgeBase>(apply_procedure(k, p, nullptr, opts.gamma_cap));
    };
    sp.key = [](const ScopedKnowledgeBase& k) { return instance_key(minimal_instance(k)); };
    sp.goal = [&](const ScopedKnowledgeBase& k) { return certain_boolean(k, goal); };
    return search(root_skb(i), catalog, sp, opts);
  });
  confirm(a, i, catalog, ReadinessGoal{goal}, Semantics::Static);
  return a;
}

ReadinessAnswer query_ready_dyn(const Instance& i, const std::vector<Procedure>& catalog, const ConjunctiveQuery& goal,
                                const ReadinessOptions& opts) {
  auto a = guarded([&] {
    require_dynamic_catalog(catalog);
    Space<ConditionalInstance> sp;
    sp.step = [&](const ConditionalInstance& t, const Procedure& p) -> std::optional<ConditionalInstance> {
      auto r = outcomes_condtab(t, {p}, opts.max_tuples);
      if (r.status == CondStatus::EmptyOutcome) return std::nullopt;
      return std::move(r.table);
    };
    sp.key = table_key;
    sp.goal = [&](const ConditionalInstance& t) { return certain_boolean(t, goal); };
    sp.alterations_once = true;
    return search(ConditionalInstance::ground(i), catalog, sp, opts);
  });
  confirm(a, i, catalog, ReadinessGoal{goal}, Semantics::Dynamic);
  return a;
}

ReadinessAnswer ready(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal,
                      Semantics mode, const ReadinessOptions& opts) {
  if (const auto* q = std::get_if<ConjunctiveQuery>(&goal.goal)) {
    if (!q->is_boolean()) {
      ReadinessAnswer a;
      a.status = ReadinessStatus::Unsupported;
      a.reason = "query goals must be boolean";
      return a;
    }
    return mode == Semantics::Static ? query_ready(i, catalog, *q, opts) : query_ready_dyn(i, catalog, *q, opts);
  }
  if (mode == Semantics::Dynamic) {
    ReadinessAnswer a;
    a.status = ReadinessStatus::Unsupported;
    a.reason = "constraint goals are decided under static semantics only";
    return a;
  }
  if (const auto* t = std::get_if<Tgd>(&goal.goal)) return constraint_ready(i, catalog, *t, opts);
  return constraint_ready(i, catalog, std::get<Egd>(goal.goal), opts);
}

bool verify_witness(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal, Semantics mode,
                    const std::vector<std::string>& witness) {
  auto seq = resolve(catalog, witness);
  if (mode == Semantics::Dynamic) {
    const auto* q = std::get_if<ConjunctiveQuery>(&goal.goal);
    if (!q) return false;
    if (!dyn_nonempty(i, seq)) return false;
    auto r = outcomes_condtab(i, seq);
    return r.status == CondStatus::Ok && certain_boolean(r.table, *q);
  }
  if (const auto* q = std::get_if<ConjunctiveQuery>(&goal.goal)) {
    // The minimal outcome is the iterated ground chase.
    Instance j = i;
    for (const auto& p : seq) j = chase_full(j, post_tgds(p));
    return !eval_cq(*q, j).empty();
  }
  auto k = outcomes_skb(i, seq);
  if (const auto* t = std::get_if<Tgd>(&goal.goal)) return skb_satisfies_tgd_general(k, *t).holds;
  return skb_satisfies_egd(k, std::get<Egd>(goal.goal)).holds;
}

double proven_bound_log2(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal,
                         Semantics mode) {
  if (mode == Semantics::Dynamic) throw Unsupported("no closed-form sequence bound under dynamic semantics");
  std::set<Value> dom = i.active_domain();
  std::map<RelName, std::size_t> arity;
  for (const auto& [r, attrs] : i.schema().relations()) arity[r] = attrs.size();
  auto note_atoms = [&](const std::vector<Atom>& atoms) {
    for (const auto& c : constants_of(atoms)) dom.insert(c);
    for (const auto& a : atoms) arity[a.rel] = std::max(arity[a.rel], a.args.size());
  };
  for (const auto& p : catalog)
    for (const auto& t : post_tgds(p)) {
      note_atoms(t.premise);
      note_atoms(t.conclusion);
    }
  std::size_t q = 0;
  if (const auto* c = std::get_if<ConjunctiveQuery>(&goal.goal)) {
    note_atoms(c->atoms);
    q = vars_of(c->atoms).size();
  } else if (const auto* t = std::get_if<Tgd>(&goal.goal)) {
    note_atoms(t->premise);
    note_atoms(t->conclusion);
    q = vars_of(t->premise).size();
  } else {
    note_atoms(std::get<Egd>(goal.goal).premise);
    q = vars_of(std::get<Egd>(goal.goal).premise).size();
  }
  double positions = 0;
  for (const auto& [r, n] : arity) positions += static_cast<double>(n);
  double d = std::max<double>(1.0, static_cast<double>(dom.size()));
  // Distinct minimal instances: at most D^|S|.
  double instances = positions * std::log2(d);
  if (goal.is_query()) return instances;
  // Times |catalog| times the number of bounded gamma sets, 2^((D+|Q|)^|S|).
  double gammas = std::pow(d + static_cast<double>(q), positions);
  return instances + std::log2(std::max<double>(1.0, static_cast<double>(catalog.size()))) + gammas;
}

}  // namespace chasemith
