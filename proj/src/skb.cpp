#include "chasemith/skb.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "chasemith/chase.hpp"

namespace chasemith {

namespace {

using Subst = std::map<std::string, Term>;

Term subst(const Subst& s, const Term& t) {
  if (!t.is_var) return t;
  auto it = s.find(t.var);
  return it == s.end() ? t : it->second;
}

Atom subst(const Subst& s, const Atom& a) {
  Atom out{a.rel, {}};
  for (const auto& [attr, t] : a.args) out.args.push_back({attr, subst(s, t)});
  return out;
}

std::vector<Atom> subst(const Subst& s, const std::vector<Atom>& as) {
  std::vector<Atom> out;
  for (const auto& a : as) out.push_back(subst(s, a));
  return out;
}

bool mentions(const std::vector<Atom>& as, const RelName& r) {
  return std::any_of(as.begin(), as.end(), [&](const Atom& a) { return a.rel == r; });
}

bool head_complete(const Tgd& t, const Schema& s) {
  for (const auto& a : t.conclusion)
    if (!s.has(a.rel) || a.args.size() != s.attrs(a.rel).size()) return false;
  return true;
}

// Extend s so that s(from) == to, treating `to` as rigid.
bool bind_term(Subst& s, const Term& from, const Term& to) {
  if (!from.is_var) return from == to;
  auto it = s.find(from.var);
  if (it != s.end()) return it->second == to;
  s[from.var] = to;
  return true;
}

// a's arguments land inside b's (b may bind more attributes).
bool bind_into(Subst& s, const Atom& a, const Atom& b) {
  if (a.rel != b.rel) return false;
  for (const auto& [attr, t] : a.args) {
    const Term* u = b.find(attr);
    if (!u || !bind_term(s, t, *u)) return false;
  }
  return true;
}

bool premise_into(const std::vector<Atom>& as, std::size_t k, const std::vector<Atom>& bs, Subst& s) {
  if (k == as.size()) return true;
  for (const auto& b : bs) {
    Subst saved = s;
    if (bind_into(s, as[k], b) && premise_into(as, k + 1, bs, s)) return true;
    s = std::move(saved);
  }
  return false;
}

// Set partitions of n items as restricted growth strings.
void partitions(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> cls(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t used) {
    if (k == n) {
      f(cls);
      return;
    }
    for (std::size_t c = 0; c <= used; ++c) {
      cls[k] = c;
      rec(k + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
}

struct Resolvent {
  Tgd tgd;
  bool merged = false;
};

// Resolve the premise atom at index `at` of lambda against the conclusion
// atom `head` of sigma. Both tgds must use disjoint variables.
std::vector<Resolvent> resolve(const Tgd& lambda, std::size_t at, const Tgd& sigma, const Atom& head) {
  std::vector<Resolvent> out;
  const Atom& y = lambda.premise[at];
  std::vector<Term> ws, ys;
  for (const auto& [attr, t] : y.args) {
    const Term* w = head.find(attr);
    if (!w) return out;
    ws.push_back(*w);
    ys.push_back(t);
  }
  std::vector<std::string> wvars;
  for (const auto& w : ws)
    if (w.is_var && std::find(wvars.begin(), wvars.end(), w.var) == wvars.end()) wvars.push_back(w.var);
  std::vector<Value> consts;
  for (const auto& t : ys)
    if (!t.is_var && std::find(consts.begin(), consts.end(), t.value) == consts.end()) consts.push_back(t.value);

  partitions(wvars.size(), [&](const std::vector<std::size_t>& cls) {
    std::size_t nclasses = 0;
    for (auto c : cls) nclasses = std::max(nclasses, c + 1);
    bool merged = nclasses < wvars.size();
    // Each class stays a variable or is sent to a constant of y.
    std::vector<std::size_t> pick(nclasses, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
      if (c < nclasses) {
        for (std::size_t k = 0; k <= consts.size(); ++k) {
          pick[c] = k;
          rec(c + 1);
        }
        return;
      }
      Subst pi;
      for (std::size_t k = 0; k < wvars.size(); ++k) {
        std::size_t c2 = cls[k];
        if (pick[c2] > 0) {
          pi[wvars[k]] = Term::constant(consts[pick[c2] - 1]);
        } else {
          std::size_t rep = static_cast<std::size_t>(
              std::find(cls.begin(), cls.end(), c2) - cls.begin());
          pi[wvars[k]] = var(wvars[rep]);
        }
      }
      Subst h;
      for (std::size_t k = 0; k < ys.size(); ++k)
        if (!bind_term(h, ys[k], subst(pi, ws[k]))) return;
      Tgd r;
      for (std::size_t k = 0; k < lambda.premise.size(); ++k)
        if (k != at) r.premise.push_back(subst(h, lambda.premise[k]));
      for (const auto& a : sigma.premise) r.premise.push_back(subst(pi, a));
      r.conclusion = subst(h, lambda.conclusion);
      out.push_back({canonical(r), merged});
    };
    rec(0);
  });
  return out;
}

std::vector<Tgd> split_heads(const std::vector<Tgd>& g) {
  std::vector<Tgd> out;
  for (const auto& t : g)
    for (const auto& c : t.conclusion) {
      if (std::find(t.premise.begin(), t.premise.end(), c) != t.premise.end()) continue;
      out.push_back(Tgd{t.premise, {c}});
    }
  return out;
}

}  // namespace

SkbFlags ScopedKnowledgeBase::flags() const {
  SkbFlags f;
  for (const auto& t : gamma) {
    if (!t.is_full() || !head_complete(t, base.schema())) f.full = false;
    for (const auto& c : t.conclusion)
      if (!scope.count(c.rel)) f.safe = false;
  }
  f.acyclic = graph_acyclic(relation_graph(gamma));
  return f;
}

std::string describe(const ScopedKnowledgeBase& k) {
  std::ostringstream out;
  out << "base:\n";
  for (const auto& [r, rows] : k.base.data()) {
    out << "  " << r << " = {";
    bool first = true;
    for (const auto& t : rows) {
      out << (first ? "" : ", ") << "(";
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i].str();
      out << ")";
      first = false;
    }
    out << "}\n";
  }
  out << "gamma:\n";
  for (const auto& t : k.gamma) out << "  " << t.str() << "\n";
  out << "scope: {";
  bool first = true;
  for (const auto& r : k.scope) {
    out << (first ? "" : ", ") << r;
    first = false;
  }
  out << "}\n";
  return out.str();
}

bool tgd_subsumes(const Tgd& a, const Tgd& b) {
  if (a.conclusion.size() != 1 || b.conclusion.size() != 1) return false;
  const Atom& ha = a.conclusion.front();
  const Atom& hb = b.conclusion.front();
  if (ha.rel != hb.rel || ha.args.size() != hb.args.size()) return false;
  Subst s;
  if (!bind_into(s, ha, hb)) return false;
  return premise_into(a.premise, 0, b.premise, s);
}

std::vector<Tgd> simplify_tgds(const std::vector<Tgd>& g) {
  std::map<std::string, Tgd> uniq;
  for (const auto& t : split_heads(g)) {
    Tgd c = canonical(t);
    uniq.emplace(canonical_key(c), std::move(c));
  }
  std::vector<Tgd> xs;
  for (auto& [k, t] : uniq) xs.push_back(std::move(t));
  std::stable_sort(xs.begin(), xs.end(),
                   [](const Tgd& a, const Tgd& b) { return a.premise.size() < b.premise.size(); });
  std::vector<bool> dropped(xs.size(), false);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size() && !dropped[i]; ++j) {
      if (i == j || dropped[j]) continue;
      if (tgd_subsumes(xs[j], xs[i]) && (j < i || !tgd_subsumes(xs[i], xs[j]))) dropped[i] = true;
    }
  std::vector<Tgd> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!dropped[i]) out.push_back(xs[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tgd> remove_relations(const std::vector<Tgd>& g, const std::set<RelName>& scope, RemoveStats* stats,
                                  std::size_t cap, const Instance* facts) {
  for (const auto& t : g)
    if (!t.is_full()) throw Error("remove_relations needs full tgds: " + t.str());
  auto graph = relation_graph(g);
  if (!graph_acyclic(graph)) throw Error("remove_relations needs an acyclic tgd set");

  std::vector<RelName> order;
  for (const auto& r : topo_order(graph))
    if (scope.count(r)) order.push_back(r);

  std::vector<Tgd> gamma = split_heads(g);
  for (auto& t : gamma) t = canonical(t);
  std::set<std::string> merged_keys;
  std::size_t tmp = 0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const RelName& r = *it;
    std::vector<Tgd> omega, rest;
    for (auto& t : gamma) (mentions(t.premise, r) ? omega : rest).push_back(std::move(t));
    if (omega.empty()) {
      gamma = std::move(rest);
      continue;
    }
    std::vector<Tgd> producers;
    for (const auto& t : rest)
      if (mentions(t.conclusion, r)) producers.push_back(rename_apart(t, "b" + std::to_string(++tmp) + "_"));

    std::vector<Tgd> done;
    std::set<std::string> seen;
    std::vector<std::pair<Tgd, bool>> work;
    for (auto& t : omega) work.push_back({std::move(t), false});
    while (!work.empty()) {
      auto [lambda, from_merge] = std::move(work.back());
      work.pop_back();
      auto pos = std::find_if(lambda.premise.begin(), lambda.premise.end(), [&](const Atom& a) { return a.rel == r; });
      if (pos == lambda.premise.end()) {
        if (from_merge) merged_keys.insert(canonical_key(lambda));
        done.push_back(std::move(lambda));
        continue;
      }
      std::size_t at = static_cast<std::size_t>(pos - lambda.premise.begin());
      auto push = [&](Tgd t, bool m) {
        if (!seen.insert(canonical_key(t)).second) return;
        if (seen.size() > cap)
          throw ResourceError("remove_relations exceeded " + std::to_string(cap) + " tgds while removing " + r);
        work.push_back({std::move(t), m});
      };
      if (facts && facts->schema().has(r)) {
        const auto& attrs = facts->schema().attrs(r);
        for (const auto& row : facts->rows(r)) {
          Subst h;
          bool ok = true;
          for (const auto& [attr, t] : pos->args) {
            auto ix = static_cast<std::size_t>(std::find(attrs.begin(), attrs.end(), attr) - attrs.begin());
            if (ix == attrs.size() || !bind_term(h, t, Term::constant(row[ix]))) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          Tgd ground;
          for (std::size_t k = 0; k < lambda.premise.size(); ++k)
            if (k != at) ground.premise.push_back(subst(h, lambda.premise[k]));
          if (ground.premise.empty()) continue;
          ground.conclusion = subst(h, lambda.conclusion);
          push(canonical(ground), from_merge);
        }
      }
      Tgd renamed = rename_apart(lambda, "a" + std::to_string(++tmp) + "_");
      for (const auto& sigma : producers)
        for (const auto& head : sigma.conclusion) {
          if (head.rel != r) continue;
          for (auto& res : resolve(renamed, at, sigma, head)) {
            if (stats) {
              ++stats->resolvents;
              if (res.merged) ++stats->merged;
            }
            push(std::move(res.tgd), from_merge || res.merged);
          }
        }
    }
    gamma = std::move(rest);
    for (auto& t : done) gamma.push_back(std::move(t));
    gamma = simplify_tgds(gamma);
    if (gamma.size() > cap) throw ResourceError("remove_relations exceeded " + std::to_string(cap) + " tgds");
  }
  gamma = simplify_tgds(gamma);
  if (stats)
    for (const auto& t : gamma)
      if (merged_keys.count(canonical_key(t))) ++stats->merged_kept;
  return gamma;
}

bool rep_contains(const ScopedKnowledgeBase& k, const Instance& j) {
  if (j.schema() != k.base.schema()) throw Error("instance schema differs from the SKB base schema");
  if (!is_subinstance(k.base, j)) return false;
  for (const auto& [r, attrs] : j.schema().relations())
    if (!k.scope.count(r) && j.rows(r) != k.base.rows(r)) return false;
  for (const auto& t : k.gamma)
    if (!satisfies_dependency(j, t)) return false;
  return true;
}

ScopedKnowledgeBase apply_procedure(const ScopedKnowledgeBase& k, const Procedure& p, RemoveStats* stats,
                                    std::size_t cap) {
  auto f = k.flags();
  if (!f.full) throw Unsupported("SKB gamma is not full");
  if (!f.acyclic) throw Unsupported("SKB gamma is not acyclic");
  if (!f.safe) throw Unsupported("SKB is not safe: scope misses a conclusion relation");
  require_safe_scope_full(p);
  auto sigma = post_tgds(p);
  for (const auto& t : sigma) {
    if (!compatible(t, k.base.schema())) throw Error("procedure " + p.name + " is not compatible with the schema");
    if (!head_complete(t, k.base.schema()))
      throw Unsupported("procedure " + p.name + " leaves conclusion attributes unbound: " + t.str());
  }
  auto scope = scope_relations(p);
  for (const auto& r : scope)
    if (!k.base.schema().has(r)) throw Error("procedure " + p.name + " scopes unknown relation " + r);

  ScopedKnowledgeBase out;
  out.base = chase_full(chase_full(k.base, k.gamma), sigma);
  std::vector<Tgd> g = sigma;
  for (auto& t : remove_relations(k.gamma, scope, stats, cap, &k.base)) g.push_back(std::move(t));
  out.gamma = simplify_tgds(g);
  if (out.gamma.size() > cap) throw ResourceError("SKB gamma exceeded " + std::to_string(cap) + " tgds");
  out.scope = k.scope;
  out.scope.insert(scope.begin(), scope.end());
  return out;
}

ScopedKnowledgeBase outcomes_skb(const Instance& i, const std::vector<Procedure>& ps, RemoveStats* stats,
                                 std::size_t cap) {
  ScopedKnowledgeBase k{i, {}, {}};
  for (const auto& p : ps) k = apply_procedure(k, p, stats, cap);
  return k;
}

Instance minimal_instance(const ScopedKnowledgeBase& k) { return chase_full(k.base, k.gamma); }

std::set<Tuple> certain_answers(const ScopedKnowledgeBase& k, const ConjunctiveQuery& q) {
  return eval_cq(q, minimal_instance(k));
}

bool certain_boolean(const ScopedKnowledgeBase& k, const ConjunctiveQuery& q) {
  if (!q.is_boolean()) throw Error("certain_boolean needs a boolean query");
  return !certain_answers(k, q).empty();
}

}  // namespace chasemith
