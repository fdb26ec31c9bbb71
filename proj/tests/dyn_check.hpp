#pragma once

// Randomized check of conditional-table outcomes against the oracle's
// bounded dynamic outcomes: containment, and agreement of minimal instances.

#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chasemith/condtab.hpp"
#include "chasemith/dynschema.hpp"
#include "chasemith/oracle.hpp"
#include "gen.hpp"

namespace dyncheck {

using namespace chasemith;

struct Case {
  Instance input;
  std::vector<Procedure> procs;
};

inline std::string describe(const Case& c) {
  std::ostringstream out;
  for (const auto& [r, rows] : c.input.data()) {
    out << r << "={";
    for (const auto& t : rows) {
      out << "(";
      for (std::size_t k = 0; k < t.size(); ++k) out << (k ? "," : "") << t[k].str();
      out << ")";
    }
    out << "} ";
  }
  for (const auto& p : c.procs) {
    out << "| " << p.name << ":";
    for (const auto& d : p.post) out << " " << to_string(d);
  }
  return out.str();
}

inline Case random_case(std::mt19937& rng) {
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A"}}};
  std::vector<RelName> rels{"R", "S", "T"};
  Case c{gen::instance(rng, s, gen::values(2), 3), {}};
  std::size_t n = 1 + gen::pick(rng, 3);
  std::set<RelName> widened;
  for (std::size_t k = 0; k < n; ++k) {
    Procedure p;
    p.name = "P" + std::to_string(k + 1);
    if (gen::coin(rng, 0.4)) {
      RelName r = rels[gen::pick(rng, 3)];
      p.post = {structure(r, {"B"})};
      widened.insert(r);
    } else {
      RelName target = rels[gen::pick(rng, 3)];
      std::vector<RelName> others;
      for (const auto& r : rels)
        if (r != target) others.push_back(r);
      Tgd t;
      std::size_t atoms = 1 + gen::pick(rng, 2);
      for (std::size_t a = 0; a < atoms; ++a) {
        std::vector<std::pair<AttrName, Term>> args{{"A", var(a == 0 ? "x" : (gen::coin(rng) ? "x" : "y"))}};
        if (gen::coin(rng, 0.25)) args.push_back({"B", var(gen::coin(rng) ? "x" : "w")});
        t.premise.push_back(atom(others[gen::pick(rng, others.size())], args));
      }
      std::vector<std::pair<AttrName, Term>> head{{"A", var("x")}};
      // A head attribute B is only used once B is guaranteed on the target.
      switch (widened.count(target) ? gen::pick(rng, 3) : 0) {
        case 0:
          break;
        case 1:
          head.push_back({"B", var("z")});
          break;
        default:
          head.push_back({"B", var("x")});
      }
      t.conclusion.push_back(atom(target, head));
      p.scope = {star(target)};
      p.post = {t};
      p.preserve = {TotalQuery{target}};
    }
    c.procs.push_back(p);
  }
  return c;
}

// Distinct substitution images nu(T) with nu ranging over vals.
inline std::set<Instance> images(const ConditionalInstance& t, const std::vector<Value>& vals) {
  std::set<Instance> out;
  auto nulls = t.nulls();
  std::vector<std::uint64_t> ids(nulls.begin(), nulls.end());
  std::map<std::uint64_t, Value> nu;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == ids.size()) {
      out.insert(t.apply(nu));
      return;
    }
    for (const auto& v : vals) {
      nu[ids[k]] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

inline std::set<Instance> minimal(const std::set<Instance>& xs) {
  std::set<Instance> out;
  for (const auto& a : xs) {
    bool min = true;
    for (const auto& b : xs)
      if (!(a == b) && instance_extends(a, b)) {
        min = false;
        break;
      }
    if (min) out.insert(a);
  }
  return out;
}

struct Verdict {
  bool ok = true;
  std::string why;
};

inline std::size_t attr_slots(const Schema& s) {
  std::size_t n = 0;
  for (const auto& [r, attrs] : s.relations()) n += attrs.size();
  return n;
}

// Values {1,2}, two extra tuples per step, and as many added attributes per
// step as the minimal-schema fold adds.
inline UniverseBound bound_for(const Case& c) {
  UniverseBound u;
  u.values = gen::values(2);
  u.max_extra_tuples = 2;
  u.max_extra_attrs = 1;
  Schema s = c.input.schema();
  for (const auto& p : c.procs) {
    auto m = minimal_schema(p, s);
    if (!m.ok) break;
    u.max_extra_attrs = std::max(u.max_extra_attrs, attr_slots(m.schema) - attr_slots(s));
    s = m.schema;
  }
  return u;
}

inline Verdict check(const Case& c) {
  Verdict v;
  auto u = bound_for(c);
  auto outs = enumerate_outcomes_seq(c.input, c.procs, u, Semantics::Dynamic);
  auto res = outcomes_condtab(c.input, c.procs);
  if (res.status == CondStatus::EmptyOutcome) {
    if (!outs.empty()) {
      v.ok = false;
      v.why = "table reports no outcome but the oracle found " + std::to_string(outs.size());
    }
    return v;
  }
  for (const auto& j : outs)
    if (!cond_rep_contains(res.table, j)) {
      v.ok = false;
      v.why = "oracle outcome outside rep(T)";
      return v;
    }
  auto want = minimal(outs);
  auto got = minimal(images(res.table, u.values));
  if (want != got) {
    v.ok = false;
    v.why = "minimal instances differ: oracle " + std::to_string(want.size()) + ", table " + std::to_string(got.size());
  }
  return v;
}

}  // namespace dyncheck
