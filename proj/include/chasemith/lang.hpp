#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chasemith/relmodel.hpp"

namespace chasemith {

struct Term {
  bool is_var = false;
  std::string var;
  Value value;

  static Term variable(std::string name) {
    Term t;
    t.is_var = true;
    t.var = std::move(name);
    return t;
  }
  static Term constant(Value v) {
    Term t;
    t.value = std::move(v);
    return t;
  }
  std::string str() const;

  friend bool operator==(const Term& a, const Term& b) {
    return a.is_var == b.is_var && (a.is_var ? a.var == b.var : a.value == b.value);
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.is_var != b.is_var) return a.is_var ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.is_var) {
      int c = a.var.compare(b.var);
      return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    return a.value <=> b.value;
  }
};

Term var(const std::string& name);
Term cst(const std::string& text);

// R(A1:t1, ..., Ak:tk). Bindings are kept sorted by attribute name.
struct Atom {
  RelName rel;
  std::vector<std::pair<AttrName, Term>> args;

  std::vector<AttrName> attrs() const;
  const Term* find(const AttrName& a) const;
  std::string str() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

Atom atom(RelName rel, std::vector<std::pair<AttrName, Term>> args);

struct ConjunctiveQuery {
  std::vector<std::string> free_vars;
  std::vector<std::string> existential_vars;
  std::vector<Atom> atoms;

  bool is_boolean() const { return free_vars.empty(); }
  std::string str() const;
  friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

// All atom variables free, in order of first occurrence.
ConjunctiveQuery cq_all_free(std::vector<Atom> atoms);
// All atom variables existential.
ConjunctiveQuery cq_boolean(std::vector<Atom> atoms);

struct TotalQuery {
  RelName rel;
  friend bool operator==(const TotalQuery&, const TotalQuery&) = default;
};

using Query = std::variant<ConjunctiveQuery, TotalQuery>;

struct Tgd {
  std::vector<Atom> premise;
  std::vector<Atom> conclusion;

  std::vector<std::string> premise_vars() const;
  std::vector<std::string> frontier() const;
  std::vector<std::string> existentials() const;
  bool is_full() const { return existentials().empty(); }
  std::string str() const;
  friend bool operator==(const Tgd&, const Tgd&) = default;
  friend auto operator<=>(const Tgd&, const Tgd&) = default;
};

struct Egd {
  std::vector<Atom> premise;
  std::string lhs;
  std::string rhs;
  std::string str() const;
  friend bool operator==(const Egd&, const Egd&) = default;
};

struct StructureConstraint {
  RelName rel;
  bool wildcard = true;
  std::vector<AttrName> attrs;
  std::string str() const;
  friend bool operator==(const StructureConstraint&, const StructureConstraint&) = default;
  friend auto operator<=>(const StructureConstraint&, const StructureConstraint&) = default;
};

StructureConstraint star(const RelName& r);
StructureConstraint structure(const RelName& r, std::vector<AttrName> attrs);

using Dependency = std::variant<Tgd, Egd, StructureConstraint>;

std::string to_string(const Dependency& d);
std::string to_string(const Query& q);

// Variables in order of first occurrence.
std::vector<std::string> vars_of(const std::vector<Atom>& atoms);
std::vector<Value> constants_of(const std::vector<Atom>& atoms);
std::vector<RelName> relations_of(const std::vector<Atom>& atoms);

bool compatible(const Atom& a, const Schema& s);
bool compatible(const std::vector<Atom>& atoms, const Schema& s);
bool compatible(const ConjunctiveQuery& q, const Schema& s);
bool compatible(const TotalQuery& q, const Schema& s);
bool compatible(const Query& q, const Schema& s);
bool compatible(const Tgd& t, const Schema& s);
bool compatible(const Egd& e, const Schema& s);
bool compatible(const Dependency& d, const Schema& s);

std::set<Tuple> eval_cq(const ConjunctiveQuery& q, const Instance& i);
// Total query: every stored tuple, attributes in schema order.
std::set<Tuple> eval_total(const TotalQuery& q, const Instance& i);
std::set<Tuple> eval_query(const Query& q, const Instance& i);

bool satisfies_structure(const Schema& s, const StructureConstraint& c);
bool satisfies_dependency(const Instance& i, const Tgd& t);
bool satisfies_dependency(const Instance& i, const Egd& e);
// Structure constraints are checked against the schema, data constraints
// against the instance.
bool satisfies(const Instance& i, const Dependency& d);
bool satisfies_all(const Instance& i, const std::vector<Dependency>& ds);

struct TgdFlags {
  bool full = true;
  bool acyclic = true;
  bool weakly_acyclic = true;
  friend bool operator==(const TgdFlags&, const TgdFlags&) = default;
};

TgdFlags classify_tgd_set(const std::vector<Tgd>& g);

// Relation-level dependency graph: edge R -> S when R occurs in a premise
// and S in the conclusion of the same tgd.
std::map<RelName, std::set<RelName>> relation_graph(const std::vector<Tgd>& g);
bool graph_acyclic(const std::map<RelName, std::set<RelName>>& g);
// Topological order of all nodes; ties broken by name.
std::vector<RelName> topo_order(const std::map<RelName, std::set<RelName>>& g);

// Variables renamed v0, v1, ... by first occurrence after a
// variable-blind sort of the atoms; premise and conclusion deduplicated.
Tgd canonical(const Tgd& t);
std::string canonical_key(const Tgd& t);
// Canonical, deduplicated, sorted.
std::vector<Tgd> canonical_set(const std::vector<Tgd>& g);

Tgd rename_apart(const Tgd& t, const std::string& prefix);

}  // namespace chasemith
