#pragma once

#include <string>
#include <vector>

#include "chasemith/lang.hpp"

namespace chasemith {

struct Procedure {
  std::string name;
  std::vector<StructureConstraint> scope;
  std::vector<Dependency> pre;
  std::vector<Dependency> post;
  std::vector<Query> preserve;
  friend bool operator==(const Procedure&, const Procedure&) = default;
};

struct ProcedureClass {
  bool safe_scope = false;
  bool safe_alteration = false;
  // post contains a structure constraint, so outcomes may need a wider schema.
  bool forces_alteration = false;
  friend bool operator==(const ProcedureClass&, const ProcedureClass&) = default;
};

ProcedureClass classify(const Procedure& p);

std::vector<Tgd> post_tgds(const Procedure& p);
std::vector<Egd> post_egds(const Procedure& p);
std::vector<StructureConstraint> post_structures(const Procedure& p);
bool post_full(const Procedure& p);
// Relation names touched by the scope, for safe-scope procedures.
std::set<RelName> scope_relations(const Procedure& p);

// Throws Unsupported naming the missing class.
void require_safe_scope(const Procedure& p);
void require_safe_scope_full(const Procedure& p);

enum class Semantics { Static, Dynamic };
// How Q_{S\Scope} answers are compared: one conjoined CQ, or one CQ per relation.
enum class ScopeQueryMode { Conjoined, PerRelation };

std::string to_string(Semantics s);

// Q_{S\C}: one atom per relation not fully covered by c, over the attributes
// c leaves untouched. Relations whose attributes are all named by R[s̄]
// constraints contribute no atom.
ConjunctiveQuery scope_complement_query(const Schema& s, const std::vector<StructureConstraint>& c);
// The same atoms, one all-free CQ per relation.
std::vector<ConjunctiveQuery> scope_complement_parts(const Schema& s, const std::vector<StructureConstraint>& c);

bool is_applicable(const Procedure& p, const Instance& i);

bool is_possible_outcome(const Procedure& p, const Instance& i, const Instance& j, Semantics mode,
                         ScopeQueryMode qmode = ScopeQueryMode::Conjoined);

struct SequenceApplicability {
  bool supported = false;
  bool answer = false;
  std::vector<std::string> trace;
};

SequenceApplicability check_applicability_sequence(const std::vector<Procedure>& ps, const Schema& s);

}  // namespace chasemith
