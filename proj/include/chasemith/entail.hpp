#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chasemith/skb.hpp"

namespace chasemith {

struct EntailResult {
  bool holds = true;
  std::string note;
  // A member of rep(k) violating the dependency, when one was built.
  std::optional<Instance> counterexample;
};

inline constexpr std::size_t kDefaultEgdVarBudget = 8;
inline constexpr std::size_t kDefaultUcqBudget = 200000;

// Every member of rep(k) satisfies e. Fresh constants stand for values
// outside the base; gamma must be weakly acyclic.
EntailResult skb_satisfies_egd(const ScopedKnowledgeBase& k, const Egd& e,
                               std::size_t var_budget = kDefaultEgdVarBudget);

// Frozen-premise check for safe SKBs. Unsafe SKBs are routed to the general path.
EntailResult skb_satisfies_tgd_safe(const ScopedKnowledgeBase& k, const Tgd& t);

// A CQ with inequalities. Variables are nulls of `body`.
struct CqNeq {
  std::vector<Value> head;
  Instance body;
  std::set<std::pair<Value, Value>> neq;
  std::string str() const;
};

struct UcqNeq {
  std::vector<CqNeq> disjuncts;
};

// The premise of t conjoined with the base, chased with gamma (as disjunctive
// dependencies over normalized premises) and with the fixed contents of the
// relations outside the scope.
UcqNeq rewrite_premise(const ScopedKnowledgeBase& k, const Tgd& t, std::size_t budget = kDefaultUcqBudget);

// Every disjunct with satisfiable inequalities admits a containment mapping
// from q sending q's free variables onto the disjunct head.
bool ucq_contained_in_cq(const UcqNeq& u, const ConjunctiveQuery& q);

EntailResult skb_satisfies_tgd_general(const ScopedKnowledgeBase& k, const Tgd& t,
                                       std::size_t budget = kDefaultUcqBudget);

// Dispatch by dependency kind. Structure constraints are checked on the schema.
EntailResult skb_satisfies(const ScopedKnowledgeBase& k, const Dependency& d);

}  // namespace chasemith
