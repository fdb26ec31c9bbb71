#pragma once

#include <cstddef>
#include <limits>
#include <set>
#include <vector>

#include "chasemith/procedures.hpp"

namespace chasemith {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kDefaultOracleBudget = 1000000;

// Bounds the outcomes the oracle explores. An outcome J of I is bounded when
// its values come from `values`, it adds at most max_extra_attrs attribute
// slots and max_extra_rels relations, and it has at most max_extra_tuples
// tuples beyond the distinct I-tuples it covers (per relation: |R^J| minus
// the number of R^I tuples that reappear in the projection of R^J).
struct UniverseBound {
  std::vector<Value> values;
  std::size_t max_extra_tuples = kUnbounded;
  std::size_t max_extra_attrs = 0;
  std::size_t max_extra_rels = 0;
  std::size_t budget = kDefaultOracleBudget;
};

// Values of i plus `fresh` new constants f1, f2, ...
UniverseBound universe_for(const Instance& i, std::size_t fresh = 0);

std::size_t extra_tuples(const Instance& j, const Instance& i);

// Bounded outcomes, with Q_{S\Scope} compared per relation.
std::set<Instance> enumerate_outcomes(const Instance& i, const Procedure& p, const UniverseBound& u, Semantics mode);
std::set<Instance> enumerate_outcomes_seq(const Instance& i, const std::vector<Procedure>& ps, const UniverseBound& u,
                                          Semantics mode);

struct OracleVerdict {
  bool holds = true;
  // No outcome was found, so `holds` is vacuous.
  bool vacuous = false;
};

OracleVerdict oracle_certain(const std::set<Instance>& outcomes, const ConjunctiveQuery& q);
OracleVerdict oracle_entails(const std::set<Instance>& outcomes, const Dependency& d);

}  // namespace chasemith
