#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "chasemith/procedures.hpp"

namespace chasemith {

struct SkbFlags {
  bool full = true;
  bool acyclic = true;
  // scope covers every relation in a conclusion of gamma
  bool safe = true;
  friend bool operator==(const SkbFlags&, const SkbFlags&) = default;
};

struct ScopedKnowledgeBase {
  Instance base;
  std::vector<Tgd> gamma;
  std::set<RelName> scope;

  SkbFlags flags() const;
  friend bool operator==(const ScopedKnowledgeBase&, const ScopedKnowledgeBase&) = default;
};

std::string describe(const ScopedKnowledgeBase& k);

inline constexpr std::size_t kDefaultGammaCap = 100000;

struct RemoveStats {
  std::size_t resolvents = 0;
  // resolvents built from a partition that merges variables
  std::size_t merged = 0;
  // of those, how many survive deduplication and subsumption
  std::size_t merged_kept = 0;
};

// Single-atom conclusions, premise atoms repeated in the conclusion dropped,
// canonical renaming, duplicates and subsumed tgds removed.
std::vector<Tgd> simplify_tgds(const std::vector<Tgd>& g);

// a implies b by a substitution sending a's premise into b's premise and
// a's single conclusion atom onto b's.
bool tgd_subsumes(const Tgd& a, const Tgd& b);

// Resolve every premise occurrence of a scoped relation against the tgds
// producing it, until no premise mentions a scoped relation. With `facts`,
// an occurrence may also be matched against a row of that relation in
// `facts`; tgds whose premise empties this way are dropped.
std::vector<Tgd> remove_relations(const std::vector<Tgd>& g, const std::set<RelName>& scope,
                                  RemoveStats* stats = nullptr, std::size_t cap = kDefaultGammaCap,
                                  const Instance* facts = nullptr);

bool rep_contains(const ScopedKnowledgeBase& k, const Instance& j);

ScopedKnowledgeBase apply_procedure(const ScopedKnowledgeBase& k, const Procedure& p,
                                    RemoveStats* stats = nullptr, std::size_t cap = kDefaultGammaCap);

ScopedKnowledgeBase outcomes_skb(const Instance& i, const std::vector<Procedure>& ps,
                                 RemoveStats* stats = nullptr, std::size_t cap = kDefaultGammaCap);

// The least member of rep(k).
Instance minimal_instance(const ScopedKnowledgeBase& k);

// Certain answers over rep(k): the answers on its least member.
std::set<Tuple> certain_answers(const ScopedKnowledgeBase& k, const ConjunctiveQuery& q);
bool certain_boolean(const ScopedKnowledgeBase& k, const ConjunctiveQuery& q);

}  // namespace chasemith
