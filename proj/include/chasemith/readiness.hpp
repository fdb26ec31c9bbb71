#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chasemith/condtab.hpp"
#include "chasemith/skb.hpp"

namespace chasemith {

struct ReadinessGoal {
  std::variant<Tgd, Egd, ConjunctiveQuery> goal;
  bool is_query() const { return std::holds_alternative<ConjunctiveQuery>(goal); }
  std::string str() const;
  friend bool operator==(const ReadinessGoal&, const ReadinessGoal&) = default;
};

enum class ReadinessStatus { Witness, NoWithinBound, Unsupported };

std::string to_string(ReadinessStatus s);

struct ReadinessStats {
  std::size_t nodes = 0;
  std::size_t dedup_hits = 0;
  friend bool operator==(const ReadinessStats&, const ReadinessStats&) = default;
};

struct ReadinessAnswer {
  ReadinessStatus status = ReadinessStatus::NoWithinBound;
  // Procedure names, for Witness.
  std::vector<std::string> witness;
  // Longest sequence length searched, for NoWithinBound.
  std::size_t bound = 0;
  std::string reason;
  ReadinessStats stats;
  friend bool operator==(const ReadinessAnswer&, const ReadinessAnswer&) = default;
};

struct ReadinessOptions {
  std::size_t max_len = 3;
  unsigned threads = 1;
  std::size_t gamma_cap = kDefaultGammaCap;
  std::size_t max_tuples = 1000000;
};

// Static semantics, tgd or egd goal; nodes are SKBs.
ReadinessAnswer constraint_ready(const Instance& i, const std::vector<Procedure>& catalog,
                                 const std::variant<Tgd, Egd>& goal, const ReadinessOptions& opts = {});
// Static semantics, boolean CQ goal; nodes are deduplicated on their minimal instance.
ReadinessAnswer query_ready(const Instance& i, const std::vector<Procedure>& catalog, const ConjunctiveQuery& goal,
                            const ReadinessOptions& opts = {});
// Dynamic semantics, boolean CQ goal; nodes are positive conditional instances.
ReadinessAnswer query_ready_dyn(const Instance& i, const std::vector<Procedure>& catalog, const ConjunctiveQuery& goal,
                                const ReadinessOptions& opts = {});

ReadinessAnswer ready(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal,
                      Semantics mode, const ReadinessOptions& opts = {});

// Rebuilds the outcome representation of the named sequence from scratch and
// checks the goal through a second decision path.
bool verify_witness(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal, Semantics mode,
                    const std::vector<std::string>& witness);

// Sequence-length bound from the full-tgd readiness argument, as log2 of the
// bound. Throws Unsupported under dynamic semantics.
double proven_bound_log2(const Instance& i, const std::vector<Procedure>& catalog, const ReadinessGoal& goal,
                         Semantics mode);

}  // namespace chasemith
