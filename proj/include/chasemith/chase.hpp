#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chasemith/lang.hpp"

namespace chasemith {

using DataDependency = std::variant<Tgd, Egd>;

constexpr std::size_t kDefaultStepLimit = 1000000;

enum class ChaseStatus { Success, EgdFailure, StepLimitExceeded };

std::string to_string(ChaseStatus s);

struct Trigger {
  std::size_t dep = 0;
  // Premise variables in first-occurrence order.
  std::vector<std::string> vars;
  std::vector<Value> values;

  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct ChaseResult {
  Instance instance;
  std::vector<Trigger> steps;
  ChaseStatus status = ChaseStatus::Success;
};

// Ground chase with full tgds. Every conclusion atom must bind all
// attributes of its relation.
Instance chase_full(const Instance& i, const std::vector<Tgd>& g);

// Restricted chase with labeled nulls. Nulls are numbered from one past the
// largest null label already present in i.
ChaseResult chase_standard(const Instance& i, const std::vector<DataDependency>& deps,
                           std::size_t step_limit = kDefaultStepLimit);

// Active triggers on i: dependency id, then lexicographic assignment.
std::vector<Trigger> fire_order(const std::vector<DataDependency>& deps, const Instance& i);

// Re-applies recorded steps to i.
Instance replay(const Instance& i, const std::vector<DataDependency>& deps, const std::vector<Trigger>& steps);

std::uint64_t next_null_label(const Instance& i);

}  // namespace chasemith
