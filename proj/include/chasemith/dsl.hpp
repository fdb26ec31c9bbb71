#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chasemith/procedures.hpp"
#include "chasemith/readiness.hpp"

namespace chasemith {

struct NamedGoal {
  std::string name;
  ReadinessGoal goal;
  friend bool operator==(const NamedGoal&, const NamedGoal&) = default;
};

struct Workspace {
  Schema schema;
  Instance instance;
  std::vector<Procedure> catalog;
  std::vector<NamedGoal> goals;

  const Procedure& procedure(const std::string& name) const;
  const NamedGoal& goal(const std::string& name) const;
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t col, const std::string& msg);
  std::size_t line;
  std::size_t col;
};

Workspace parse_spec(const std::string& text);
std::string serialize(const Workspace& w);

// A single tgd, egd or structure constraint, without schema checks.
Dependency parse_dependency(const std::string& text);

}  // namespace chasemith
