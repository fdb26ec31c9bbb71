#pragma once

#include <map>
#include <string>
#include <vector>

#include "chasemith/procedures.hpp"

namespace chasemith {

struct MinimalSchemaResult {
  bool ok = false;
  Schema schema;
  // Arity pins from total preservation queries.
  std::map<RelName, std::size_t> labels;
  std::string diagnostic;
};

MinimalSchemaResult minimal_schema(const Procedure& p, const Schema& s);

struct SchemaFold {
  bool ok = true;
  // S_0 ... S_k, where S_k is the last schema reached.
  std::vector<Schema> schemas;
  std::vector<std::string> trace;
};

// Throws Unsupported when some precondition is not a structure constraint.
SchemaFold applicability_dyn(const std::vector<Procedure>& ps, const Schema& s);

// Requires every procedure to be safe-scope or safe-alteration.
bool dyn_nonempty(const Instance& i, const std::vector<Procedure>& ps);

std::string schema_str(const Schema& s);

}  // namespace chasemith
