#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chasemith/procedures.hpp"

namespace chasemith {

// a = b or a != b, stored with the smaller value first.
struct Literal {
  Value a;
  Value b;
  bool eq = true;
  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

Literal eq_lit(const Value& a, const Value& b);
Literal neq_lit(const Value& a, const Value& b);

// Disjunctive normal form. No clauses is false; one empty clause is true.
class Condition {
 public:
  using Clause = std::set<Literal>;

  Condition() = default;

  static Condition always() { return Condition({Clause{}}); }
  static Condition never() { return Condition(); }
  static Condition of(const Clause& c) { return Condition({c}); }

  bool is_true() const;
  bool is_false() const { return clauses_.empty(); }
  bool positive() const;
  const std::set<Clause>& clauses() const { return clauses_; }

  Condition operator&&(const Condition& o) const;
  Condition operator||(const Condition& o) const;

  // Nulls absent from nu are read as themselves.
  bool holds(const std::map<std::uint64_t, Value>& nu) const;
  std::set<std::uint64_t> nulls() const;
  std::string str() const;

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition&, const Condition&) = default;

 private:
  explicit Condition(std::set<Clause> clauses);
  std::set<Clause> clauses_;
};

class ConditionalInstance {
 public:
  ConditionalInstance() = default;
  explicit ConditionalInstance(Schema s);
  static ConditionalInstance ground(const Instance& i);

  const Schema& schema() const { return schema_; }
  const std::map<Tuple, Condition>& rows(const RelName& r) const;
  const std::map<RelName, std::map<Tuple, Condition>>& data() const { return data_; }

  // Disjoins with any existing condition on the same tuple.
  void add(const RelName& r, const Tuple& t, const Condition& c);
  // Widens r (or adds it empty) padding each tuple with fresh nulls.
  void widen(const RelName& r, const std::vector<AttrName>& attrs, std::uint64_t& next_null);

  bool positive() const;
  std::set<std::uint64_t> nulls() const;
  std::uint64_t next_null() const;
  std::size_t tuple_count() const;
  // nu(T): tuples whose condition holds, with nulls substituted.
  Instance apply(const std::map<std::uint64_t, Value>& nu) const;
  // Tuples with the trivial condition, nulls kept as values.
  Instance naive() const;

  friend bool operator==(const ConditionalInstance&, const ConditionalInstance&) = default;

 private:
  Schema schema_;
  std::map<RelName, std::map<Tuple, Condition>> data_;
};

bool cond_rep_contains(const ConditionalInstance& t, const Instance& j);

// Throws ResourceError when the table grows past max_tuples.
ConditionalInstance chase_conditional(const ConditionalInstance& t, const Procedure& p,
                                      std::size_t max_tuples = 1000000);

enum class CondStatus { Ok, EmptyOutcome };

struct CondResult {
  CondStatus status = CondStatus::Ok;
  ConditionalInstance table;
  std::string diagnostic;
};

CondResult extend_schema_conditional(const ConditionalInstance& t, const Procedure& p);

CondResult outcomes_condtab(const Instance& i, const std::vector<Procedure>& ps, std::size_t max_tuples = 1000000);
CondResult outcomes_condtab(const ConditionalInstance& t, const std::vector<Procedure>& ps,
                            std::size_t max_tuples = 1000000);

bool certain_boolean(const ConditionalInstance& t, const ConjunctiveQuery& q);

}  // namespace chasemith
