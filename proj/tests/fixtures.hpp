#pragma once

#include "chasemith/procedures.hpp"

namespace fx {

using namespace chasemith;

inline Schema visits_schema() {
  return Schema{{"EVisits", {"facility", "pId", "timestp"}}, {"LocVisits", {"facility", "pId", "timestp"}}};
}

inline NamedTuple visit(long long f, long long p, const std::string& t) {
  return {{"facility", val(f)}, {"pId", val(p)}, {"timestp", val(t)}};
}

// Figure 1(a).
inline Instance visits_i() {
  Instance i(visits_schema());
  i.insert("EVisits", visit(1234, 33, "070916 12:00"));
  i.insert("EVisits", visit(2087, 91, "090916 03:10"));
  i.insert("LocVisits", visit(1234, 33, "070916 12:00"));
  i.insert("LocVisits", visit(1222, 33, "020715 07:50"));
  return i;
}

// Figure 1(b).
inline Instance visits_j1() {
  Instance j = visits_i();
  j.insert("LocVisits", visit(2087, 91, "090916 03:10"));
  return j;
}

// Figure 1(c).
inline Instance visits_j2() {
  Instance j = visits_j1();
  j.insert("LocVisits", visit(4561, 54, "080916 23:45"));
  return j;
}

// Figure 1(d): LocVisits carries an extra age column.
inline Instance visits_j3() {
  Schema s = visits_schema();
  s.define("LocVisits", {"age", "facility", "pId", "timestp"});
  Instance j(s);
  j.insert("EVisits", visit(1234, 33, "070916 12:00"));
  j.insert("EVisits", visit(2087, 91, "090916 03:10"));
  auto row = [](long long f, long long p, const std::string& t, long long age) {
    auto n = visit(f, p, t);
    n["age"] = val(age);
    return n;
  };
  j.insert("LocVisits", row(1234, 33, "070916 12:00", 21));
  j.insert("LocVisits", row(1222, 33, "020715 07:50", 45));
  j.insert("LocVisits", row(2087, 91, "090916 03:10", 82));
  return j;
}

inline std::vector<Atom> visit_atom(const RelName& r, const std::string& x, const std::string& y,
                                    const std::string& z) {
  return {atom(r, {{"facility", var(x)}, {"pId", var(y)}, {"timestp", var(z)}})};
}

// EVisits(facility:x, pId:y, timestp:z) -> LocVisits(facility:x, pId:y, timestp:z)
inline Tgd migrate_tgd() {
  return Tgd{visit_atom("EVisits", "x", "y", "z"), visit_atom("LocVisits", "x", "y", "z")};
}

inline Atom un(const RelName& r, const std::string& attr, const Term& t) { return atom(r, {{attr, t}}); }

// Unary shorthand R(A:x) -> S(A:x).
inline Tgd unary(const RelName& from, const RelName& to, const std::string& attr = "A") {
  return Tgd{{un(from, attr, var("x"))}, {un(to, attr, var("x"))}};
}

inline StructureConstraint visit_cols(const RelName& r) { return structure(r, {"facility", "pId", "timestp"}); }

// As described in prose: structure preconditions and a CQ preservation query.
inline Procedure migrate() {
  Procedure p;
  p.name = "P_migrate";
  p.scope = {star("LocVisits")};
  p.pre = {visit_cols("EVisits"), visit_cols("LocVisits")};
  p.post = {migrate_tgd()};
  p.preserve = {cq_all_free(visit_atom("LocVisits", "x", "y", "z"))};
  return p;
}

// Safe-scope variant: no precondition, total preservation of LocVisits.
inline Procedure migrate_safe() {
  Procedure p;
  p.name = "P_migrate";
  p.scope = {star("LocVisits")};
  p.post = {migrate_tgd()};
  p.preserve = {TotalQuery{"LocVisits"}};
  return p;
}

// Safe-scope copy R -> T with T[*] scope and total preservation of T.
inline Procedure copy_proc(const std::string& name, const RelName& from, const RelName& to) {
  Procedure p;
  p.name = name;
  p.scope = {star(to)};
  p.post = {unary(from, to)};
  p.preserve = {TotalQuery{to}};
  return p;
}

inline Procedure alter(const std::string& name, const RelName& r, std::vector<AttrName> attrs) {
  Procedure p;
  p.name = name;
  p.post = {structure(r, std::move(attrs))};
  return p;
}

inline Procedure needs(const std::string& name, const RelName& r, std::vector<AttrName> attrs) {
  Procedure p;
  p.name = name;
  p.pre = {structure(r, std::move(attrs))};
  return p;
}

inline Procedure alter_insid() { return alter("P_alter", "LocVisits", {"insId"}); }

// EVisits joined with Patients fills LocVisits rows carrying insId.
inline Procedure fill() {
  Procedure p;
  p.name = "P_fill";
  p.scope = {star("LocVisits")};
  auto ev = visit_atom("EVisits", "x", "y", "z");
  ev.push_back(atom("Patients", {{"pId", var("y")}, {"insId", var("w")}}));
  p.post = {Tgd{ev, {atom("LocVisits", {{"facility", var("x")}, {"insId", var("w")}, {"pId", var("y")}, {"timestp", var("z")}})}}};
  p.preserve = {TotalQuery{"LocVisits"}};
  return p;
}

// Motivating example input: LocVisits starts empty.
inline Instance motivating_i() {
  Schema s = visits_schema();
  s.define("Patients", {"insId", "pId"});
  Instance i(s);
  i.insert("EVisits", visit(1234, 33, "070916 12:00"));
  i.insert("EVisits", visit(2087, 91, "090916 03:10"));
  i.insert("Patients", NamedTuple{{"pId", val(33)}, {"insId", val("INS1")}});
  i.insert("Patients", NamedTuple{{"pId", val(91)}, {"insId", val("INS2")}});
  return i;
}

inline ConjunctiveQuery insured_goal() { return cq_boolean({atom("LocVisits", {{"facility", var("x")}, {"insId", var("y")}})}); }

}  // namespace fx
