#include <gtest/gtest.h>

#include "brute.hpp"
#include "chasemith/dynschema.hpp"
#include "chasemith/oracle.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace chasemith;

namespace {

std::size_t schema_size(const Schema& s) {
  std::size_t n = 0;
  for (const auto& [r, attrs] : s.relations()) n += 1 + attrs.size();
  return n;
}

std::size_t procedure_size(const Procedure& p) {
  std::size_t n = 0;
  auto atoms = [&](const std::vector<Atom>& xs) {
    for (const auto& a : xs) n += 1 + a.args.size();
  };
  for (const auto& d : p.post) {
    if (const auto* t = std::get_if<Tgd>(&d)) {
      atoms(t->premise);
      atoms(t->conclusion);
    } else if (const auto* e = std::get_if<Egd>(&d)) {
      atoms(e->premise);
    } else {
      n += 1 + std::get<StructureConstraint>(d).attrs.size();
    }
  }
  for (const auto& q : p.preserve)
    if (const auto* cq = std::get_if<ConjunctiveQuery>(&q)) atoms(cq->atoms);
  return n;
}

}  // namespace

TEST(MinimalSchema, AlterationAddsInsId) {
  auto r = minimal_schema(fx::alter("P_alter", "LocVisits", {"insId"}), fx::visits_schema());
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.schema.attrs("LocVisits"), (std::vector<AttrName>{"facility", "insId", "pId", "timestp"}));
  EXPECT_EQ(r.schema.attrs("EVisits"), fx::visits_schema().attrs("EVisits"));
}

TEST(MinimalSchema, ArityPinExceeded) {
  Procedure p;
  p.scope = {star("R")};
  p.preserve = {TotalQuery{"R"}};
  p.post = {structure("R", {"A", "B", "C"})};
  auto r = minimal_schema(p, Schema{{"R", {"A", "B"}}});
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.diagnostic.find("R"), std::string::npos);
}

TEST(MinimalSchema, EmptyProcedureKeepsSchema) {
  auto s = fx::visits_schema();
  auto r = minimal_schema(Procedure{}, s);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.schema, s);
}

TEST(MinimalSchema, StarPostconditionAddsBareRelation) {
  Procedure p;
  p.post = {star("N")};
  auto r = minimal_schema(p, Schema{{"R", {"A"}}});
  ASSERT_TRUE(r.ok);
  ASSERT_TRUE(r.schema.has("N"));
  EXPECT_TRUE(r.schema.attrs("N").empty());
}

TEST(MinimalSchema, TotalQueryOnBareRelationRejected) {
  Procedure add;
  add.post = {star("N")};
  Procedure pin;
  pin.scope = {star("N")};
  pin.preserve = {TotalQuery{"N"}};
  auto fold = applicability_dyn({add, pin}, Schema{{"R", {"A"}}});
  EXPECT_FALSE(fold.ok);
  EXPECT_NE(fold.trace.back().find("no attributes"), std::string::npos);
}

TEST(MinimalSchema, IncompatiblePreservationFails) {
  Procedure p;
  p.preserve = {cq_all_free({fx::un("LocVisits", "insId", var("x"))})};
  EXPECT_FALSE(minimal_schema(p, fx::visits_schema()).ok);
}

TEST(ApplicabilityDyn, AlterThenNeed) {
  auto f = applicability_dyn(
      {fx::alter("P_alter", "LocVisits", {"insId"}), fx::needs("P_needs", "LocVisits", {"insId"})}, fx::visits_schema());
  EXPECT_TRUE(f.ok);
  EXPECT_EQ(f.schemas.size(), 3u);
}

TEST(ApplicabilityDyn, NeedAlone) {
  EXPECT_FALSE(applicability_dyn({fx::needs("P_needs", "LocVisits", {"insId"})}, fx::visits_schema()).ok);
}

TEST(ApplicabilityDyn, EmptySequence) { EXPECT_TRUE(applicability_dyn({}, fx::visits_schema()).ok); }

TEST(ApplicabilityDyn, DataPreconditionUnsupported) {
  Procedure p;
  p.pre = {fx::migrate_tgd()};
  EXPECT_THROW(applicability_dyn({p}, fx::visits_schema()), Unsupported);
}

TEST(ApplicabilityDyn, OrderOfAttributesIrrelevant) {
  auto s = fx::visits_schema();
  auto a = applicability_dyn({fx::alter("A", "LocVisits", {"insId", "age"})}, s);
  auto b = applicability_dyn({fx::alter("A", "LocVisits", {"age", "insId"})}, s);
  EXPECT_EQ(a.schemas, b.schemas);
}

TEST(DynNonempty, Examples) {
  Schema s{{"EVisits", {"facility", "pId", "timestp"}},
           {"LocVisits", {"facility", "pId", "timestp"}},
           {"Patients", {"insId", "pId"}}};
  Instance i(s);
  i.insert("EVisits", fx::visit(1, 33, "t"));
  i.insert("Patients", Tuple{val("INS1"), val(33)});
  Procedure fill;
  fill.name = "P_fill";
  fill.scope = {star("LocVisits")};
  fill.preserve = {TotalQuery{"LocVisits"}};
  fill.post = {Tgd{{atom("Patients", {{"pId", var("x")}, {"insId", var("y")}}),
                    atom("EVisits", {{"facility", var("f")}, {"pId", var("x")}, {"timestp", var("t")}})},
                   {atom("LocVisits",
                         {{"facility", var("f")}, {"pId", var("x")}, {"timestp", var("t")}, {"insId", var("y")}})}}};
  auto alter = fx::alter("P_alter", "LocVisits", {"insId"});
  EXPECT_TRUE(dyn_nonempty(i, {fx::migrate_safe()}));
  EXPECT_TRUE(dyn_nonempty(i, {}));
  EXPECT_FALSE(dyn_nonempty(i, {fill}));
  EXPECT_TRUE(dyn_nonempty(i, {alter, fill}));
  EXPECT_THROW(dyn_nonempty(i, {fx::migrate()}), Unsupported);
}

TEST(MinimalSchema, OutcomeSchemasExtendIt) {
  std::mt19937 rng(1212);
  Schema s{{"R", {"A"}}, {"S", {"A"}}};
  std::vector<Procedure> procs{fx::alter("A", "R", {"B"}), fx::copy_proc("C", "R", "S")};
  {
    Procedure p;
    p.scope = {star("S")};
    p.preserve = {TotalQuery{"S"}};
    p.post = {Tgd{{fx::un("R", "A", var("x"))}, {atom("S", {{"A", var("x")}, {"B", var("x")}})}}};
    procs.push_back(p);
  }
  {
    Procedure p;
    p.scope = {star("S")};
    p.post = {Tgd{{atom("R", {{"A", var("x")}, {"B", var("x")}})}, {fx::un("S", "A", var("x"))}}};
    procs.push_back(p);
  }
  for (const auto& p : procs) {
    for (int trial = 0; trial < 3; ++trial) {
      Instance i = gen::instance(rng, s, gen::values(2), 2);
      UniverseBound u;
      u.values = gen::values(2);
      u.max_extra_attrs = 1;
      u.max_extra_tuples = 2;
      auto outs = enumerate_outcomes(i, p, u, Semantics::Dynamic);
      auto ms = minimal_schema(p, s);
      if (!ms.ok) {
        EXPECT_TRUE(outs.empty()) << p.name;
        continue;
      }
      EXPECT_LE(schema_size(ms.schema), schema_size(s) + procedure_size(p));
      for (const auto& j : outs) EXPECT_TRUE(schema_extends(j.schema(), ms.schema)) << p.name;
    }
  }
}
