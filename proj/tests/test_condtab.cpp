#include <gtest/gtest.h>

#include <chrono>

#include "brute.hpp"
#include "chasemith/chase.hpp"
#include "chasemith/condtab.hpp"
#include "chasemith/oracle.hpp"
#include "dyn_check.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace chasemith;

namespace {

Value n(std::uint64_t id) { return Value::make_null(id); }

}  // namespace

TEST(Condition, Simplification) {
  EXPECT_TRUE(Condition::of({eq_lit(val(1), val(1))}).is_true());
  EXPECT_TRUE(Condition::of({eq_lit(val(1), val(2))}).is_false());
  EXPECT_TRUE(Condition::of({eq_lit(n(1), val(1)), eq_lit(n(1), val(2))}).is_false());
  EXPECT_TRUE(Condition::of({eq_lit(n(1), n(2)), neq_lit(n(2), n(1))}).is_false());
  auto a = Condition::of({eq_lit(n(1), val(1))});
  auto b = Condition::of({eq_lit(n(1), val(1)), eq_lit(n(2), val(2))});
  EXPECT_EQ(a || b, a);
  EXPECT_TRUE((a || Condition::always()).is_true());
  EXPECT_TRUE((a && Condition::never()).is_false());
  EXPECT_TRUE(a.positive());
  EXPECT_FALSE(Condition::of({neq_lit(n(1), val(1))}).positive());
}

TEST(Condition, HoldsMatchesTruthTable) {
  std::mt19937 rng(31);
  std::vector<Value> pool{val(1), val(2), n(1), n(2), n(3)};
  for (int trial = 0; trial < 300; ++trial) {
    auto lit = [&]() {
      auto a = pool[gen::pick(rng, pool.size())], b = pool[gen::pick(rng, pool.size())];
      return gen::coin(rng, 0.7) ? eq_lit(a, b) : neq_lit(a, b);
    };
    auto clause = [&]() {
      Condition::Clause c;
      for (std::size_t k = 0; k < 1 + gen::pick(rng, 2); ++k) c.insert(lit());
      return c;
    };
    auto c1 = clause(), c2 = clause(), c3 = clause();
    Condition x = Condition::of(c1) || Condition::of(c2);
    Condition y = Condition::of(c3);
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b)
        for (int c = 1; c <= 3; ++c) {
          std::map<std::uint64_t, Value> nu{{1, val(a)}, {2, val(b)}, {3, val(c)}};
          auto lit_holds = [&](const Literal& l) {
            auto s = [&](const Value& v) { return v.is_null() ? nu.at(v.id) : v; };
            return (s(l.a) == s(l.b)) == l.eq;
          };
          auto cl = [&](const Condition::Clause& k) {
            return std::all_of(k.begin(), k.end(), lit_holds);
          };
          bool want_x = cl(c1) || cl(c2);
          bool want_y = cl(c3);
          EXPECT_EQ(x.holds(nu), want_x);
          EXPECT_EQ((x && y).holds(nu), want_x && want_y);
          EXPECT_EQ((x || y).holds(nu), want_x || want_y);
        }
  }
}

TEST(CondRep, GroundTable) {
  auto i = fx::visits_i();
  auto t = ConditionalInstance::ground(i);
  EXPECT_TRUE(cond_rep_contains(t, i));
  EXPECT_TRUE(cond_rep_contains(t, fx::visits_j3()));
  EXPECT_FALSE(cond_rep_contains(t, Instance(i.schema())));
}

TEST(CondRep, SingleNullMatchesWiderSchema) {
  ConditionalInstance t(Schema{{"R", {"A"}}});
  t.add("R", Tuple{n(1)}, Condition::always());
  Instance j(Schema{{"R", {"A", "B"}}});
  j.insert("R", Tuple{val(5), val(6)});
  EXPECT_TRUE(cond_rep_contains(t, j));
}

TEST(CondRep, ConditionedNullMismatch) {
  ConditionalInstance t(Schema{{"R", {"A"}}});
  t.add("R", Tuple{n(1)}, Condition::of({eq_lit(n(1), val("a"))}));
  Instance j(Schema{{"R", {"A"}}});
  j.insert("R", Tuple{val("b")});
  // The condition can be made false, so the empty reading is allowed.
  EXPECT_TRUE(cond_rep_contains(t, j));
  ConditionalInstance u(Schema{{"R", {"A"}}});
  u.add("R", Tuple{n(1)}, Condition::always());
  u.add("R", Tuple{val("a")}, Condition::of({eq_lit(n(1), val("a"))}));
  // n1 must land on b, which makes the second tuple vanish.
  EXPECT_TRUE(cond_rep_contains(u, j));
  ConditionalInstance w(Schema{{"R", {"A"}}});
  w.add("R", Tuple{n(1)}, Condition::always());
  w.add("R", Tuple{val("a")}, Condition::of({eq_lit(n(1), val("b"))}));
  EXPECT_FALSE(cond_rep_contains(w, j));
}

TEST(CondRep, AgreesWithSubstitutionSearch) {
  std::mt19937 rng(41);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}};
  std::vector<Value> consts{val(1), val(2)};
  for (int trial = 0; trial < 150; ++trial) {
    ConditionalInstance t(s);
    std::vector<Value> pool{val(1), val(2), n(1), n(2)};
    for (int k = 0; k < 3; ++k) {
      RelName r = gen::coin(rng) ? "R" : "S";
      Tuple row;
      for (std::size_t a = 0; a < s.attrs(r).size(); ++a) row.push_back(pool[gen::pick(rng, pool.size())]);
      Condition c = gen::coin(rng) ? Condition::always()
                                   : Condition::of({eq_lit(pool[gen::pick(rng, 4)], pool[gen::pick(rng, 4)])});
      t.add(r, row, c);
    }
    Instance j = gen::instance(rng, s, consts, 4);
    // Reference: every substitution over the constants plus one outside value.
    bool want = false;
    std::vector<Value> vals{val(1), val(2), val(99)};
    for (const auto& a : vals)
      for (const auto& b : vals) want = want || instance_extends(j, t.apply({{1, a}, {2, b}}));
    EXPECT_EQ(cond_rep_contains(t, j), want);
  }
}

TEST(ChaseConditional, GroundFullAgreesWithChaseFull) {
  std::mt19937 rng(51);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}, {"T", {"A", "B"}}};
  for (int trial = 0; trial < 100; ++trial) {
    Instance i = gen::instance(rng, s, gen::values(3), 6);
    Procedure p;
    p.name = "P";
    p.scope = {star("T")};
    p.preserve = {TotalQuery{"T"}};
    p.post = {gen::full_tgd(rng, s, {"R", "S"}, {"T"}, 2, true)};
    auto t = chase_conditional(ConditionalInstance::ground(i), p);
    EXPECT_EQ(t, ConditionalInstance::ground(chase_full(i, post_tgds(p))));
  }
}

TEST(ChaseConditional, ExistentialOnNull) {
  Schema s{{"R", {"A"}}, {"T", {"A", "B"}}};
  ConditionalInstance t(s);
  t.add("R", Tuple{n(1)}, Condition::always());
  Procedure p;
  p.scope = {star("T")};
  p.preserve = {TotalQuery{"T"}};
  p.post = {Tgd{{fx::un("R", "A", var("x"))}, {atom("T", {{"A", var("x")}, {"B", var("z")}})}}};
  auto out = chase_conditional(t, p);
  ASSERT_EQ(out.rows("T").size(), 1u);
  const auto& [row, cond] = *out.rows("T").begin();
  EXPECT_EQ(row[0], n(1));
  EXPECT_TRUE(row[1].is_null());
  EXPECT_NE(row[1], n(1));
  EXPECT_TRUE(cond.is_true());
}

TEST(ChaseConditional, MergeEmitsConditionedTuple) {
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A"}}};
  ConditionalInstance t(s);
  t.add("R", Tuple{val("a")}, Condition::always());
  t.add("S", Tuple{n(1)}, Condition::always());
  Procedure p;
  p.scope = {star("T")};
  p.preserve = {TotalQuery{"T"}};
  p.post = {Tgd{{fx::un("R", "A", var("x")), fx::un("S", "A", var("x"))}, {fx::un("T", "A", var("x"))}}};
  auto out = chase_conditional(t, p);
  ASSERT_EQ(out.rows("T").size(), 1u);
  EXPECT_EQ(out.rows("T").begin()->first, Tuple{val("a")});
  EXPECT_EQ(out.rows("T").begin()->second, Condition::of({eq_lit(n(1), val("a"))}));
  EXPECT_TRUE(out.positive());
}

TEST(ExtendSchema, PadsWithDistinctNulls) {
  auto t = ConditionalInstance::ground(fx::visits_i());
  auto r = extend_schema_conditional(t, fx::alter("P_alter", "LocVisits", {"insId"}));
  ASSERT_EQ(r.status, CondStatus::Ok);
  std::set<Value> seen;
  int pos = r.table.schema().position("LocVisits", "insId");
  ASSERT_GE(pos, 0);
  for (const auto& [row, c] : r.table.rows("LocVisits")) {
    EXPECT_TRUE(row[static_cast<std::size_t>(pos)].is_null());
    seen.insert(row[static_cast<std::size_t>(pos)]);
  }
  EXPECT_EQ(seen.size(), 2u);
}

TEST(ExtendSchema, NewRelationStartsEmpty) {
  Procedure p;
  p.post = {structure("N", {"A"})};
  auto r = extend_schema_conditional(ConditionalInstance::ground(fx::visits_i()), p);
  ASSERT_EQ(r.status, CondStatus::Ok);
  EXPECT_TRUE(r.table.rows("N").empty());
}

TEST(OutcomesCondtab, SafeScopeFullIsIteratedChase) {
  std::mt19937 rng(61);
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A"}}};
  for (int trial = 0; trial < 50; ++trial) {
    Instance i = gen::instance(rng, s, gen::values(3), 5);
    std::vector<Procedure> ps{fx::copy_proc("P1", "R", "S"), fx::copy_proc("P2", "S", "T")};
    auto r = outcomes_condtab(i, ps);
    ASSERT_EQ(r.status, CondStatus::Ok);
    auto want = chase_full(chase_full(i, post_tgds(ps[0])), post_tgds(ps[1]));
    EXPECT_EQ(r.table, ConditionalInstance::ground(want));
  }
}

TEST(OutcomesCondtab, EmptySequence) {
  auto i = fx::visits_i();
  EXPECT_EQ(outcomes_condtab(i, {}).table, ConditionalInstance::ground(i));
}

TEST(OutcomesCondtab, EgdProcedureUnsupported) {
  Procedure p;
  p.post = {Egd{{fx::un("R", "A", var("x"))}, "x", "x"}};
  EXPECT_THROW(outcomes_condtab(Instance(Schema{{"R", {"A"}}}), {p}), Unsupported);
}

TEST(CertainBoolean, Examples) {
  auto i = fx::visits_i();
  auto r = outcomes_condtab(i, {fx::migrate_safe()});
  EXPECT_TRUE(certain_boolean(r.table, cq_boolean(fx::visit_atom("LocVisits", "x", "y", "z"))));
  auto alt = outcomes_condtab(i, {fx::alter("P_alter", "LocVisits", {"insId"})});
  auto q = cq_boolean({atom("LocVisits", {{"pId", var("x")}, {"insId", var("y")}})});
  EXPECT_TRUE(certain_boolean(alt.table, q));
  EXPECT_FALSE(certain_boolean(alt.table, cq_boolean({fx::un("Nope", "A", var("x"))})));
  // Oracle: every bounded dynamic outcome satisfies q.
  Schema small{{"LocVisits", {"pId"}}};
  Instance si(small);
  si.insert("LocVisits", Tuple{val(1)});
  UniverseBound u = universe_for(si, 1);
  u.max_extra_attrs = 1;
  u.max_extra_tuples = 1;
  auto outs = enumerate_outcomes(si, fx::alter("P_alter", "LocVisits", {"insId"}), u, Semantics::Dynamic);
  ASSERT_FALSE(outs.empty());
  EXPECT_TRUE(oracle_certain(outs, q).holds);
}

TEST(CertainBoolean, DroppedConditionedTuples) {
  ConditionalInstance t(Schema{{"R", {"A"}}});
  t.add("R", Tuple{val(1)}, Condition::of({eq_lit(n(1), val(1))}));
  EXPECT_FALSE(certain_boolean(t, cq_boolean({fx::un("R", "A", var("x"))})));
}

TEST(OutcomesCondtab, AgreesWithOracleOnSmallSequences) {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = dyncheck::random_case(rng);
    auto v = dyncheck::check(c);
    EXPECT_TRUE(v.ok) << v.why << " :: " << dyncheck::describe(c);
  }
}

TEST(CertainBoolean, SoundAgainstOracle) {
  std::mt19937 rng(81);
  for (int trial = 0; trial < 25; ++trial) {
    auto c = dyncheck::random_case(rng);
    auto res = outcomes_condtab(c.input, c.procs);
    if (res.status != CondStatus::Ok) continue;
    auto outs = enumerate_outcomes_seq(c.input, c.procs, dyncheck::bound_for(c), Semantics::Dynamic);
    for (const RelName r : {"R", "S", "T"}) {
      auto q = cq_boolean({fx::un(r, "A", var("x"))});
      bool cert = certain_boolean(res.table, q);
      auto o = oracle_certain(outs, q);
      if (cert) EXPECT_TRUE(o.holds) << r << " :: " << dyncheck::describe(c);
      if (!cert && !o.vacuous) EXPECT_FALSE(o.holds) << r << " :: " << dyncheck::describe(c);
    }
  }
}
