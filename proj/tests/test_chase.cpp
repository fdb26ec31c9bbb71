#include <gtest/gtest.h>

#include <algorithm>

#include "brute.hpp"
#include "chasemith/chase.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace chasemith;

TEST(ChaseFull, MigrateYieldsJ1) {
  EXPECT_EQ(chase_full(fx::visits_i(), {fx::migrate_tgd()}), fx::visits_j1());
}

TEST(ChaseFull, FixpointUnchanged) {
  auto j = fx::visits_j1();
  EXPECT_EQ(chase_full(j, {fx::migrate_tgd()}), j);
}

TEST(ChaseFull, TwoStepClosure) {
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A"}}};
  Instance i(s);
  i.insert("R", Tuple{val(1)});
  auto out = chase_full(i, {fx::unary("R", "T"), fx::unary("T", "S")});
  Instance want(s);
  for (const std::string r : {"R", "S", "T"}) want.insert(r, Tuple{val(1)});
  EXPECT_EQ(out, want);
  // Oracle: the result is the least model among all subsets of {R,S,T}x{1} containing i.
  std::vector<std::pair<RelName, Tuple>> cands{{"S", {val(1)}}, {"T", {val(1)}}};
  int models = 0;
  brute::supersets(i, cands, [&](const Instance& j) {
    if (brute::satisfies(j, fx::unary("R", "T")) && brute::satisfies(j, fx::unary("T", "S"))) {
      ++models;
      EXPECT_TRUE(is_subinstance(out, j));
    }
  });
  EXPECT_EQ(models, 1);
}

TEST(ChaseFull, RejectsExistentials) {
  Schema s{{"R", {"A"}}, {"T", {"A", "B"}}};
  Tgd t{{fx::un("R", "A", var("x"))}, {atom("T", {{"A", var("x")}, {"B", var("z")}})}};
  EXPECT_THROW(chase_full(Instance(s), {t}), Error);
  Tgd partial{{fx::un("R", "A", var("x"))}, {fx::un("T", "A", var("x"))}};
  EXPECT_THROW(chase_full(Instance(s), {partial}), Error);
}

namespace {

Schema insur_schema() {
  return Schema{{"Patients", {"pId", "insId"}}, {"LocVisits", {"pId", "insId"}}};
}

Egd insur_egd() {
  return Egd{{atom("Patients", {{"pId", var("x")}, {"insId", var("y")}}),
              atom("LocVisits", {{"pId", var("x")}, {"insId", var("z")}})},
             "y",
             "z"};
}

}  // namespace

TEST(ChaseStandard, EgdUnifiesNull) {
  Instance i(insur_schema());
  i.insert("Patients", Tuple{val("INS1"), val(33)});
  i.insert("LocVisits", Tuple{Value::make_null(1), val(33)});
  auto r = chase_standard(i, {insur_egd()});
  ASSERT_EQ(r.status, ChaseStatus::Success);
  EXPECT_TRUE(r.instance.contains("LocVisits", Tuple{val("INS1"), val(33)}));
  EXPECT_TRUE(r.instance.nulls().empty());
}

TEST(ChaseStandard, EgdConstantClash) {
  Instance i(insur_schema());
  i.insert("Patients", Tuple{val("INS1"), val(33)});
  i.insert("LocVisits", Tuple{val("INS2"), val(33)});
  EXPECT_EQ(chase_standard(i, {insur_egd()}).status, ChaseStatus::EgdFailure);
}

TEST(ChaseStandard, ExistentialGetsFreshNull) {
  Schema s{{"R", {"A"}}, {"T", {"A", "B"}}};
  Instance i(s);
  i.insert("R", Tuple{val(1)});
  Tgd t{{fx::un("R", "A", var("x"))}, {atom("T", {{"A", var("x")}, {"B", var("z")}})}};
  auto r = chase_standard(i, {t});
  ASSERT_EQ(r.status, ChaseStatus::Success);
  ASSERT_EQ(r.instance.rows("T").size(), 1u);
  const auto& row = *r.instance.rows("T").begin();
  EXPECT_EQ(row[0], val(1));
  EXPECT_TRUE(row[1].is_null());
  EXPECT_TRUE(satisfies_dependency(r.instance, t));
  // Oracle: the null may be read as any value; every such reading is a model.
  for (const auto& v : gen::values(3)) {
    Instance g(s);
    g.insert("R", Tuple{val(1)});
    g.insert("T", Tuple{val(1), v});
    EXPECT_TRUE(brute::satisfies(g, t));
  }
}

TEST(ChaseStandard, StepLimitIsReported) {
  Schema s{{"R", {"A", "B"}}};
  Instance i(s);
  i.insert("R", Tuple{val(1), val(2)});
  Tgd t{{atom("R", {{"A", var("x")}, {"B", var("y")}})}, {atom("R", {{"A", var("y")}, {"B", var("z")}})}};
  auto r = chase_standard(i, {t}, 50);
  EXPECT_EQ(r.status, ChaseStatus::StepLimitExceeded);
  EXPECT_EQ(r.steps.size(), 50u);
}

TEST(FireOrder, DependencyIdFirst) {
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A"}}};
  Instance i(s);
  i.insert("R", Tuple{val(1)});
  i.insert("S", Tuple{val(1)});
  auto order = fire_order({fx::unary("S", "T"), fx::unary("R", "T")}, i);
  ASSERT_EQ(order.size(), 2u);
  EXPECT_EQ(order[0].dep, 0u);
  EXPECT_EQ(order[1].dep, 1u);
}

TEST(FireOrder, LexicographicAssignments) {
  Schema s{{"R", {"A"}}, {"T", {"A"}}};
  Instance i(s);
  i.insert("R", Tuple{val(2)});
  i.insert("R", Tuple{val(1)});
  auto order = fire_order({fx::unary("R", "T")}, i);
  ASSERT_EQ(order.size(), 2u);
  EXPECT_EQ(order[0].values, (std::vector<Value>{val(1)}));
  EXPECT_EQ(order[1].values, (std::vector<Value>{val(2)}));
}

TEST(ChaseStandard, ReplayReproducesOutput) {
  std::mt19937 rng(404);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}, {"T", {"A", "B"}}};
  auto dom = gen::values(3);
  for (int trial = 0; trial < 100; ++trial) {
    Instance i = gen::instance(rng, s, dom, 5);
    std::vector<DataDependency> deps;
    deps.push_back(Tgd{{fx::un("S", "A", var("x"))}, {atom("T", {{"A", var("x")}, {"B", var("z")}})}});
    deps.push_back(gen::full_tgd(rng, s, {"R", "T"}, {"S"}, 2, true));
    deps.push_back(Egd{{atom("T", {{"A", var("x")}, {"B", var("y")}}), atom("R", {{"A", var("x")}, {"B", var("w")}})}, "y", "w"});
    auto r = chase_standard(i, deps, 200);
    EXPECT_EQ(replay(i, deps, r.steps), r.instance);
    auto again = chase_standard(i, deps, 200);
    EXPECT_EQ(again.instance, r.instance);
    EXPECT_EQ(again.steps, r.steps);
    if (r.status == ChaseStatus::Success)
      for (const auto& d : deps) EXPECT_TRUE(std::visit([&](const auto& x) { return satisfies_dependency(r.instance, x); }, d));
  }
}

namespace {

std::vector<Tgd> random_acyclic_full(std::mt19937& rng, const Schema& s, int n) {
  // Relations ordered R < S < T < U; tgds only point forward.
  std::vector<RelName> order{"R", "S", "T", "U"};
  std::vector<Tgd> g;
  for (int k = 0; k < n; ++k) {
    std::size_t cut = 1 + gen::pick(rng, order.size() - 1);
    std::vector<RelName> from(order.begin(), order.begin() + static_cast<long>(cut));
    std::vector<RelName> to(order.begin() + static_cast<long>(cut), order.end());
    g.push_back(gen::full_tgd(rng, s, from, to, 2, true));
  }
  return g;
}

}  // namespace

TEST(ChaseFull, Properties) {
  std::mt19937 rng(505);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}, {"T", {"A", "B"}}, {"U", {"A"}}};
  auto dom = gen::values(2);
  for (int trial = 0; trial < 150; ++trial) {
    Instance i = gen::instance(rng, s, dom, 8);
    auto g = random_acyclic_full(rng, s, 1 + static_cast<int>(gen::pick(rng, 5)));
    Instance c = chase_full(i, g);
    for (const auto& t : g) EXPECT_TRUE(brute::satisfies(c, t)) << t.str();
    EXPECT_EQ(chase_full(c, g), c);
    auto rev = g;
    std::reverse(rev.begin(), rev.end());
    EXPECT_EQ(chase_full(i, rev), c);
    EXPECT_TRUE(is_subinstance(i, c));
  }
}

TEST(ChaseFull, LeastModelAgainstEnumeration) {
  std::mt19937 rng(606);
  Schema s{{"R", {"A"}}, {"S", {"A"}}, {"T", {"A", "B"}}, {"U", {"A"}}};
  auto dom = gen::values(2);
  for (int trial = 0; trial < 60; ++trial) {
    Instance i = gen::instance(rng, s, dom, 4);
    auto g = random_acyclic_full(rng, s, 1 + static_cast<int>(gen::pick(rng, 3)));
    Instance c = chase_full(i, g);
    std::vector<std::pair<RelName, Tuple>> cands;
    for (const auto& [r, _] : s.relations())
      for (const auto& t : brute::all_tuples(s, r, dom))
        if (!i.contains(r, t)) cands.push_back({r, t});
    brute::supersets(i, cands, [&](const Instance& j) {
      bool model = std::all_of(g.begin(), g.end(), [&](const Tgd& t) { return brute::satisfies(j, t); });
      if (model) EXPECT_TRUE(is_subinstance(c, j));
    });
  }
}
