#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace chasemith;

TEST(SchemaExtends, Reflexive) {
  auto s = fx::visits_schema();
  EXPECT_TRUE(schema_extends(s, s));
}

TEST(SchemaExtends, ExtraAttribute) {
  Schema s1{{"LocVisits", {"facility", "pId", "timestp"}}};
  Schema s2{{"LocVisits", {"facility", "pId", "timestp", "age"}}};
  EXPECT_TRUE(schema_extends(s2, s1));
  EXPECT_FALSE(schema_extends(s1, s2));
}

TEST(SchemaExtends, MissingRelation) {
  EXPECT_FALSE(schema_extends(Schema{{"T", {"A"}}}, Schema{{"R", {"A"}}}));
}

TEST(Schema, AttributesFollowByteOrder) {
  Schema s{{"R", {"b", "B", "a", "b"}}};
  EXPECT_EQ(s.attrs("R"), (std::vector<AttrName>{"B", "a", "b"}));
  EXPECT_EQ(s.position("R", "a"), 1);
  EXPECT_EQ(s.position("R", "z"), -1);
}

TEST(InstanceExtends, Reflexive) {
  auto i = fx::visits_i();
  EXPECT_TRUE(instance_extends(i, i));
}

TEST(InstanceExtends, AgeColumn) {
  auto i = fx::visits_i();
  EXPECT_TRUE(instance_extends(fx::visits_j3(), i));
  EXPECT_FALSE(instance_extends(i, fx::visits_j3()));
}

TEST(InstanceExtends, MissingTuple) {
  Schema s{{"R", {"A"}}};
  Instance i(s), j(s);
  i.insert("R", Tuple{val(1)});
  EXPECT_FALSE(instance_extends(j, i));
  EXPECT_TRUE(instance_extends(i, j));
}

TEST(Project, FacilityColumn) {
  auto p = project(fx::visits_j1(), "LocVisits", {"facility"});
  EXPECT_EQ(p, (std::set<Tuple>{{val(1234)}, {val(1222)}, {val(2087)}}));
}

TEST(Project, AllAttributesIsIdentity) {
  auto j = fx::visits_j2();
  EXPECT_EQ(project(j, "LocVisits", j.schema().attrs("LocVisits")), j.rows("LocVisits"));
}

TEST(Project, DuplicateElimination) {
  Schema s{{"R", {"A", "B"}}};
  Instance i(s);
  i.insert("R", Tuple{val(1), val(2)});
  i.insert("R", Tuple{val(1), val(3)});
  EXPECT_EQ(project(i, "R", {"A"}), (std::set<Tuple>{{val(1)}}));
}

TEST(Project, UnknownAttributeIsError) {
  EXPECT_THROW(project(fx::visits_i(), "LocVisits", {"age"}), Error);
  EXPECT_THROW(project(fx::visits_i(), "Nope", {"age"}), Error);
}

TEST(Value, IntegerAndStringShareCanonicalText) {
  EXPECT_EQ(val(33), val("33"));
  EXPECT_LT(val("a"), Value::make_null(1));
}

namespace {

Instance random_instance(std::mt19937& rng, const Schema& s, int max_tuples) {
  Instance i(s);
  std::uniform_int_distribution<int> v(0, 2), n(0, max_tuples);
  int k = n(rng);
  for (int t = 0; t < k; ++t) {
    const auto& rels = s.relations();
    auto it = rels.begin();
    std::advance(it, static_cast<long>(rng() % rels.size()));
    Tuple row;
    for (std::size_t a = 0; a < it->second.size(); ++a) row.push_back(val(v(rng)));
    i.insert(it->first, row);
  }
  return i;
}

}  // namespace

TEST(InstanceExtends, PartialOrderOnRandomInstances) {
  std::mt19937 rng(7);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}};
  std::vector<Instance> pool;
  for (int k = 0; k < 40; ++k) pool.push_back(random_instance(rng, s, 4));
  for (const auto& a : pool) {
    EXPECT_TRUE(instance_extends(a, a));
    for (const auto& b : pool) {
      if (instance_extends(a, b) && instance_extends(b, a)) EXPECT_EQ(a, b);
      for (const auto& c : pool)
        if (instance_extends(a, b) && instance_extends(b, c)) EXPECT_TRUE(instance_extends(a, c));
    }
  }
}

TEST(Project, Monotone) {
  std::mt19937 rng(11);
  Schema s{{"R", {"A", "B"}}, {"S", {"A"}}};
  for (int k = 0; k < 60; ++k) {
    Instance a = random_instance(rng, s, 4);
    Instance b = a;
    Instance extra = random_instance(rng, s, 3);
    for (const auto& [r, rows] : extra.data())
      for (const auto& t : rows) b.insert(r, t);
    auto pa = project(a, "R", {"B"});
    auto pb = project(b, "R", {"B"});
    EXPECT_TRUE(std::includes(pb.begin(), pb.end(), pa.begin(), pa.end()));
  }
}
