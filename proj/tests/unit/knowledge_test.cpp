#include <gtest/gtest.h>

#include "oracles.hpp"
#include "relcompose/knowledge.hpp"

namespace relcompose {
namespace {

class KnowledgeTest : public ::testing::Test {
 protected:
  static Ontology make() {
    Ontology o;
    o.add_concept("Thing", std::nullopt);
    o.add_concept("Person", "Thing");
    o.add_concept("University", "Thing");
    o.add_concept("City", "Thing");
    o.add_relation_type("isEmployeeOf", false, false);
    o.add_relation_type("isLocatedIn", true, false);
    o.add_relation_type("near", false, true);
    o.add_relation_type("r", true, false);
    return o;
  }

  ObjectId add(std::string_view type, std::string producer, std::string param, std::uint32_t call) {
    return kb.add_object(type, Provenance{std::move(producer), std::move(param), call}).first;
  }

  Ontology onto = make();
  Knowledge kb{onto};
};

TEST_F(KnowledgeTest, ObjectNamesFollowProvenance) {
  const auto city = add("City", "getUniversityLocation", "city", 1);
  EXPECT_EQ(kb.object(city).name, "getUniversityLocation.city.1");
  const auto second = add("City", "getUniversityLocation", "city", 2);
  EXPECT_EQ(kb.object(second).name, "getUniversityLocation.city.2");
  EXPECT_NE(city, second);
  EXPECT_EQ(kb.find_object("getUniversityLocation.city.2"), second);
  EXPECT_EQ(kb.object_count(), 2u);
}

TEST_F(KnowledgeTest, SingleTransitiveEdgeAddsOnlyItself) {
  const auto u = add("University", "query", "univ1", 0);
  const auto c = add("City", "s", "city", 1);
  const auto added = kb.add_relation("isLocatedIn", u, c);
  EXPECT_EQ(added.size(), 1u);
  EXPECT_TRUE(kb.add_relation("isLocatedIn", u, c).empty());
  EXPECT_EQ(kb.fact_count(), 1u);
}

TEST_F(KnowledgeTest, TransitiveInsertExtendsChain) {
  const auto a = add("Thing", "q", "a", 0);
  const auto b = add("Thing", "q", "b", 0);
  const auto c = add("Thing", "q", "c", 0);
  kb.add_relation("r", a, b);
  const auto added = kb.add_relation("r", b, c);
  EXPECT_EQ(added.size(), 2u);
  EXPECT_TRUE(kb.has_relation("r", a, c));
  const auto& f = kb.triple(*kb.find_triple(onto.relation_id("r"), a, c));
  EXPECT_TRUE(f.derived);
}

TEST_F(KnowledgeTest, SymmetricInsertAddsReverse) {
  const auto a = add("Thing", "q", "a", 0);
  const auto b = add("Thing", "q", "b", 0);
  kb.add_relation("near", a, b);
  EXPECT_TRUE(kb.has_relation("near", b, a));
  EXPECT_EQ(kb.fact_count(), 2u);
}

TEST_F(KnowledgeTest, HasRelationOnEmptyKnowledge) {
  const auto a = add("Thing", "q", "a", 0);
  EXPECT_FALSE(kb.has_relation("isLocatedIn", a, a));
}

TEST_F(KnowledgeTest, ObjectsOfTypesIncludesSubtypes) {
  const auto u1 = add("University", "q", "univ1", 0);
  const auto u2 = add("University", "q", "univ2", 0);
  add("Person", "q", "pers", 0);
  EXPECT_EQ(kb.objects_of_types(std::set<std::string>{"University"}), (std::vector<ObjectId>{u1, u2}));
  EXPECT_TRUE(kb.objects_of_types(std::set<std::string>{}).empty());
  EXPECT_EQ(kb.objects_subsumed_by(onto.concept_id("Thing")).size(), 3u);
}

TEST_F(KnowledgeTest, DedupMergesIdenticalContext) {
  const auto u = add("University", "q", "univ", 0);
  const auto city1 = add("City", "s", "city", 1);
  kb.add_relation("isLocatedIn", u, city1);
  const auto city2 = add("City", "s", "city", 2);
  kb.add_relation("isLocatedIn", u, city2);
  const std::vector<ObjectId> fresh{city2};
  const auto merged = kb.dedup_new_objects(fresh);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.at(city2), city1);
  EXPECT_FALSE(kb.is_live(city2));
  EXPECT_EQ(kb.object_count(), 2u);
}

TEST_F(KnowledgeTest, DedupKeepsObjectWithDifferentPeer) {
  const auto home = add("University", "q", "homeUniv", 0);
  const auto foreign = add("University", "q", "foreignUniv", 0);
  const auto c1 = add("City", "s", "city", 1);
  kb.add_relation("isLocatedIn", home, c1);
  const auto c2 = add("City", "s", "city", 2);
  kb.add_relation("isLocatedIn", foreign, c2);
  const std::vector<ObjectId> fresh{c2};
  EXPECT_TRUE(kb.dedup_new_objects(fresh).empty());
  EXPECT_TRUE(kb.is_live(c2));
}

TEST_F(KnowledgeTest, DedupAmongNewObjectsKeepsFirst) {
  const auto u = add("University", "q", "univ", 0);
  const auto a = add("City", "s", "a", 1);
  const auto b = add("City", "s", "b", 1);
  kb.add_relation("isLocatedIn", u, a);
  kb.add_relation("isLocatedIn", u, b);
  const std::vector<ObjectId> fresh{a, b};
  const auto merged = kb.dedup_new_objects(fresh);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.at(b), a);
}

TEST_F(KnowledgeTest, TypeLevelDedupIsCoarser) {
  const auto home = add("University", "q", "homeUniv", 0);
  const auto foreign = add("University", "q", "foreignUniv", 0);
  const auto c1 = add("City", "s", "city", 1);
  kb.add_relation("isLocatedIn", home, c1);
  const auto c2 = add("City", "s", "city", 2);
  kb.add_relation("isLocatedIn", foreign, c2);
  const std::vector<ObjectId> fresh{c2};
  const auto merged = kb.dedup_new_objects(fresh, DedupMode::type_level);
  ASSERT_EQ(merged.size(), 1u);
  // The survivor takes over the merged object's facts.
  EXPECT_TRUE(kb.has_relation("isLocatedIn", foreign, c1));
}

TEST_F(KnowledgeTest, DeadIdsAreContractViolations) {
  EXPECT_THROW(kb.add_relation("isLocatedIn", ObjectId(7), ObjectId(8)), Error);
  const auto a = add("Thing", "q", "a", 0);
  EXPECT_THROW(kb.add_relation("unknown", a, a), Error);
  EXPECT_THROW(kb.add_object("Unicorn", Provenance{"q", "u", 0}), Error);
}

TEST(MatchHash, OrderSensitiveAndDeterministic) {
  const std::vector<ObjectId> ab{ObjectId(1), ObjectId(2)};
  const std::vector<ObjectId> ba{ObjectId(2), ObjectId(1)};
  const std::vector<ObjectId> empty;
  EXPECT_NE(match_hash(ab), match_hash(ba));
  EXPECT_EQ(match_hash(ab), match_hash(std::vector<ObjectId>(ab)));
  EXPECT_EQ(match_hash(empty), match_hash(std::vector<ObjectId>{}));
  EXPECT_NE(match_hash(empty), match_hash(ab));
}

TEST_F(KnowledgeTest, ClosureMatchesOracleOnPath) {
  std::vector<ObjectId> v;
  for (std::uint32_t i = 0; i < 5; ++i) v.push_back(add("Thing", "q", "n" + std::to_string(i), 0));
  // Inserted out of order on purpose.
  const auto r = onto.relation_id("r");
  kb.add_relation(r, v[2], v[3]);
  kb.add_relation(r, v[0], v[1]);
  kb.add_relation(r, v[3], v[4]);
  kb.add_relation(r, v[1], v[2]);
  std::set<oracle::Edge> raw{{r.value, 2, 3}, {r.value, 0, 1}, {r.value, 3, 4}, {r.value, 1, 2}};
  const std::vector<bool> sym{false, false, true, false}, trans{false, true, false, true};
  EXPECT_EQ(oracle::knowledge_edges(kb), oracle::closure(raw, 5, sym, trans));
  EXPECT_EQ(kb.fact_count(), 10u);
}

}  // namespace
}  // namespace relcompose
