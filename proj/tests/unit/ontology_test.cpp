#include <gtest/gtest.h>

#include "relcompose/ontology.hpp"

namespace relcompose {
namespace {

Ontology travel() {
  Ontology o;
  o.add_concept("Thing", std::nullopt);
  o.add_concept("Person", "Thing");
  o.add_concept("University", "Thing");
  o.add_concept("City", "Thing");
  o.add_concept("Capital", "City");
  o.add_relation_type("isEmployeeOf", false, false);
  o.add_relation_type("hasDestination", false, false);
  o.add_relation_type("isLocatedIn", true, false);
  return o;
}

OntologyDraft travel_draft() { return travel().to_draft(); }

TEST(Ontology, AddConceptUnderParent) {
  Ontology o;
  const auto root = o.add_concept("Thing", std::nullopt);
  const auto person = o.add_concept("Person", "Thing");
  EXPECT_EQ(o.concept_info(person).parent, root);
  EXPECT_FALSE(o.concept_info(root).parent.valid());
  EXPECT_EQ(o.root(), root);
  EXPECT_EQ(o.concept_info(person).depth, 1u);
}

TEST(Ontology, SecondRootRejected) {
  Ontology o;
  o.add_concept("Thing", std::nullopt);
  EXPECT_THROW(o.add_concept("Thing", std::nullopt), Error);
  EXPECT_THROW(o.add_concept("Other", std::nullopt), Error);
}

TEST(Ontology, DuplicateAndUnknownParentRejected) {
  Ontology o;
  o.add_concept("Thing", std::nullopt);
  o.add_concept("Person", "Thing");
  EXPECT_THROW(o.add_concept("Person", "Thing"), Error);
  EXPECT_THROW(o.add_concept("Student", "Nobody"), Error);
}

TEST(Ontology, SubTypes) {
  Ontology o;
  o.add_concept("Thing", std::nullopt);
  o.add_concept("Person", "Thing");
  EXPECT_EQ(o.sub_types("Thing"), (std::set<std::string>{"Thing", "Person"}));
  EXPECT_EQ(o.sub_types("Person"), (std::set<std::string>{"Person"}));
}

TEST(Ontology, SubsumptionIsReflexiveAndDirected) {
  const auto o = travel();
  EXPECT_TRUE(o.is_subtype_of("Person", "Thing"));
  EXPECT_TRUE(o.is_subtype_of("City", "City"));
  EXPECT_TRUE(o.is_subtype_of("Capital", "Thing"));
  EXPECT_FALSE(o.is_subtype_of("Thing", "Person"));
  EXPECT_FALSE(o.is_subtype_of("Capital", "Person"));
}

TEST(Ontology, AncestorsUpToRoot) {
  const auto o = travel();
  const auto chain = o.ancestors(o.concept_id("Capital"));
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(o.concept_name(chain[0]), "City");
  EXPECT_EQ(o.concept_name(chain[1]), "Thing");
}

TEST(Ontology, RelationFlags) {
  const auto o = travel();
  const auto& r = o.relation(o.relation_id("isLocatedIn"));
  EXPECT_TRUE(r.transitive);
  EXPECT_FALSE(r.symmetric);
  EXPECT_FALSE(o.find_relation("nothing").has_value());
  EXPECT_THROW(o.relation_id("nothing"), Error);
}

TEST(Ontology, MotivatingDraftIsValid) {
  auto d = travel_draft();
  d.rules.push_back({"locatedAtWorkRule",
                     {"X", "Y", "Z"},
                     {{"isEmployeeOf", "X", "Y"}, {"isLocatedIn", "Y", "Z"}},
                     {{"isLocatedIn", "X", "Z"}}});
  EXPECT_TRUE(validate_ontology(d).empty());
  const auto o = Ontology::from_draft(d);
  ASSERT_EQ(o.rules().size(), 1u);
  const auto& r = o.rules()[0];
  EXPECT_EQ(r.premise.size(), 2u);
  EXPECT_EQ(r.premise[1].source, 1u);
  EXPECT_EQ(r.premise[1].target, 2u);
}

TEST(Ontology, RuleWithUnknownRelationGivesOneDiagnostic) {
  auto d = travel_draft();
  d.rules.push_back({"r", {"X", "Y"}, {{"worksFor", "X", "Y"}}, {{"isLocatedIn", "X", "Y"}}});
  EXPECT_EQ(validate_ontology(d).size(), 1u);
  EXPECT_THROW(Ontology::from_draft(d), OntologyError);
}

TEST(Ontology, CyclicParentChainGivesOneDiagnostic) {
  OntologyDraft d;
  d.concepts = {{"Thing", std::nullopt}, {"A", "B"}, {"B", "A"}};
  const auto diags = validate_ontology(d);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("cycl"), std::string::npos);
}

TEST(Ontology, RuleVariableOnlyInConclusionIsIllFormed) {
  auto d = travel_draft();
  d.rules.push_back({"r", {"X", "Y", "W"}, {{"isLocatedIn", "X", "Y"}}, {{"isLocatedIn", "X", "W"}}});
  EXPECT_FALSE(validate_ontology(d).empty());
}

TEST(Ontology, RuleWithoutConclusionIsIllFormed) {
  auto d = travel_draft();
  d.rules.push_back({"r", {"X", "Y"}, {{"isLocatedIn", "X", "Y"}}, {}});
  EXPECT_FALSE(validate_ontology(d).empty());
}

TEST(Ontology, DraftRoundTrip) {
  const auto d = travel_draft();
  EXPECT_EQ(Ontology::from_draft(d).to_draft(), d);
}

}  // namespace
}  // namespace relcompose
