#include "gen.hpp"

#include <aporia/distance.hpp>
#include <aporia/error.hpp>

#include <gtest/gtest.h>

#include <algorithm>

namespace {

using namespace aporia;
using namespace aporia::distance;
using aporia::testing::fixture;
using aporia::testing::Gen;

const DistanceSpec abs_spec{DistanceKind::NumericAbs};
const DistanceSpec rel_spec{DistanceKind::NumericRelative};
const DistanceSpec tok_spec{DistanceKind::TokenSimilarity};

TEST(TheoryDistance, BelowThresholdGivesCost)
{
    const knowledge::Theory t{"phi", {}, {}, 0.4};
    const knowledge::KnowledgeBase kb("k", 0.7, {t}, {{"", "x"}});
    const auto r = theory_distance(t, kb);
    EXPECT_EQ(r.pi, 0.4);
    EXPECT_TRUE(r.normalized);
    EXPECT_EQ(r.decomposition.gamma, 0.4);
    EXPECT_EQ(r.decomposition.threshold, 0.7);
}

TEST(TheoryDistance, AboveThresholdGivesZero)
{
    const knowledge::Theory t{"phi", {}, {}, 0.9};
    EXPECT_EQ(theory_distance(t, knowledge::KnowledgeBase("k", 0.7, {t}, {{"", "x"}})).pi, 0.0);
}

TEST(TheoryDistance, AtThresholdGivesZero)
{
    const knowledge::Theory t{"phi", {}, {}, 0.7};
    EXPECT_EQ(theory_distance(t, knowledge::KnowledgeBase("k", 0.7, {t}, {{"", "x"}})).pi, 0.0);
}

TEST(TheoryDistance, TheoryOutsideKbThrows)
{
    const knowledge::Theory t{"phi", {}, {}, 0.3};
    EXPECT_THROW(theory_distance(t, knowledge::KnowledgeBase("k", 0.7, {}, {{"", "x"}})), Error);
}

TEST(AnswerDistance, BalanceExample)
{
    const auto r = answer_distance(100000.0 - 100.0, 0.0, abs_spec);
    EXPECT_EQ(r.pi, 99900.0);
    EXPECT_FALSE(r.normalized);
}

TEST(AnswerDistance, DineVersusDefecate)
{
    // tokens {they, dine, convivially} and {they, defecate, convivially}: 2 shared of 4.
    EXPECT_DOUBLE_EQ(answer_distance(std::string("they dine convivially"), std::string("they defecate convivially"),
                                     tok_spec)
                         .pi,
                     0.5);
}

TEST(AnswerDistance, ScreamAnswers)
{
    EXPECT_NEAR(answer_distance(std::string("yes somewhere outside"), std::string("yes hidden inside the house"),
                                tok_spec)
                    .pi,
                1.0 - 1.0 / 7.0, 1e-12);
}

TEST(AnswerDistance, IdentityIsZeroForEveryKind)
{
    EXPECT_EQ(answer_distance(3.5, 3.5, abs_spec).pi, 0.0);
    EXPECT_EQ(answer_distance(-2.0, -2.0, rel_spec).pi, 0.0);
    EXPECT_EQ(answer_distance(std::string("Same text"), std::string("Same text"), tok_spec).pi, 0.0);
    EXPECT_EQ(answer_distance(std::string(""), std::string(""), tok_spec).pi, 0.0);
}

TEST(AnswerDistance, RelativeFormula)
{
    EXPECT_DOUBLE_EQ(answer_distance(50.0, 40.0, rel_spec).pi, 0.2);
    EXPECT_DOUBLE_EQ(answer_distance(0.5, 0.0, rel_spec).pi, 0.5);   // max(|r|, |r'|, 1) = 1
    EXPECT_EQ(answer_distance(-10.0, 10.0, rel_spec).pi, 1.0);   // opposite signs clamp
}

TEST(AnswerDistance, TypeMismatchThrows)
{
    try {
        answer_distance(std::string("ten"), 10.0, abs_spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::type_mismatch);
    }
    EXPECT_THROW(answer_distance(1.0, 2.0, tok_spec), Error);
}

TEST(Spec, KindNamesAreBitExact)
{
    for (auto kind : {DistanceKind::NumericAbs, DistanceKind::NumericRelative, DistanceKind::TokenSimilarity,
                      DistanceKind::TheoryCost}) {
        EXPECT_EQ(distance_kind_from_string(to_string(kind)), kind);
    }
    EXPECT_EQ(to_string(DistanceKind::NumericAbs), "numeric_abs");
    EXPECT_EQ(to_string(DistanceKind::NumericRelative), "numeric_rel");
    EXPECT_EQ(to_string(DistanceKind::TokenSimilarity), "token_similarity");
    EXPECT_EQ(to_string(DistanceKind::TheoryCost), "theory_cost");
    EXPECT_THROW(distance_kind_from_string("cosine"), Error);
}

TEST(Spec, JsonRoundTripAndValidation)
{
    const DistanceSpec theory{DistanceKind::TheoryCost, "forgiveness"};
    EXPECT_EQ(parse_distance_spec(to_json(theory)), theory);
    EXPECT_THROW(validate(DistanceSpec{DistanceKind::TheoryCost, ""}), Error);
    EXPECT_THROW(validate(DistanceSpec{DistanceKind::TokenSimilarity, "", "stemmer"}), Error);
}

TEST(Tokenize, LowercasesAndSplitsOnNonAlphanumerics)
{
    EXPECT_EQ(tokenize("Yes, hidden-inside THE house!"),
              (std::vector<std::string>{"yes", "hidden", "inside", "the", "house"}));
    EXPECT_EQ(tokenize("a-b c", "whitespace"), (std::vector<std::string>{"a-b", "c"}));
    EXPECT_TRUE(tokenize("  ,. ").empty());
}

TEST(ComputeAporia, HicksFixture)
{
    const auto kb = knowledge::load_knowledge_base(fixture("hicks") / "kb.json");
    const auto r = compute_aporia(kb, {"premise", "q", std::string("offended-is-right"), std::string("christians-stay-offended")},
                                  {DistanceKind::TheoryCost, "forgiveness"});
    EXPECT_DOUBLE_EQ(r.pi, 0.3);
    EXPECT_EQ(r.decomposition.theory_id, "forgiveness");
    EXPECT_EQ(r.decomposition.premise, "premise");
}

TEST(ComputeAporia, RickAndMortyRejectsTheCheaperTheory)
{
    const auto kb = knowledge::load_knowledge_base(fixture("rick-morty") / "kb.json");
    const auto r = compute_aporia(kb, {"p", "q", std::string("codes-to-stop"), std::string("codes-to-continue")},
                                  {DistanceKind::TheoryCost, "resemblance"});
    EXPECT_EQ(r.decomposition.theory_id, "resemblance");
    EXPECT_DOUBLE_EQ(r.pi, 0.3);
}

TEST(ComputeAporia, IdenticalAnswersGiveZero)
{
    const auto kb = knowledge::load_knowledge_base(fixture("hicks") / "kb.json");
    EXPECT_EQ(compute_aporia(kb, {"p", "q", std::string("x"), std::string("x")}, {DistanceKind::TheoryCost, "forgiveness"})
                  .pi,
              0.0);
    EXPECT_EQ(compute_aporia(kb, {"p", "q", std::string("x y"), std::string("x y")}, tok_spec).pi, 0.0);
}

TEST(ComputeAporia, MissingTheoryThrows)
{
    const auto kb = knowledge::load_knowledge_base(fixture("hicks") / "kb.json");
    EXPECT_THROW(compute_aporia(kb, {"p", "q", std::string("a"), std::string("b")}, {DistanceKind::TheoryCost, "nope"}),
                 Error);
}

// compute_aporia over random kbs equals theory_distance of the cheapest
// theory among those holding the reveal false, found by enumeration.
TEST(ComputeAporia, TheoryCostMatchesEnumerationOracle)
{
    Gen g(2024);
    for (int i = 0; i < 10'000; ++i) {
        const int n = static_cast<int>(g.integer(1, 4));
        std::vector<knowledge::Theory> theories;
        for (int k = 0; k < n; ++k) {
            knowledge::Theory t{"t" + std::to_string(k), {}, {}, g.integer(0, 16) / 16.0};
            (g.coin() ? t.negations : t.propositions).insert("rp");
            theories.push_back(t);
        }
        const knowledge::KnowledgeBase kb("k", g.integer(0, 16) / 16.0, theories, {{"", "x"}});

        const knowledge::Theory* best = nullptr;
        for (const auto& t : theories) {
            if (t.negations.count("rp") && (best == nullptr || t.cost < best->cost)) {
                best = &t;   // ids are generated in order, so first wins ties
            }
        }
        const auto r = compute_aporia(kb, {"p", "q", std::string("r"), std::string("rp")},
                                      {DistanceKind::TheoryCost, "t0"});
        const double expected = best == nullptr ? 0.0 : theory_distance(*best, kb).pi;
        ASSERT_EQ(r.pi, expected) << "case " << i;
        if (best != nullptr) {
            ASSERT_EQ(r.decomposition.theory_id, best->id);
        }
    }
}

TEST(Properties, NormalizedKindsStayInUnitInterval)
{
    Gen g(99);
    for (int i = 0; i < 10'000; ++i) {
        const double rel = answer_distance(g.number(), g.number(), rel_spec).pi;
        const double tok = answer_distance(g.sentence(), g.sentence(), tok_spec).pi;
        ASSERT_GE(rel, 0.0);
        ASSERT_LE(rel, 1.0);
        ASSERT_GE(tok, 0.0);
        ASSERT_LE(tok, 1.0);
    }
}

TEST(Jaccard, EmptySetsAreIdentical)
{
    EXPECT_EQ(jaccard_similarity({}, {}), 1.0);
    EXPECT_EQ(jaccard_similarity({"a"}, {}), 0.0);
}

}  // namespace
