#include <doctest.h>

#include "ctxscope/datagen.hpp"
#include "ctxscope/error.hpp"
#include "ctxscope/relevance.hpp"
#include "ctxscope/search.hpp"

using namespace ctxscope;

namespace {

const ComparisonConfig kExact = ComparisonConfig::exact();

ContextSubset set_of(std::initializer_list<std::size_t> members) {
    ContextSubset s;
    for (auto k : members) s = s.with(k);
    return s;
}

}  // namespace

TEST_SUITE("relevance") {

TEST_CASE("differs_in_context on the reference table") {
    const auto t2 = table2();

    SUBCASE("X1 in the empty context") {
        const auto w = differs_in_context(t2, 0, {}, kExact);
        REQUIRE(w);
        // first witness in canonical order is x=0, y=0; its mirror is the Y=1 pair
        CHECK(w->value == 0);
        CHECK(w->y == 0);
        CHECK(w->lhs == Rational(11, 25));
        CHECK(w->rhs == Rational(1, 2));
        CHECK(w->gap == Rational(3, 50));
        CHECK(w->lhs_support == 50);
        CHECK(w->rhs_support == 100);
        CHECK(verify_witness(t2, *w, kExact));
    }
    SUBCASE("X2 alone tells nothing") { CHECK_FALSE(differs_in_context(t2, 1, {}, kExact)); }
    SUBCASE("X3 given X1 and X2") { CHECK_FALSE(differs_in_context(t2, 2, set_of({0, 1}), kExact)); }
    SUBCASE("X2 given X1") {
        const auto w = differs_in_context(t2, 1, set_of({0}), kExact);
        REQUIRE(w);
        CHECK(w->context_assignment.value_of(0) == 0U);
        CHECK(w->value == 0);
        CHECK(w->lhs == Rational(3, 10));
        CHECK(w->rhs == Rational(11, 25));
        // the mirrored tuple the definitions are usually quoted with
        const auto s = t2.space();
        CHECK(conditional_class(t2, 1, Assignment::parse(s, "X1=1,X2=1")) == Rational(8, 15));
        CHECK(conditional_class(t2, 1, Assignment::parse(s, "X1=1")) == Rational(11, 25));
    }
    SUBCASE("feature inside its own context") { CHECK_THROWS_AS(differs_in_context(t2, 0, set_of({0}), kExact), Error); }
}

TEST_CASE("strong relevance") {
    const auto t2 = table2();
    const auto x1 = is_strongly_relevant(t2, 0, kExact);
    REQUIRE(x1);
    CHECK(x1->context == set_of({1, 2}));
    const auto s = t2.space();
    CHECK(conditional_class(t2, 1, Assignment::parse(s, "X1=1,X2=1,X3=1")) == Rational(8, 15));
    CHECK(conditional_class(t2, 1, Assignment::parse(s, "X2=1,X3=1")) == Rational(1, 2));
    CHECK(is_strongly_relevant(t2, 1, kExact));
    CHECK(conditional_class(t2, 1, Assignment::parse(s, "X1=1,X3=1")) == Rational(11, 25));
    CHECK_FALSE(is_strongly_relevant(t2, 2, kExact));
}

TEST_CASE("weak relevance and classes") {
    const auto t2 = table2();
    const SearchBudget budget;
    CHECK_FALSE(is_weakly_relevant(t2, 0, kExact, budget).holds());
    CHECK_FALSE(is_weakly_relevant(t2, 2, kExact, budget).holds());

    CHECK(relevance_class(t2, 0, kExact, budget).relevance == Relevance::StronglyRelevant);
    CHECK(relevance_class(t2, 1, kExact, budget).relevance == Relevance::StronglyRelevant);
    const auto x3 = relevance_class(t2, 2, kExact, budget);
    CHECK(x3.relevance == Relevance::Irrelevant);
    CHECK(x3.exact);
    CHECK_FALSE(x3.witness);

    const auto dup = duplicate_feature(t2, 0);
    for (std::size_t f : {0U, 3U}) {
        CAPTURE(f);
        const auto w = is_weakly_relevant(dup, f, kExact, budget);
        CHECK(w.holds());
        CHECK(w.exhaustive);
        CHECK(w.witness->context.size() < 3);
        const auto v = relevance_class(dup, f, kExact, budget);
        CHECK(v.relevance == Relevance::WeaklyRelevant);
        CHECK(verify_witness(dup, *v.witness, kExact));
    }
    CHECK(relevance_class(dup, 1, kExact, budget).relevance == Relevance::StronglyRelevant);
    CHECK(relevance_class(dup, 2, kExact, budget).relevance == Relevance::Irrelevant);
}

TEST_CASE("heuristic search never declares irrelevance") {
    const auto t2 = table2();
    SearchBudget tight;
    tight.exact_limit = 1;
    tight.max_context_size = 0;
    tight.random_probes = 0;
    const auto v = relevance_class(t2, 2, kExact, tight);
    CHECK(v.relevance == Relevance::NoWitness);
    CHECK_FALSE(v.exact);
}

TEST_CASE("tampered witnesses fail verification") {
    const auto t2 = table2();
    auto w = *differs_in_context(t2, 0, {}, kExact);
    w.lhs = Rational(1, 2);
    CHECK_FALSE(verify_witness(t2, w, kExact));
}

TEST_CASE("single feature space") {
    const auto s = build_space({"A"}, {{"0", "1"}}, {"0", "1"});
    std::vector<ProbabilityRow> rows{{{0}, 0, Rational(3, 10)}, {{0}, 1, Rational(1, 5)},
                                     {{1}, 0, Rational(1, 5)}, {{1}, 1, Rational(3, 10)}};
    const auto d = exact_from_rows(s, rows);
    const auto v = relevance_class(d, 0, kExact, SearchBudget{});
    CHECK(v.relevance == Relevance::StronglyRelevant);
    CHECK(v.witness->context.empty());
}

}  // TEST_SUITE
