#include <doctest.h>

#include "ctxscope/context.hpp"
#include "ctxscope/datagen.hpp"
#include "support/oracle.hpp"

using namespace ctxscope;
using ctxtest::Oracle;
using ctxtest::RawTable;
using ctxtest::Rng;

namespace {

void agree(const RawTable& raw, const AnalysisReport& r, const Oracle& o) {
    const std::size_t m = raw.m();
    REQUIRE(r.profiles.size() == m);
    for (std::size_t i = 0; i < m; ++i) {
        CAPTURE(i);
        const auto& p = r.profiles[i];
        CHECK(std::string(to_string(p.relevance.relevance)) == o.relevance(i));
        CHECK(std::string(to_string(p.label)) == o.label(i));
        CHECK(p.alpha == o.alpha(i));
        CHECK(p.beta == o.beta(i));
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            CAPTURE(i);
            CAPTURE(j);
            const SensitivityEdge* e = nullptr;
            for (const auto& cand : r.edges) {
                if (cand.i == i && cand.j == j) e = &cand;
            }
            CHECK((e != nullptr) == o.weakly_sensitive(i, j));
            CHECK((e && e->strong_i_to_j) == o.strongly_sensitive(i, j));
            CHECK((e && e->strong_j_to_i) == o.strongly_sensitive(j, i));
        }
    }
}

AnalysisReport run(const Distribution& d) {
    AnalysisOptions o;
    o.threads = 1;
    return analyze(d, o);
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("oracle on the reference table") {
    // the reference table, typed in as dense weights over 100 (class last)
    RawTable t{{2, 2, 2}, 2, {3, 7, 3, 7, 8, 7, 8, 7, 7, 3, 7, 3, 7, 8, 7, 8}};
    const Oracle o(t);
    CHECK(o.prob({-1, -1, -1}, 1) == Rational(1, 2));
    CHECK(o.cond({1, -1, -1}, 1) == Rational(11, 25));
    CHECK(o.cond({1, 1, -1}, 1) == Rational(8, 15));
    CHECK(o.relevance(0) == "strongly_relevant");
    CHECK(o.label(1) == "contextual");
    CHECK(o.relevance(2) == "irrelevant");
    CHECK(o.weakly_sensitive(0, 1));
    CHECK(o.strongly_sensitive(0, 1));
    CHECK_FALSE(o.strongly_sensitive(1, 0));
    agree(t, run(table2()), o);
}

TEST_CASE("engine agrees with the oracle on random binary tables") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto raw = ctxtest::random_binary_table(rng, 1 + rng.below(4));
        CAPTURE(trial);
        agree(raw, run(ctxtest::to_exact(raw)), Oracle(raw));
    }
}

TEST_CASE("engine agrees with the oracle on wider domains") {
    Rng rng(32);
    for (int trial = 0; trial < 80; ++trial) {
        std::vector<std::size_t> domains(1 + rng.below(3));
        for (auto& d : domains) d = 2 + rng.below(2);
        const std::size_t classes = 2 + rng.below(2);
        const auto raw = rng.chance(0.4) ? ctxtest::generic_table(rng, domains, classes)
                                         : ctxtest::structured_table(rng, domains, classes);
        CAPTURE(trial);
        agree(raw, run(ctxtest::to_exact(raw)), Oracle(raw));
    }
}

TEST_CASE("engine agrees with the oracle under a fixed tolerance") {
    Rng rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        const auto d = ctxtest::to_exact(ctxtest::random_binary_table(rng, 1 + rng.below(4)));
        const auto data = sample(d, 50 + rng.below(300), trial);
        const auto emp = empirical_from_dataset(data);
        // dense counts for the oracle
        RawTable counts{std::vector<std::size_t>(emp.space().feature_count(), 2), 2, {}};
        counts.weights.assign(ctxtest::cell_count(counts.domains, 2), 0);
        for (std::size_t r = 0; r < data.size(); ++r) {
            std::size_t idx = 0;
            for (auto v : data.values(r)) idx = idx * 2 + v;
            counts.weights[idx * 2 + data.class_of(r)] += 1;
        }
        const Rational eps(1 + rng.below(8), 100);
        const std::uint64_t support = 1 + rng.below(10);
        AnalysisOptions opt;
        opt.threads = 1;
        opt.comparison = ComparisonConfig::with_epsilon(eps, support);
        const auto r = analyze(emp, opt);
        const Oracle o(counts, {true, eps, support});
        for (std::size_t i = 0; i < counts.m(); ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(r.profiles[i].alpha == o.alpha(i));
            CHECK(r.profiles[i].beta == o.beta(i));
            const bool strong = r.profiles[i].relevance.relevance == Relevance::StronglyRelevant;
            CHECK(strong == o.strongly_relevant(i));
            for (std::size_t j = i + 1; j < counts.m(); ++j) {
                bool found = false;
                for (const auto& e : r.edges) found = found || (e.i == i && e.j == j);
                CHECK(found == o.weakly_sensitive(i, j));
            }
        }
    }
}

}  // TEST_SUITE
