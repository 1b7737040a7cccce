#include <doctest.h>

#include <algorithm>

#include "ctxscope/datagen.hpp"
#include "ctxscope/error.hpp"
#include "ctxscope/search.hpp"
#include "support/generators.hpp"

using namespace ctxscope;

namespace {

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t q = 1; q <= k; ++q) r = r * (n - k + q) / q;
    return r;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("enumerate_contexts examples") {
    CHECK(enumerate_contexts(3, ContextSubset(0b1), 2) ==
          std::vector<ContextSubset>{ContextSubset(0), ContextSubset(0b010), ContextSubset(0b100),
                                     ContextSubset(0b110)});
    CHECK(enumerate_contexts(1, ContextSubset(0b1), 5) == std::vector<ContextSubset>{ContextSubset(0)});
    CHECK(enumerate_contexts(4, ContextSubset(0b10), 1) ==
          std::vector<ContextSubset>{ContextSubset(0), ContextSubset(0b0001), ContextSubset(0b0100),
                                     ContextSubset(0b1000)});
}

TEST_CASE("enumerate_contexts yields each subset once, in canonical order") {
    ctxtest::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng.below(12);
        ContextSubset excluded;
        for (std::size_t k = 0; k < m; ++k) {
            if (rng.chance(0.25)) excluded = excluded.with(k);
        }
        const std::size_t max_size = rng.below(m + 2);
        const auto all = enumerate_contexts(m, excluded, max_size);
        const std::size_t ground = m - excluded.size();
        std::uint64_t expected = 0;
        for (std::size_t k = 0; k <= std::min(ground, max_size); ++k) expected += choose(ground, k);
        CHECK(all.size() == expected);
        CHECK(std::is_sorted(all.begin(), all.end()));
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
        for (const auto& s : all) {
            CHECK(s.is_subset_of(ContextSubset::all(m)));
            CHECK((s.bits() & excluded.bits()) == 0);
            CHECK(s.size() <= max_size);
        }
    }
}

TEST_CASE("budget validation") {
    SearchBudget b;
    CHECK_NOTHROW(b.validate());
    b.exact_limit = 0;
    CHECK_THROWS_AS(b.validate(), Error);
    b = SearchBudget{};
    b.beam_width = 0;
    CHECK_THROWS_AS(b.validate(), Error);
}

TEST_CASE("exact scan on the reference table") {
    const auto t2 = table2();
    const auto cfg = ComparisonConfig::exact();
    const auto x1 = exact_scan(t2, 0, cfg);
    CHECK(x1.alpha == 0U);
    CHECK(x1.beta == 2U);
    CHECK(x1.strong_witness);
    CHECK(x1.contexts_evaluated <= 4);

    const auto x2 = exact_scan(t2, 1, cfg);
    CHECK(x2.alpha == 1U);
    CHECK(x2.beta == 2U);
    CHECK(x2.alpha_witness->context == ContextSubset(0b001));
    CHECK(x2.beta_witness->context == ContextSubset(0b101));

    const auto x3 = exact_scan(t2, 2, cfg);
    CHECK_FALSE(x3.alpha);
    CHECK_FALSE(x3.beta);
    CHECK(x3.contexts_evaluated == 4);
    CHECK(x3.exhaustive);
}

TEST_CASE("heuristic scan matches the exact scan on the reference table") {
    const auto t2 = table2();
    const auto cfg = ComparisonConfig::exact();
    SearchBudget h;
    h.exact_limit = 1;
    for (std::size_t f = 0; f < 3; ++f) {
        CAPTURE(f);
        const auto e = exact_scan(t2, f, cfg);
        const auto g = heuristic_scan(t2, f, cfg, h);
        CHECK_FALSE(g.exhaustive);
        CHECK(g.alpha == e.alpha);
        CHECK(g.beta == e.beta);
        CHECK(scan_feature(t2, f, cfg, h).alpha == e.alpha);
    }
}

TEST_CASE("degenerate heuristic budget tests only the empty context") {
    const auto t2 = table2();
    SearchBudget h;
    h.exact_limit = 1;
    h.max_context_size = 0;
    h.random_probes = 0;
    const auto cfg = ComparisonConfig::exact();
    const auto x1 = heuristic_scan(t2, 0, cfg, h);
    CHECK(x1.alpha == 0U);
    CHECK(x1.contexts_evaluated == 1);
    const auto x2 = heuristic_scan(t2, 1, cfg, h);
    CHECK_FALSE(x2.alpha);
    CHECK(x2.contexts_evaluated == 1);
}

TEST_CASE("single feature space scans only the empty context") {
    const auto s = build_space({"A"}, {{"0", "1"}}, {"0", "1"});
    std::vector<ProbabilityRow> rows{{{0}, 0, Rational(3, 10)}, {{0}, 1, Rational(1, 5)},
                                     {{1}, 0, Rational(1, 5)}, {{1}, 1, Rational(3, 10)}};
    const auto r = exact_scan(exact_from_rows(s, rows), 0, ComparisonConfig::exact());
    CHECK(r.alpha == 0U);
    CHECK(r.beta == 0U);
    CHECK(r.contexts_evaluated == 1);
}

TEST_CASE("heuristic finds planted contexts among padding") {
    // two reference blocks, one xor block, padded with copies of an irrelevant feature
    const auto spec = parse_planted_spec("table2:2,xor,dup:2@12");
    const auto p = planted(spec, 5);
    REQUIRE(p.distribution.space().feature_count() == 20);
    SearchBudget h;
    h.max_context_size = 2;
    const auto cfg = ComparisonConfig::exact();
    for (std::size_t f = 0; f < 20; ++f) {
        CAPTURE(f);
        const auto r = scan_feature(p.distribution, f, cfg, h);
        CHECK_FALSE(r.exhaustive);
        if (p.truth.labels[f] == Label::Contextual) {
            CHECK(r.alpha);
        }
    }
}

TEST_CASE("scan is independent of cell order") {
    ctxtest::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto raw = ctxtest::random_binary_table(rng, 4);
        const auto a = ctxtest::to_exact(raw);
        auto rows = ctxtest::rows_of(raw);
        std::shuffle(rows.begin(), rows.end(), rng.engine());
        const auto b = exact_from_rows(a.space(), rows);
        for (std::size_t f = 0; f < 4; ++f) {
            const auto ra = exact_scan(a, f, ComparisonConfig::exact());
            const auto rb = exact_scan(b, f, ComparisonConfig::exact());
            CHECK(ra.alpha == rb.alpha);
            CHECK(ra.beta == rb.beta);
            CHECK(ra.alpha_witness == rb.alpha_witness);
            CHECK(ra.beta_witness == rb.beta_witness);
        }
    }
}

}  // TEST_SUITE
