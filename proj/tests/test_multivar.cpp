#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flsat/multivar.hpp"
#include "flsat/oracle.hpp"
#include "flsat/parse.hpp"
#include "helpers.hpp"

using namespace flsat;

namespace {

Signature sig3() {
    Signature sig;
    sig.add("u", 1);
    sig.add("r", 2);
    sig.add("g", 3);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    return sig;
}

FlutedClause rnd_clause(std::mt19937_64& rng, const std::vector<PredId>& pool) {
    std::vector<FlutedLiteral> ls;
    int nl = 1 + static_cast<int>(rng() % 2);
    for (int l = 0; l < nl; ++l)
        ls.push_back({pool[rng() % pool.size()], static_cast<bool>(rng() & 1)});
    return FlutedClause::of(std::move(ls));
}

// Tiny three-variable normal form with small index sets.
NormalForm random_nf3(std::mt19937_64& rng) {
    Signature sig = sig3();
    NormalForm nf;
    nf.sig = sig;
    nf.m = 3;
    nf.omega.m = 3;
    std::vector<PredId> full{sig.find("u"), sig.find("r"), sig.find("g"), sig.find("T"),
                             sig.equality_id()};
    std::vector<PredId> ants{sig.find("u"), sig.find("r")};
    int shape = static_cast<int>(rng() % 4);  // (|S|,|T|) in {(1,1),(2,0),(1,0),(0,1)}
    int S = shape == 1 ? 2 : shape == 3 ? 0 : 1;
    int Tn = (shape == 0 || shape == 3) ? 1 : 0;
    for (int i = 0; i < S; ++i) {
        ExistEntry e;
        e.mu = (rng() & 1) ? f_atom(ants[rng() % ants.size()]) : f_true();
        if (rng() & 1) e.kappa = ControlFormula{static_cast<bool>(rng() & 1), false};
        e.gamma.m = 3;
        e.gamma.clauses.insert(rnd_clause(rng, full));
        nf.exist.push_back(e);
    }
    for (int j = 0; j < Tn; ++j) {
        UnivEntry u;
        u.nu = f_atom(ants[rng() % ants.size()]);
        u.delta.m = 3;
        u.delta.clauses.insert(rnd_clause(rng, full));
        nf.univ.push_back(u);
    }
    if (rng() & 1) nf.omega.clauses.insert(rnd_clause(rng, full));
    return nf;
}

}  // namespace

TEST_CASE("minimal covers of small index sets") {
    CHECK(minimal_covers({1}) == std::vector<MinimalCover>{MinimalCover{{{1}}}});
    auto mc2 = minimal_covers({1, 2});
    REQUIRE(mc2.size() == 2);
    CHECK(mc2[0] == MinimalCover{{{1}, {2}}});
    CHECK(mc2[1] == MinimalCover{{{1, 2}}});
    CHECK(minimal_covers({}) == std::vector<MinimalCover>{MinimalCover{}});
    REQUIRE_THROWS_MATCHES(minimal_covers({1, 2, 3, 4, 5}), FlError,
                           Catch::Matchers::Predicate<FlError>(
                               [](const FlError& e) { return e.code == "IndexSetTooLarge"; }));
}

TEST_CASE("minimal covers match the brute-force predicate") {
    for (int n = 0; n <= 4; ++n) {
        std::vector<int> I;
        for (int i = 0; i < n; ++i) I.push_back(i);
        auto got = minimal_covers(I);
        CHECK(got.size() <= (1u << (n * n)));
        std::set<MinimalCover> got_set(got.begin(), got.end());
        // brute force: every family of nonempty subsets
        uint32_t full = n == 0 ? 0 : (1u << n) - 1;
        std::set<MinimalCover> want;
        if (n == 0) {
            want.insert(MinimalCover{});
        } else {
            for (uint32_t family = 1; family < (1u << full); ++family) {
                std::vector<uint32_t> cells;
                for (uint32_t s = 1; s <= full; ++s)
                    if ((family >> (s - 1)) & 1) cells.push_back(s);
                uint32_t uni = 0;
                for (auto s : cells) uni |= s;
                if (uni != full) continue;
                bool minimal = true;
                for (size_t d = 0; d < cells.size(); ++d) {
                    uint32_t rest = 0;
                    for (size_t k = 0; k < cells.size(); ++k)
                        if (k != d) rest |= cells[k];
                    if (rest == full) minimal = false;
                }
                if (!minimal) continue;
                MinimalCover mc;
                for (auto s : cells) {
                    std::vector<int> cell;
                    for (int b = 0; b < n; ++b)
                        if ((s >> b) & 1) cell.push_back(b);
                    mc.cells.push_back(cell);
                }
                want.insert(mc);
            }
        }
        CHECK(got_set == want);
    }
}

TEST_CASE("reduction of the empty-index normal form") {
    Signature sig = sig3();
    NormalForm nf;
    nf.sig = sig;
    nf.m = 3;
    nf.omega.m = 3;
    nf.omega.clauses.insert(FlutedClause::of({{sig.find("u"), true}}));
    auto out = reduce_arity(nf);
    CHECK(out.m == 2);
    CHECK(out.exist.empty());
    CHECK(out.univ.empty());
    CHECK(out.omega.clauses.size() == 1);
}

TEST_CASE("reduction conjunct counts at arity four") {
    Signature sig;
    sig.add("u", 1);
    sig.add("v", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    NormalForm nf;
    nf.sig = sig;
    nf.m = 4;
    nf.omega.m = 4;
    for (int i = 0; i < 2; ++i) {
        ExistEntry e;
        e.mu = f_atom(sig.find(i == 0 ? "u" : "v"));
        e.gamma.m = 4;
        e.gamma.clauses.insert(FlutedClause::of({{sig.find("u"), true}}));
        nf.exist.push_back(e);
    }
    UnivEntry uv;
    uv.nu = f_atom(sig.find("v"));
    uv.delta.m = 4;
    uv.delta.clauses.insert(FlutedClause::of({{sig.find("u"), false}, {sig.find("v"), true}}));
    nf.univ.push_back(uv);

    auto out = reduce_arity(nf);
    CHECK(out.m == 3);
    // exist entries: per J in {0,{1}}, covers of {1}:1, {2}:1, {1,2}: 1+2 cells
    CHECK(out.exist.size() == 2 * (1 + 1 + 3));
    CHECK(out.univ.size() == 1);  // the nonempty J group
}

TEST_CASE("reduction is equisatisfiable per cardinality") {
    std::mt19937_64 rng(770099);
    int done = 0;
    while (done < 20) {
        NormalForm nf = random_nf3(rng);
        auto g3 = normal_form_to_formula(nf);
        NormalForm red = reduce_arity(nf);
        REQUIRE(red.m == 2);
        auto g2 = normal_form_to_formula(red);
        if (UnaryView::of(red.sig).count() > 14) continue;
        for (int n = 1; n <= 3; ++n) {
            bool orig = find_model(nf.sig, g3, n, SearchMode::Exactly).has_value();
            bool less = find_model(red.sig, g2, n, SearchMode::Exactly).has_value();
            REQUIRE(orig == less);
        }
        ++done;
    }
}

TEST_CASE("solve verdicts") {
    {
        auto ff = parse_file("sig { p/1 } trans { T } eq\n(exists p & forall !p)\n");
        auto r = solve(ff.sig, ff.formula);
        CHECK(r.status == SearchStatus::UnsatAtCap);
    }
    {
        auto ff = parse_file("sig { p/1, q/1 } trans { T } eq\n(exists p & forall (p -> exists (T & q)))\n");
        auto r = solve(ff.sig, ff.formula);
        REQUIRE(r.status == SearchStatus::Sat);
        REQUIRE(r.artifacts.cert.has_value());
        CHECK(check_conditions(*r.artifacts.cert).empty());
        auto m = find_model(ff.sig, ff.formula, 2);
        REQUIRE(m.has_value());
        CHECK(m->n == 2);
    }
    {
        auto ff = parse_file("sig { } trans { T } eq\n(forall exists T & forall forall (T -> !=))\n");
        auto r = solve(ff.sig, ff.formula);
        REQUIRE(r.status == SearchStatus::Sat);
        REQUIRE(r.artifacts.prefix.has_value());
        // the model prefix has no finite T-cycle: no self loop anywhere
        auto& st = r.artifacts.prefix->st;
        PredId T = st.sig.transitive_ids()[0];
        for (int a = 0; a < st.n; ++a) CHECK_FALSE(st.get2(T, a, a));
    }
}
