#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flsat/analysis.hpp"
#include "flsat/parse.hpp"

using namespace flsat;

namespace {

Signature t_sig(bool eq = true, bool that = false) {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    if (that) sig.add("That", 1, PredKind::THat);
    if (eq) sig.add("=", 2, PredKind::Equality);
    return sig;
}

}  // namespace

TEST_CASE("check_wellformed reports transitivity and That violations") {
    {
        Structure s(t_sig(false), 3);
        s.set2(0, 0, 1, true);
        s.set2(0, 1, 2, true);
        auto rep = check_wellformed(s);
        REQUIRE(rep.transitivity.size() == 1);
        CHECK(rep.transitivity[0].a == 0);
        CHECK(rep.transitivity[0].b == 1);
        CHECK(rep.transitivity[0].c == 2);
        s.set2(0, 0, 2, true);
        CHECK(check_wellformed(s).ok());
    }
    {
        Signature sig = t_sig(false, true);
        Structure s(sig, 1);
        s.set1(sig.find("That"), 0, true);
        auto rep = check_wellformed(s);
        REQUIRE(rep.that_mismatch == std::vector<int>{0});
    }
}

TEST_CASE("eval of phi1 on hand structures") {
    Signature sig = t_sig();
    auto phi1 = parse("(forall exists T & forall forall (T -> !=))", sig);
    {
        Structure s(sig, 3);
        s.set2(0, 0, 1, true);
        s.set2(0, 0, 2, true);
        s.set2(0, 1, 2, true);
        REQUIRE(check_wellformed(s).ok());
        CHECK_FALSE(eval(s, phi1));  // element 2 has no successor
    }
    {
        Structure s(sig, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) s.set2(0, a, b, true);
        CHECK_FALSE(eval(s, phi1));  // T(0,0) violates the second conjunct
    }
}

TEST_CASE("fluted_type_of") {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("That", 1, PredKind::THat);
    sig.add("p", 1);
    sig.add("=", 2, PredKind::Equality);
    Structure s(sig, 2);
    s.set1(sig.find("p"), 0, true);
    s.set2(0, 0, 1, true);
    s.refresh_that();

    auto t0 = fluted_type_of(s, {0});
    CHECK(t0.sign_of(sig.find("p")) == std::optional<bool>(true));
    CHECK(t0.sign_of(sig.find("That")) == std::optional<bool>(false));

    auto t01 = fluted_type_of(s, {0, 1});
    CHECK(t01.sign_of(sig.find("T")) == std::optional<bool>(true));
    CHECK(t01.sign_of(sig.equality_id()) == std::optional<bool>(false));

    auto t00 = fluted_type_of(s, {0, 0});
    CHECK(t00.sign_of(sig.equality_id()) == std::optional<bool>(true));
}

TEST_CASE("cliques partitions the domain") {
    Signature sig = t_sig(false);
    {
        Structure s(sig, 3);
        s.set2(0, 0, 1, true);
        s.set2(0, 1, 0, true);
        s.set2(0, 0, 0, true);
        s.set2(0, 1, 1, true);
        auto part = cliques(s);
        REQUIRE(part.blocks.size() == 2);
        CHECK(part.blocks[0] == std::vector<int>{0, 1});
        CHECK_FALSE(part.soliton[0]);
        CHECK(part.blocks[1] == std::vector<int>{2});
        CHECK(part.soliton[1]);
    }
    {
        Structure s(sig, 2);
        s.set2(0, 0, 0, true);
        s.set2(0, 1, 1, true);
        auto part = cliques(s);
        REQUIRE(part.blocks.size() == 2);
        CHECK_FALSE(part.soliton[0]);
        CHECK_FALSE(part.soliton[1]);
    }
    {
        Structure s(sig, 1);
        auto part = cliques(s);
        REQUIRE(part.blocks.size() == 1);
        CHECK(part.soliton[0]);
    }
}

TEST_CASE("kings and royal types") {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("p", 1);
    {
        Structure s(sig, 2);
        s.set1(sig.find("p"), 0, true);
        auto kr = kings(s);
        CHECK(kr.kings == std::vector<int>{0, 1});
        CHECK(kr.royal_types.size() == 2);
    }
    {
        Structure s(sig, 2);
        auto kr = kings(s);
        CHECK(kr.kings.empty());
    }
    {
        Structure s(sig, 3);
        s.set1(sig.find("p"), 2, true);
        auto kr = kings(s);
        CHECK(kr.kings == std::vector<int>{2});
        CHECK(kr.royal_types.size() == 1);
    }
}

TEST_CASE("is_quadratic") {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("p", 1);
    sig.add("q", 1);
    {
        // single clique realizing {p-type, q-type}; p-type realized nowhere else
        Structure s(sig, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s.set2(0, a, b, true);
        s.set1(sig.find("p"), 0, true);
        s.set1(sig.find("q"), 1, true);
        CHECK(is_quadratic(s));
    }
    {
        // no pair-determined clique: vacuously quadratic
        Structure s(sig, 4);
        for (int a : {0, 1})
            for (int b : {0, 1}) s.set2(0, a, b, true);
        for (int a : {2, 3})
            for (int b : {2, 3}) s.set2(0, a, b, true);
        s.set1(sig.find("p"), 0, true);
        s.set1(sig.find("q"), 1, true);
        s.set1(sig.find("p"), 2, true);
        s.set1(sig.find("q"), 3, true);
        CHECK(is_quadratic(s));
    }
    {
        // cliques {0,1}, {2}, {3}; pair {p-type, q-type} jointly unique to
        // {0,1} but each type also realized in a singleton: not quadratic.
        Structure u(sig, 4);
        for (int a : {0, 1})
            for (int b : {0, 1}) u.set2(0, a, b, true);
        u.set2(0, 2, 2, true);
        u.set2(0, 3, 3, true);
        u.set1(sig.find("p"), 0, true);
        u.set1(sig.find("q"), 1, true);
        u.set1(sig.find("p"), 2, true);
        u.set1(sig.find("q"), 3, true);
        CHECK_FALSE(is_quadratic(u));
        // brute-force confirmation over all (pair, clique) combinations
        auto part = cliques(u);
        bool counterexample = false;
        std::vector<FlutedType> tys;
        for (int a = 0; a < u.n; ++a) tys.push_back(fluted_type_of(u, {a}));
        for (int a = 0; a < u.n; ++a)
            for (int b = 0; b < u.n; ++b) {
                if (tys[a] == tys[b]) continue;
                std::vector<int> joint;
                for (size_t blk = 0; blk < part.blocks.size(); ++blk) {
                    bool has_a = false, has_b = false;
                    for (int x : part.blocks[blk]) {
                        if (tys[x] == tys[a]) has_a = true;
                        if (tys[x] == tys[b]) has_b = true;
                    }
                    if (has_a && has_b) joint.push_back(static_cast<int>(blk));
                }
                if (joint.size() != 1) continue;
                bool pinned = false;
                for (int c = 0; c < u.n && !pinned; ++c) {
                    int cnt = 0;
                    for (size_t blk = 0; blk < part.blocks.size(); ++blk)
                        for (int x : part.blocks[blk])
                            if (tys[x] == tys[c]) { if (static_cast<int>(blk) != joint[0]) ++cnt; }
                    bool in_joint = false;
                    for (int x : part.blocks[static_cast<size_t>(joint[0])])
                        if (tys[x] == tys[c]) in_joint = true;
                    if (in_joint && cnt == 0) pinned = true;
                }
                if (!pinned) counterexample = true;
            }
        CHECK(counterexample);
    }
}

TEST_CASE("inflate basics") {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("p", 1);
    {
        // all kings: unchanged
        Structure s(sig, 2);
        s.set1(sig.find("p"), 0, true);
        Structure t = inflate(s, 3);
        CHECK(t.n == 2);
    }
    {
        // two elements of equal type, T empty, two copies -> size 4
        Structure s(sig, 2);
        Structure t = inflate(s, 2);
        CHECK(t.n == 4);
        CHECK(check_wellformed(t).ok());
        CHECK(realized_2types(t) == realized_2types(s));
    }
    {
        Structure s(sig, 3);
        s.set2(0, 0, 1, true);
        CHECK(inflate(s, 1).n == 3);
    }
}

TEST_CASE("inflate preserves realized 2-types and transitivity on random structures") {
    std::mt19937_64 rng(77001);
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("p", 1);
    sig.add("q", 1);
    sig.add("r", 2);
    for (int tested = 0; tested < 60; ++tested) {
        int n = 1 + static_cast<int>(rng() % 5);
        Structure s(sig, n);
        for (PredId pid : {sig.find("p"), sig.find("q")})
            for (int a = 0; a < n; ++a) s.set1(pid, a, rng() & 1);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                s.set2(sig.find("r"), a, b, rng() & 1);
                s.set2(0, a, b, (rng() % 4) == 0);
            }
        s.close_transitive(0);
        REQUIRE(check_wellformed(s).ok());
        for (int i = 2; i <= 3; ++i) {
            Structure t = inflate(s, i);
            REQUIRE(check_wellformed(t).ok());
            REQUIRE(realized_2types(t) == realized_2types(s));
        }
    }
}

TEST_CASE("clique blocks are pairwise T-homogeneous") {
    std::mt19937_64 rng(77002);
    Signature sig = t_sig(false);
    for (int iter = 0; iter < 200; ++iter) {
        int n = 1 + static_cast<int>(rng() % 5);
        Structure s(sig, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s.set2(0, a, b, (rng() % 3) == 0);
        s.close_transitive(0);
        auto part = cliques(s);
        for (size_t i = 0; i < part.blocks.size(); ++i)
            for (size_t j = 0; j < part.blocks.size(); ++j) {
                if (i == j) continue;
                int related = 0, total = 0;
                for (int a : part.blocks[i])
                    for (int b : part.blocks[j]) {
                        ++total;
                        if (s.get2(0, a, b)) ++related;
                    }
                REQUIRE((related == 0 || related == total));
            }
    }
}
