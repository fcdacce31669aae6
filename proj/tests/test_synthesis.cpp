#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "flsat/normal_form.hpp"
#include "flsat/parse.hpp"
#include "flsat/synthesis.hpp"
#include "helpers.hpp"

using namespace flsat;

namespace {

BasicSet that_only() {
    BasicSet bs;
    bs.sig.add("That", 1, PredKind::THat);
    bs.sig.add("T", 2, PredKind::Transitive);
    bs.sig.add("=", 2, PredKind::Equality);
    bs.view = UnaryView::of(bs.sig);
    return bs;
}

// T equals {(i,j) : j >= i+2} under some relabeling.
bool chain_shape(const Structure& s) {
    PredId T = s.sig.transitive_ids()[0];
    std::vector<int> perm(static_cast<size_t>(s.n));
    for (int i = 0; i < s.n; ++i) perm[static_cast<size_t>(i)] = i;
    do {
        bool ok = true;
        for (int a = 0; a < s.n && ok; ++a)
            for (int b = 0; b < s.n && ok; ++b)
                if (s.get2(T, perm[static_cast<size_t>(a)], perm[static_cast<size_t>(b)]) !=
                    (b >= a + 2))
                    ok = false;
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace

TEST_CASE("the lone-soliton certificate synthesizes the shifted chain") {
    BasicSet bs = that_only();
    Certificate c;
    c.sig = bs.sig;
    c.view = bs.view;
    CliqueSuperType e;
    e.xi.counts[0] = 1;
    e.pi.insert(0);
    c.omega.push_back(e);

    auto p = synthesize(c, 4);
    REQUIRE(p.st.n == 5);
    PredId T = bs.sig.transitive_ids()[0];
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(p.st.get2(T, i, j) == (j >= i + 2));
    CHECK(p.t2_edges.empty());

    BasicSet phi = bs;
    phi.formulas.push_back({BKind::B1, 0, 0, f_true()});
    phi.formulas.push_back({BKind::B7, 0, 0, f_not(f_atom(bs.sig.that_id()))});
    auto rep = verify_prefix(p, c, phi);
    CHECK(rep.clean());
    CHECK(rep.unchecked_existentials == 2);  // copies 3 and 4 sit at the boundary
}

TEST_CASE("a doubled unique type synthesizes one two-element clique") {
    BasicSet bs = that_only();
    Certificate c;
    c.sig = bs.sig;
    c.view = bs.view;
    CliqueSuperType e;
    Type1 looped = 1u << bs.view.that_bit;
    e.xi.counts[looped] = 2;
    c.omega.push_back(e);
    c.v.insert(looped);

    auto p = synthesize(c, 3);
    REQUIRE(p.st.n == 2);  // xi meets V: a single cell
    PredId T = bs.sig.transitive_ids()[0];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(p.st.get2(T, a, b));
}

TEST_CASE("depth zero leaves no room for t1 edges when V is empty") {
    BasicSet bs = that_only();
    Certificate c;
    c.sig = bs.sig;
    c.view = bs.view;
    CliqueSuperType e;
    e.xi.counts[0] = 1;
    e.pi.insert(0);
    c.omega.push_back(e);
    auto p = synthesize(c, 0);
    CHECK(p.st.n == 1);
    CHECK(p.t1_edges.empty());
}

TEST_CASE("an injected intra-cell t1 edge is flagged") {
    BasicSet bs = that_only();
    Certificate c;
    c.sig = bs.sig;
    c.view = bs.view;
    CliqueSuperType e;
    e.xi.counts[0] = 1;
    e.pi.insert(0);
    c.omega.push_back(e);
    auto p = synthesize(c, 3);
    p.t1_edges.push_back({{0, 1}, {0, 1}});
    auto rep = verify_prefix(p, c, bs);
    REQUIRE_FALSE(rep.clean());
    CHECK(rep.problems[0].find("intra-cell") != std::string::npos);
}

TEST_CASE("accumulation holds along cell paths") {
    std::mt19937_64 rng(550077);
    Signature sig;
    sig.add("u0", 1);
    sig.add("u1", 1);
    sig.add("That", 1, PredKind::THat);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    BasicSet bs;
    bs.sig = sig;
    bs.view = UnaryView::of(sig);
    int done = 0;
    while (done < 25) {
        Structure s = testutil::random_structure(rng, sig, 1 + static_cast<int>(rng() % 4));
        BasicSet phi = bs;
        for (int i = 0; i < 3; ++i)
            phi.formulas.push_back(testutil::random_basic_true_in(rng, phi, s));
        auto star = quadratic_transform(phi);
        CertSearchOptions o;
        o.max_omega = 6;
        auto r = search(star, o);
        REQUIRE(r.status == SearchStatus::Sat);
        auto p = synthesize(*r.cert, 6);
        auto rep = verify_prefix(p, *r.cert, star);
        REQUIRE(rep.clean());

        // every t1/t2 path of length <= 4 accumulates into the start reach
        std::map<CellAddress, std::vector<CellAddress>> adj;
        for (auto& [u, v] : p.t1_edges) adj[u].push_back(v);
        for (auto& [u, v] : p.t2_edges) adj[u].push_back(v);
        std::function<void(const CellAddress&, const CellAddress&, int)> walk =
            [&](const CellAddress& start, const CellAddress& at, int left) {
                auto& e0 = r.cert->omega[static_cast<size_t>(start.omega_idx)];
                auto& ek = r.cert->omega[static_cast<size_t>(at.omega_idx)];
                if (!(start == at)) {
                    for (auto& [t, cnt] : ek.xi.counts) REQUIRE(e0.pi.count(t) == 1);
                    for (Type1 t : ek.pi) REQUIRE(e0.pi.count(t) == 1);
                }
                if (left == 0) return;
                for (auto& nxt : adj[at]) walk(start, nxt, left - 1);
            };
        for (auto& cell : p.cells) walk(cell, cell, 4);
        ++done;
    }
}

TEST_CASE("re-closing the prefix T changes nothing") {
    auto ff = parse_file("sig { } trans { T } eq\n(forall exists T & forall forall (T -> !=))\n");
    auto nf = to_normal_form(ff.sig, ff.formula, 2);
    auto star = quadratic_transform(spread_to_basic(to_spread(nf, {})));
    auto r = search(star);
    REQUIRE(r.status == SearchStatus::Sat);
    auto p = synthesize(*r.cert, 4);
    Structure again = p.st;
    again.close_transitive(again.sig.transitive_ids()[0]);
    CHECK(again.interp == p.st.interp);
    CHECK(chain_shape(p.st));
}
