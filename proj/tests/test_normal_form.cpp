#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flsat/normal_form.hpp"
#include "flsat/parse.hpp"
#include "helpers.hpp"

using namespace flsat;

namespace {

FormulaFile phi1_file() {
    return parse_file("sig { } trans { T } eq\n(forall exists T & forall forall (T -> !=))\n");
}

// Random single-transitive sentences with equality for the oracle properties.
FormulaPtr random_sentence(std::mt19937_64& rng, const Signature& sig) {
    while (true) {
        auto f = testutil::random_formula(rng, sig, 0, 5);
        try {
            if (validate(sig, f, 0).variable_bound <= 2) return f;
        } catch (const FlError&) {
        }
    }
}

}  // namespace

TEST_CASE("phi1 normal form keeps the consistent controls") {
    auto ff = phi1_file();
    auto nf = to_normal_form(ff.sig, ff.formula, 2);
    // the (!T & =) and (!T & !=) cases contradict the T demand and are
    // pruned; (T & =) collapses to a That route, leaving one witness entry
    REQUIRE(nf.exist.size() == 1);
    REQUIRE(nf.exist[0].kappa.has_value());
    CHECK(nf.exist[0].kappa->t_positive);
    CHECK_FALSE(nf.exist[0].kappa->eq_positive);
    CHECK(nf.exist[0].gamma.clauses.empty());  // the T demand is absorbed by the control
    // omega forces no reflexive T pair, and routes each element to a witness
    // or its own self loop
    PredId t = nf.sig.transitive_ids()[0];
    PredId eq = nf.sig.equality_id();
    PredId that = nf.sig.that_id();
    REQUIRE(that >= 0);
    bool irref = false, route = false;
    for (auto& c : nf.omega.clauses) {
        if (c.contains({t, false}) && c.contains({eq, false}) && c.lits.size() == 2) irref = true;
        if (c.contains({that, true})) route = true;
    }
    CHECK(irref);
    CHECK(route);
    CHECK(nf.univ.empty());
}

TEST_CASE("an already-normal-form sentence is a fixpoint") {
    Signature sig;
    sig.add("p", 1);
    sig.add("q", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    auto f = parse(
        "(forall (p -> exists (T & != & q)) & forall (q -> forall (!T | p)) & forall forall (T | !T))",
        sig);
    auto nf = to_normal_form(sig, f, 2);
    CHECK(nf.sig.size() == sig.size());  // no fresh predicates
    REQUIRE(nf.exist.size() == 1);
    CHECK(print(nf.sig, nf.exist[0].mu) == "p");
    REQUIRE(nf.univ.size() == 1);
    CHECK(print(nf.sig, nf.univ[0].nu) == "q");
}

TEST_CASE("normal_form_to_formula on degenerate forms") {
    Signature sig;
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    NormalForm nf;
    nf.sig = sig;
    nf.m = 2;
    nf.omega.m = 2;
    CHECK(print(sig, normal_form_to_formula(nf)) == "true");

    UnivEntry u;
    u.nu = f_true();
    u.delta.m = 2;
    u.delta.clauses.insert(FlutedClause{});
    nf.univ.push_back(u);
    CHECK(print(sig, normal_form_to_formula(nf)) == "forall (true -> forall false)");
}

TEST_CASE("to_normal_form output implies the input on oracle models") {
    std::mt19937_64 rng(31001);
    Signature sig;
    sig.add("p", 1);
    sig.add("q", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    int done = 0;
    while (done < 120) {
        auto f = random_sentence(rng, sig);
        auto nf = to_normal_form(sig, f, 2);
        auto g = normal_form_to_formula(nf);
        for (int n = 1; n <= 3; ++n) {
            auto m = find_model(nf.sig, g, n, SearchMode::Exactly);
            if (m) REQUIRE(eval(*m, f));
        }
        ++done;
    }
}

TEST_CASE("to_normal_form is equisatisfiable per cardinality") {
    std::mt19937_64 rng(31002);
    Signature sig;
    sig.add("p", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    int done = 0;
    while (done < 60) {
        auto f = random_sentence(rng, sig);
        auto nf = to_normal_form(sig, f, 2);
        auto g = normal_form_to_formula(nf);
        for (int n = 1; n <= 3; ++n) {
            bool orig = find_model(sig, f, n, SearchMode::Exactly).has_value();
            bool staged = find_model(nf.sig, g, n, SearchMode::Exactly).has_value();
            REQUIRE(orig == staged);
        }
        ++done;
    }
}

TEST_CASE("exists p gets a trigger and stays equisatisfiable") {
    auto ff = parse_file("sig { p/1 } trans { T } eq\nexists p\n");
    auto nf = to_normal_form(ff.sig, ff.formula, 2);
    auto g = normal_form_to_formula(nf);
    for (int n = 1; n <= 3; ++n) {
        bool orig = find_model(ff.sig, ff.formula, n, SearchMode::Exactly).has_value();
        bool staged = find_model(nf.sig, g, n, SearchMode::Exactly).has_value();
        REQUIRE(orig == staged);
    }
}

TEST_CASE("to_spread boundary cases") {
    auto ff = phi1_file();
    auto nf = to_normal_form(ff.sig, ff.formula, 2);

    // S = 2, L = 0: one routing bit, no royal conjuncts
    auto snf = to_spread(nf, {});
    CHECK(snf.lambdas.empty());
    CHECK(snf.exist.size() == 2);
    CHECK(snf.o_preds.size() == 2);

    // |S| = 1, L = 0 -> k = 0 routing bits, the trigger formula is empty
    Signature sig;
    sig.add("p", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    NormalForm one;
    one.sig = sig;
    one.m = 2;
    one.omega.m = 2;
    ExistEntry e;
    e.mu = f_atom(sig.find("p"));
    e.kappa = ControlFormula{true, false};
    e.gamma.m = 2;
    one.exist.push_back(e);
    auto ssnf = to_spread(one, {});
    REQUIRE(ssnf.exist.size() == 1);
    CHECK(print(ssnf.sig, ssnf.exist[0].mu) == "true");
    CHECK(ssnf.sig.size() == sig.size() + 1);  // only the o marker is fresh
}

TEST_CASE("to_spread output implies its input") {
    std::mt19937_64 rng(31003);
    Signature sig;
    sig.add("p", 1);
    sig.add("q", 1);
    sig.add("T", 2, PredKind::Transitive);
    sig.add("=", 2, PredKind::Equality);
    int done = 0, model_checked = 0;
    while (done < 40) {
        auto f = random_sentence(rng, sig);
        auto nf = to_normal_form(sig, f, 2);
        UnaryView view = UnaryView::of(nf.sig);
        std::vector<Type1> royal;
        if (view.count() <= 10 && (rng() & 1)) royal.push_back(static_cast<Type1>(rng()) & view.universe());
        auto snf = to_spread(nf, royal);
        auto nf_formula = normal_form_to_formula(nf);
        auto snf_formula = spread_to_formula(snf);
        if (UnaryView::of(snf.sig).count() <= 14) {
            ++model_checked;
            for (int n = 1; n <= 3; ++n) {
                auto m = find_model(snf.sig, snf_formula, n, SearchMode::Exactly);
                if (m) REQUIRE(eval(*m, nf_formula));
            }
        }
        // signature growth bound: |S| o-markers plus the routing bits
        size_t growth = snf.sig.preds.size() - nf.sig.preds.size();
        int L = static_cast<int>(royal.size());
        int S = static_cast<int>(nf.exist.size());
        int k = 0;
        while ((1 << k) < (L + 1) * S) ++k;
        REQUIRE(growth == static_cast<size_t>(S + k));
        ++done;
    }
    CHECK(model_checked >= 25);
}

TEST_CASE("phi1 spread models satisfy phi1") {
    auto ff = phi1_file();
    auto nf = to_normal_form(ff.sig, ff.formula, 2);
    auto snf = to_spread(nf, {});
    auto g = spread_to_formula(snf);
    for (int n = 1; n <= 4; ++n) {
        auto m = find_model(snf.sig, g, n, SearchMode::Exactly);
        if (m) REQUIRE(eval(*m, ff.formula));
    }
}
