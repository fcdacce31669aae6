#pragma once

#include <random>
#include <vector>

#include "flsat/analysis.hpp"
#include "flsat/oracle.hpp"

namespace testutil {

using namespace flsat;

inline FormulaPtr random_formula(std::mt19937_64& rng, const Signature& sig, int depth, int budget) {
    std::uniform_int_distribution<int> pick(0, budget > 0 ? 7 : 1);
    std::vector<PredId> usable;
    for (PredId p = 0; p < sig.size(); ++p)
        if (sig.at(p).arity <= depth) usable.push_back(p);
    switch (pick(rng)) {
        case 0:
            if (!usable.empty()) {
                std::uniform_int_distribution<size_t> pa(0, usable.size() - 1);
                return f_atom(usable[pa(rng)]);
            }
            return f_true();
        case 1: return (rng() & 1) ? f_true() : f_false();
        case 2: return f_not(random_formula(rng, sig, depth, budget - 1));
        case 3:
            return f_and({random_formula(rng, sig, depth, budget - 1),
                          random_formula(rng, sig, depth, budget - 1)});
        case 4:
            return f_or({random_formula(rng, sig, depth, budget - 1),
                         random_formula(rng, sig, depth, budget - 1)});
        case 5:
            return f_xor({random_formula(rng, sig, depth, budget - 1),
                          random_formula(rng, sig, depth, budget - 1)});
        case 6:
            return f_implies(random_formula(rng, sig, depth, budget - 1),
                             random_formula(rng, sig, depth, budget - 1));
        default:
            return ((rng() & 1) ? f_forall : f_exists)(random_formula(rng, sig, depth + 1, budget - 1));
    }
}

// Random well-formed structure: random unary bits, random sparse transitive
// relations (closed), random other binaries, That refreshed.
inline Structure random_structure(std::mt19937_64& rng, const Signature& sig, int n,
                                  int t_density_percent = 25) {
    Structure s(sig, n);
    for (PredId p = 0; p < sig.size(); ++p) {
        const Pred& pr = sig.at(p);
        if (pr.kind == PredKind::Equality || pr.kind == PredKind::THat) continue;
        if (pr.arity == 0) s.interp[static_cast<size_t>(p)][0] = rng() & 1;
        if (pr.arity == 1)
            for (int a = 0; a < n; ++a) s.set1(p, a, rng() & 1);
        if (pr.arity == 2)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    s.set2(p, a, b, static_cast<int>(rng() % 100) <
                                        (pr.kind == PredKind::Transitive ? t_density_percent : 50));
    }
    for (PredId t : sig.transitive_ids()) s.close_transitive(t);
    s.refresh_that();
    return s;
}

// Reference semantics: enumerate every interpretation outright, filter by
// well-formedness, and test the formula. Believable only for n <= 3.
inline bool naive_has_model(const Signature& sig, const FormulaPtr& f, int n) {
    std::vector<std::pair<PredId, size_t>> cells;  // (pred, flat index)
    for (PredId p = 0; p < sig.size(); ++p) {
        const Pred& pr = sig.at(p);
        if (pr.kind == PredKind::Equality) continue;
        size_t count = 1;
        for (int k = 0; k < pr.arity; ++k) count *= static_cast<size_t>(n);
        for (size_t i = 0; i < count; ++i) cells.push_back({p, i});
    }
    if (cells.size() > 24) throw std::runtime_error("naive enumeration too large");
    Structure s(sig, n);
    for (uint64_t bits = 0; bits < (1ull << cells.size()); ++bits) {
        for (size_t i = 0; i < cells.size(); ++i)
            s.interp[static_cast<size_t>(cells[i].first)][cells[i].second] = (bits >> i) & 1;
        if (!check_wellformed(s).ok()) continue;
        if (eval(s, f)) return true;
    }
    return false;
}

}  // namespace testutil

#include "flsat/certificate.hpp"

namespace testutil {

// Well-formed structure over a basic-fragment signature (unary + T + That),
// quadratic by rejection.
inline Structure random_quadratic(std::mt19937_64& rng, const Signature& sig, int max_n) {
    while (true) {
        int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_n));
        Structure s = random_structure(rng, sig, n);
        if (is_quadratic(s)) return s;
    }
}

// A basic formula true in s, found by guided sampling.
inline BasicFormula random_basic_true_in(std::mt19937_64& rng, const BasicSet& bs,
                                         const Structure& s) {
    UnaryView view = bs.view;
    auto realized = [&](int idx) { return type1_of(view, s, idx); };
    for (int tries = 0; tries < 60; ++tries) {
        BasicFormula f;
        Type1 pi = realized(static_cast<int>(rng() % static_cast<uint64_t>(s.n)));
        Type1 pi2 = realized(static_cast<int>(rng() % static_cast<uint64_t>(s.n)));
        std::vector<FormulaPtr> lits;
        for (size_t b = 0; b < view.count(); ++b) {
            int roll = static_cast<int>(rng() % 4);
            if (roll == 0) lits.push_back(f_atom(view.preds[b]));
            if (roll == 1) lits.push_back(f_not(f_atom(view.preds[b])));
        }
        auto mu = (rng() & 1) ? f_and(lits) : f_or(lits);
        switch (rng() % 8) {
            case 0: f = {BKind::B1, pi, 0, mu}; break;
            case 1: f = {BKind::B2, pi, 0, mu}; break;
            case 2:
                if (pi == pi2) continue;
                f = {BKind::B3, pi, pi2, nullptr};
                break;
            case 3:
                if (pi == pi2) continue;
                f = {BKind::B4, pi, pi2, nullptr};
                break;
            case 4: f = {BKind::B5, pi, 0, nullptr}; break;
            case 5: f = {BKind::B6, pi, 0, nullptr}; break;
            case 6: f = {BKind::B7, 0, 0, mu}; break;
            default: f = {BKind::B8, 0, 0, mu}; break;
        }
        if (eval(s, basic_to_formula(bs, f))) return f;
    }
    // guaranteed witness: some element's own type exists
    Type1 pi = realized(0);
    return {BKind::B8, 0, 0, type_to_formula(view, pi)};
}

}  // namespace testutil
