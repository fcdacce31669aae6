#pragma once

#include <chrono>

#include "flsat/synthesis.hpp"

namespace flsat {

struct MinimalCover {
    std::vector<std::vector<int>> cells;  // canonical enumeration order
    bool operator<(const MinimalCover& o) const { return cells < o.cells; }
    bool operator==(const MinimalCover& o) const { return cells == o.cells; }
};

// All covers of I with no redundant cell. MC of the empty set is the empty
// cover, which keeps the downstream conjuncts total.
inline std::vector<MinimalCover> minimal_covers(const std::vector<int>& index_set, int bound = 4) {
    std::vector<int> I = index_set;
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    if (static_cast<int>(I.size()) > bound) fail("IndexSetTooLarge", std::to_string(I.size()));
    if (I.empty()) return {MinimalCover{}};

    int n = static_cast<int>(I.size());
    uint32_t full = (1u << n) - 1;
    std::vector<MinimalCover> out;
    // families of nonempty subsets, as bitmasks over the subset space
    for (uint32_t family = 1; family < (1u << full); ++family) {
        std::vector<uint32_t> cells;
        for (uint32_t s = 1; s <= full; ++s)
            if ((family >> (s - 1)) & 1) cells.push_back(s);
        uint32_t uni = 0;
        for (uint32_t s : cells) uni |= s;
        if (uni != full) continue;
        bool minimal = true;
        for (size_t drop = 0; drop < cells.size() && minimal; ++drop) {
            uint32_t rest = 0;
            for (size_t k = 0; k < cells.size(); ++k)
                if (k != drop) rest |= cells[k];
            if (rest == full) minimal = false;
        }
        if (!minimal) continue;
        MinimalCover mc;
        for (uint32_t s : cells) {
            std::vector<int> cell;
            for (int b = 0; b < n; ++b)
                if ((s >> b) & 1) cell.push_back(I[static_cast<size_t>(b)]);
            mc.cells.push_back(cell);
        }
        out.push_back(mc);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

// Shared with to_normal_form's case split: attach the four controls to an
// existential demand at m = 2, or emit it control-free above that.
inline void attach_exist(NormalForm& nf, const FormulaPtr& mu, int mu_arity, const ClauseSet& body) {
    if (nf.m > 2) {
        nf.exist.push_back({mu, std::nullopt, body});
        return;
    }
    std::vector<std::pair<ControlFormula, ClauseSet>> cases;
    for (bool tp : {true, false})
        for (bool ep : {true, false}) {
            ControlFormula k{tp, ep};
            if (auto g = gamma_under_kappa(nf.sig, body, k)) cases.push_back({k, *g});
        }
    if (cases.empty()) {
        add_clauses(nf.omega, cnf(nnf(f_not(mu), true)));
        return;
    }
    if (cases.size() == 1 && mu->kind == FKind::Atom) {
        nf.exist.push_back({mu, cases[0].first, cases[0].second});
        return;
    }
    std::vector<FlutedClause> head = cnf(nnf(f_not(mu), true));
    std::vector<FlutedLiteral> dis;
    for (auto& [k, g] : cases) {
        PredId tr = nf.sig.add_fresh("rt", mu_arity);
        nf.fresh_provenance.push_back({nf.sig.at(tr).name, "control case trigger"});
        dis.push_back({tr, true});
        nf.exist.push_back({f_atom(tr), k, g});
    }
    // mu -> disjunction of the triggers
    if (head.size() == 1) {
        std::vector<FlutedLiteral> ls = head[0].lits;
        ls.insert(ls.end(), dis.begin(), dis.end());
        add_clauses(nf.omega, {FlutedClause::of(std::move(ls))});
    } else {
        // mu is not a literal: route through one more trigger
        PredId gate = nf.sig.add_fresh("rg", mu_arity);
        std::vector<FlutedLiteral> ls{{gate, false}};
        ls.insert(ls.end(), dis.begin(), dis.end());
        add_clauses(nf.omega, {FlutedClause::of(std::move(ls))});
        add_clauses(nf.omega, cnf(nnf(f_implies(mu, f_atom(gate)), true)));
    }
}

}  // namespace detail

// One step of the arity reduction: a normal form at m+1 becomes one at m,
// satisfiable over exactly the same domains. Controls are absorbed into the
// clause sets first; witness demands are grouped by which antecedents hold
// and which minimal cover shares the witnesses out.
inline NormalForm reduce_arity(const NormalForm& nf_in) {
    if (nf_in.m <= 2) fail("NotReducible", "already at two variables");
    NormalForm nf = nf_in;
    PredId T = nf.sig.transitive_ids().at(0);
    PredId eq = nf.sig.equality_id();
    for (auto& e : nf.exist)
        if (e.kappa) {
            e.gamma.clauses.insert(FlutedClause::of({{T, e.kappa->t_positive}}));
            e.gamma.clauses.insert(FlutedClause::of({{eq, e.kappa->eq_positive}}));
            e.kappa.reset();
        }

    int mm = nf.m;  // input arity
    NormalForm out;
    out.sig = nf.sig;
    out.m = mm - 1;
    out.omega.m = out.m;
    out.fresh_provenance = nf.fresh_provenance;

    size_t S = nf.exist.size(), Tn = nf.univ.size();
    if (S > 8 || Tn > 8) fail("BoundExceeded", "reduction index sets too large");

    auto theta_deg = [&](uint32_t I, uint32_t J, const std::vector<int>* cell) {
        ClauseSet theta;
        theta.m = mm;
        if (cell)
            for (int i : *cell)
                for (auto& c : nf.exist[static_cast<size_t>(i)].gamma.clauses) theta.clauses.insert(c);
        (void)I;
        for (size_t j = 0; j < Tn; ++j)
            if ((J >> j) & 1)
                for (auto& c : nf.univ[j].delta.clauses) theta.clauses.insert(c);
        for (auto& c : nf.omega.clauses) theta.clauses.insert(c);
        return restrict_clauses(out.sig, saturate(out.sig, theta));
    };

    for (uint32_t J = 0; J < (1u << Tn); ++J) {
        std::vector<FormulaPtr> nus;
        for (size_t j = 0; j < Tn; ++j)
            if ((J >> j) & 1) nus.push_back(nf.univ[j].nu);
        auto deg = theta_deg(0, J, nullptr);
        if (J == 0) {
            // the top-level universal carries straight into omega
            for (auto& c : deg.clauses) detail::add_clauses(out.omega, {c});
        } else {
            PredId q = out.sig.add_fresh("q" + std::to_string(J), mm - 2);
            out.fresh_provenance.push_back({out.sig.at(q).name, "universal grouping"});
            detail::add_clauses(out.omega,
                                detail::cnf(detail::nnf(f_implies(f_and(nus), f_atom(q)), true)));
            UnivEntry u;
            u.nu = f_atom(q);
            u.delta = deg;
            u.delta.m = out.m;
            out.univ.push_back(u);
        }
        for (uint32_t I = 1; I < (1u << S); ++I) {
            std::vector<int> Iv;
            for (size_t i = 0; i < S; ++i)
                if ((I >> i) & 1) Iv.push_back(static_cast<int>(i));
            std::vector<FormulaPtr> ant;
            for (int i : Iv) ant.push_back(nf.exist[static_cast<size_t>(i)].mu);
            ant.insert(ant.end(), nus.begin(), nus.end());
            std::string tag = std::to_string(I) + "_" + std::to_string(J);
            PredId p = out.sig.add_fresh("pj" + tag, mm - 2);
            out.fresh_provenance.push_back({out.sig.at(p).name, "witness grouping"});
            detail::add_clauses(out.omega,
                                detail::cnf(detail::nnf(f_implies(f_and(ant), f_atom(p)), true)));
            auto covers = minimal_covers(Iv, 8);
            std::vector<FlutedLiteral> dis{{p, false}};
            for (size_t mi = 0; mi < covers.size(); ++mi) {
                PredId pm = out.sig.add_fresh("pm" + tag + "_" + std::to_string(mi), mm - 2);
                out.fresh_provenance.push_back({out.sig.at(pm).name, "cover choice"});
                dis.push_back({pm, true});
                std::vector<PredId> hs;
                for (size_t h = 0; h < covers[mi].cells.size(); ++h) {
                    PredId ph = out.sig.add_fresh(
                        "ph" + tag + "_" + std::to_string(mi) + "_" + std::to_string(h), mm - 1);
                    out.fresh_provenance.push_back({out.sig.at(ph).name, "shared witness marker"});
                    hs.push_back(ph);
                    auto deg_h = theta_deg(I, J, &covers[mi].cells[h]);
                    ClauseSet body = deg_h;
                    body.m = out.m;
                    body.clauses.insert(FlutedClause::of({{ph, true}}));
                    detail::attach_exist(out, f_atom(pm), mm - 2, body);
                }
                for (size_t a = 0; a < hs.size(); ++a)
                    for (size_t b = a + 1; b < hs.size(); ++b)
                        detail::add_clauses(out.omega,
                                            {FlutedClause::of({{hs[a], false}, {hs[b], false}})});
            }
            detail::add_clauses(out.omega, {FlutedClause::of(std::move(dis))});
        }
    }
    detail::compact_nf(out, 0);
    return out;
}

// ---------------------------------------------------------------------------
// top-level solve

struct SolveOptions {
    int m = 0;  // 0: use the sentence's own bound (at least 2)
    int max_omega = 4;
    int royal_cap = 2;
    int depth = 4;
    uint64_t search_budget = 500000;
    double budget_seconds = 0;  // 0: no wall-clock budget
    SatisfactionOptions sat;
};

struct SolveArtifacts {
    NormalForm nf;                       // after reduction to two variables
    std::vector<NormalForm> stages;      // one entry per arity step, first is the original
    std::optional<SpreadNormalForm> snf;
    std::optional<BasicSet> basic;
    std::optional<BasicSet> star;
    std::optional<Certificate> cert;
    std::optional<SynthesizedPrefix> prefix;
    std::vector<Type1> royal_used;
};

struct SolveResult {
    SearchStatus status = SearchStatus::UnsatAtCap;
    SolveArtifacts artifacts;
};

inline SolveResult solve(const Signature& sig, const FormulaPtr& f, const SolveOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    auto over_budget = [&] {
        if (opts.budget_seconds <= 0) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               opts.budget_seconds;
    };

    auto info = validate(sig, f, 0);
    int m = std::max(2, opts.m > 0 ? opts.m : info.variable_bound);
    SolveResult res;
    NormalForm nf = to_normal_form(sig, f, m);
    res.artifacts.stages.push_back(nf);
    while (nf.m > 2) {
        nf = reduce_arity(nf);
        res.artifacts.stages.push_back(nf);
    }
    res.artifacts.nf = nf;
    if (nf.omega.has_falsum()) {
        res.status = SearchStatus::UnsatAtCap;
        return res;
    }

    UnaryView view = UnaryView::of(nf.sig);
    if (view.count() > 20) fail("BoundExceeded", "normal form signature too wide for royal guessing");
    // candidate royal types must survive the unary part of omega
    std::vector<Type1> pool;
    for (uint64_t t = 0; t <= view.universe(); ++t) {
        Type1 ty = static_cast<Type1>(t);
        bool ok = true;
        for (auto& c : nf.omega.clauses) {
            bool unary_only = true, sat = false;
            for (auto& l : c.lits) {
                int b = view.bit_of(l.pred);
                if (b < 0) { unary_only = false; break; }
                if (((ty >> b) & 1) == l.positive) sat = true;
            }
            if (unary_only && !sat) { ok = false; break; }
        }
        if (ok) pool.push_back(ty);
    }

    std::vector<std::vector<Type1>> guesses{{}};
    for (int size = 1; size <= opts.royal_cap; ++size) {
        std::vector<int> idx(static_cast<size_t>(size));
        std::function<void(size_t, size_t)> combos = [&](size_t start, size_t k) {
            if (k == idx.size()) {
                std::vector<Type1> g;
                for (int i : idx) g.push_back(pool[static_cast<size_t>(i)]);
                guesses.push_back(g);
                return;
            }
            for (size_t i = start; i < pool.size(); ++i) {
                idx[k] = static_cast<int>(i);
                combos(i + 1, k + 1);
            }
        };
        combos(0, 0);
    }

    bool any_budget = false;
    for (auto& royal : guesses) {
        if (over_budget()) { any_budget = true; break; }
        auto snf = to_spread(nf, royal);
        auto phi = spread_to_basic(snf);
        auto star = quadratic_transform(phi);
        CertSearchOptions so;
        so.max_omega = opts.max_omega;
        so.node_budget = opts.search_budget;
        so.sat = opts.sat;
        auto r = search(star, so);
        if (r.status == SearchStatus::Sat) {
            res.status = SearchStatus::Sat;
            res.artifacts.snf = snf;
            res.artifacts.basic = phi;
            res.artifacts.star = star;
            res.artifacts.cert = r.cert;
            res.artifacts.prefix = synthesize(*r.cert, opts.depth);
            res.artifacts.royal_used = royal;
            return res;
        }
        if (r.status == SearchStatus::BudgetExhausted) any_budget = true;
    }
    res.status = any_budget ? SearchStatus::BudgetExhausted : SearchStatus::UnsatAtCap;
    return res;
}

}  // namespace flsat
