#pragma once

#include <cmath>
#include <map>
#include <optional>

#include "flsat/clause.hpp"
#include "flsat/type1.hpp"

namespace flsat {

// One of (T & =), (T & !=), (!T & =), (!T & !=).
struct ControlFormula {
    bool t_positive = true;
    bool eq_positive = false;
};

struct ExistEntry {
    FormulaPtr mu;                         // quantifier-free, arity <= m-1
    std::optional<ControlFormula> kappa;   // mandatory at m == 2
    ClauseSet gamma;
};

struct UnivEntry {
    FormulaPtr nu;
    ClauseSet delta;
};

struct NormalForm {
    Signature sig;
    int m = 2;
    std::vector<ExistEntry> exist;
    std::vector<UnivEntry> univ;
    ClauseSet omega;
    std::vector<std::pair<std::string, std::string>> fresh_provenance;  // name -> origin
};

struct SpreadExist {
    FormulaPtr mu;
    PredId o = -1;
    ControlFormula kappa;
    ClauseSet gamma;
};

struct SpreadNormalForm {
    Signature sig;
    std::vector<FormulaPtr> lambdas;
    std::vector<SpreadExist> exist;
    std::vector<UnivEntry> univ;
    ClauseSet omega;
    std::vector<PredId> o_preds;
    std::vector<std::pair<std::string, std::string>> fresh_provenance;
};

// ---------------------------------------------------------------------------
// formula utilities

namespace detail {

inline FormulaPtr fold(FormulaPtr f) {
    switch (f->kind) {
        case FKind::Not: {
            auto k = fold(f->kids[0]);
            if (k->kind == FKind::True) return f_false();
            if (k->kind == FKind::False) return f_true();
            if (k->kind == FKind::Not) return k->kids[0];
            return f_not(k);
        }
        case FKind::And: {
            std::vector<FormulaPtr> kids;
            for (auto& k : f->kids) {
                auto g = fold(k);
                if (g->kind == FKind::False) return f_false();
                if (g->kind == FKind::True) continue;
                kids.push_back(g);
            }
            return f_and(std::move(kids));
        }
        case FKind::Or: {
            std::vector<FormulaPtr> kids;
            for (auto& k : f->kids) {
                auto g = fold(k);
                if (g->kind == FKind::True) return f_true();
                if (g->kind == FKind::False) continue;
                kids.push_back(g);
            }
            return f_or(std::move(kids));
        }
        case FKind::Xor: {
            // exactly-one semantics: false arms vanish, a true arm forces the
            // rest false, two true arms are contradictory
            std::vector<FormulaPtr> kids;
            int trues = 0;
            for (auto& k : f->kids) {
                auto g = fold(k);
                if (g->kind == FKind::False) continue;
                if (g->kind == FKind::True) { ++trues; continue; }
                kids.push_back(g);
            }
            if (trues >= 2) return f_false();
            if (trues == 1) {
                std::vector<FormulaPtr> negs;
                for (auto& k : kids) negs.push_back(fold(f_not(k)));
                return f_and(std::move(negs));
            }
            return f_xor(std::move(kids));
        }
        case FKind::Implies: {
            auto a = fold(f->kids[0]);
            auto b = fold(f->kids[1]);
            if (a->kind == FKind::False || b->kind == FKind::True) return f_true();
            if (a->kind == FKind::True) return b;
            if (b->kind == FKind::False) return fold(f_not(a));
            return f_implies(a, b);
        }
        case FKind::Forall:
        case FKind::Exists: {
            auto k = fold(f->kids[0]);
            if (k->kind == FKind::True || k->kind == FKind::False) return k;  // nonempty domains
            return mk(f->kind, {k});
        }
        default:
            return f;
    }
}

inline FormulaPtr subst_atom(const FormulaPtr& f, PredId p, bool value) {
    if (f->kind == FKind::Atom) return f->pred == p ? (value ? f_true() : f_false()) : f;
    if (f->kids.empty()) return f;
    std::vector<FormulaPtr> kids;
    for (auto& k : f->kids) kids.push_back(subst_atom(k, p, value));
    return mk(f->kind, std::move(kids), f->pred);
}

inline FormulaPtr rename_atom(const FormulaPtr& f, PredId from, PredId to) {
    if (f->kind == FKind::Atom) return f->pred == from ? f_atom(to) : f;
    if (f->kids.empty()) return f;
    std::vector<FormulaPtr> kids;
    for (auto& k : f->kids) kids.push_back(rename_atom(k, from, to));
    return mk(f->kind, std::move(kids), f->pred);
}

// Negation normal form; exclusive disjunction expands to its exactly-one form.
inline FormulaPtr nnf(const FormulaPtr& f, bool positive) {
    switch (f->kind) {
        case FKind::True: return positive ? f_true() : f_false();
        case FKind::False: return positive ? f_false() : f_true();
        case FKind::Atom: return positive ? f : f_not(f);
        case FKind::Not: return nnf(f->kids[0], !positive);
        case FKind::And: {
            std::vector<FormulaPtr> kids;
            for (auto& k : f->kids) kids.push_back(nnf(k, positive));
            return positive ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        case FKind::Or: {
            std::vector<FormulaPtr> kids;
            for (auto& k : f->kids) kids.push_back(nnf(k, positive));
            return positive ? f_or(std::move(kids)) : f_and(std::move(kids));
        }
        case FKind::Implies: {
            std::vector<FormulaPtr> kids{nnf(f->kids[0], !positive), nnf(f->kids[1], positive)};
            return positive ? f_or(std::move(kids)) : f_and({nnf(f->kids[0], true), nnf(f->kids[1], false)});
        }
        case FKind::Xor: {
            std::vector<FormulaPtr> arms;
            for (size_t i = 0; i < f->kids.size(); ++i) {
                std::vector<FormulaPtr> lits;
                for (size_t j = 0; j < f->kids.size(); ++j)
                    lits.push_back(j == i ? f->kids[j] : f_not(f->kids[j]));
                arms.push_back(f_and(std::move(lits)));
            }
            return nnf(f_or(std::move(arms)), positive);
        }
        case FKind::Forall:
            return positive ? f_forall(nnf(f->kids[0], true)) : f_exists(nnf(f->kids[0], false));
        case FKind::Exists:
            return positive ? f_exists(nnf(f->kids[0], true)) : f_forall(nnf(f->kids[0], false));
    }
    return f;
}

// CNF of a quantifier-free NNF formula, with tautology dropping and
// subsumption pruning. Inputs are desk-sized, so plain distribution is fine.
inline std::vector<FlutedClause> cnf(const FormulaPtr& f) {
    switch (f->kind) {
        case FKind::True: return {};
        case FKind::False: return {FlutedClause{}};
        case FKind::Atom: return {FlutedClause::of({{f->pred, true}})};
        case FKind::Not:
            if (f->kids[0]->kind != FKind::Atom) fail("Internal", "cnf expects NNF input");
            return {FlutedClause::of({{f->kids[0]->pred, false}})};
        case FKind::And: {
            std::vector<FlutedClause> out;
            for (auto& k : f->kids)
                for (auto& c : cnf(k)) out.push_back(c);
            return out;
        }
        case FKind::Or: {
            std::vector<FlutedClause> acc{FlutedClause{}};
            for (auto& k : f->kids) {
                std::vector<FlutedClause> next;
                for (auto& kc : cnf(k))
                    for (auto& ac : acc) {
                        std::vector<FlutedLiteral> ls = ac.lits;
                        ls.insert(ls.end(), kc.lits.begin(), kc.lits.end());
                        next.push_back(FlutedClause::of(std::move(ls)));
                    }
                acc = std::move(next);
            }
            return acc;
        }
        default:
            fail("Internal", "cnf expects quantifier-free NNF input");
    }
    return {};
}

inline void add_clauses(ClauseSet& cs, const std::vector<FlutedClause>& add) {
    for (auto& c : add) {
        if (c.tautological()) continue;
        bool subsumed = false;
        for (auto& d : cs.clauses)
            if (d.subsumes(c)) { subsumed = true; break; }
        if (subsumed) continue;
        for (auto it = cs.clauses.begin(); it != cs.clauses.end();)
            it = c.subsumes(*it) && !(*it == c) ? cs.clauses.erase(it) : std::next(it);
        cs.clauses.insert(c);
    }
}

inline FormulaPtr clause_to_formula(const FlutedClause& c) {
    std::vector<FormulaPtr> ls;
    for (auto& l : c.lits) ls.push_back(l.positive ? f_atom(l.pred) : f_not(f_atom(l.pred)));
    return f_or(std::move(ls));
}

inline FormulaPtr clauses_to_formula(const ClauseSet& cs) {
    std::vector<FormulaPtr> out;
    for (auto& c : cs.clauses) out.push_back(clause_to_formula(c));
    return f_and(std::move(out));
}

inline FormulaPtr kappa_to_formula(const Signature& sig, const ControlFormula& k) {
    PredId t = sig.transitive_ids().at(0);
    PredId eq = sig.equality_id();
    auto tf = k.t_positive ? f_atom(t) : f_not(f_atom(t));
    auto ef = k.eq_positive ? f_atom(eq) : f_not(f_atom(eq));
    return f_and({tf, ef});
}

inline FormulaPtr forall_n(FormulaPtr f, int n) {
    for (int i = 0; i < n; ++i) f = f_forall(f);
    return f;
}

}  // namespace detail

inline FormulaPtr normal_form_to_formula(const NormalForm& nf) {
    std::vector<FormulaPtr> conjuncts;
    for (auto& e : nf.exist) {
        std::vector<FormulaPtr> body;
        if (e.kappa) body.push_back(detail::kappa_to_formula(nf.sig, *e.kappa));
        if (!e.gamma.clauses.empty()) body.push_back(detail::clauses_to_formula(e.gamma));
        conjuncts.push_back(
            detail::forall_n(f_implies(e.mu, f_exists(f_and(body))), nf.m - 1));
    }
    for (auto& u : nf.univ)
        conjuncts.push_back(
            detail::forall_n(f_implies(u.nu, f_forall(detail::clauses_to_formula(u.delta))), nf.m - 1));
    if (!nf.omega.clauses.empty())
        conjuncts.push_back(detail::forall_n(detail::clauses_to_formula(nf.omega), nf.m));
    return f_and(conjuncts);
}

inline std::vector<FlutedClause> o_disjointness_clauses(const SpreadNormalForm& snf) {
    std::vector<FlutedClause> out;
    for (size_t i = 0; i < snf.o_preds.size(); ++i)
        for (size_t j = i + 1; j < snf.o_preds.size(); ++j)
            out.push_back(FlutedClause::of({{snf.o_preds[i], false}, {snf.o_preds[j], false}}));
    return out;
}

inline FormulaPtr spread_to_formula(const SpreadNormalForm& snf) {
    std::vector<FormulaPtr> conjuncts;
    for (auto& l : snf.lambdas) conjuncts.push_back(f_exists(l));
    for (auto& e : snf.exist) {
        auto body = f_and({f_atom(e.o), detail::kappa_to_formula(snf.sig, e.kappa),
                           detail::clauses_to_formula(e.gamma)});
        conjuncts.push_back(f_forall(f_implies(e.mu, f_exists(detail::fold(body)))));
    }
    for (auto& u : snf.univ)
        conjuncts.push_back(f_forall(f_implies(u.nu, f_forall(detail::clauses_to_formula(u.delta)))));
    conjuncts.push_back(f_forall(f_forall(detail::clauses_to_formula(snf.omega))));
    ClauseSet disj;
    disj.m = 2;
    for (auto& c : o_disjointness_clauses(snf)) disj.clauses.insert(c);
    conjuncts.push_back(f_forall(detail::clauses_to_formula(disj)));
    return detail::fold(f_and(conjuncts));
}

// ---------------------------------------------------------------------------
// sentence -> normal form

namespace detail {

struct Compiler {
    Signature sig;
    NormalForm nf;
    struct ExistOb { int arity; PredId trigger; FormulaPtr body; };
    struct UnivOb { int arity; PredId trigger; FormulaPtr body; };
    std::vector<ExistOb> exist_obs;
    std::vector<UnivOb> univ_obs;
    std::map<std::string, PredId> memo;  // identical subformulas share a name

    PredId fresh(const std::string& stem, int arity, const std::string& why) {
        PredId p = sig.add_fresh(stem, arity);
        nf.fresh_provenance.push_back({sig.at(p).name, why});
        return p;
    }

    FormulaPtr compile(const FormulaPtr& f, int depth) {
        switch (f->kind) {
            case FKind::True:
            case FKind::False:
            case FKind::Atom:
                return f;
            case FKind::Not:
                return f_not(compile(f->kids[0], depth));
            case FKind::And:
            case FKind::Or: {
                std::vector<FormulaPtr> kids;
                for (auto& k : f->kids) kids.push_back(compile(k, depth));
                return mk(f->kind, std::move(kids));
            }
            case FKind::Exists: {
                auto body = compile(f->kids[0], depth + 1);
                std::string key = "E" + std::to_string(depth) + print(sig, body);
                if (auto it = memo.find(key); it != memo.end()) return f_atom(it->second);
                PredId e = fresh("nfe", depth, "existential subformula at depth " + std::to_string(depth));
                exist_obs.push_back({depth, e, body});
                memo[key] = e;
                return f_atom(e);
            }
            case FKind::Forall: {
                auto body = compile(f->kids[0], depth + 1);
                std::string key = "A" + std::to_string(depth) + print(sig, body);
                if (auto it = memo.find(key); it != memo.end()) return f_atom(it->second);
                PredId u = fresh("nfa", depth, "universal subformula at depth " + std::to_string(depth));
                univ_obs.push_back({depth, u, body});
                memo[key] = u;
                return f_atom(u);
            }
            default:
                fail("Internal", "compile expects NNF");
        }
        return f;
    }
};

// Simplifies gamma under the control's T/= commitments: satisfied clauses
// drop, contradicted literals shrink. Returns nullopt when falsum appears.
inline std::optional<ClauseSet> gamma_under_kappa(const Signature& sig, const ClauseSet& gamma,
                                                  const ControlFormula& k) {
    PredId t = sig.transitive_ids().at(0);
    PredId eq = sig.equality_id();
    ClauseSet out;
    out.m = gamma.m;
    for (auto& c : gamma.clauses) {
        std::vector<FlutedLiteral> keep;
        bool sat = false;
        for (auto& l : c.lits) {
            if (l.pred == t) {
                if (l.positive == k.t_positive) sat = true;
            } else if (l.pred == eq) {
                if (l.positive == k.eq_positive) sat = true;
            } else {
                keep.push_back(l);
            }
            if (sat) break;
        }
        if (sat) continue;
        if (keep.empty()) return std::nullopt;
        out.clauses.insert(FlutedClause::of(std::move(keep)));
    }
    return out;
}

inline bool clause_set_mentions(const ClauseSet& cs, PredId p, bool positive) {
    for (auto& c : cs.clauses)
        if (c.contains({p, positive})) return true;
    return false;
}

inline void subst_clause_set(ClauseSet& cs, PredId p, bool value) {
    ClauseSet out;
    out.m = cs.m;
    for (auto& c : cs.clauses) {
        std::vector<FlutedLiteral> keep;
        bool sat = false;
        for (auto& l : c.lits) {
            if (l.pred == p) {
                if (l.positive == value) { sat = true; break; }
            } else {
                keep.push_back(l);
            }
        }
        if (!sat) out.clauses.insert(FlutedClause::of(std::move(keep)));
    }
    cs = std::move(out);
}

inline void simplify_nf(NormalForm& nf, int original_count) {
    std::set<std::pair<PredId, bool>> pinned;  // substituted units that must stay
    bool changed = true;
    while (changed) {
        changed = false;
        if (nf.omega.has_falsum()) {
            nf.exist.clear();
            nf.univ.clear();
            nf.omega.clauses.clear();
            nf.omega.clauses.insert(FlutedClause{});
            return;
        }
        // trivially-true antecedent universals live in omega
        for (size_t i = 0; i < nf.univ.size();) {
            auto& u = nf.univ[i];
            u.nu = fold(u.nu);
            if (u.delta.has_falsum()) {
                add_clauses(nf.omega, cnf(nnf(f_not(u.nu), true)));
                nf.univ.erase(nf.univ.begin() + static_cast<long>(i));
                changed = true;
            } else if (u.nu->kind == FKind::False || u.delta.clauses.empty()) {
                nf.univ.erase(nf.univ.begin() + static_cast<long>(i));
                changed = true;
            } else if (u.nu->kind == FKind::True) {
                std::vector<FlutedClause> cs(u.delta.clauses.begin(), u.delta.clauses.end());
                add_clauses(nf.omega, cs);
                nf.univ.erase(nf.univ.begin() + static_cast<long>(i));
                changed = true;
            } else {
                ++i;
            }
        }
        for (size_t i = 0; i < nf.exist.size();) {
            auto& e = nf.exist[i];
            e.mu = fold(e.mu);
            if (e.mu->kind == FKind::False) {
                nf.exist.erase(nf.exist.begin() + static_cast<long>(i));
                changed = true;
            } else if (e.gamma.has_falsum()) {
                add_clauses(nf.omega, cnf(nnf(f_not(e.mu), true)));
                nf.exist.erase(nf.exist.begin() + static_cast<long>(i));
                changed = true;
            } else {
                ++i;
            }
        }
        // unit propagation for ordinary predicates; units on original
        // predicates are real constraints and stay pinned in omega
        std::optional<std::pair<PredId, bool>> unit;
        for (auto& c : nf.omega.clauses)
            if (c.lits.size() == 1 && nf.sig.at(c.lits[0].pred).kind == PredKind::Ordinary &&
                !pinned.count({c.lits[0].pred, c.lits[0].positive})) {
                unit = {c.lits[0].pred, c.lits[0].positive};
                break;
            }
        if (unit) {
            auto [p, v] = *unit;
            subst_clause_set(nf.omega, p, v);
            for (auto& e : nf.exist) {
                e.mu = fold(subst_atom(e.mu, p, v));
                subst_clause_set(e.gamma, p, v);
            }
            for (auto& u : nf.univ) {
                u.nu = fold(subst_atom(u.nu, p, v));
                subst_clause_set(u.delta, p, v);
            }
            if (p < original_count) {
                nf.omega.clauses.insert(FlutedClause::of({{p, v}}));
                pinned.insert({p, v});
            }
            changed = true;
        }
    }
    // drop duplicate entries
    auto key_of = [&](const ExistEntry& e) {
        std::string k = print(nf.sig, e.mu) + "#";
        if (e.kappa) k += std::string(e.kappa->t_positive ? "T" : "t") + (e.kappa->eq_positive ? "E" : "e");
        for (auto& c : e.gamma.clauses) {
            for (auto& l : c.lits) k += std::to_string(l.pred) + (l.positive ? "+" : "-");
            k += ";";
        }
        return k;
    };
    std::set<std::string> seen;
    std::vector<ExistEntry> keep;
    for (auto& e : nf.exist)
        if (seen.insert(key_of(e)).second) keep.push_back(e);
    nf.exist = std::move(keep);
}

inline void collect_atoms(const FormulaPtr& f, std::set<PredId>& out) {
    if (f->kind == FKind::Atom) out.insert(f->pred);
    for (auto& k : f->kids) collect_atoms(k, out);
}

inline std::set<PredId> nf_used_preds(const NormalForm& nf) {
    std::set<PredId> used;
    auto scan_cs = [&](const ClauseSet& cs) {
        for (auto& c : cs.clauses)
            for (auto& l : c.lits) used.insert(l.pred);
    };
    for (auto& e : nf.exist) {
        collect_atoms(e.mu, used);
        scan_cs(e.gamma);
    }
    for (auto& u : nf.univ) {
        collect_atoms(u.nu, used);
        scan_cs(u.delta);
    }
    scan_cs(nf.omega);
    return used;
}

// Drops fresh predicates that simplification eliminated; original signature
// entries keep their ids (fresh ones sit behind them).
inline void compact_nf(NormalForm& nf, int original_count) {
    auto used = nf_used_preds(nf);
    std::vector<PredId> remap(nf.sig.preds.size(), -1);
    Signature out;
    for (PredId p = 0; p < nf.sig.size(); ++p) {
        const Pred& pr = nf.sig.at(p);
        if (p < original_count || pr.kind != PredKind::Ordinary || used.count(p)) {
            remap[static_cast<size_t>(p)] = out.size();
            out.preds.push_back(pr);
        }
    }
    if (out.size() == nf.sig.size()) return;
    auto remap_formula = [&](FormulaPtr f) {
        struct R {
            const std::vector<PredId>& remap;
            FormulaPtr go(const FormulaPtr& g) {
                if (g->kind == FKind::Atom) return f_atom(remap[static_cast<size_t>(g->pred)]);
                if (g->kids.empty()) return g;
                std::vector<FormulaPtr> kids;
                for (auto& k : g->kids) kids.push_back(go(k));
                return mk(g->kind, std::move(kids), -1);
            }
        } r{remap};
        return r.go(f);
    };
    auto remap_cs = [&](ClauseSet& cs) {
        ClauseSet next;
        next.m = cs.m;
        for (auto& c : cs.clauses) {
            std::vector<FlutedLiteral> ls;
            for (auto& l : c.lits) ls.push_back({remap[static_cast<size_t>(l.pred)], l.positive});
            next.clauses.insert(FlutedClause::of(std::move(ls)));
        }
        cs = std::move(next);
    };
    for (auto& e : nf.exist) {
        e.mu = remap_formula(e.mu);
        remap_cs(e.gamma);
    }
    for (auto& u : nf.univ) {
        u.nu = remap_formula(u.nu);
        remap_cs(u.delta);
    }
    remap_cs(nf.omega);
    std::vector<std::pair<std::string, std::string>> prov;
    for (auto& [name, why] : nf.fresh_provenance)
        if (out.find(name) >= 0) prov.push_back({name, why});
    nf.fresh_provenance = std::move(prov);
    nf.sig = std::move(out);
}

inline void groundify(NormalForm& nf) {
    auto used = nf_used_preds(nf);
    for (PredId p : nf.sig.nullary_ids()) {
        if (!used.count(p)) continue;
        PredId q = nf.sig.add_fresh(nf.sig.at(p).name + "u", 1);
        nf.fresh_provenance.push_back({nf.sig.at(q).name, "unary stand-in for proposition letter " +
                                                              nf.sig.at(p).name});
        auto rename_cs = [&](ClauseSet& cs) {
            ClauseSet out;
            out.m = cs.m;
            for (auto& c : cs.clauses) {
                std::vector<FlutedLiteral> ls;
                for (auto& l : c.lits) ls.push_back({l.pred == p ? q : l.pred, l.positive});
                out.clauses.insert(FlutedClause::of(std::move(ls)));
            }
            cs = std::move(out);
        };
        for (auto& e : nf.exist) {
            e.mu = rename_atom(e.mu, p, q);
            rename_cs(e.gamma);
        }
        for (auto& u : nf.univ) {
            u.nu = rename_atom(u.nu, p, q);
            rename_cs(u.delta);
        }
        rename_cs(nf.omega);
        // uniformity: if one element carries the stand-in, all do
        UnivEntry uni;
        uni.nu = f_atom(q);
        uni.delta.m = nf.m;
        uni.delta.clauses.insert(FlutedClause::of({{q, true}}));
        nf.univ.push_back(uni);
    }
}

inline std::optional<NormalForm> recognize_normal_form(const Signature& sig, const FormulaPtr& f,
                                                       int m) {
    NormalForm nf;
    nf.sig = sig;
    nf.m = m;
    nf.omega.m = m;
    PredId t = -1, eq = -1;
    {
        auto ts = sig.transitive_ids();
        if (ts.size() != 1 || !sig.has_equality()) return std::nullopt;
        t = ts[0];
        eq = sig.equality_id();
    }
    std::vector<FormulaPtr> conjuncts =
        f->kind == FKind::And ? f->kids : std::vector<FormulaPtr>{f};
    for (auto& c : conjuncts) {
        FormulaPtr g = c;
        int prefix = 0;
        while (g->kind == FKind::Forall) {
            g = g->kids[0];
            ++prefix;
        }
        try {
            if (prefix == m) {
                add_clauses(nf.omega, cnf(nnf(g, true)));
                continue;
            }
            if (prefix != m - 1) return std::nullopt;
            FormulaPtr mu = f_true(), body = g;
            if (g->kind == FKind::Implies) {
                mu = g->kids[0];
                body = g->kids[1];
            }
            if (validate(nf.sig, mu, m - 1).quantifier_depth != 0) return std::nullopt;
            if (body->kind == FKind::Forall) {
                UnivEntry u;
                u.nu = mu;
                u.delta.m = m;
                add_clauses(u.delta, cnf(nnf(body->kids[0], true)));
                if (validate(nf.sig, body->kids[0], m).quantifier_depth != 0) return std::nullopt;
                nf.univ.push_back(u);
                continue;
            }
            if (body->kind != FKind::Exists) return std::nullopt;
            auto inner = body->kids[0];
            if (validate(nf.sig, inner, m).quantifier_depth != 0) return std::nullopt;
            std::vector<FormulaPtr> parts =
                inner->kind == FKind::And ? inner->kids : std::vector<FormulaPtr>{inner};
            std::optional<bool> tpos, epos;
            ExistEntry e;
            e.mu = mu;
            e.gamma.m = m;
            for (auto& part : parts) {
                PredId pid = -1;
                bool sign = true;
                if (part->kind == FKind::Atom) pid = part->pred;
                if (part->kind == FKind::Not && part->kids[0]->kind == FKind::Atom) {
                    pid = part->kids[0]->pred;
                    sign = false;
                }
                if (pid == t && !tpos) { tpos = sign; continue; }
                if (pid == eq && !epos) { epos = sign; continue; }
                add_clauses(e.gamma, cnf(nnf(part, true)));
            }
            if (!tpos || !epos) return std::nullopt;
            e.kappa = ControlFormula{*tpos, *epos};
            nf.exist.push_back(e);
        } catch (const FlError&) {
            return std::nullopt;
        }
    }
    return nf;
}

}  // namespace detail

// Compiles a sentence into the staged shape: existential and universal
// subformulas are named by fresh predicates, existential consequents split
// over the four controls (cases inconsistent with the demand are pruned),
// everything else lands in omega. Proposition letters are replaced by uniform
// unary stand-ins at the end so the later stages see a unary alphabet.
inline NormalForm to_normal_form(const Signature& sig_in, const FormulaPtr& f, int m) {
    auto info = validate(sig_in, f, 0);
    if (m < 2) fail("VariableBoundExceeded", "normal form needs m >= 2");
    if (info.variable_bound > m)
        fail("VariableBoundExceeded", "sentence needs " + std::to_string(info.variable_bound) +
                                          " variables but m = " + std::to_string(m));
    Signature sig = sig_in;
    if (sig.transitive_ids().size() != 1)
        fail("BadSignature", "the solver pipeline needs exactly one transitive relation");
    if (!sig.has_equality()) sig.add("=", 2, PredKind::Equality);

    if (auto ready = detail::recognize_normal_form(sig, f, m)) return *ready;

    detail::Compiler comp;
    comp.sig = sig;
    comp.nf.m = m;
    comp.nf.omega.m = m;

    auto top = comp.compile(detail::nnf(detail::fold(f), true), 0);
    detail::add_clauses(comp.nf.omega, detail::cnf(top));

    for (auto& ob : comp.univ_obs) {
        UnivEntry u;
        u.nu = f_atom(ob.trigger);
        u.delta.m = m;
        detail::add_clauses(u.delta, detail::cnf(ob.body));
        comp.nf.univ.push_back(u);
    }
    for (auto& ob : comp.exist_obs) {
        ClauseSet body;
        body.m = m;
        detail::add_clauses(body, detail::cnf(ob.body));
        std::vector<std::pair<ControlFormula, ClauseSet>> cases;
        std::vector<FormulaPtr> absorbed;  // equality cases met by the element itself
        for (bool tp : {true, false})
            for (bool ep : {false, true}) {
                ControlFormula k{tp, ep};
                auto g = detail::gamma_under_kappa(comp.sig, body, k);
                if (!g) continue;
                if (!ep) {
                    cases.push_back({k, *g});
                    continue;
                }
                // the witness is the element itself when nothing binary is left
                bool self_readable = true;
                for (auto& c : g->clauses)
                    for (auto& l : c.lits)
                        if (comp.sig.at(l.pred).arity >= 2) self_readable = false;
                if (!self_readable) {
                    cases.push_back({k, *g});
                    continue;
                }
                if (comp.sig.that_id() < 0) comp.sig.add("That", 1, PredKind::THat);
                PredId that = comp.sig.that_id();
                std::vector<FormulaPtr> parts{tp ? f_atom(that)
                                                 : static_cast<FormulaPtr>(f_not(f_atom(that)))};
                for (auto& c : g->clauses) parts.push_back(detail::clause_to_formula(c));
                absorbed.push_back(f_and(parts));
            }
        if (cases.empty() && absorbed.empty()) {
            detail::add_clauses(comp.nf.omega, {FlutedClause::of({{ob.trigger, false}})});
            continue;
        }
        if (cases.size() == 1 && absorbed.empty()) {
            comp.nf.exist.push_back({f_atom(ob.trigger), cases[0].first, cases[0].second});
            continue;
        }
        std::vector<FormulaPtr> routes{f_not(f_atom(ob.trigger))};
        for (auto& [k, g] : cases) {
            PredId tr = comp.fresh("nft", ob.arity,
                                   std::string("control case ") + (k.t_positive ? "T" : "!T") +
                                       (k.eq_positive ? "=" : "!="));
            routes.push_back(f_atom(tr));
            comp.nf.exist.push_back({f_atom(tr), k, g});
        }
        for (auto& a : absorbed) routes.push_back(a);
        detail::add_clauses(comp.nf.omega, detail::cnf(detail::nnf(f_or(routes), true)));
    }

    comp.nf.sig = comp.sig;
    detail::simplify_nf(comp.nf, sig.size());
    detail::groundify(comp.nf);
    detail::simplify_nf(comp.nf, sig.size());
    detail::compact_nf(comp.nf, sig.size());
    return comp.nf;
}

// Normal form (m = 2) to spread normal form for a guessed royal set. The
// fresh predicates o_i spread witness demands over disjoint elements; the
// bit-vector formulas route each demand either to a fresh non-royal witness
// (pattern <i,0>) or to the king of a royal type (pattern <i,l>).
inline SpreadNormalForm to_spread(const NormalForm& nf, const std::vector<Type1>& royal) {
    if (nf.m != 2) fail("SignatureNotTwoVariable", "spread normal form is a two-variable notion");
    SpreadNormalForm snf;
    snf.sig = nf.sig;
    snf.omega.m = 2;
    snf.fresh_provenance = nf.fresh_provenance;
    UnaryView view = UnaryView::of(nf.sig);

    int S = static_cast<int>(nf.exist.size());
    int L = static_cast<int>(royal.size());
    int k = 0;
    while ((1 << k) < (L + 1) * S) ++k;

    for (Type1 pi : royal) snf.lambdas.push_back(type_to_formula(view, pi));

    std::vector<PredId> wbits;
    for (int b = 0; b < k; ++b) {
        PredId w = snf.sig.add_fresh("w" + std::to_string(b), 1);
        snf.fresh_provenance.push_back({snf.sig.at(w).name, "witness routing bit"});
        wbits.push_back(w);
    }
    auto wbar = [&](int i, int l) {
        int code = i * (L + 1) + l;
        std::vector<FormulaPtr> lits;
        for (int b = 0; b < k; ++b) {
            auto a = f_atom(wbits[static_cast<size_t>(b)]);
            lits.push_back(((code >> b) & 1) ? a : f_not(a));
        }
        return f_and(std::move(lits));
    };

    for (int i = 0; i < S; ++i) {
        const ExistEntry& e = nf.exist[static_cast<size_t>(i)];
        if (!e.kappa) fail("Internal", "m = 2 normal form entry without a control");
        PredId o = snf.sig.add_fresh("o" + std::to_string(i), 1);
        snf.fresh_provenance.push_back({snf.sig.at(o).name, "witness spreading marker"});
        snf.o_preds.push_back(o);
        snf.exist.push_back({wbar(i, 0), o, *e.kappa, e.gamma});

        PredId t = nf.sig.transitive_ids().at(0);
        PredId eq = nf.sig.equality_id();
        for (int l = 1; l <= L; ++l) {
            UnivEntry u;
            u.nu = wbar(i, l);
            u.delta.m = 2;
            std::vector<FlutedLiteral> neg_pi;
            for (size_t b = 0; b < view.count(); ++b)
                neg_pi.push_back({view.preds[b], !((royal[static_cast<size_t>(l) - 1] >> b) & 1)});
            auto guard = [&](FlutedLiteral extra) {
                std::vector<FlutedLiteral> ls = neg_pi;
                ls.push_back(extra);
                return FlutedClause::of(std::move(ls));
            };
            u.delta.clauses.insert(guard({t, e.kappa->t_positive}));
            u.delta.clauses.insert(guard({eq, e.kappa->eq_positive}));
            for (auto& c : e.gamma.clauses) {
                std::vector<FlutedLiteral> ls = neg_pi;
                ls.insert(ls.end(), c.lits.begin(), c.lits.end());
                u.delta.clauses.insert(FlutedClause::of(std::move(ls)));
            }
            snf.univ.push_back(u);
        }
        // every demand routes somewhere
        std::vector<FormulaPtr> routes;
        for (int l = 0; l <= L; ++l) routes.push_back(wbar(i, l));
        detail::add_clauses(snf.omega,
                            detail::cnf(detail::nnf(f_implies(e.mu, f_or(routes)), true)));
    }

    for (auto& u : nf.univ) snf.univ.push_back(u);
    for (auto& c : nf.omega.clauses) detail::add_clauses(snf.omega, {c});
    return snf;
}

}  // namespace flsat
