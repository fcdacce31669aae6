#pragma once

#include "flsat/normal_form.hpp"

namespace flsat {

enum class BKind { B1, B2, B3, B4, B5, B6, B7, B8 };

// The eight shapes over a unary alphabet plus T, That and equality. pi/pi2
// are full 1-types; mu a quantifier-free unary formula.
struct BasicFormula {
    BKind k;
    Type1 pi = 0, pi2 = 0;
    FormulaPtr mu;
};

struct BasicSet {
    Signature sig;  // unary predicates + T + That + equality, nothing else
    UnaryView view;
    std::vector<BasicFormula> formulas;
    int pad_count = 0;  // trailing padding predicates added by the quadratic transform

    Type1 pad_mask() const {
        Type1 m = 0;
        for (int i = 0; i < pad_count; ++i)
            m |= 1u << (view.count() - 1 - static_cast<size_t>(i));
        return m;
    }
    bool is_proper(Type1 t) const { return (t & pad_mask()) == 0; }
};

inline FormulaPtr basic_to_formula(const BasicSet& bs, const BasicFormula& bf) {
    PredId t = bs.sig.transitive_ids().at(0);
    PredId eq = bs.sig.equality_id();
    auto T = f_atom(t);
    auto EQ = f_atom(eq);
    switch (bf.k) {
        case BKind::B1:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_exists(f_and({bf.mu, T, f_not(EQ)}))));
        case BKind::B2:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_exists(f_and({bf.mu, f_not(T), f_not(EQ)}))));
        case BKind::B3:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_forall(f_implies(type_to_formula(bs.view, bf.pi2), T))));
        case BKind::B4:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_forall(f_implies(type_to_formula(bs.view, bf.pi2), f_not(T)))));
        case BKind::B5:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                                         f_or({EQ, T})))));
        case BKind::B6:
            return f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                      f_forall(f_implies(type_to_formula(bs.view, bf.pi),
                                                         f_or({EQ, f_not(T)})))));
        case BKind::B7: return f_forall(bf.mu);
        case BKind::B8: return f_exists(bf.mu);
    }
    return f_true();
}

inline FormulaPtr basic_set_formula(const BasicSet& bs) {
    std::vector<FormulaPtr> out;
    for (auto& bf : bs.formulas) out.push_back(basic_to_formula(bs, bf));
    return f_and(out);
}

namespace detail {

// literal-level view of a 2-clause against a fixed witness type and control
enum class ClauseFate { True, False, NeedT, NeedNotT };

inline ClauseFate clause_under(const Signature& sig, const UnaryView& view, const FlutedClause& c,
                               Type1 witness, bool eq_value, std::optional<bool> t_value) {
    PredId t = sig.transitive_ids().at(0);
    PredId eq = sig.equality_id();
    bool need_t = false, need_not_t = false;
    for (auto& l : c.lits) {
        if (l.pred == eq) {
            if (l.positive == eq_value) return ClauseFate::True;
            continue;
        }
        if (l.pred == t) {
            if (t_value.has_value()) {
                if (l.positive == *t_value) return ClauseFate::True;
                continue;
            }
            (l.positive ? need_t : need_not_t) = true;
            continue;
        }
        int b = view.bit_of(l.pred);
        if (b < 0) fail("Internal", "non-unary ordinary literal survived the restriction");
        if (((witness >> b) & 1) == l.positive) return ClauseFate::True;
    }
    if (need_t && need_not_t) return ClauseFate::True;
    if (need_t) return ClauseFate::NeedT;
    if (need_not_t) return ClauseFate::NeedNotT;
    return ClauseFate::False;
}

struct BasicEmitter {
    BasicSet& bs;
    std::set<std::string> seen;

    void emit(BasicFormula bf) {
        std::string key = std::to_string(static_cast<int>(bf.k)) + ":" + std::to_string(bf.pi) +
                          ":" + std::to_string(bf.pi2) + ":" +
                          (bf.mu ? print(bs.sig, bf.mu) : "");
        if (seen.insert(key).second) bs.formulas.push_back(std::move(bf));
    }
};

}  // namespace detail

// Spread normal form to basic formulas. Saturation happens per demand with
// the full omega mixed in; the restricted sets then massage into the eight
// shapes by expanding antecedents over 1-types. The not-equal controls become
// B1/B2 demands per antecedent type; the equal controls collapse to unary
// exclusions through That.
inline BasicSet spread_to_basic(const SpreadNormalForm& snf) {
    for (PredId p = 0; p < snf.sig.size(); ++p) {
        const Pred& pr = snf.sig.at(p);
        if (pr.arity > 2) fail("SignatureNotTwoVariable", pr.name);
        if (pr.arity == 0) fail("SignatureNotTwoVariable",
                                "proposition letter " + pr.name + " must be grounded first");
    }

    BasicSet bs;
    std::vector<PredId> remap(snf.sig.preds.size(), -1);
    for (PredId p = 0; p < snf.sig.size(); ++p) {
        const Pred& pr = snf.sig.at(p);
        if (pr.arity == 1) remap[static_cast<size_t>(p)] = bs.sig.add(pr.name, 1, pr.kind);
    }
    {
        auto ts = snf.sig.transitive_ids();
        if (ts.size() != 1) fail("BadSignature", "basic reduction needs exactly one transitive relation");
        if (bs.sig.that_id() < 0) bs.sig.add("That", 1, PredKind::THat);
        remap[static_cast<size_t>(ts[0])] = bs.sig.add(snf.sig.at(ts[0]).name, 2, PredKind::Transitive);
        PredId eq = snf.sig.equality_id();
        PredId neweq = bs.sig.add("=", 2, PredKind::Equality);
        if (eq >= 0) remap[static_cast<size_t>(eq)] = neweq;
    }
    bs.view = UnaryView::of(bs.sig);

    auto remap_formula = [&](const FormulaPtr& f) {
        struct R {
            const std::vector<PredId>& remap;
            FormulaPtr go(const FormulaPtr& g) {
                if (g->kind == FKind::Atom) {
                    PredId q = remap[static_cast<size_t>(g->pred)];
                    if (q < 0) fail("Internal", "unmapped predicate in a unary formula");
                    return f_atom(q);
                }
                if (g->kids.empty()) return g;
                std::vector<FormulaPtr> kids;
                for (auto& k : g->kids) kids.push_back(go(k));
                return mk(g->kind, std::move(kids), -1);
            }
        } r{remap};
        return r.go(f);
    };
    auto remap_clause = [&](const FlutedClause& c) {
        std::vector<FlutedLiteral> ls;
        for (auto& l : c.lits) {
            PredId q = remap[static_cast<size_t>(l.pred)];
            if (q < 0) fail("Internal", "ordinary binary literal survived the restriction");
            ls.push_back({q, l.positive});
        }
        return FlutedClause::of(std::move(ls));
    };

    detail::BasicEmitter out{bs, {}};

    std::vector<Type1> all;
    if (bs.view.count() > 14) fail("BoundExceeded", "basic reduction signature too wide");
    for (Type1 ty = 0; ty <= bs.view.universe(); ++ty) all.push_back(ty);

    auto satisfiable = [&](const FormulaPtr& eta) {
        for (Type1 ty : all)
            if (type_models(bs.view, ty, eta)) return true;
        return false;
    };

    // conjunct family: exists lambda_h
    for (auto& l : snf.lambdas) out.emit({BKind::B8, 0, 0, remap_formula(l)});

    PredId t_old = snf.sig.transitive_ids().at(0);
    PredId eq_old = snf.sig.equality_id();
    size_t nt = snf.univ.size();
    if (nt > 16) fail("BoundExceeded", "too many universal conjuncts");

    // witness demands, one per (i, J)
    for (auto& e : snf.exist) {
        for (uint32_t J = 0; J < (1u << nt); ++J) {
            std::vector<FormulaPtr> etas{remap_formula(e.mu)};
            ClauseSet theta;
            theta.m = 2;
            theta.clauses.insert(FlutedClause::of({{t_old, e.kappa.t_positive}}));
            theta.clauses.insert(FlutedClause::of({{eq_old, e.kappa.eq_positive}}));
            theta.clauses.insert(FlutedClause::of({{e.o, true}}));
            for (auto& c : e.gamma.clauses) theta.clauses.insert(c);
            for (size_t j = 0; j < nt; ++j)
                if ((J >> j) & 1) {
                    etas.push_back(remap_formula(snf.univ[j].nu));
                    for (auto& c : snf.univ[j].delta.clauses) theta.clauses.insert(c);
                }
            for (auto& c : snf.omega.clauses) theta.clauses.insert(c);
            auto eta = detail::fold(f_and(etas));
            if (eta->kind == FKind::False || !satisfiable(eta)) continue;

            auto deg = restrict_clauses(snf.sig, saturate(snf.sig, theta));
            if (deg.has_falsum()) {
                out.emit({BKind::B7, 0, 0, detail::fold(f_not(eta))});
                continue;
            }
            if (!e.kappa.eq_positive) {
                // witness is a distinct element: expand over antecedent types
                std::vector<FormulaPtr> wit;
                bool impossible = false;
                ClauseSet unary_part;
                unary_part.m = 2;
                for (auto& c : deg.clauses) {
                    FlutedClause rc = remap_clause(c);
                    std::vector<FlutedLiteral> keep;
                    bool sat = false;
                    PredId t_new = bs.sig.transitive_ids()[0];
                    PredId eq_new = bs.sig.equality_id();
                    for (auto& l : rc.lits) {
                        if (l.pred == t_new) {
                            if (l.positive == e.kappa.t_positive) sat = true;
                        } else if (l.pred == eq_new) {
                            if (!l.positive) sat = true;  // kappa has !=
                        } else {
                            keep.push_back(l);
                        }
                        if (sat) break;
                    }
                    if (sat) continue;
                    if (keep.empty()) { impossible = true; break; }
                    unary_part.clauses.insert(FlutedClause::of(std::move(keep)));
                }
                if (impossible) {
                    out.emit({BKind::B7, 0, 0, detail::fold(f_not(eta))});
                    continue;
                }
                for (auto& c : unary_part.clauses) wit.push_back(detail::clause_to_formula(c));
                auto mu = detail::fold(f_and(wit));
                for (Type1 pi : all)
                    if (type_models(bs.view, pi, eta))
                        out.emit({e.kappa.t_positive ? BKind::B1 : BKind::B2, pi, 0, mu});
            } else {
                // witness is the element itself: That carries the T sign
                std::vector<FormulaPtr> self;
                PredId that = bs.sig.that_id();
                self.push_back(e.kappa.t_positive ? f_atom(that)
                                                  : static_cast<FormulaPtr>(f_not(f_atom(that))));
                bool impossible = false;
                for (auto& c : deg.clauses) {
                    FlutedClause rc = remap_clause(c);
                    std::vector<FlutedLiteral> keep;
                    bool sat = false;
                    PredId t_new = bs.sig.transitive_ids()[0];
                    PredId eq_new = bs.sig.equality_id();
                    for (auto& l : rc.lits) {
                        if (l.pred == t_new) {
                            // T(a,a) is That(a)
                            keep.push_back({that, l.positive});
                        } else if (l.pred == eq_new) {
                            if (l.positive) sat = true;
                        } else {
                            keep.push_back(l);
                        }
                        if (sat) break;
                    }
                    if (sat) continue;
                    if (keep.empty()) { impossible = true; break; }
                    self.push_back(detail::clause_to_formula(FlutedClause::of(std::move(keep))));
                }
                auto mu = impossible
                              ? detail::fold(f_not(eta))
                              : detail::fold(f_or({f_not(eta), f_and(self)}));
                out.emit({BKind::B7, 0, 0, mu});
            }
        }
    }

    // universal demands, one per J
    for (uint32_t J = 0; J < (1u << nt); ++J) {
        std::vector<FormulaPtr> etas;
        ClauseSet theta;
        theta.m = 2;
        for (size_t j = 0; j < nt; ++j)
            if ((J >> j) & 1) {
                etas.push_back(remap_formula(snf.univ[j].nu));
                for (auto& c : snf.univ[j].delta.clauses) theta.clauses.insert(c);
            }
        for (auto& c : snf.omega.clauses) theta.clauses.insert(c);
        auto eta = detail::fold(f_and(etas));
        if (eta->kind == FKind::False || !satisfiable(eta)) continue;
        auto deg = restrict_clauses(snf.sig, saturate(snf.sig, theta));
        if (deg.has_falsum()) {
            out.emit({BKind::B7, 0, 0, detail::fold(f_not(eta))});
            continue;
        }
        for (auto& c0 : deg.clauses) {
            FlutedClause c = remap_clause(c0);
            for (Type1 pi : all) {
                if (!type_models(bs.view, pi, eta)) continue;
                // pair (a, a): T(a,a) resolves through That
                auto self = detail::clause_under(bs.sig, bs.view, c, pi, true,
                                                 bs.view.self_looped(pi));
                if (self == detail::ClauseFate::False) {
                    out.emit({BKind::B7, 0, 0, detail::fold(f_not(type_to_formula(bs.view, pi)))});
                    continue;
                }
                // pairs (a, b), a != b, b of type pi2
                for (Type1 pi2 : all) {
                    auto fate = detail::clause_under(bs.sig, bs.view, c, pi2, false, std::nullopt);
                    switch (fate) {
                        case detail::ClauseFate::True: break;
                        case detail::ClauseFate::NeedT:
                            out.emit(pi == pi2 ? BasicFormula{BKind::B5, pi, 0, nullptr}
                                               : BasicFormula{BKind::B3, pi, pi2, nullptr});
                            break;
                        case detail::ClauseFate::NeedNotT:
                            out.emit(pi == pi2 ? BasicFormula{BKind::B6, pi, 0, nullptr}
                                               : BasicFormula{BKind::B4, pi, pi2, nullptr});
                            break;
                        case detail::ClauseFate::False:
                            if (pi == pi2) {
                                out.emit({BKind::B5, pi, 0, nullptr});
                                out.emit({BKind::B6, pi, 0, nullptr});
                            } else {
                                out.emit({BKind::B3, pi, pi2, nullptr});
                                out.emit({BKind::B4, pi, pi2, nullptr});
                            }
                            break;
                    }
                }
            }
        }
    }

    // o-disjointness
    for (size_t i = 0; i < snf.o_preds.size(); ++i)
        for (size_t j = i + 1; j < snf.o_preds.size(); ++j) {
            PredId oi = remap[static_cast<size_t>(snf.o_preds[i])];
            PredId oj = remap[static_cast<size_t>(snf.o_preds[j])];
            out.emit({BKind::B7, 0, 0, f_or({f_not(f_atom(oi)), f_not(f_atom(oj))})});
        }

    return bs;
}

// Phi -> Phi*: pads the signature with 2l fresh unary predicates, relativizes
// every formula to the all-negative padding type, and adds the exists-top
// companion. Proper Sigma*-types embed Sigma-types as masks with zero padding
// bits.
inline BasicSet quadratic_transform(const BasicSet& phi) {
    BasicSet out;
    out.sig = phi.sig;
    int l = static_cast<int>(phi.view.count());
    for (int i = 0; i < 2 * l; ++i) out.sig.add_fresh("pad" + std::to_string(i), 1);
    out.view = UnaryView::of(out.sig);
    out.pad_count = 2 * l;

    std::vector<FormulaPtr> nopad;
    for (size_t b = phi.view.count(); b < out.view.count(); ++b)
        nopad.push_back(f_not(f_atom(out.view.preds[b])));
    auto pbar = f_and(nopad);

    for (auto& bf : phi.formulas) {
        switch (bf.k) {
            case BKind::B1:
            case BKind::B2:
                out.formulas.push_back({bf.k, bf.pi, 0, detail::fold(f_and({bf.mu, pbar}))});
                break;
            case BKind::B3:
            case BKind::B4:
                out.formulas.push_back({bf.k, bf.pi, bf.pi2, nullptr});
                break;
            case BKind::B5:
            case BKind::B6:
                out.formulas.push_back({bf.k, bf.pi, 0, nullptr});
                break;
            case BKind::B7:
                out.formulas.push_back({BKind::B7, 0, 0, f_implies(pbar, bf.mu)});
                break;
            case BKind::B8:
                out.formulas.push_back({BKind::B8, 0, 0, detail::fold(f_and({bf.mu, pbar}))});
                break;
        }
    }
    out.formulas.push_back({BKind::B8, 0, 0, pbar});
    return out;
}

// The proper 1-types over the padded signature correspond to the base types
// by dropping the (all-negative) padding bits; as masks the map is identity.
inline std::optional<Type1> proper_to_base(const BasicSet& star, Type1 t) {
    if (!star.is_proper(t)) return std::nullopt;
    return t;
}

inline Type1 base_to_proper(const BasicSet& /*star*/, Type1 t) { return t; }

}  // namespace flsat
