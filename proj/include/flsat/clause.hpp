#pragma once

#include <optional>
#include <set>

#include "flsat/structure.hpp"

namespace flsat {

// Literals are (predicate, sign); the equality atom takes part like any other
// non-ordinary atom. A clause is a sorted duplicate-free literal set; the
// empty clause is falsum.
struct FlutedLiteral {
    PredId pred;
    bool positive;
    bool operator<(const FlutedLiteral& o) const {
        return pred != o.pred ? pred < o.pred : positive < o.positive;
    }
    bool operator==(const FlutedLiteral& o) const {
        return pred == o.pred && positive == o.positive;
    }
};

struct FlutedClause {
    std::vector<FlutedLiteral> lits;

    static FlutedClause of(std::vector<FlutedLiteral> ls) {
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        return {std::move(ls)};
    }

    bool empty() const { return lits.empty(); }

    bool tautological() const {
        for (size_t i = 0; i + 1 < lits.size(); ++i)
            if (lits[i].pred == lits[i + 1].pred && lits[i].positive != lits[i + 1].positive)
                return true;
        return false;
    }

    bool contains(const FlutedLiteral& l) const {
        return std::binary_search(lits.begin(), lits.end(), l);
    }

    bool subsumes(const FlutedClause& o) const {
        return std::includes(o.lits.begin(), o.lits.end(), lits.begin(), lits.end());
    }

    bool operator<(const FlutedClause& o) const { return lits < o.lits; }
    bool operator==(const FlutedClause& o) const { return lits == o.lits; }
};

struct ClauseSet {
    int m = 2;
    std::set<FlutedClause> clauses;

    bool has_falsum() const { return clauses.count(FlutedClause{}) != 0; }
};

inline int clause_max_arity(const Signature& sig, const FlutedClause& c) {
    int m = 0;
    for (auto& l : c.lits) m = std::max(m, sig.at(l.pred).arity);
    return m;
}

namespace detail {

// Atoms eligible for mo-resolution between g (positive) and d (negative):
// ordinary, and of maximal arity within both premises.
inline std::vector<PredId> mo_eligible(const Signature& sig, const FlutedClause& g,
                                       const FlutedClause& d) {
    int mg = clause_max_arity(sig, g), md = clause_max_arity(sig, d);
    std::vector<PredId> out;
    for (auto& l : g.lits) {
        if (!l.positive) continue;
        const Pred& p = sig.at(l.pred);
        if (p.kind != PredKind::Ordinary) continue;
        if (p.arity != mg || p.arity != md) continue;
        if (d.contains({l.pred, false})) out.push_back(l.pred);
    }
    return out;
}

inline FlutedClause resolve_on(const FlutedClause& g, const FlutedClause& d, PredId a) {
    std::vector<FlutedLiteral> ls;
    for (auto& l : g.lits)
        if (!(l.pred == a && l.positive)) ls.push_back(l);
    for (auto& l : d.lits)
        if (!(l.pred == a && !l.positive)) ls.push_back(l);
    return FlutedClause::of(std::move(ls));
}

}  // namespace detail

// The maximal ordinary resolvent of g and d on the least eligible atom.
inline std::optional<FlutedClause> mo_resolve(const Signature& sig, const FlutedClause& g,
                                              const FlutedClause& d, int /*m*/ = 2) {
    auto atoms = detail::mo_eligible(sig, g, d);
    if (atoms.empty()) return std::nullopt;
    return detail::resolve_on(g, d, atoms[0]);
}

// Gamma*: least superset closed under mo-resolution (on every eligible
// atom). Tautologies are dropped; falsum short-circuits.
inline ClauseSet saturate(const Signature& sig, const ClauseSet& gamma) {
    ClauseSet out;
    out.m = gamma.m;
    std::vector<FlutedClause> work;
    for (auto& c : gamma.clauses) {
        if (c.tautological()) continue;
        if (out.clauses.insert(c).second) work.push_back(c);
    }
    while (!work.empty()) {
        if (out.has_falsum()) break;
        FlutedClause g = work.back();
        work.pop_back();
        std::vector<FlutedClause> snapshot(out.clauses.begin(), out.clauses.end());
        for (auto& d : snapshot) {
            for (int dir = 0; dir < 2; ++dir) {
                const FlutedClause& pos = dir == 0 ? g : d;
                const FlutedClause& neg = dir == 0 ? d : g;
                for (PredId a : detail::mo_eligible(sig, pos, neg)) {
                    FlutedClause r = detail::resolve_on(pos, neg, a);
                    if (r.tautological()) continue;
                    if (out.clauses.insert(r).second) work.push_back(r);
                }
            }
        }
    }
    return out;
}

// Gamma-degree: drop saturated clauses that involve ordinary predicates of
// arity m.
inline ClauseSet restrict_clauses(const Signature& sig, const ClauseSet& gstar) {
    ClauseSet out;
    out.m = gstar.m;
    for (auto& c : gstar.clauses) {
        bool keep = true;
        for (auto& l : c.lits) {
            const Pred& p = sig.at(l.pred);
            if (p.kind == PredKind::Ordinary && p.arity == gstar.m) { keep = false; break; }
        }
        if (keep) out.clauses.insert(c);
    }
    return out;
}

// A (possibly partial) type violates a clause when it contradicts every
// literal; the empty clause is violated outright.
inline bool type_violates(const FlutedType& t, const FlutedClause& c) {
    for (auto& l : c.lits) {
        auto s = t.sign_of(l.pred);
        if (!s.has_value() || *s == l.positive) return false;
    }
    return true;
}

inline bool type_satisfies_all(const FlutedType& t, const ClauseSet& cs) {
    for (auto& c : cs.clauses) {
        bool sat = false;
        for (auto& l : c.lits) {
            auto s = t.sign_of(l.pred);
            if (s.has_value() && *s == l.positive) { sat = true; break; }
        }
        if (!sat) return false;
    }
    return true;
}

// Signature of Gamma-degree: every eligible atom except ordinary predicates
// of arity m.
inline std::vector<PredId> restricted_atoms(const Signature& sig, int m) {
    std::vector<PredId> out;
    for (PredId p : eligible_atoms(sig, m)) {
        const Pred& pr = sig.at(p);
        if (pr.kind == PredKind::Ordinary && pr.arity == m) continue;
        out.push_back(p);
    }
    return out;
}

// Extends a type over the restricted signature to a full type consistent
// with Gamma, by the greedy level-extension descent: a partial type that does
// not violate Gamma* always has a child that does not either.
inline std::optional<FlutedType> extend_type(const Signature& sig, const ClauseSet& gamma,
                                             const FlutedType& tau) {
    ClauseSet gstar = saturate(sig, gamma);
    ClauseSet gdeg = restrict_clauses(sig, gstar);
    for (auto& c : gdeg.clauses)
        if (type_violates(tau, c)) return std::nullopt;

    FlutedType full = tau;
    std::vector<std::pair<std::string, PredId>> todo;
    for (PredId p : sig.ordinary_ids_of_arity(gamma.m))
        todo.push_back({sig.at(p).name, p});
    std::sort(todo.begin(), todo.end());

    auto violates_some = [&](const FlutedType& t) {
        for (auto& c : gstar.clauses)
            if (type_violates(t, c)) return true;
        return false;
    };
    if (violates_some(full)) return std::nullopt;

    for (auto& [name, p] : todo) {
        if (full.sign_of(p).has_value()) continue;
        FlutedType pos = full;
        pos.atoms.push_back(p);
        pos.pos.push_back(1);
        if (!violates_some(pos)) {
            full = pos;
            continue;
        }
        FlutedType neg = full;
        neg.atoms.push_back(p);
        neg.pos.push_back(0);
        if (violates_some(neg)) return std::nullopt;
        full = neg;
    }
    // normalize atom order
    std::vector<std::pair<PredId, uint8_t>> entries;
    for (size_t i = 0; i < full.atoms.size(); ++i) entries.push_back({full.atoms[i], full.pos[i]});
    std::sort(entries.begin(), entries.end());
    FlutedType out;
    out.m = gamma.m;
    for (auto& [a, s] : entries) {
        out.atoms.push_back(a);
        out.pos.push_back(s);
    }
    return out;
}

}  // namespace flsat
