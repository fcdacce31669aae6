#pragma once

#include "flsat/analysis.hpp"
#include "flsat/basic.hpp"

namespace flsat {

// Multiset of 1-types with counting truncated at 2.
struct CliqueType {
    std::map<Type1, int> counts;

    bool has(Type1 pi) const { return counts.count(pi) != 0; }
    int of(Type1 pi) const {
        auto it = counts.find(pi);
        return it == counts.end() ? 0 : it->second;
    }
    bool soliton(const UnaryView& v) const {
        for (auto& [pi, c] : counts)
            if (!v.self_looped(pi)) return true;
        return false;
    }
    bool operator==(const CliqueType& o) const { return counts == o.counts; }
    bool operator<(const CliqueType& o) const { return counts < o.counts; }
};

struct CliqueSuperType {
    CliqueType xi;
    std::set<Type1> pi;
    bool operator==(const CliqueSuperType& o) const { return xi == o.xi && pi == o.pi; }
    bool operator<(const CliqueSuperType& o) const {
        return xi == o.xi ? pi < o.pi : xi < o.xi;
    }
};

struct Certificate {
    Signature sig;
    UnaryView view;
    std::vector<CliqueSuperType> omega;
    std::set<std::pair<Type1, Type1>> ll;
    std::set<Type1> v;
};

struct CertViolation {
    std::string condition;
    std::string detail;
};

inline std::vector<CertViolation> check_conditions(const Certificate& c) {
    std::vector<CertViolation> out;
    auto ts = [&](Type1 t) { return type_to_string(c.sig, c.view, t); };

    for (auto& [a, b] : c.ll)
        if (a == b) out.push_back({"ll", "reflexive pair " + ts(a)});
    for (auto& [a, b] : c.ll)
        for (auto& [b2, d] : c.ll)
            if (b == b2 && !c.ll.count({a, d}))
                out.push_back({"ll", "missing transitive pair " + ts(a) + " << " + ts(d)});

    for (size_t i = 0; i < c.omega.size(); ++i) {
        const auto& [xi, Pi] = c.omega[i];
        // C1
        for (Type1 pi2 : Pi) {
            bool ok = false;
            for (auto& [xi2, Pi2] : c.omega) {
                if (!xi2.has(pi2)) continue;
                bool subset = true;
                for (auto& [t, cnt] : xi2.counts)
                    if (!Pi.count(t)) subset = false;
                for (Type1 t : Pi2)
                    if (!Pi.count(t)) subset = false;
                bool meet = false;
                for (auto& [t, cnt] : xi.counts)
                    if (c.v.count(t) && Pi2.count(t)) meet = true;
                if (subset && !meet) { ok = true; break; }
            }
            if (!ok)
                out.push_back({"C1", "entry " + std::to_string(i) + " reaches " + ts(pi2) +
                                         " with no closed realizer"});
        }
        // C4
        if (xi.soliton(c.view)) {
            if (xi.counts.size() != 1 || xi.counts.begin()->second != 1)
                out.push_back({"C4", "soliton entry " + std::to_string(i) + " is not a lone singleton"});
        }
        // C5
        for (auto& [pi2, cnt] : xi.counts)
            for (auto& [a, b] : c.ll)
                if (b == pi2 && Pi.count(a))
                    out.push_back({"C5", ts(a) + " << " + ts(pi2) + " but " + ts(a) +
                                             " sits in entry " + std::to_string(i) + "'s reach"});
        // C6
        for (auto& [a, ca] : xi.counts)
            for (auto& [b, cb] : xi.counts)
                if (c.ll.count({a, b})) {
                    bool meet = false;
                    for (auto& [t, cnt] : xi.counts)
                        if (c.v.count(t)) meet = true;
                    if (!meet)
                        out.push_back({"C6", "entry " + std::to_string(i) +
                                                 " carries an ordered pair without a unique-clique type"});
                }
    }
    // C2
    for (size_t i = 0; i < c.omega.size(); ++i)
        for (size_t j = 0; j < c.omega.size(); ++j) {
            if (i == j) continue;
            const auto& [xi, Pi] = c.omega[i];
            const auto& [xj, Pj] = c.omega[j];
            bool linked = false;
            for (auto& [a, ca] : xi.counts)
                for (auto& [b, cb] : xj.counts)
                    if (c.ll.count({a, b})) linked = true;
            if (!linked) continue;
            for (auto& [t, cnt] : xj.counts)
                if (!Pi.count(t))
                    out.push_back({"C2", "entries " + std::to_string(i) + "," + std::to_string(j) +
                                             " linked but " + ts(t) + " not absorbed"});
            for (Type1 t : Pj)
                if (!Pi.count(t))
                    out.push_back({"C2", "entries " + std::to_string(i) + "," + std::to_string(j) +
                                             " linked but reach " + ts(t) + " not absorbed"});
        }
    // C3
    for (size_t i = 0; i < c.omega.size(); ++i)
        for (size_t j = i + 1; j < c.omega.size(); ++j) {
            bool share = false;
            for (auto& [t, cnt] : c.omega[i].xi.counts)
                if (c.v.count(t) && c.omega[j].xi.has(t)) share = true;
            if (share && !(c.omega[i] == c.omega[j]))
                out.push_back({"C3", "entries " + std::to_string(i) + "," + std::to_string(j) +
                                         " share a unique-clique type"});
        }
    return out;
}

struct SatisfactionOptions {
    // The displayed text of case 3(iii) quantifies the first entry over
    // pi in Pi; the matching proof step uses pi in xi. The proof reading is
    // the default.
    bool case3_literal_text = false;
};

inline bool cert_satisfies(const Certificate& c, const BasicSet& bs, const BasicFormula& f,
                           const SatisfactionOptions& opts = {}) {
    auto models = [&](Type1 t, const FormulaPtr& mu) { return type_models(c.view, t, mu); };
    auto occurs = [&](Type1 t) {
        for (auto& e : c.omega)
            if (e.xi.has(t)) return true;
        return false;
    };
    (void)bs;
    switch (f.k) {
        case BKind::B1: {
            for (auto& [xi, Pi] : c.omega) {
                if (!xi.has(f.pi)) continue;
                bool ok = models(f.pi, f.mu) && xi.of(f.pi) == 2;
                if (!ok)
                    for (auto& [t, cnt] : xi.counts)
                        if (t != f.pi && models(t, f.mu)) { ok = true; break; }
                if (!ok)
                    for (Type1 t : Pi)
                        if (models(t, f.mu)) { ok = true; break; }
                if (!ok) return false;
            }
            return true;
        }
        case BKind::B2: {
            for (auto& [xi, Pi] : c.omega) {
                if (!xi.has(f.pi)) continue;
                bool ok = false;
                for (auto& e2 : c.omega) {
                    bool wit = false;
                    for (auto& [t, cnt] : e2.xi.counts)
                        if (models(t, f.mu)) wit = true;
                    if (!wit) continue;
                    bool bad_link = false;
                    for (Type1 a : Pi)
                        for (auto& [b, cnt] : e2.xi.counts)
                            if (c.ll.count({a, b})) bad_link = true;
                    if (bad_link) continue;
                    bool meet = false;
                    for (auto& [t, cnt] : e2.xi.counts)
                        if (Pi.count(t) && c.v.count(t)) meet = true;
                    if (meet) continue;
                    if (e2.xi == xi && e2.pi == Pi) {
                        bool self_v = false;
                        for (auto& [t, cnt] : xi.counts)
                            if (c.v.count(t)) self_v = true;
                        if (self_v) continue;
                    }
                    ok = true;
                    break;
                }
                if (!ok) return false;
            }
            return true;
        }
        case BKind::B3: {
            if (!occurs(f.pi) || !occurs(f.pi2)) return true;
            if (c.ll.count({f.pi, f.pi2})) return true;
            const CliqueSuperType* hit = nullptr;
            for (auto& e : c.omega) {
                bool first = opts.case3_literal_text ? e.pi.count(f.pi) != 0 : e.xi.has(f.pi);
                if (!first) continue;
                for (auto& e2 : c.omega) {
                    if (!e2.xi.has(f.pi2)) continue;
                    if (!(e == e2)) return false;
                    hit = &e;
                }
            }
            if (!hit) return true;
            for (auto& [t, cnt] : hit->xi.counts)
                if (c.v.count(t)) return true;
            return false;
        }
        case BKind::B4: {
            for (auto& [xi, Pi] : c.omega) {
                if (!xi.has(f.pi)) continue;
                if (xi.has(f.pi2) || Pi.count(f.pi2)) return false;
            }
            return true;
        }
        case BKind::B5: {
            const CliqueSuperType* hit = nullptr;
            for (auto& e : c.omega) {
                if (!e.xi.has(f.pi)) continue;
                if (hit) return false;
                hit = &e;
            }
            if (!hit) return true;
            for (auto& [t, cnt] : hit->xi.counts)
                if (c.v.count(t)) return true;
            return false;
        }
        case BKind::B6: {
            for (auto& [xi, Pi] : c.omega) {
                if (xi.has(f.pi) && Pi.count(f.pi)) return false;
                if (xi.of(f.pi) > 1) return false;
            }
            return true;
        }
        case BKind::B7: {
            for (auto& [xi, Pi] : c.omega)
                for (auto& [t, cnt] : xi.counts)
                    if (!models(t, f.mu)) return false;
            return true;
        }
        case BKind::B8: {
            for (auto& [xi, Pi] : c.omega)
                for (auto& [t, cnt] : xi.counts)
                    if (models(t, f.mu)) return true;
            return false;
        }
    }
    return false;
}

inline bool cert_satisfies_all(const Certificate& c, const BasicSet& bs,
                               const SatisfactionOptions& opts = {}) {
    for (auto& f : bs.formulas)
        if (!cert_satisfies(c, bs, f, opts)) return false;
    return true;
}

// Extraction: realized clique-super-types, the forced-link order, and the
// types realized in exactly one clique.
inline Certificate certificate_of(const Structure& s) {
    if (!check_wellformed(s).ok()) fail("NotWellFormed", "certificate extraction");
    if (!is_quadratic(s)) fail("NotQuadratic", "certificate extraction");
    if (!s.sig.nullary_ids().empty()) fail("BadSignature", "proposition letters have no 1-type");
    Certificate c;
    c.sig = s.sig;
    c.view = UnaryView::of(s.sig);
    PredId T = s.sig.transitive_ids().at(0);

    auto part = cliques(s);
    std::set<CliqueSuperType> seen;
    for (auto& block : part.blocks) {
        CliqueSuperType e;
        for (int a : block) {
            Type1 t = type1_of(c.view, s, a);
            int& cnt = e.xi.counts[t];
            cnt = std::min(2, cnt + 1);
        }
        int rep = block[0];
        for (int b = 0; b < s.n; ++b)
            if (s.get2(T, rep, b) && !s.get2(T, b, rep)) e.pi.insert(type1_of(c.view, s, b));
        if (seen.insert(e).second) c.omega.push_back(e);
    }
    std::sort(c.omega.begin(), c.omega.end());

    std::map<Type1, std::vector<int>> elems;
    for (int a = 0; a < s.n; ++a) elems[type1_of(c.view, s, a)].push_back(a);
    auto all_t = [&](Type1 x, Type1 y) {
        for (int a : elems[x])
            for (int b : elems[y])
                if (a != b && !s.get2(T, a, b)) return false;
        return true;
    };
    for (auto& [x, ex] : elems)
        for (auto& [y, ey] : elems) {
            if (x == y) continue;
            if (all_t(x, y) && !all_t(y, x)) c.ll.insert({x, y});
        }

    std::map<Type1, std::set<int>> blocks_of;
    for (size_t b = 0; b < part.blocks.size(); ++b)
        for (int a : part.blocks[b]) blocks_of[type1_of(c.view, s, a)].insert(static_cast<int>(b));
    for (auto& [t, bsx] : blocks_of)
        if (bsx.size() == 1) c.v.insert(t);
    return c;
}

// ---------------------------------------------------------------------------
// certificate search

enum class SearchStatus { Sat, UnsatAtCap, BudgetExhausted };

struct CertSearchOptions {
    int max_omega = 4;
    int max_support = 4;           // distinct 1-types per clique entry
    uint64_t node_budget = 200000; // DFS expansions
    SatisfactionOptions sat;
};

struct CertSearchResult {
    SearchStatus status = SearchStatus::UnsatAtCap;
    std::optional<Certificate> cert;
    uint64_t explored = 0;
};

namespace detail {

struct CertSearch {
    const BasicSet& bs;
    CertSearchOptions opts;
    std::vector<Type1> pool;          // B7-allowed candidate types (proper in padded mode)
    std::vector<Type1> marker_pool;   // improper allowed types with a self loop
    Certificate cur;
    uint64_t explored = 0;
    bool budget_hit = false;
    std::set<std::string> failed;

    explicit CertSearch(const BasicSet& set, const CertSearchOptions& o) : bs(set), opts(o) {
        cur.sig = bs.sig;
        cur.view = bs.view;
        if (bs.view.count() > 22) fail("BoundExceeded", "certificate search signature too wide");
        Type1 uni = bs.view.universe();
        for (uint64_t t = 0; t <= uni; ++t) {
            Type1 ty = static_cast<Type1>(t);
            bool ok = true;
            for (auto& f : bs.formulas)
                if (f.k == BKind::B7 && !type_models(bs.view, ty, f.mu)) { ok = false; break; }
            if (!ok) continue;
            if (bs.pad_count > 0 && !bs.is_proper(ty)) {
                if (bs.view.self_looped(ty)) marker_pool.push_back(ty);
            } else {
                pool.push_back(ty);
            }
        }
    }

    bool allowed(Type1 t) const {
        return std::binary_search(pool.begin(), pool.end(), t) ||
               std::binary_search(marker_pool.begin(), marker_pool.end(), t);
    }

    std::string state_key() const {
        std::vector<std::string> nodes;
        for (auto& e : cur.omega) {
            std::string s = "{";
            for (auto& [t, c] : e.xi.counts) s += std::to_string(t) + "*" + std::to_string(c) + ",";
            s += "|";
            for (Type1 t : e.pi) s += std::to_string(t) + ",";
            s += "}";
            nodes.push_back(s);
        }
        std::sort(nodes.begin(), nodes.end());
        std::string key;
        for (auto& s : nodes) key += s;
        key += "L";
        for (auto& [a, b] : cur.ll) key += std::to_string(a) + ">" + std::to_string(b) + ",";
        key += "V";
        for (Type1 t : cur.v) key += std::to_string(t) + ",";
        return key;
    }

    // ---- hard constraints: violations no extension can repair -------------

    bool hard_violation() const {
        for (auto& [a, b] : cur.ll)
            if (a == b) return true;
        for (auto& e : cur.omega)
            if (e.xi.soliton(cur.view) && (e.xi.counts.size() != 1 || e.xi.counts.begin()->second != 1))
                return true;
        // C5
        for (auto& e : cur.omega)
            for (auto& [pi2, cnt] : e.xi.counts)
                for (auto& [a, b] : cur.ll)
                    if (b == pi2 && e.pi.count(a)) return true;
        // C3
        for (size_t i = 0; i < cur.omega.size(); ++i)
            for (size_t j = i + 1; j < cur.omega.size(); ++j)
                for (auto& [t, cnt] : cur.omega[i].xi.counts)
                    if (cur.v.count(t) && cur.omega[j].xi.has(t)) return true;
        // B4 / B6 / B5-multiplicity / B7
        for (auto& f : bs.formulas) {
            if (f.k == BKind::B4 && !cert_satisfies(cur, bs, f, opts.sat)) return true;
            if (f.k == BKind::B6 && !cert_satisfies(cur, bs, f, opts.sat)) return true;
            if (f.k == BKind::B5) {
                int hits = 0;
                for (auto& e : cur.omega)
                    if (e.xi.has(f.pi)) ++hits;
                if (hits > 1) return true;
            }
        }
        return false;
    }

    // ---- moves -------------------------------------------------------------

    struct Move {
        enum Kind { AddTypeToXi, BumpCount, AddToPi, NewNode, AddLL, AddV, AddMarker, GrowPi } kind;
        size_t node = 0;
        Type1 a = 0, b = 0;
        std::set<Type1> grow;
    };

    bool apply(const Move& m) {
        switch (m.kind) {
            case Move::AddTypeToXi: {
                auto& xi = cur.omega[m.node].xi;
                if (xi.has(m.a)) return false;
                if (static_cast<int>(xi.counts.size()) >= opts.max_support) return false;
                xi.counts[m.a] = 1;
                return true;
            }
            case Move::BumpCount: {
                auto& xi = cur.omega[m.node].xi;
                if (xi.of(m.a) != 1) return false;
                xi.counts[m.a] = 2;
                return true;
            }
            case Move::AddToPi:
                return cur.omega[m.node].pi.insert(m.a).second;
            case Move::NewNode: {
                if (static_cast<int>(cur.omega.size()) >= opts.max_omega) return false;
                CliqueSuperType e;
                e.xi.counts[m.a] = 1;
                cur.omega.push_back(e);
                return true;
            }
            case Move::AddLL: {
                if (cur.ll.count({m.a, m.b}) || m.a == m.b) return false;
                // transitive closure of the insertion
                std::set<std::pair<Type1, Type1>> next = cur.ll;
                next.insert({m.a, m.b});
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (auto& p : next)
                        for (auto& q : next)
                            if (p.second == q.first && !next.count({p.first, q.second})) {
                                next.insert({p.first, q.second});
                                changed = true;
                            }
                }
                for (auto& p : next)
                    if (p.first == p.second) return false;
                cur.ll = std::move(next);
                return true;
            }
            case Move::AddV:
                return cur.v.insert(m.a).second;
            case Move::AddMarker: {
                auto& xi = cur.omega[m.node].xi;
                if (xi.soliton(cur.view)) return false;
                if (static_cast<int>(xi.counts.size()) >= opts.max_support + 1) return false;
                xi.counts[m.a] = 1;
                cur.v.insert(m.a);
                return true;
            }
            case Move::GrowPi: {
                bool any = false;
                for (Type1 t : m.grow) any |= cur.omega[m.node].pi.insert(t).second;
                return any;
            }
        }
        return false;
    }

    Type1 next_marker() const {
        for (Type1 m : marker_pool) {
            bool used = false;
            for (auto& e : cur.omega)
                if (e.xi.has(m)) used = true;
            if (!used) return m;
        }
        return 0;
    }

    std::vector<Type1> candidates(const FormulaPtr& mu) const {
        std::vector<Type1> out;
        for (Type1 t : pool)
            if (type_models(bs.view, t, mu)) out.push_back(t);
        return out;
    }

    void vrepair_moves(size_t node, std::vector<Move>& moves) const {
        // give the entry a unique-clique type: mark one of its own types
        // realized nowhere else, or attach a fresh padding marker
        for (auto& [t, cnt] : cur.omega[node].xi.counts) {
            bool elsewhere = false;
            for (size_t j = 0; j < cur.omega.size(); ++j)
                if (j != node && cur.omega[j].xi.has(t)) elsewhere = true;
            if (!elsewhere && !cur.v.count(t)) moves.push_back({Move::AddV, node, t});
        }
        if (!cur.omega[node].xi.soliton(cur.view)) {
            Type1 m = next_marker();
            if (m) moves.push_back({Move::AddMarker, node, m});
        }
    }

    // First unmet obligation and its repair moves; empty move list with
    // found=true means the obligation cannot be repaired.
    bool next_obligation(std::vector<Move>& moves) {
        // B8 demands
        for (auto& f : bs.formulas) {
            if (f.k != BKind::B8 || cert_satisfies(cur, bs, f, opts.sat)) continue;
            for (Type1 t : candidates(f.mu)) {
                for (size_t u = 0; u < cur.omega.size(); ++u)
                    moves.push_back({Move::AddTypeToXi, u, t});
                moves.push_back({Move::NewNode, 0, t});
            }
            return true;
        }
        // C1 demands
        for (size_t u = 0; u < cur.omega.size(); ++u) {
            for (Type1 pi2 : cur.omega[u].pi) {
                bool met = false;
                for (auto& e2 : cur.omega) {
                    if (!e2.xi.has(pi2)) continue;
                    bool subset = true;
                    for (auto& [t, cnt] : e2.xi.counts)
                        if (!cur.omega[u].pi.count(t)) subset = false;
                    for (Type1 t : e2.pi)
                        if (!cur.omega[u].pi.count(t)) subset = false;
                    bool meet = false;
                    for (auto& [t, cnt] : cur.omega[u].xi.counts)
                        if (cur.v.count(t) && e2.pi.count(t)) meet = true;
                    if (subset && !meet) { met = true; break; }
                }
                if (met) continue;
                // repair: realize pi2 somewhere suitable
                for (size_t w = 0; w < cur.omega.size(); ++w) {
                    if (cur.omega[w].xi.has(pi2)) {
                        std::set<Type1> need;
                        for (auto& [t, cnt] : cur.omega[w].xi.counts)
                            if (!cur.omega[u].pi.count(t)) need.insert(t);
                        for (Type1 t : cur.omega[w].pi)
                            if (!cur.omega[u].pi.count(t)) need.insert(t);
                        if (!need.empty()) moves.push_back({Move::GrowPi, u, 0, 0, need});
                    } else {
                        moves.push_back({Move::AddTypeToXi, w, pi2});
                    }
                }
                moves.push_back({Move::NewNode, 0, pi2});
                return true;
            }
        }
        // B1 demands
        for (auto& f : bs.formulas) {
            if (f.k != BKind::B1) continue;
            for (size_t u = 0; u < cur.omega.size(); ++u) {
                auto& e = cur.omega[u];
                if (!e.xi.has(f.pi)) continue;
                bool ok = type_models(bs.view, f.pi, f.mu) && e.xi.of(f.pi) == 2;
                if (!ok)
                    for (auto& [t, cnt] : e.xi.counts)
                        if (t != f.pi && type_models(bs.view, t, f.mu)) ok = true;
                if (!ok)
                    for (Type1 t : e.pi)
                        if (type_models(bs.view, t, f.mu)) ok = true;
                if (ok) continue;
                if (type_models(bs.view, f.pi, f.mu)) moves.push_back({Move::BumpCount, u, f.pi});
                for (Type1 t : candidates(f.mu)) {
                    if (t != f.pi) moves.push_back({Move::AddTypeToXi, u, t});
                    moves.push_back({Move::AddToPi, u, t});
                }
                return true;
            }
        }
        // B2 demands
        for (auto& f : bs.formulas) {
            if (f.k != BKind::B2 || cert_satisfies(cur, bs, f, opts.sat)) continue;
            for (Type1 t : candidates(f.mu)) {
                for (size_t w = 0; w < cur.omega.size(); ++w)
                    moves.push_back({Move::AddTypeToXi, w, t});
                moves.push_back({Move::NewNode, 0, t});
            }
            return true;
        }
        // B3 demands
        for (auto& f : bs.formulas) {
            if (f.k != BKind::B3 || cert_satisfies(cur, bs, f, opts.sat)) continue;
            moves.push_back({Move::AddLL, 0, f.pi, f.pi2});
            // single-clique route: if one entry carries both, give it a marker
            for (size_t u = 0; u < cur.omega.size(); ++u)
                if (cur.omega[u].xi.has(f.pi) && cur.omega[u].xi.has(f.pi2))
                    vrepair_moves(u, moves);
            return true;
        }
        // B5 demands (single entry, needs a unique-clique type)
        for (auto& f : bs.formulas) {
            if (f.k != BKind::B5 || cert_satisfies(cur, bs, f, opts.sat)) continue;
            for (size_t u = 0; u < cur.omega.size(); ++u)
                if (cur.omega[u].xi.has(f.pi)) vrepair_moves(u, moves);
            return true;
        }
        // C6 repairs
        for (size_t u = 0; u < cur.omega.size(); ++u) {
            auto& e = cur.omega[u];
            bool needs = false;
            for (auto& [a, ca] : e.xi.counts)
                for (auto& [b, cb] : e.xi.counts)
                    if (cur.ll.count({a, b})) needs = true;
            if (!needs) continue;
            bool meet = false;
            for (auto& [t, cnt] : e.xi.counts)
                if (cur.v.count(t)) meet = true;
            if (meet) continue;
            vrepair_moves(u, moves);
            return true;
        }
        // C2 closure
        for (size_t i = 0; i < cur.omega.size(); ++i)
            for (size_t j = 0; j < cur.omega.size(); ++j) {
                if (i == j) continue;
                bool linked = false;
                for (auto& [a, ca] : cur.omega[i].xi.counts)
                    for (auto& [b, cb] : cur.omega[j].xi.counts)
                        if (cur.ll.count({a, b})) linked = true;
                if (!linked) continue;
                std::set<Type1> need;
                for (auto& [t, cnt] : cur.omega[j].xi.counts)
                    if (!cur.omega[i].pi.count(t)) need.insert(t);
                for (Type1 t : cur.omega[j].pi)
                    if (!cur.omega[i].pi.count(t)) need.insert(t);
                if (need.empty()) continue;
                moves.push_back({Move::GrowPi, i, 0, 0, need});
                return true;
            }
        return false;
    }

    bool dfs() {
        if (explored >= opts.node_budget) { budget_hit = true; return false; }
        ++explored;
        if (hard_violation()) return false;
        std::string key = state_key();
        if (failed.count(key)) return false;

        std::vector<Move> moves;
        bool open = next_obligation(moves);
        if (!open) {
            // everything structural discharged; the full validators decide
            if (check_conditions(cur).empty() && cert_satisfies_all(cur, bs, opts.sat)) return true;
            failed.insert(key);
            return false;
        }
        Certificate snapshot = cur;
        for (auto& m : moves) {
            if (!apply(m)) { cur = snapshot; continue; }
            if (dfs()) return true;
            cur = snapshot;
        }
        failed.insert(key);
        return false;
    }
};

}  // namespace detail

// Goal-directed backtracking over certificates, iterative deepening on the
// number of clique-super-types. A returned certificate always passes both
// validators; unsat_at_cap is relative to the cap and the searched family.
inline CertSearchResult search(const BasicSet& bs, const CertSearchOptions& opts = {}) {
    CertSearchResult out;
    for (int cap = 1; cap <= opts.max_omega; ++cap) {
        detail::CertSearch s(bs, opts);
        s.opts.max_omega = cap;
        if (s.dfs()) {
            if (!check_conditions(s.cur).empty() || !cert_satisfies_all(s.cur, bs, opts.sat))
                fail("Internal", "search returned an invalid certificate");
            out.status = SearchStatus::Sat;
            out.cert = s.cur;
            out.explored += s.explored;
            return out;
        }
        out.explored += s.explored;
        if (s.budget_hit) {
            out.status = SearchStatus::BudgetExhausted;
            return out;
        }
    }
    out.status = SearchStatus::UnsatAtCap;
    return out;
}

}  // namespace flsat
