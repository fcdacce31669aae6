#pragma once

#include <functional>

#include "flsat/certificate.hpp"

namespace flsat {

struct CellAddress {
    int omega_idx = 0;
    int i = 0;  // copy index; 0 is the only copy when xi meets V
    bool operator==(const CellAddress& o) const { return omega_idx == o.omega_idx && i == o.i; }
    bool operator<(const CellAddress& o) const {
        return omega_idx != o.omega_idx ? omega_idx < o.omega_idx : i < o.i;
    }
};

struct ElementTag {
    Type1 pi = 0;
    CellAddress cell;
    int polarity = 0;  // 0: the a+ element, 1: the a- partner
};

struct SynthesizedPrefix {
    Structure st;
    std::vector<ElementTag> tags;
    int depth = 0;
    std::vector<std::pair<CellAddress, CellAddress>> t1_edges, t2_edges;
    std::vector<CellAddress> cells;
};

namespace detail {

inline bool xi_meets_v(const CliqueSuperType& e, const std::set<Type1>& v) {
    for (auto& [t, c] : e.xi.counts)
        if (v.count(t)) return true;
    return false;
}

inline bool subset_of(const CliqueSuperType& e, const std::set<Type1>& target) {
    for (auto& [t, c] : e.xi.counts)
        if (!target.count(t)) return false;
    for (Type1 t : e.pi)
        if (!target.count(t)) return false;
    return true;
}

}  // namespace detail

// Finite prefix of the certificate model: every cell with copy index at most
// depth, t0 total inside non-soliton cells, t1 per its three clauses, t2 from
// the order, T the transitive closure, That refreshed from the diagonal.
inline SynthesizedPrefix synthesize(const Certificate& c, int depth) {
    if (!check_conditions(c).empty()) fail("InvalidCertificate", "synthesize");
    SynthesizedPrefix out;
    out.depth = depth;

    for (int e = 0; e < static_cast<int>(c.omega.size()); ++e) {
        int imax = detail::xi_meets_v(c.omega[static_cast<size_t>(e)], c.v) ? 0 : depth;
        for (int i = 0; i <= imax; ++i) out.cells.push_back({e, i});
    }

    std::map<CellAddress, std::vector<int>> members;
    for (auto& cell : out.cells) {
        const auto& e = c.omega[static_cast<size_t>(cell.omega_idx)];
        for (auto& [t, cnt] : e.xi.counts)
            for (int p = 0; p < cnt; ++p) {
                members[cell].push_back(static_cast<int>(out.tags.size()));
                out.tags.push_back({t, cell, p});
            }
    }

    out.st = Structure(c.sig, static_cast<int>(out.tags.size()));
    for (size_t a = 0; a < out.tags.size(); ++a)
        for (size_t b = 0; b < c.view.count(); ++b)
            out.st.set1(c.view.preds[b], static_cast<int>(a), (out.tags[a].pi >> b) & 1);

    PredId T = c.sig.transitive_ids().at(0);
    auto entry = [&](const CellAddress& cell) -> const CliqueSuperType& {
        return c.omega[static_cast<size_t>(cell.omega_idx)];
    };

    // t0: total inside non-soliton cells
    for (auto& cell : out.cells) {
        if (entry(cell).xi.soliton(c.view)) continue;
        for (int a : members[cell])
            for (int b : members[cell]) out.st.set2(T, a, b, true);
    }
    // t1 and t2 are cell-level
    for (auto& u : out.cells)
        for (auto& v : out.cells) {
            const auto& eu = entry(u);
            const auto& ev = entry(v);
            bool t1 = detail::subset_of(ev, eu.pi);
            if (t1 && !detail::xi_meets_v(ev, c.v) && v.i < u.i + 2) t1 = false;
            if (t1) {
                for (auto& [t, cnt] : eu.xi.counts)
                    if (c.v.count(t) && ev.pi.count(t)) t1 = false;
            }
            if (t1) {
                out.t1_edges.push_back({u, v});
                for (int a : members[u])
                    for (int b : members[v]) out.st.set2(T, a, b, true);
            }
            if (!(u == v)) {
                bool t2 = false;
                for (auto& [x, cx] : eu.xi.counts)
                    for (auto& [y, cy] : ev.xi.counts)
                        if (c.ll.count({x, y})) t2 = true;
                if (t2) {
                    out.t2_edges.push_back({u, v});
                    for (int a : members[u])
                        for (int b : members[v]) out.st.set2(T, a, b, true);
                }
            }
        }
    out.st.close_transitive(T);
    out.st.refresh_that();
    return out;
}

struct PrefixReport {
    std::vector<std::string> problems;
    int unchecked_existentials = 0;
    bool clean() const { return problems.empty(); }
};

// Desk-scale verification of the construction lemmas on the prefix: no
// intra-cell t1 edge, the t1/t2 cell digraph is acyclic, That matches the
// diagonal, T is its own closure, the universal shapes hold outright, and the
// existential shapes hold for elements deep enough to own in-prefix
// witnesses. Existentials at the boundary are reported unchecked, not failed.
inline PrefixReport verify_prefix(const SynthesizedPrefix& p, const Certificate& c,
                                  const BasicSet& phi) {
    PrefixReport rep;
    for (auto& [u, v] : p.t1_edges)
        if (u == v)
            rep.problems.push_back("intra-cell t1 edge at entry " + std::to_string(u.omega_idx) +
                                   " copy " + std::to_string(u.i));

    // cycle check over the cell digraph
    {
        std::map<CellAddress, std::vector<CellAddress>> adj;
        for (auto& [u, v] : p.t1_edges) adj[u].push_back(v);
        for (auto& [u, v] : p.t2_edges) adj[u].push_back(v);
        std::map<CellAddress, int> state;  // 0 new, 1 open, 2 done
        std::function<bool(const CellAddress&)> cyc = [&](const CellAddress& u) {
            state[u] = 1;
            for (auto& v : adj[u]) {
                if (state[v] == 1) return true;
                if (state[v] == 0 && cyc(v)) return true;
            }
            state[u] = 2;
            return false;
        };
        for (auto& cell : p.cells)
            if (state[cell] == 0 && cyc(cell)) {
                rep.problems.push_back("cell digraph has a t1/t2 cycle");
                break;
            }
    }

    auto wf = check_wellformed(p.st);
    if (!wf.transitivity.empty()) rep.problems.push_back("T is not transitively closed");
    if (!wf.that_mismatch.empty()) rep.problems.push_back("That disagrees with the diagonal");

    PredId T = c.sig.transitive_ids().at(0);
    for (auto& f : phi.formulas) {
        switch (f.k) {
            case BKind::B3:
            case BKind::B4:
            case BKind::B5:
            case BKind::B6:
            case BKind::B7:
                if (!eval(p.st, basic_to_formula(phi, f)))
                    rep.problems.push_back("universal shape fails on the prefix");
                break;
            case BKind::B8: {
                bool ok = false;
                for (int a = 0; a < p.st.n && !ok; ++a)
                    ok = type_models(c.view, type1_of(c.view, p.st, a), f.mu);
                if (!ok) rep.problems.push_back("witness demand fails on the prefix");
                break;
            }
            case BKind::B1:
            case BKind::B2: {
                for (int a = 0; a < p.st.n; ++a) {
                    if (type1_of(c.view, p.st, a) != f.pi) continue;
                    if (p.tags[static_cast<size_t>(a)].cell.i > p.depth - 2) {
                        ++rep.unchecked_existentials;
                        continue;
                    }
                    bool ok = false;
                    for (int b = 0; b < p.st.n && !ok; ++b) {
                        if (b == a) continue;
                        bool t = p.st.get2(T, a, b);
                        if (t != (f.k == BKind::B1)) continue;
                        ok = type_models(c.view, type1_of(c.view, p.st, b), f.mu);
                    }
                    if (!ok)
                        rep.problems.push_back("existential shape fails for an interior element");
                }
                break;
            }
        }
    }
    return rep;
}

}  // namespace flsat
