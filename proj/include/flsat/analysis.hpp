#pragma once

#include <map>
#include <numeric>
#include <set>

#include "flsat/structure.hpp"

namespace flsat {

// Maximal mutually-T-related sets. Blocks are ordered by least element; a
// soliton is a singleton {a} with (a,a) not in T.
struct CliquePartition {
    std::vector<std::vector<int>> blocks;
    std::vector<bool> soliton;

    int block_of(int a) const {
        for (size_t i = 0; i < blocks.size(); ++i)
            for (int x : blocks[i])
                if (x == a) return static_cast<int>(i);
        return -1;
    }
};

inline CliquePartition cliques(const Structure& s, PredId t = -1) {
    if (t < 0) {
        auto ts = s.sig.transitive_ids();
        if (ts.empty()) fail("BadSignature", "cliques need a transitive relation");
        t = ts[0];
    }
    CliquePartition out;
    std::vector<bool> seen(static_cast<size_t>(s.n), false);
    for (int a = 0; a < s.n; ++a) {
        if (seen[static_cast<size_t>(a)]) continue;
        std::vector<int> block{a};
        for (int b = a + 1; b < s.n; ++b)
            if (s.get2(t, a, b) && s.get2(t, b, a)) block.push_back(b);
        for (int x : block) seen[static_cast<size_t>(x)] = true;
        bool sol = block.size() == 1 && !s.get2(t, a, a);
        out.blocks.push_back(std::move(block));
        out.soliton.push_back(sol);
    }
    return out;
}

struct KingReport {
    std::vector<int> kings;
    std::set<FlutedType> royal_types;
};

// A king realizes its fluted 1-type uniquely.
inline KingReport kings(const Structure& s) {
    KingReport out;
    std::map<FlutedType, std::vector<int>> by_type;
    for (int a = 0; a < s.n; ++a) by_type[fluted_type_of(s, {a})].push_back(a);
    for (auto& [ty, elems] : by_type)
        if (elems.size() == 1) {
            out.kings.push_back(elems[0]);
            out.royal_types.insert(ty);
        }
    std::sort(out.kings.begin(), out.kings.end());
    return out;
}

// Quadratic: every clique determined by a pair of 1-types is also the unique
// clique realizing some single 1-type.
inline bool is_quadratic(const Structure& s) {
    auto part = cliques(s);
    int nb = static_cast<int>(part.blocks.size());
    std::map<FlutedType, std::set<int>> blocks_of_type;
    for (int b = 0; b < nb; ++b)
        for (int a : part.blocks[static_cast<size_t>(b)])
            blocks_of_type[fluted_type_of(s, {a})].insert(b);
    std::vector<FlutedType> types;
    for (auto& [ty, bs] : blocks_of_type) types.push_back(ty);
    for (size_t i = 0; i < types.size(); ++i)
        for (size_t j = i + 1; j < types.size(); ++j) {
            std::vector<int> common;
            std::set_intersection(blocks_of_type[types[i]].begin(), blocks_of_type[types[i]].end(),
                                  blocks_of_type[types[j]].begin(), blocks_of_type[types[j]].end(),
                                  std::back_inserter(common));
            if (common.size() != 1) continue;
            bool pinned = false;
            for (auto& [ty, bs] : blocks_of_type)
                if (bs.size() == 1 && *bs.begin() == common[0]) { pinned = true; break; }
            if (!pinned) return false;
        }
    return true;
}

namespace detail {

// Template pairs for the pairs between clones of a non-king c, which the
// 2-type preservation clauses leave open. Clones of a clique member must be
// mutually T-related (they reach each other through the clique mate both
// ways), so the template comes from inside the clique in that case; a
// singleton-clique clone class copies the pattern to the least same-type
// element elsewhere, which is never mutually T-related, keeping solitons
// soliton. Either way the pattern is a realized 2-type whose second
// coordinate has c's 1-type.
struct ClonePattern {
    std::pair<int, int> inc, dec;
};

inline ClonePattern clone_pattern(const Structure& s, const CliquePartition& part, int c) {
    FlutedType ty = fluted_type_of(s, {c});
    int blk = part.block_of(c);
    const auto& block = part.blocks[static_cast<size_t>(blk)];
    if (block.size() >= 2) {
        for (int e : block)
            if (e != c && fluted_type_of(s, {e}) == ty) return {{c, e}, {e, c}};
        int d = block[0] == c ? block[1] : block[0];
        return {{d, c}, {d, c}};
    }
    for (int e = 0; e < s.n; ++e)
        if (e != c && fluted_type_of(s, {e}) == ty) return {{c, e}, {e, c}};
    fail("BadArgument", "clone_pattern called on a king");
}

}  // namespace detail

// Duplicates the non-king part `copies` times, preserving realized 2-types
// and transitivity. copies == 1 returns the structure unchanged.
inline Structure inflate(const Structure& s, int copies) {
    if (copies < 1) fail("BadArgument", "copies must be >= 1");
    if (copies == 1) return s;
    auto rep = check_wellformed(s);
    if (!rep.ok()) fail("NotWellFormed", "inflate requires a well-formed structure");

    auto kr = kings(s);
    std::set<int> king_set(kr.kings.begin(), kr.kings.end());
    std::vector<int> non_kings;
    for (int a = 0; a < s.n; ++a)
        if (!king_set.count(a)) non_kings.push_back(a);
    if (non_kings.empty()) return s;

    auto part = cliques(s);

    // Element j*|non_kings|+k in the extension is copy j+2 of non_kings[k].
    int n2 = s.n + static_cast<int>(non_kings.size()) * (copies - 1);
    Structure out(s.sig, n2);

    // base original element and copy index (originals are copy 1)
    std::vector<int> base(static_cast<size_t>(n2));
    std::vector<int> copy(static_cast<size_t>(n2));
    for (int a = 0; a < s.n; ++a) { base[static_cast<size_t>(a)] = a; copy[static_cast<size_t>(a)] = 1; }
    {
        int id = s.n;
        for (int j = 2; j <= copies; ++j)
            for (int c : non_kings) {
                base[static_cast<size_t>(id)] = c;
                copy[static_cast<size_t>(id)] = j;
                ++id;
            }
    }

    std::map<int, detail::ClonePattern> partner;
    for (int c : non_kings) partner[c] = detail::clone_pattern(s, part, c);

    for (PredId p = 0; p < out.sig.size(); ++p) {
        const Pred& pr = out.sig.at(p);
        if (pr.kind == PredKind::Equality) continue;
        if (pr.arity == 0) {
            out.interp[static_cast<size_t>(p)] = s.interp[static_cast<size_t>(p)];
        } else if (pr.arity == 1) {
            for (int a = 0; a < n2; ++a) out.set1(p, a, s.get1(p, base[static_cast<size_t>(a)]));
        } else if (pr.arity == 2) {
            for (int a = 0; a < n2; ++a)
                for (int b = 0; b < n2; ++b) {
                    if (a == b) {
                        out.set2(p, a, b, s.get2(p, base[static_cast<size_t>(a)], base[static_cast<size_t>(a)]));
                        continue;
                    }
                    int ca = base[static_cast<size_t>(a)], cb = base[static_cast<size_t>(b)];
                    if (ca != cb) {
                        out.set2(p, a, b, s.get2(p, ca, cb));
                    } else {
                        const auto& pat = partner.at(ca);
                        auto [x, y] = copy[static_cast<size_t>(a)] < copy[static_cast<size_t>(b)]
                                          ? pat.inc
                                          : pat.dec;
                        out.set2(p, a, b, s.get2(p, x, y));
                    }
                }
        } else {
            fail("BadSignature", "inflate supports arity <= 2");
        }
    }
    return out;
}

inline std::set<FlutedType> realized_2types(const Structure& s) {
    std::set<FlutedType> out;
    for (int a = 0; a < s.n; ++a)
        for (int b = 0; b < s.n; ++b) out.insert(fluted_type_of(s, {a, b}));
    return out;
}

}  // namespace flsat
