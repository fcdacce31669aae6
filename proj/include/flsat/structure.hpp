#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flsat/formula.hpp"

namespace flsat {

// Finite interpretation. Equality is virtual (the identity), never stored.
// Distinguished transitive relations must be transitive and That, if present,
// must be exactly the diagonal of the single transitive relation; both are
// checked, not assumed.
struct Structure {
    Signature sig;
    int n = 0;
    std::vector<std::vector<uint8_t>> interp;  // per pred, row-major over tuples

    Structure() = default;
    Structure(Signature s, int size) : sig(std::move(s)), n(size) {
        interp.resize(sig.preds.size());
        for (PredId p = 0; p < sig.size(); ++p) {
            if (sig.at(p).kind == PredKind::Equality) continue;
            size_t cells = 1;
            for (int k = 0; k < sig.at(p).arity; ++k) cells *= static_cast<size_t>(n);
            interp[static_cast<size_t>(p)].assign(cells, 0);
        }
    }

    size_t index(PredId p, const std::vector<int>& tuple) const {
        size_t idx = 0;
        for (int v : tuple) idx = idx * static_cast<size_t>(n) + static_cast<size_t>(v);
        (void)p;
        return idx;
    }

    bool get(PredId p, const std::vector<int>& tuple) const {
        if (sig.at(p).kind == PredKind::Equality) return tuple[0] == tuple[1];
        return interp[static_cast<size_t>(p)][index(p, tuple)] != 0;
    }

    void set(PredId p, const std::vector<int>& tuple, bool v) {
        interp[static_cast<size_t>(p)][index(p, tuple)] = v ? 1 : 0;
    }

    bool get0(PredId p) const { return interp[static_cast<size_t>(p)][0] != 0; }
    bool get1(PredId p, int a) const { return interp[static_cast<size_t>(p)][static_cast<size_t>(a)] != 0; }
    bool get2(PredId p, int a, int b) const {
        if (sig.at(p).kind == PredKind::Equality) return a == b;
        return interp[static_cast<size_t>(p)][static_cast<size_t>(a) * n + b] != 0;
    }
    void set1(PredId p, int a, bool v) { interp[static_cast<size_t>(p)][static_cast<size_t>(a)] = v ? 1 : 0; }
    void set2(PredId p, int a, int b, bool v) {
        interp[static_cast<size_t>(p)][static_cast<size_t>(a) * n + b] = v ? 1 : 0;
    }

    void close_transitive(PredId t) {
        for (int k = 0; k < n; ++k)
            for (int a = 0; a < n; ++a) {
                if (!get2(t, a, k)) continue;
                for (int b = 0; b < n; ++b)
                    if (get2(t, k, b)) set2(t, a, b, true);
            }
    }

    void refresh_that() {
        PredId th = sig.that_id();
        if (th < 0) return;
        auto ts = sig.transitive_ids();
        for (int a = 0; a < n; ++a) set1(th, a, get2(ts[0], a, a));
    }
};

struct WellformedReport {
    struct TransViolation {
        PredId t;
        int a, b, c;
    };
    std::vector<TransViolation> transitivity;
    std::vector<int> that_mismatch;
    bool ok() const { return transitivity.empty() && that_mismatch.empty(); }
};

inline WellformedReport check_wellformed(const Structure& s) {
    WellformedReport rep;
    for (PredId t : s.sig.transitive_ids()) {
        for (int a = 0; a < s.n; ++a)
            for (int b = 0; b < s.n; ++b) {
                if (!s.get2(t, a, b)) continue;
                for (int c = 0; c < s.n; ++c)
                    if (s.get2(t, b, c) && !s.get2(t, a, c)) rep.transitivity.push_back({t, a, b, c});
            }
    }
    PredId th = s.sig.that_id();
    if (th >= 0) {
        auto ts = s.sig.transitive_ids();
        if (ts.size() != 1) fail("BadSignature", "That requires exactly one transitive relation");
        for (int a = 0; a < s.n; ++a)
            if (s.get1(th, a) != s.get2(ts[0], a, a)) rep.that_mismatch.push_back(a);
    }
    return rep;
}

namespace detail {
inline bool eval_rec(const Structure& s, const FormulaPtr& f, std::vector<int>& ctx) {
    switch (f->kind) {
        case FKind::True: return true;
        case FKind::False: return false;
        case FKind::Atom: {
            const Pred& p = s.sig.at(f->pred);
            if (p.arity > static_cast<int>(ctx.size())) fail("ContextTooShort", p.name);
            switch (p.arity) {
                case 0: return p.kind == PredKind::Equality ? true : s.get0(f->pred);
                case 1: return s.get1(f->pred, ctx.back());
                case 2: return s.get2(f->pred, ctx[ctx.size() - 2], ctx[ctx.size() - 1]);
                default: {
                    std::vector<int> t(ctx.end() - p.arity, ctx.end());
                    return s.get(f->pred, t);
                }
            }
        }
        case FKind::Not: return !eval_rec(s, f->kids[0], ctx);
        case FKind::And:
            for (auto& k : f->kids)
                if (!eval_rec(s, k, ctx)) return false;
            return true;
        case FKind::Or:
            for (auto& k : f->kids)
                if (eval_rec(s, k, ctx)) return true;
            return false;
        case FKind::Xor: {
            int cnt = 0;
            for (auto& k : f->kids)
                if (eval_rec(s, k, ctx) && ++cnt > 1) return false;
            return cnt == 1;
        }
        case FKind::Implies: return !eval_rec(s, f->kids[0], ctx) || eval_rec(s, f->kids[1], ctx);
        case FKind::Forall:
            for (int a = 0; a < s.n; ++a) {
                ctx.push_back(a);
                bool v = eval_rec(s, f->kids[0], ctx);
                ctx.pop_back();
                if (!v) return false;
            }
            return true;
        case FKind::Exists:
            for (int a = 0; a < s.n; ++a) {
                ctx.push_back(a);
                bool v = eval_rec(s, f->kids[0], ctx);
                ctx.pop_back();
                if (v) return true;
            }
            return false;
    }
    return false;
}

}  // namespace detail

// Standard truth, with an atom of arity k reading the last k context elements.
inline bool eval(const Structure& s, const FormulaPtr& f, std::vector<int> ctx = {}) {
    return detail::eval_rec(s, f, ctx);
}

// Maximal consistent conjunction of fluted m-literals over the signature,
// satisfied by the given tuple. Atoms of arity k read the tuple's last k
// entries; the equality atom reads the last two.
struct FlutedType {
    int m = 0;
    std::vector<PredId> atoms;  // eligible atoms in id order (equality last if m >= 2)
    std::vector<uint8_t> pos;

    std::optional<bool> sign_of(PredId p) const {
        for (size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i] == p) return pos[i] != 0;
        return std::nullopt;
    }

    bool operator==(const FlutedType& o) const { return m == o.m && atoms == o.atoms && pos == o.pos; }
    bool operator<(const FlutedType& o) const {
        if (m != o.m) return m < o.m;
        if (atoms != o.atoms) return atoms < o.atoms;
        return pos < o.pos;
    }
};

inline std::vector<PredId> eligible_atoms(const Signature& sig, int m) {
    std::vector<PredId> out;
    for (PredId p = 0; p < sig.size(); ++p) {
        if (sig.at(p).kind == PredKind::Equality) continue;
        if (sig.at(p).arity <= m) out.push_back(p);
    }
    if (m >= 2 && sig.has_equality()) out.push_back(sig.equality_id());
    return out;
}

inline FlutedType fluted_type_of(const Structure& s, const std::vector<int>& tuple) {
    FlutedType t;
    t.m = static_cast<int>(tuple.size());
    t.atoms = eligible_atoms(s.sig, t.m);
    for (PredId p : t.atoms) {
        int ar = s.sig.at(p).arity;
        std::vector<int> sub(tuple.end() - ar, tuple.end());
        t.pos.push_back(s.get(p, sub) ? 1 : 0);
    }
    return t;
}

}  // namespace flsat
