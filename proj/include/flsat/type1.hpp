#pragma once

#include <cstdint>

#include "flsat/structure.hpp"

namespace flsat {

// Compiled view of the arity-1 alphabet of a signature; a Type1 is a fluted
// 1-type as a bitmask over it.
using Type1 = uint32_t;

struct UnaryView {
    std::vector<PredId> preds;
    int that_bit = -1;

    static UnaryView of(const Signature& sig) {
        UnaryView v;
        v.preds = sig.unary_ids();
        if (v.preds.size() > 30) fail("BoundExceeded", "too many unary predicates for 1-type masks");
        for (size_t i = 0; i < v.preds.size(); ++i)
            if (sig.at(v.preds[i]).kind == PredKind::THat) v.that_bit = static_cast<int>(i);
        return v;
    }

    size_t count() const { return preds.size(); }
    Type1 universe() const { return (preds.size() == 32 ? ~0u : (1u << preds.size()) - 1); }

    int bit_of(PredId p) const {
        for (size_t i = 0; i < preds.size(); ++i)
            if (preds[i] == p) return static_cast<int>(i);
        return -1;
    }

    bool self_looped(Type1 t) const { return that_bit >= 0 && ((t >> that_bit) & 1); }
};

inline Type1 type1_of(const UnaryView& v, const Structure& s, int a) {
    Type1 t = 0;
    for (size_t i = 0; i < v.preds.size(); ++i)
        if (s.get1(v.preds[i], a)) t |= 1u << i;
    return t;
}

// Propositional truth of a quantifier-free unary formula under a 1-type.
inline bool type_models(const UnaryView& v, Type1 t, const FormulaPtr& mu) {
    switch (mu->kind) {
        case FKind::True: return true;
        case FKind::False: return false;
        case FKind::Atom: {
            int b = v.bit_of(mu->pred);
            if (b < 0) fail("BadSignature", "non-unary atom in a 1-type context");
            return (t >> b) & 1;
        }
        case FKind::Not: return !type_models(v, t, mu->kids[0]);
        case FKind::And:
            for (auto& k : mu->kids)
                if (!type_models(v, t, k)) return false;
            return true;
        case FKind::Or:
            for (auto& k : mu->kids)
                if (type_models(v, t, k)) return true;
            return false;
        case FKind::Xor: {
            int cnt = 0;
            for (auto& k : mu->kids)
                if (type_models(v, t, k) && ++cnt > 1) return false;
            return cnt == 1;
        }
        case FKind::Implies:
            return !type_models(v, t, mu->kids[0]) || type_models(v, t, mu->kids[1]);
        default:
            fail("BadSignature", "quantifier inside a unary formula");
    }
    return false;
}

inline FormulaPtr type_to_formula(const UnaryView& v, Type1 t) {
    std::vector<FormulaPtr> lits;
    for (size_t i = 0; i < v.preds.size(); ++i) {
        auto a = f_atom(v.preds[i]);
        lits.push_back(((t >> i) & 1) ? a : f_not(a));
    }
    return f_and(lits);
}

inline std::string type_to_string(const Signature& sig, const UnaryView& v, Type1 t) {
    std::string s;
    for (size_t i = 0; i < v.preds.size(); ++i) {
        s += ((t >> i) & 1) ? '+' : '-';
        s += sig.at(v.preds[i]).name;
    }
    return s.empty() ? "<empty>" : s;
}

inline Type1 type_from_string(const Signature& sig, const UnaryView& v, const std::string& s) {
    Type1 t = 0;
    size_t i = 0;
    std::vector<bool> seen(v.preds.size(), false);
    while (i < s.size()) {
        if (s[i] != '+' && s[i] != '-') fail("SyntaxError", "type literal must start with + or -");
        bool pos = s[i++] == '+';
        size_t start = i;
        while (i < s.size() && s[i] != '+' && s[i] != '-') ++i;
        std::string name = s.substr(start, i - start);
        PredId p = sig.find(name);
        int b = p >= 0 ? v.bit_of(p) : -1;
        if (b < 0) fail("UnknownPredicate", name + " is not a unary predicate");
        seen[static_cast<size_t>(b)] = true;
        if (pos) t |= 1u << b;
    }
    for (size_t b = 0; b < seen.size(); ++b)
        if (!seen[b]) fail("SyntaxError", "type literal missing predicate " + sig.at(v.preds[b]).name);
    return t;
}

}  // namespace flsat
